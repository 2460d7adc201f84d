#include "heston/lambda_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace heston {

void BenchmarkOption::validate(double T) const {
    option.validate();
    if (quotes.empty() || quotes.size() != spots.size() || quotes.size() != squared_vols.size()) {
        throw Error(ErrorCategory::InvalidArgument, "benchmark quotes and underlying series are misaligned");
    }
    const double days_f = option.maturity / T;
    if (std::abs(days_f - std::round(days_f)) > 1e-6 || static_cast<std::size_t>(std::round(days_f)) != quotes.size()) {
        std::ostringstream os;
        os << "benchmark with maturity " << option.maturity << " needs one quote per day (" << days_f
           << " days), got " << quotes.size();
        throw Error(ErrorCategory::InvalidArgument, os.str());
    }
    if (!(median_price > 0.0)) throw Error(ErrorCategory::InvalidArgument, "benchmark median price must be > 0");
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorCategory::InvalidArgument, "median of an empty set");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

BenchmarkOption make_benchmark(const CallOption& option, std::vector<double> quotes, std::vector<double> spots,
                               std::vector<double> squared_vols) {
    BenchmarkOption b;
    b.option = option;
    b.median_price = median(quotes);
    b.quotes = std::move(quotes);
    b.spots = std::move(spots);
    b.squared_vols = std::move(squared_vols);
    return b;
}

Grid CalibrationGrid::grid_for(double maturity) const {
    const double days = std::round(maturity / T);
    if (days < 1.0 || std::abs(maturity / T - days) > 1e-6) {
        throw Error(ErrorCategory::InvalidArgument, "maturity is not a whole number of observation steps");
    }
    Grid g{x_min, x_max, y_max, maturity, m, n, static_cast<int>(days) * steps_per_day};
    g.validate();
    return g;
}

double rms_prediction_error(const BenchmarkOption& option, const PriceSurface& surface, double T) {
    option.validate(T);
    const Grid& g = surface.grid();
    const double tau = option.option.maturity;
    if (std::abs(g.tau - tau) > 1e-12 * std::max(1.0, tau)) {
        throw Error(ErrorCategory::InvalidArgument, "price surface horizon differs from the option maturity");
    }
    double sum = 0.0;
    for (std::size_t d = 0; d < option.days(); ++d) {
        const double ttm = std::max(tau - static_cast<double>(d + 1) * T, 0.0);
        const double slots = ttm / g.dt();
        if (std::abs(slots - std::round(slots)) > 1e-6) {
            throw Error(ErrorCategory::InvalidArgument, "observation days do not fall on PDE time slices");
        }
        const double predicted = price_at(surface, option.spots[d], option.squared_vols[d], ttm);
        const double err = predicted - option.quotes[d];
        sum += err * err;
    }
    return std::sqrt(T / tau * sum);
}

double rms_prediction_error(const BenchmarkOption& option, const HestonParams& p, const MarketEnv& env,
                            const CalibrationGrid& grid) {
    const auto op = assemble_operator(grid.grid_for(option.option.maturity), p, env);
    return rms_prediction_error(option, solve_price(op, option.option), grid.T);
}

RatioTable build_ratio_table(const std::vector<BenchmarkOption>& pool, const HestonParams& p, double r,
                             const std::vector<double>& L_grid, const CalibrationGrid& grid) {
    if (pool.empty()) throw Error(ErrorCategory::InvalidArgument, "benchmark pool is empty");
    if (L_grid.empty()) throw Error(ErrorCategory::InvalidArgument, "candidate lambda grid is empty");
    for (double L : L_grid) {
        if (!(L >= 0.0)) throw Error(ErrorCategory::InvalidArgument, "candidate lambda values must be >= 0");
    }
    for (const auto& b : pool) b.validate(grid.T);

    std::map<double, std::vector<std::size_t>> by_maturity;
    for (std::size_t j = 0; j < pool.size(); ++j) by_maturity[pool[j].option.maturity].push_back(j);

    RatioTable table;
    table.L_grid = L_grid;
    table.ratios.assign(pool.size(), std::vector<double>(L_grid.size(), 0.0));
    for (std::size_t l = 0; l < L_grid.size(); ++l) {
        const MarketEnv env{r, L_grid[l]};
        for (const auto& [maturity, members] : by_maturity) {
            const TimeStepper stepper(assemble_operator(grid.grid_for(maturity), p, env));
            for (std::size_t j : members) {
                const auto surface = solve_price(stepper, pool[j].option);
                table.ratios[j][l] = rms_prediction_error(pool[j], surface, grid.T) / pool[j].median_price;
            }
        }
    }
    return table;
}

PredErrCurve curve_from_table(const RatioTable& table, const std::vector<std::size_t>& subset) {
    if (subset.empty()) throw Error(ErrorCategory::InvalidArgument, "benchmark subset is empty");
    PredErrCurve curve;
    curve.L_grid = table.L_grid;
    curve.values.resize(table.L_grid.size());
    std::vector<double> column(subset.size());
    double best = 0.0;
    bool have_best = false;
    for (std::size_t l = 0; l < table.L_grid.size(); ++l) {
        for (std::size_t q = 0; q < subset.size(); ++q) column[q] = table.ratios.at(subset[q])[l];
        const double value = median(column);
        curve.values[l] = value;
        const double L = table.L_grid[l];
        if (!have_best || value < best || (value == best && L < curve.argmin)) {
            best = value;
            curve.argmin = L;
            have_best = true;
        }
    }
    return curve;
}

PredErrCurve curve_from_table(const RatioTable& table) {
    std::vector<std::size_t> all(table.ratios.size());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    return curve_from_table(table, all);
}

double prederr(double L, const std::vector<BenchmarkOption>& pool, const HestonParams& p, double r,
               const CalibrationGrid& grid) {
    return curve_from_table(build_ratio_table(pool, p, r, {L}, grid)).values.front();
}

PredErrCurve estimate_lambda(const std::vector<BenchmarkOption>& pool, const HestonParams& p, double r,
                             const std::vector<double>& L_grid, const CalibrationGrid& grid) {
    return curve_from_table(build_ratio_table(pool, p, r, L_grid, grid));
}

namespace {

double binomial(std::size_t n, std::size_t k) {
    double out = 1.0;
    for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(out);
}

}  // namespace

double lambda_error_bootstrap(const RatioTable& table, std::size_t subset_size) {
    const std::size_t q = table.ratios.size();
    if (subset_size < 1 || subset_size >= q) {
        throw Error(ErrorCategory::InvalidArgument, "subset size must be in [1, pool size)");
    }
    if (binomial(q, subset_size) > static_cast<double>(kMaxSubsets)) {
        throw Error(ErrorCategory::InvalidArgument, "too many subsets to enumerate; use sampling instead");
    }
    const double full = curve_from_table(table).argmin;

    std::vector<std::size_t> subset(subset_size);
    for (std::size_t i = 0; i < subset_size; ++i) subset[i] = i;
    double total = 0.0;
    std::size_t count = 0;
    while (true) {
        total += std::abs(curve_from_table(table, subset).argmin - full);
        ++count;
        // Next combination in lexicographic order.
        std::size_t i = subset_size;
        while (i > 0 && subset[i - 1] == q - subset_size + (i - 1)) --i;
        if (i == 0) break;
        ++subset[i - 1];
        for (std::size_t t = i; t < subset_size; ++t) subset[t] = subset[t - 1] + 1;
    }
    return total / static_cast<double>(count);
}

double lambda_error_bootstrap(const std::vector<BenchmarkOption>& pool, std::size_t subset_size,
                              const HestonParams& p, double r, const std::vector<double>& L_grid,
                              const CalibrationGrid& grid) {
    if (subset_size < 1 || subset_size >= pool.size()) {
        throw Error(ErrorCategory::InvalidArgument, "subset size must be in [1, pool size)");
    }
    return lambda_error_bootstrap(build_ratio_table(pool, p, r, L_grid, grid), subset_size);
}

std::vector<double> arithmetic_grid(double start, double step, double end) {
    if (!(step > 0.0) || !(end >= start)) throw Error(ErrorCategory::InvalidArgument, "invalid candidate grid");
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

}  // namespace heston
