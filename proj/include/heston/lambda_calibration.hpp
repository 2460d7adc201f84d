#pragma once

#include <cstddef>
#include <vector>

#include "heston/pde.hpp"

namespace heston {

/// A benchmark option observed on days k = 1..D of its life, D = maturity / T. Day D is the
/// maturity date itself.
struct BenchmarkOption {
    CallOption option;
    std::vector<double> quotes;        // mid prices Omega_j(kT)
    std::vector<double> spots;         // X_kT
    std::vector<double> squared_vols;  // Y_kT
    double median_price = 0.0;         // p_j

    std::size_t days() const { return quotes.size(); }
    void validate(double T) const;
};

/// Median with the midpoint convention for even sizes.
double median(std::vector<double> values);

BenchmarkOption make_benchmark(const CallOption& option, std::vector<double> quotes, std::vector<double> spots,
                               std::vector<double> squared_vols);

/// Spatial grid shared by every benchmark PDE; the time grid follows each option's maturity
/// with `steps_per_day` steps per observation step T.
struct CalibrationGrid {
    double x_min = 100.0;
    double x_max = 2800.0;
    double y_max = 1.0;
    int m = 90;
    int n = 80;
    int steps_per_day = 1;
    double T = kTradingDay;

    Grid grid_for(double maturity) const;
};

/// sqrt((T / tau) sum_k (prediction_k - quote_k)^2), predictions read off the given price surface
/// at (X_kT, Y_kT, tau - kT).
double rms_prediction_error(const BenchmarkOption& option, const PriceSurface& surface, double T);

/// Solves the pricing PDE at env.lambda_risk and evaluates the RMS prediction error.
double rms_prediction_error(const BenchmarkOption& option, const HestonParams& p, const MarketEnv& env,
                            const CalibrationGrid& grid);

/// RMS_j(L) / p_j for every option j (rows) and candidate L (columns). One factorization per
/// (maturity, L) pair is shared by every option with that maturity.
struct RatioTable {
    std::vector<double> L_grid;
    std::vector<std::vector<double>> ratios;  // ratios[j][l]
};

RatioTable build_ratio_table(const std::vector<BenchmarkOption>& pool, const HestonParams& p, double r,
                             const std::vector<double>& L_grid, const CalibrationGrid& grid);

struct PredErrCurve {
    std::vector<double> L_grid;
    std::vector<double> values;
    double argmin = 0.0;
};

/// Median over the selected options of the ratio at each candidate L, minimized with ties going
/// to the smallest L.
PredErrCurve curve_from_table(const RatioTable& table, const std::vector<std::size_t>& subset);
PredErrCurve curve_from_table(const RatioTable& table);

double prederr(double L, const std::vector<BenchmarkOption>& pool, const HestonParams& p, double r,
               const CalibrationGrid& grid);

PredErrCurve estimate_lambda(const std::vector<BenchmarkOption>& pool, const HestonParams& p, double r,
                             const std::vector<double>& L_grid, const CalibrationGrid& grid);

inline constexpr std::size_t kMaxSubsets = 100000;

/// Mean of |lambda_hat(Q) - lambda_hat| over every subset Q of the given size.
double lambda_error_bootstrap(const RatioTable& table, std::size_t subset_size);
double lambda_error_bootstrap(const std::vector<BenchmarkOption>& pool, std::size_t subset_size,
                              const HestonParams& p, double r, const std::vector<double>& L_grid,
                              const CalibrationGrid& grid);

/// Candidate grid start, start + step, ..., up to end inclusive (within rounding).
std::vector<double> arithmetic_grid(double start, double step, double end);

}  // namespace heston
