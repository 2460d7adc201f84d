#pragma once

#include <cstdint>
#include <vector>

#include "heston/lambda_calibration.hpp"
#include "heston/simulate.hpp"

namespace heston::fixtures {

/// Benchmark options whose quotes are the model's own PDE prices at lambda_star along one
/// simulated underlying path. Every option starts on day 0 and is quoted on days 1..D.
inline std::vector<BenchmarkOption> synthetic_pool(const HestonParams& p, double r, double lambda_star,
                                                   const CalibrationGrid& grid, const std::vector<double>& strikes,
                                                   const std::vector<int>& maturity_days, std::uint64_t seed,
                                                   double x0 = 1426.0) {
    int longest = 0;
    for (int d : maturity_days) longest = std::max(longest, d);
    HestonParams physical = p;
    physical.mu = 0.05;
    const auto path = simulate_path(physical, x0, p.theta, longest * grid.T, grid.T / 20.0, seed);
    const auto series = subsample(path, grid.T);

    std::vector<BenchmarkOption> pool;
    const MarketEnv env{r, lambda_star};
    for (int days : maturity_days) {
        const double maturity = days * grid.T;
        const TimeStepper stepper(assemble_operator(grid.grid_for(maturity), p, env));
        for (double k : strikes) {
            const CallOption option{k, maturity};
            const auto surface = solve_price(stepper, option);
            std::vector<double> quotes, spots, vols;
            for (int d = 1; d <= days; ++d) {
                const double x = series.prices[d];
                const double y = series.squared_vols[d];
                spots.push_back(x);
                vols.push_back(y);
                quotes.push_back(price_at(surface, x, y, std::max(maturity - d * grid.T, 0.0)));
            }
            pool.push_back(make_benchmark(option, std::move(quotes), std::move(spots), std::move(vols)));
        }
    }
    return pool;
}

}  // namespace heston::fixtures
