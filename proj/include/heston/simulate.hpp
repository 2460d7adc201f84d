#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "heston/model.hpp"

namespace heston {

/// Finely discretized trajectory of (X_t, Y_t) on a uniform time step.
struct FinePath {
    double step = 0.0;
    std::vector<double> x_values;
    std::vector<double> y_values;
    std::uint64_t seed = 0;
};

/// Standard normal pairs (W, B) with correlation rho, B = rho W + sqrt(1 - rho^2) W'.
class CorrelatedNormals {
public:
    CorrelatedNormals(double rho, std::uint64_t seed, std::uint64_t stream = 0);

    std::pair<double, double> next();

private:
    double rho_;
    double complement_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Euler scheme with full truncation of the variance: max(Y, 0) feeds the drift and the
/// diffusion, the untruncated state is carried forward, and max(Y, 0) is stored. The price
/// is advanced in log space so it stays strictly positive.
///
/// The path has ceil(horizon / delta) + 1 points. Output is a pure function of the inputs
/// and (seed, stream).
FinePath simulate_path(const HestonParams& p, double x0, double y0, double horizon, double delta,
                       std::uint64_t seed, std::uint64_t stream = 0);

/// Keeps every (T / path.step)-th point. T must be an integer multiple of the fine step up to a
/// relative tolerance of 1e-9.
ObservationSeries subsample(const FinePath& path, double T);

}  // namespace heston
