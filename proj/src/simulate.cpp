#include "heston/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace heston {

CorrelatedNormals::CorrelatedNormals(double rho, std::uint64_t seed, std::uint64_t stream)
    : rho_(rho), complement_(std::sqrt(1.0 - rho * rho)) {
    // One independent engine per (seed, stream) so parallel paths never share state.
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

std::pair<double, double> CorrelatedNormals::next() {
    const double w = normal_(engine_);
    const double w_perp = normal_(engine_);
    return {w, rho_ * w + complement_ * w_perp};
}

FinePath simulate_path(const HestonParams& p, double x0, double y0, double horizon, double delta,
                       std::uint64_t seed, std::uint64_t stream) {
    require_feasible(p);
    if (!(delta > 0.0)) throw Error(ErrorCategory::InvalidArgument, "time step must be > 0");
    if (!(delta <= horizon * (1.0 + 1e-12))) {
        throw Error(ErrorCategory::InvalidArgument, "time step exceeds the horizon");
    }
    if (!(x0 > 0.0) || !(y0 > 0.0)) {
        throw Error(ErrorCategory::InvalidArgument, "initial price and variance must be > 0");
    }

    const auto steps = static_cast<std::size_t>(std::ceil(horizon / delta - 1e-9));
    FinePath path;
    path.step = delta;
    path.seed = seed;
    path.x_values.resize(steps + 1);
    path.y_values.resize(steps + 1);

    CorrelatedNormals noise(p.rho, seed, stream);
    const double sqrt_delta = std::sqrt(delta);
    double log_x = std::log(x0);
    double y = y0;
    path.x_values[0] = x0;
    path.y_values[0] = y0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const auto [dw, db] = noise.next();
        const double y_pos = std::max(y, 0.0);
        const double vol = std::sqrt(y_pos);
        log_x += (p.mu - 0.5 * y_pos) * delta + vol * sqrt_delta * dw;
        y += p.kappa * (p.theta - y_pos) * delta + p.gamma * vol * sqrt_delta * db;
        path.x_values[k] = std::exp(log_x);
        path.y_values[k] = std::max(y, 0.0);
    }
    return path;
}

ObservationSeries subsample(const FinePath& path, double T) {
    if (!(T > 0.0) || !(path.step > 0.0)) {
        throw Error(ErrorCategory::InvalidArgument, "sampling steps must be > 0");
    }
    const double ratio = T / path.step;
    const double stride_f = std::round(ratio);
    if (stride_f < 1.0 || std::abs(ratio - stride_f) > 1e-9 * ratio) {
        std::ostringstream os;
        os << "sampling step " << T << " is not an integer multiple of the path step " << path.step;
        throw Error(ErrorCategory::InvalidArgument, os.str());
    }
    const auto stride = static_cast<std::size_t>(stride_f);
    ObservationSeries series;
    series.step = T;
    for (std::size_t k = 0; k < path.x_values.size(); k += stride) {
        series.prices.push_back(path.x_values[k]);
        series.squared_vols.push_back(path.y_values[k]);
    }
    return series;
}

}  // namespace heston
