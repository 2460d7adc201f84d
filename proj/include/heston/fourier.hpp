#pragma once

#include <functional>

#include "heston/model.hpp"
#include "heston/sensitivity.hpp"

namespace heston {

struct QuadratureConfig {
    double z_max = 200.0;
    int nodes = 512;
    double tolerance = 1e-6;

    void validate() const;
};

/// Semi-analytic call price x P1 - K exp(-r tau) P2 from the characteristic-function
/// representation, with the continuous-logarithm ("little trap") form of the exponent.
/// The z-integral uses Gauss-Legendre on [0, z_hi], where z_hi is z_max doubled until the
/// integrand envelope falls below 1e-14, with `nodes` scaled to keep the node density. The node
/// count is then doubled until the result moves by less than `tolerance` relative (floor
/// 1e-6 * K); failure after six doublings is a Numerical error.
///
/// The closed form needs an affine variance drift, so env.lambda_risk must be 0.
double fourier_call_price(double x, double y, double tau, const HestonParams& p, const MarketEnv& env,
                          double strike, const QuadratureConfig& quad = {});

using Pricer = std::function<double(const HestonParams&, const MarketEnv&)>;

/// Central difference (price(p + h) - price(p - h)) / (2h) with h = h_rel * |p| (h_rel when the
/// parameter is 0), or `h_abs` when positive. Both bumped points must be feasible.
double bump_gradient(Parameter which, const Pricer& pricer, const HestonParams& p, const MarketEnv& env,
                     double h_rel = 1e-2, double h_abs = 0.0);

double parameter_value(Parameter which, const HestonParams& p, const MarketEnv& env);
void set_parameter(Parameter which, HestonParams& p, MarketEnv& env, double value);

}  // namespace heston
