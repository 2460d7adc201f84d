#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "heston/estimation.hpp"
#include "heston/sensitivity.hpp"

namespace heston {

/// Relative errors divide by max(price, kRelativeFloor * K).
inline constexpr double kRelativeFloor = 1e-3;

struct ImpactSurfaces {
    std::array<Surface, 4> per_param;  // s_i * Sen_i for kappa, theta, gamma, rho
    Surface eps_bound;                 // sum of per_param
    Surface eps_quadratic;             // sqrt(grad* Sigma grad); zero when no Sigma was given
    Surface eps_lambda;                // s_lambda * Sen_lambda, kept out of eps_bound
    Surface relative;                  // eps_bound / max(price, floor)
};

/// Per-node sqrt(v* Sigma v) with v the (kappa, theta, gamma, rho) sensitivities.
Surface impact_quadratic(const SensitivitySet& sens, const Eigen::Matrix4d& sigma);
double quadratic_impact(const Eigen::Vector4d& gradient, const Eigen::Matrix4d& sigma);

ImpactSurfaces impact_bound(const SensitivitySet& sens, const std::array<double, 4>& sds, const Surface& price,
                            double strike, double s_lambda = 0.0);

/// impact_bound plus the quadratic form for the given covariance.
ImpactSurfaces impact_surfaces(const SensitivitySet& sens, const ErrorModel& errors, const Surface& price,
                               double strike, double s_lambda = 0.0);

struct PricingRun {
    PriceSurface price;
    SensitivitySet sens;
};

/// One price solve plus the five sensitivity solves sharing its factorization.
PricingRun price_with_sensitivities(const Grid& grid, const HestonParams& p, const MarketEnv& env,
                                    const CallOption& option);

using PricingPipeline = std::function<PricingRun(const HestonParams&)>;

struct SweepResult {
    ImpactSurfaces worst;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

/// Evaluates the impact bound at every point of a density^4 subgrid of the box (density 1 is the
/// box center) and keeps node-wise maxima. Infeasible subgrid points are skipped and counted.
/// `center` supplies the field the box does not cover (mu).
SweepResult sweep_box(const std::array<Interval, 4>& box, int density, const HestonParams& center,
                      const std::array<double, 4>& sds, double strike, const PricingPipeline& pipeline,
                      double s_lambda = 0.0, unsigned threads = 1);

}  // namespace heston
