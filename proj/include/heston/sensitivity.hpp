#pragma once

#include <array>
#include <string_view>

#include "heston/pde.hpp"

namespace heston {

enum class Parameter { Kappa = 0, Theta = 1, Gamma = 2, Rho = 3, Lambda = 4 };

inline constexpr std::array<Parameter, 5> kAllParameters{Parameter::Kappa, Parameter::Theta, Parameter::Gamma,
                                                         Parameter::Rho, Parameter::Lambda};

std::string_view parameter_name(Parameter p);
Parameter parse_parameter(std::string_view name);

/// Discrete derivatives of a price surface on every node and slice, using the operator's own
/// stencils: central d_y and d_yy, the seven-point d_xy, upwind d_y on j = 0, the x_max ghost
/// node g(m+1, j) = g(m-1, j) + 2 dx * far_x_slope, and the stored y_max row. The Dirichlet
/// column i = 0 and the y_max row carry one-sided values that never feed an unknown.
struct DerivativeFields {
    Surface dy_g;
    Surface dyy_g;
    Surface dxy_g;
};

DerivativeFields derivative_fields(const Surface& price, double far_x_slope = 1.0);

/// Per-node source of the sensitivity PDE (d/dt - L) d_p g = rhs:
///   kappa: (theta - y) g_y        theta: kappa g_y
///   gamma: gamma y g_yy + rho x y g_xy - lambda sqrt(y) g_y
///   rho:   gamma x y g_xy         lambda: -gamma sqrt(y) g_y
Surface sensitivity_rhs(Parameter which, const DerivativeFields& fields, const HestonParams& p,
                        const MarketEnv& env);

/// Boundary data q of D d_p g = q on y = 0: theta g_y for kappa, kappa g_y for theta, 0 otherwise.
double boundary_source(Parameter which, const HestonParams& p, double dy_g_at_y0);

/// Time-steps the sensitivity PDE with the price operator: zero initial slice, zero Dirichlet
/// column, homogeneous Neumann far boundaries, and the time-slice-k forcing on the step that
/// lands on slice k. Rows j = 0 take the boundary data derived from `fields`.
Surface solve_sensitivity(Parameter which, const TimeStepper& stepper, const Surface& rhs,
                          const DerivativeFields& fields);

struct SensitivitySet {
    std::array<Surface, 5> signed_fields;

    const Surface& derivative(Parameter p) const { return signed_fields[static_cast<std::size_t>(p)]; }
    /// Sen_p = |d_p g| at a node.
    double sen(Parameter p, int i, int j, int k) const { return std::abs(derivative(p).at(i, j, k)); }
    Surface sen_surface(Parameter p) const;
};

SensitivitySet solve_all_sensitivities(const TimeStepper& stepper, const Surface& price);

}  // namespace heston
