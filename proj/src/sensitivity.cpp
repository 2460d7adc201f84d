#include "heston/sensitivity.hpp"

#include <cmath>
#include <string>

namespace heston {

std::string_view parameter_name(Parameter p) {
    switch (p) {
        case Parameter::Kappa: return "kappa";
        case Parameter::Theta: return "theta";
        case Parameter::Gamma: return "gamma";
        case Parameter::Rho: return "rho";
        case Parameter::Lambda: return "lambda";
    }
    return "?";
}

Parameter parse_parameter(std::string_view name) {
    for (auto p : kAllParameters) {
        if (parameter_name(p) == name) return p;
    }
    throw Error(ErrorCategory::InvalidArgument, "unknown parameter id '" + std::string(name) + "'");
}

DerivativeFields derivative_fields(const Surface& price, double far_x_slope) {
    const Grid& g = price.grid();
    const int m = g.m;
    const int n = g.n;
    const double hx = g.dx();
    const double hy = g.dy();
    DerivativeFields f{Surface(g), Surface(g), Surface(g)};

    for (int k = 0; k <= g.s; ++k) {
        auto at = [&](int i, int j) {
            if (i == m + 1) return price.at(m - 1, j, k) + 2.0 * hx * far_x_slope;
            return price.at(i, j, k);
        };
        for (int j = 0; j <= n; ++j) {
            for (int i = 1; i <= m; ++i) {
                double dy = 0.0, dyy = 0.0, dxy = 0.0;
                if (j == 0) {
                    dy = (-3.0 * at(i, 0) + 4.0 * at(i, 1) - at(i, 2)) / (2.0 * hy);
                    dyy = (at(i, 0) - 2.0 * at(i, 1) + at(i, 2)) / (hy * hy);
                    dxy = ((at(i + 1, 1) - at(i + 1, 0)) - (at(i - 1, 1) - at(i - 1, 0))) / (2.0 * hx * hy);
                } else if (j == n) {
                    dyy = (at(i, n) - 2.0 * at(i, n - 1) + at(i, n - 2)) / (hy * hy);
                } else {
                    dy = (at(i, j + 1) - at(i, j - 1)) / (2.0 * hy);
                    dyy = (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (hy * hy);
                    dxy = (2.0 * at(i, j) + at(i + 1, j + 1) + at(i - 1, j - 1) - at(i + 1, j) - at(i - 1, j) -
                           at(i, j + 1) - at(i, j - 1)) /
                          (2.0 * hx * hy);
                }
                f.dy_g.at(i, j, k) = dy;
                f.dyy_g.at(i, j, k) = dyy;
                f.dxy_g.at(i, j, k) = dxy;
            }
        }
    }
    return f;
}

Surface sensitivity_rhs(Parameter which, const DerivativeFields& fields, const HestonParams& p,
                        const MarketEnv& env) {
    const Grid& g = fields.dy_g.grid();
    Surface rhs(g);
    for (int k = 0; k <= g.s; ++k) {
        for (int j = 0; j <= g.n; ++j) {
            const double y = g.y(j);
            const double sqrt_y = std::sqrt(y);
            for (int i = 0; i <= g.m; ++i) {
                const double x = g.x(i);
                const double dy = fields.dy_g.at(i, j, k);
                double value = 0.0;
                switch (which) {
                    case Parameter::Kappa: value = (p.theta - y) * dy; break;
                    case Parameter::Theta: value = p.kappa * dy; break;
                    case Parameter::Gamma:
                        value = p.gamma * y * fields.dyy_g.at(i, j, k) + p.rho * x * y * fields.dxy_g.at(i, j, k) -
                                env.lambda_risk * sqrt_y * dy;
                        break;
                    case Parameter::Rho: value = p.gamma * x * y * fields.dxy_g.at(i, j, k); break;
                    case Parameter::Lambda: value = -p.gamma * sqrt_y * dy; break;
                }
                rhs.at(i, j, k) = value;
            }
        }
    }
    return rhs;
}

double boundary_source(Parameter which, const HestonParams& p, double dy_g_at_y0) {
    switch (which) {
        case Parameter::Kappa: return p.theta * dy_g_at_y0;
        case Parameter::Theta: return p.kappa * dy_g_at_y0;
        default: return 0.0;
    }
}

Surface solve_sensitivity(Parameter which, const TimeStepper& stepper, const Surface& rhs,
                          const DerivativeFields& fields) {
    const DiscreteOperator& op = stepper.op();
    const Grid& grid = op.grid;
    if (!rhs.grid().same_as(grid) || !fields.dy_g.grid().same_as(grid)) {
        throw Error(ErrorCategory::InvalidArgument, "sensitivity forcing was built on a different grid");
    }
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.unknowns()));
    return stepper.march(zero, 0.0, [&](int k, Eigen::VectorXd& src) {
        for (int j = 0; j < grid.n; ++j) {
            for (int i = 1; i <= grid.m; ++i) {
                const double value =
                    j == 0 ? boundary_source(which, op.params, fields.dy_g.at(i, 0, k)) : rhs.at(i, j, k);
                src[static_cast<Eigen::Index>(op.unknown(i, j))] = value;
            }
        }
    });
}

Surface SensitivitySet::sen_surface(Parameter p) const {
    Surface out = derivative(p);
    for (double& v : out.values()) v = std::abs(v);
    return out;
}

SensitivitySet solve_all_sensitivities(const TimeStepper& stepper, const Surface& price) {
    const DiscreteOperator& op = stepper.op();
    const auto fields = derivative_fields(price);
    SensitivitySet set;
    for (auto p : kAllParameters) {
        const auto rhs = sensitivity_rhs(p, fields, op.params, op.env);
        set.signed_fields[static_cast<std::size_t>(p)] = solve_sensitivity(p, stepper, rhs, fields);
    }
    return set;
}

}  // namespace heston
