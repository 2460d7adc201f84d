#include "heston/impact.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <thread>

namespace heston {

double quadratic_impact(const Eigen::Vector4d& gradient, const Eigen::Matrix4d& sigma) {
    const double q = gradient.dot(sigma * gradient);
    return std::sqrt(std::max(q, 0.0));
}

Surface impact_quadratic(const SensitivitySet& sens, const Eigen::Matrix4d& sigma) {
    const Surface& dk = sens.derivative(Parameter::Kappa);
    const Surface& dt = sens.derivative(Parameter::Theta);
    const Surface& dg = sens.derivative(Parameter::Gamma);
    const Surface& dr = sens.derivative(Parameter::Rho);
    Surface out(dk.grid());
    auto& v = out.values();
    for (std::size_t q = 0; q < v.size(); ++q) {
        const Eigen::Vector4d grad(dk.values()[q], dt.values()[q], dg.values()[q], dr.values()[q]);
        v[q] = quadratic_impact(grad, sigma);
    }
    return out;
}

ImpactSurfaces impact_bound(const SensitivitySet& sens, const std::array<double, 4>& sds, const Surface& price,
                            double strike, double s_lambda) {
    for (double s : sds) {
        if (!(s >= 0.0)) throw Error(ErrorCategory::InvalidArgument, "standard deviations must be >= 0");
    }
    if (!(s_lambda >= 0.0)) throw Error(ErrorCategory::InvalidArgument, "s_lambda must be >= 0");
    const Grid& grid = price.grid();
    ImpactSurfaces out;
    out.eps_bound = Surface(grid);
    out.eps_quadratic = Surface(grid);
    out.relative = Surface(grid);
    for (std::size_t p = 0; p < 4; ++p) {
        out.per_param[p] = sens.signed_fields[p];
        for (double& v : out.per_param[p].values()) v = sds[p] * std::abs(v);
    }
    out.eps_lambda = sens.derivative(Parameter::Lambda);
    for (double& v : out.eps_lambda.values()) v = s_lambda * std::abs(v);

    const double floor = kRelativeFloor * strike;
    auto& bound = out.eps_bound.values();
    for (std::size_t q = 0; q < bound.size(); ++q) {
        bound[q] = out.per_param[0].values()[q] + out.per_param[1].values()[q] + out.per_param[2].values()[q] +
                   out.per_param[3].values()[q];
        out.relative.values()[q] = bound[q] / std::max(price.values()[q], floor);
    }
    return out;
}

ImpactSurfaces impact_surfaces(const SensitivitySet& sens, const ErrorModel& errors, const Surface& price,
                               double strike, double s_lambda) {
    auto out = impact_bound(sens, errors.sds, price, strike, s_lambda);
    out.eps_quadratic = impact_quadratic(sens, errors.sigma);
    return out;
}

PricingRun price_with_sensitivities(const Grid& grid, const HestonParams& p, const MarketEnv& env,
                                    const CallOption& option) {
    const TimeStepper stepper(assemble_operator(grid, p, env));
    PricingRun run;
    run.price = solve_price(stepper, option);
    run.sens = solve_all_sensitivities(stepper, run.price);
    return run;
}

namespace {

void take_max(Surface& acc, const Surface& other) {
    auto& a = acc.values();
    const auto& b = other.values();
    for (std::size_t q = 0; q < a.size(); ++q) a[q] = std::max(a[q], b[q]);
}

double axis_point(const Interval& iv, int density, int t) {
    if (density == 1) return 0.5 * (iv.lo + iv.hi);
    return iv.lo + (iv.hi - iv.lo) * static_cast<double>(t) / (density - 1);
}

}  // namespace

SweepResult sweep_box(const std::array<Interval, 4>& box, int density, const HestonParams& center,
                      const std::array<double, 4>& sds, double strike, const PricingPipeline& pipeline,
                      double s_lambda, unsigned threads) {
    if (density < 1) throw Error(ErrorCategory::InvalidArgument, "box density must be >= 1");

    std::vector<HestonParams> points;
    for (int a = 0; a < density; ++a)
        for (int b = 0; b < density; ++b)
            for (int c = 0; c < density; ++c)
                for (int d = 0; d < density; ++d) {
                    HestonParams p = center;
                    p.kappa = axis_point(box[0], density, a);
                    p.theta = axis_point(box[1], density, b);
                    p.gamma = axis_point(box[2], density, c);
                    p.rho = axis_point(box[3], density, d);
                    points.push_back(p);
                }

    std::vector<std::optional<ImpactSurfaces>> results(points.size());
    std::vector<std::exception_ptr> failures(points.size());
    auto evaluate = [&](std::size_t q) {
        if (!validate_params(points[q]).ok()) return;
        try {
            const auto run = pipeline(points[q]);
            results[q] = impact_bound(run.sens, sds, run.price, strike, s_lambda);
        } catch (...) {
            failures[q] = std::current_exception();
        }
    };
    const unsigned workers = std::max(1u, threads);
    if (workers == 1) {
        for (std::size_t q = 0; q < points.size(); ++q) evaluate(q);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t q = w; q < points.size(); q += workers) evaluate(q);
            });
        }
    }

    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    SweepResult out;
    for (auto& r : results) {
        if (!r) {
            ++out.skipped;
            continue;
        }
        if (out.evaluated++ == 0) {
            out.worst = std::move(*r);
            continue;
        }
        for (std::size_t p = 0; p < 4; ++p) take_max(out.worst.per_param[p], r->per_param[p]);
        take_max(out.worst.eps_bound, r->eps_bound);
        take_max(out.worst.eps_quadratic, r->eps_quadratic);
        take_max(out.worst.eps_lambda, r->eps_lambda);
        take_max(out.worst.relative, r->relative);
    }
    if (out.evaluated == 0) throw Error(ErrorCategory::InfeasibleParams, "every box subgrid point is infeasible");
    return out;
}

}  // namespace heston
