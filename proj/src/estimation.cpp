#include "heston/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "heston/simulate.hpp"

namespace heston {

SufficientStats sufficient_stats(const std::vector<double>& v) {
    if (v.size() < 2) throw Error(ErrorCategory::InvalidArgument, "need at least two observations");
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (!(v[n] > 0.0)) {
            std::ostringstream os;
            os << "squared volatility at index " << n << " is not strictly positive";
            throw Error(ErrorCategory::InvalidArgument, os.str());
        }
    }
    const std::size_t N = v.size() - 1;
    double sum_sq = 0.0, sum_rel = 0.0, sum_inv = 0.0, sum_v = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        const double dv = v[n + 1] - v[n];
        sum_sq += dv * dv / v[n];
        sum_rel += dv / v[n];
        sum_inv += 1.0 / v[n];
        sum_v += v[n];
    }
    const double inv_n = 1.0 / static_cast<double>(N);
    SufficientStats s;
    s.a = sum_sq * inv_n;
    s.b = -2.0 * sum_rel * inv_n;
    s.c = 2.0 * (v[N] - v[0]) * inv_n;
    s.d = 2.0 * sum_inv * inv_n;
    s.f = 2.0 * sum_v * inv_n;
    return s;
}

SufficientStats sufficient_stats(const ObservationSeries& series) {
    series.validate();
    return sufficient_stats(series.squared_vols);
}

VolEstimate estimate_vol_params(const SufficientStats& s, double T) {
    if (!(T > 0.0)) throw Error(ErrorCategory::InvalidArgument, "sampling step must be > 0");
    const double df4 = s.d * s.f - 4.0;
    // d*f >= 4 holds exactly in real arithmetic; anything within rounding of 4 is degenerate.
    if (!(df4 > 1e-12 * 4.0)) {
        throw Error(ErrorCategory::EstimationSingular, "degenerate statistics: d*f - 4 <= 0");
    }
    const double denom = 2.0 * s.b + s.c * s.d;
    if (denom == 0.0 || !std::isfinite(denom)) {
        throw Error(ErrorCategory::EstimationSingular, "degenerate statistics: 2b + cd = 0");
    }
    VolEstimate e;
    e.kappa = -denom / (T * df4);
    e.theta = (s.b * s.f + 2.0 * s.c) / denom;
    e.gamma_sq = s.a / T - (s.b * s.b * s.f + 4.0 * s.b * s.c + s.c * s.c * s.d) / (2.0 * T * df4);
    return e;
}

namespace {

std::optional<double> pearson(const std::vector<double>& u, const std::vector<double>& w) {
    const auto n = static_cast<double>(u.size());
    double mu = 0.0, mw = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        mu += u[k];
        mw += w[k];
    }
    mu /= n;
    mw /= n;
    double suu = 0.0, sww = 0.0, suw = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double du = u[k] - mu;
        const double dw = w[k] - mw;
        suu += du * du;
        sww += dw * dw;
        suw += du * dw;
    }
    if (!(suu > 0.0) || !(sww > 0.0)) return std::nullopt;
    return suw / std::sqrt(suu * sww);
}

}  // namespace

DriftRho estimate_drift_and_rho(const ObservationSeries& series, double kappa_hat, double theta_hat,
                                double gamma_hat) {
    series.validate();
    if (!std::isfinite(kappa_hat) || !std::isfinite(theta_hat) || !std::isfinite(gamma_hat)) {
        throw Error(ErrorCategory::InvalidArgument, "volatility estimates must be finite");
    }
    if (!(gamma_hat > 0.0)) throw Error(ErrorCategory::InvalidArgument, "gamma estimate must be > 0");

    const std::size_t N = series.intervals();
    const double T = series.step;
    const auto& U = series.prices;
    const auto& V = series.squared_vols;

    double sum_ret = 0.0;
    for (std::size_t n = 0; n < N; ++n) sum_ret += (U[n + 1] - U[n]) / U[n];
    DriftRho out;
    out.mu = sum_ret / (static_cast<double>(N) * T);

    std::vector<double> dz(N), dbm(N);
    for (std::size_t n = 0; n < N; ++n) {
        const double vol = std::sqrt(V[n]);
        dz[n] = ((U[n + 1] - U[n]) / U[n] - out.mu * T) / vol;
        dbm[n] = (V[n + 1] - V[n] - kappa_hat * (theta_hat - V[n]) * T) / (gamma_hat * vol);
    }
    const auto corr = pearson(dz, dbm);
    if (!corr) {
        throw Error(ErrorCategory::EstimationSingular, "zero-variance Brownian increment sequence");
    }
    constexpr double kEdge = 1.0 - 1e-9;
    out.rho = std::clamp(*corr, -kEdge, kEdge);
    return out;
}

ParamEstimate estimate_all(const ObservationSeries& series) {
    const auto stats = sufficient_stats(series);
    const auto vol = estimate_vol_params(stats, series.step);

    ParamEstimate est;
    est.gamma_sq = vol.gamma_sq;
    est.params.kappa = vol.kappa;
    est.params.theta = vol.theta;
    est.params.gamma = std::sqrt(std::max(vol.gamma_sq, 0.0));

    // The correlation of DZ and DB does not depend on the (positive) gamma scaling of DB, so a
    // unit scale still yields rho when gamma^2 collapsed to zero.
    const double scale = est.params.gamma > 0.0 ? est.params.gamma : 1.0;
    try {
        const auto dr = estimate_drift_and_rho(series, vol.kappa, vol.theta, scale);
        est.params.mu = dr.mu;
        est.params.rho = dr.rho;
    } catch (const Error& e) {
        if (est.params.gamma > 0.0 || e.category() != ErrorCategory::EstimationSingular) throw;
        est.params.rho = std::numeric_limits<double>::quiet_NaN();
    }
    est.report = validate_params(est.params);
    est.feasible = est.report.ok();
    return est;
}

std::array<double, 4> theta_vector(const HestonParams& p) { return {p.kappa, p.theta, p.gamma, p.rho}; }

Eigen::Matrix4d sample_covariance(const std::vector<std::array<double, 4>>& draws) {
    if (draws.size() < 2) throw Error(ErrorCategory::InvalidArgument, "covariance needs >= 2 draws");
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    for (const auto& d : draws) mean += Eigen::Vector4d(d[0], d[1], d[2], d[3]);
    mean /= static_cast<double>(draws.size());
    Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
    for (const auto& d : draws) {
        const Eigen::Vector4d e = Eigen::Vector4d(d[0], d[1], d[2], d[3]) - mean;
        cov.noalias() += e * e.transpose();
    }
    cov /= static_cast<double>(draws.size() - 1);
    return 0.5 * (cov + cov.transpose());
}

ErrorModel bootstrap_covariance(const HestonParams& theta0, const BootstrapConfig& cfg) {
    require_feasible(theta0);
    if (cfg.paths < 2) throw Error(ErrorCategory::InvalidArgument, "bootstrap needs q >= 2 paths");
    if (cfg.observations < 1) throw Error(ErrorCategory::InvalidArgument, "bootstrap needs N >= 1");

    const double y0 = cfg.y0 > 0.0 ? cfg.y0 : theta0.theta;
    const double horizon = static_cast<double>(cfg.observations) * cfg.T;
    const auto center = theta_vector(theta0);

    std::vector<std::optional<std::array<double, 4>>> results(cfg.paths);
    std::vector<std::exception_ptr> failures(cfg.paths);
    auto run_path = [&](std::size_t j) {
        try {
            const auto path = simulate_path(theta0, cfg.x0, y0, horizon, cfg.delta, cfg.seed, j);
            const auto series = subsample(path, cfg.T);
            for (double v : series.squared_vols) {
                if (v < 1e-8) return;
            }
            const auto est = estimate_all(series);
            const auto th = theta_vector(est.params);
            for (double t : th) {
                if (!std::isfinite(t)) return;
            }
            results[j] = th;
        } catch (const Error& e) {
            if (e.category() != ErrorCategory::EstimationSingular) failures[j] = std::current_exception();
        } catch (...) {
            failures[j] = std::current_exception();
        }
    };

    const unsigned workers = std::max(1u, cfg.threads);
    if (workers == 1) {
        for (std::size_t j = 0; j < cfg.paths; ++j) run_path(j);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t j = w; j < cfg.paths; j += workers) run_path(j);
            });
        }
    }

    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    ErrorModel model;
    model.center = theta0;
    for (const auto& r : results) {
        if (!r) {
            ++model.skipped;
            continue;
        }
        std::array<double, 4> shift{};
        for (std::size_t i = 0; i < 4; ++i) shift[i] = (*r)[i] - center[i];
        model.draws.push_back(shift);
    }
    model.accepted = model.draws.size();
    if (2 * model.skipped > cfg.paths || model.accepted < 2) {
        std::ostringstream os;
        os << model.skipped << " of " << cfg.paths << " bootstrap draws were singular";
        throw Error(ErrorCategory::EstimationSingular, os.str());
    }

    model.sigma = sample_covariance(model.draws);
    for (const auto& d : model.draws) {
        for (std::size_t i = 0; i < 4; ++i) model.mean_shift[i] += d[i];
    }
    for (std::size_t i = 0; i < 4; ++i) {
        model.mean_shift[i] /= static_cast<double>(model.accepted);
        model.sds[i] = std::sqrt(std::max(model.sigma(i, i), 0.0));
        model.box[i] = {center[i] - model.sds[i], center[i] + model.sds[i]};
    }
    return model;
}

double vix_to_squared_vol(double vix_points) {
    if (!(vix_points > 0.0) || !std::isfinite(vix_points)) {
        throw Error(ErrorCategory::InvalidArgument, "VIX quote must be > 0");
    }
    const double vol = vix_points / 100.0;
    return vol * vol;
}

}  // namespace heston
