#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "heston/model.hpp"

namespace heston {

/// The five sums of the squared-volatility series that the closed-form estimators consume.
/// With N = V.size() - 1 and sums over n = 0..N-1:
///   a = (1/N) sum (V_{n+1} - V_n)^2 / V_n,   b = -(2/N) sum (V_{n+1} - V_n) / V_n,
///   c = (2/N) (V_N - V_0),                   d = (2/N) sum 1 / V_n,
///   f = (2/N) sum V_n.
struct SufficientStats {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double f = 0.0;
};

SufficientStats sufficient_stats(const ObservationSeries& series);
SufficientStats sufficient_stats(const std::vector<double>& squared_vols);

struct VolEstimate {
    double kappa = 0.0;
    double theta = 0.0;
    double gamma_sq = 0.0;
};

/// kappa = -(2b + cd) / (T (df - 4)),  theta = (bf + 2c) / (2b + cd),
/// gamma^2 = a / T - (b^2 f + 4bc + c^2 d) / (2 T (df - 4)).
/// Throws EstimationSingular when df - 4 <= 0 (up to rounding) or 2b + cd = 0.
VolEstimate estimate_vol_params(const SufficientStats& stats, double T);

struct DriftRho {
    double mu = 0.0;
    double rho = 0.0;
};

/// Euler-implied drift and the empirical correlation of the reconstructed Brownian
/// increments DZ_n, DB_n. The correlation is clamped to (-1 + 1e-9, 1 - 1e-9).
DriftRho estimate_drift_and_rho(const ObservationSeries& series, double kappa_hat, double theta_hat,
                                double gamma_hat);

struct ParamEstimate {
    HestonParams params;
    double gamma_sq = 0.0;  // raw estimate; params.gamma = sqrt(max(gamma_sq, 0))
    bool feasible = false;
    ValidationReport report;
};

/// Full estimator chain. A non-positive gamma^2 is reported as infeasible rather than thrown.
ParamEstimate estimate_all(const ObservationSeries& series);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Coordinates of the parameter error vector, in this order throughout.
enum class ThetaIndex : std::size_t { Kappa = 0, Theta = 1, Gamma = 2, Rho = 3 };

std::array<double, 4> theta_vector(const HestonParams& p);

struct ErrorModel {
    HestonParams center;
    Eigen::Matrix4d sigma = Eigen::Matrix4d::Zero();
    std::array<double, 4> sds{};
    std::array<Interval, 4> box{};
    std::array<double, 4> mean_shift{};  // mean of Theta_j - Theta_0
    std::size_t accepted = 0;
    std::size_t skipped = 0;
    std::vector<std::array<double, 4>> draws;
};

struct BootstrapConfig {
    std::size_t observations = 252;  // N
    double T = kTradingDay;
    double delta = kTradingDay / 20.0;
    std::size_t paths = 5000;  // q
    std::uint64_t seed = 1;
    double x0 = 1.0;
    double y0 = 0.0;  // <= 0 means start at theta
    unsigned threads = 1;
};

/// Simulates q trajectories at theta0, re-estimates each, and returns the empirical
/// (q - 1 normalized) covariance of Theta_j - Theta_0 plus the one-sd localization box.
/// Draws that fail estimation or contain V_n < 1e-8 are skipped and counted.
/// The result is independent of the thread count.
ErrorModel bootstrap_covariance(const HestonParams& theta0, const BootstrapConfig& config);

/// Sample covariance of the given draws (q - 1 normalization, two-pass, index order).
Eigen::Matrix4d sample_covariance(const std::vector<std::array<double, 4>>& draws);

/// VIX quote in percentage points to annualized squared volatility: (vix / 100)^2.
double vix_to_squared_vol(double vix_points);

}  // namespace heston
