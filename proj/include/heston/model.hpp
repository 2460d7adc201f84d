#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "heston/error.hpp"

namespace heston {

/// Default sub-sampling step: one trading day in annualized units.
inline constexpr double kTradingDay = 1.0 / 252.0;

/// Coefficients of the joint price / squared-volatility SDEs
///
///   dX = mu X dt + sqrt(Y) X dW,
///   dY = kappa (theta - Y) dt + gamma sqrt(Y) dB,   E[dW dB] = rho dt.
///
/// `mu` is carried for simulation and estimation only; no pricing code reads it.
struct HestonParams {
    double kappa = 0.0;
    double theta = 0.0;
    double gamma = 0.0;
    double rho = 0.0;
    double mu = 0.0;
};

/// Risk-free rate and the market price of volatility risk.
struct MarketEnv {
    double r = 0.0;
    double lambda_risk = 0.0;

    void validate() const;
};

/// European call.
struct CallOption {
    double strike = 0.0;
    double maturity = 0.0;

    void validate() const;
};

/// Sub-sampled price / squared-volatility observations U_0..U_N, V_0..V_N.
struct ObservationSeries {
    double step = kTradingDay;
    std::vector<double> prices;
    std::vector<double> squared_vols;

    std::size_t intervals() const { return prices.empty() ? 0 : prices.size() - 1; }
    void validate() const;
};

enum class Constraint {
    KappaPositive,
    ThetaPositive,
    GammaPositive,
    RhoInUnitInterval,
    Feller,
};

struct Violation {
    Constraint constraint;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool violated(Constraint c) const;
    std::string summary() const;
};

/// Checks |rho| < 1, kappa, theta, gamma > 0 and 2 kappa theta > gamma^2.
/// Non-finite values count as violations.
ValidationReport validate_params(const HestonParams& p);

/// Throws InfeasibleParams listing every violated constraint.
void require_feasible(const HestonParams& p);

inline double call_payoff(double x, double strike) { return x > strike ? x - strike : 0.0; }

}  // namespace heston
