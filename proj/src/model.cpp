#include "heston/model.hpp"

#include <cmath>
#include <sstream>

namespace heston {

std::string_view category_name(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::InvalidArgument: return "invalid-argument";
        case ErrorCategory::InfeasibleParams: return "infeasible-params";
        case ErrorCategory::EstimationSingular: return "estimation-singular";
        case ErrorCategory::Numerical: return "numerical";
        case ErrorCategory::Domain: return "domain";
        case ErrorCategory::Io: return "io";
        case ErrorCategory::Parse: return "parse";
    }
    return "unknown";
}

int exit_code(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::InvalidArgument: return 2;
        case ErrorCategory::InfeasibleParams: return 3;
        case ErrorCategory::EstimationSingular: return 4;
        case ErrorCategory::Numerical: return 5;
        case ErrorCategory::Domain: return 6;
        case ErrorCategory::Io: return 7;
        case ErrorCategory::Parse: return 8;
    }
    return 1;
}

void MarketEnv::validate() const {
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw Error(ErrorCategory::InvalidArgument, "risk-free rate must be >= 0");
    }
    if (!(lambda_risk >= 0.0) || !std::isfinite(lambda_risk)) {
        throw Error(ErrorCategory::InvalidArgument, "market price of volatility risk must be >= 0");
    }
}

void CallOption::validate() const {
    if (!(strike > 0.0) || !std::isfinite(strike)) {
        throw Error(ErrorCategory::InvalidArgument, "strike must be > 0");
    }
    if (!(maturity > 0.0) || !std::isfinite(maturity)) {
        throw Error(ErrorCategory::InvalidArgument, "maturity must be > 0");
    }
}

void ObservationSeries::validate() const {
    if (!(step > 0.0)) throw Error(ErrorCategory::InvalidArgument, "sampling step must be > 0");
    if (prices.size() != squared_vols.size()) {
        throw Error(ErrorCategory::InvalidArgument, "price and volatility series differ in length");
    }
    if (prices.size() < 2) {
        throw Error(ErrorCategory::InvalidArgument, "series needs at least two observations");
    }
    for (std::size_t n = 0; n < prices.size(); ++n) {
        if (!(prices[n] > 0.0) || !(squared_vols[n] > 0.0)) {
            std::ostringstream os;
            os << "observation " << n << " is not strictly positive";
            throw Error(ErrorCategory::InvalidArgument, os.str());
        }
    }
}

bool ValidationReport::violated(Constraint c) const {
    for (const auto& v : violations) {
        if (v.constraint == c) return true;
    }
    return false;
}

std::string ValidationReport::summary() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.detail;
    }
    return out;
}

ValidationReport validate_params(const HestonParams& p) {
    ValidationReport report;
    auto add = [&](Constraint c, const std::string& what) { report.violations.push_back({c, what}); };
    if (!(p.kappa > 0.0)) add(Constraint::KappaPositive, "kappa must be > 0");
    if (!(p.theta > 0.0)) add(Constraint::ThetaPositive, "theta must be > 0");
    if (!(p.gamma > 0.0)) add(Constraint::GammaPositive, "gamma must be > 0");
    if (!(std::abs(p.rho) < 1.0)) add(Constraint::RhoInUnitInterval, "|rho| must be < 1");
    const double lhs = 2.0 * p.kappa * p.theta;
    const double rhs = p.gamma * p.gamma;
    if (!(lhs > rhs)) {
        std::ostringstream os;
        os << "Feller: 2*kappa*theta = " << lhs << " is not > gamma^2 = " << rhs;
        add(Constraint::Feller, os.str());
    }
    return report;
}

void require_feasible(const HestonParams& p) {
    const auto report = validate_params(p);
    if (!report.ok()) throw Error(ErrorCategory::InfeasibleParams, report.summary());
}

}  // namespace heston
