#include "heston/fourier.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

namespace heston {

void QuadratureConfig::validate() const {
    if (!(z_max > 0.0)) throw Error(ErrorCategory::InvalidArgument, "quadrature needs z_max > 0");
    if (nodes < 64) throw Error(ErrorCategory::InvalidArgument, "quadrature needs at least 64 nodes");
}

namespace {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

GaussLegendre make_gauss_legendre(int count) {
    GaussLegendre rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    const int half = (count + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= count; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = count * (z * p0 - p1) / (z * z - 1.0);
            const double step = p0 / dp;
            z -= step;
            if (std::abs(step) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[count - 1 - i] = z;
        rule.weights[i] = rule.weights[count - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return rule;
}

const GaussLegendre& gauss_legendre(int count) {
    static std::mutex mutex;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(count);
    if (it == cache.end()) it = cache.emplace(count, make_gauss_legendre(count)).first;
    return it->second;
}

using cplx = std::complex<double>;

// Characteristic function of log X_tau under the j-th measure (j = 1 share, j = 2 money market).
cplx char_fn(int j, double z, double log_x, double y, double tau, const HestonParams& p, double r) {
    const cplx iz(0.0, z);
    const double u = j == 1 ? 0.5 : -0.5;
    const double b = j == 1 ? p.kappa - p.rho * p.gamma : p.kappa;
    const double g2 = p.gamma * p.gamma;
    const cplx beta = b - p.rho * p.gamma * iz;
    const cplx d = std::sqrt(beta * beta - g2 * (2.0 * u * iz - z * z));
    const cplx bmd = beta - d;
    const cplx G = bmd / (beta + d);
    const cplx e = std::exp(-d * tau);
    const cplx C = r * iz * tau + (p.kappa * p.theta / g2) * (bmd * tau - 2.0 * std::log((1.0 - G * e) / (1.0 - G)));
    const cplx D = (bmd / g2) * (1.0 - e) / (1.0 - G * e);
    return std::exp(C + D * y + iz * log_x);
}

double integrate_price(int count, double x, double y, double tau, const HestonParams& p, double r, double strike,
                       double z_hi) {
    const auto& rule = gauss_legendre(count);
    const double log_x = std::log(x);
    const double log_k = std::log(strike);
    const double half = 0.5 * z_hi;
    double i1 = 0.0, i2 = 0.0;
    for (int q = 0; q < count; ++q) {
        const double z = half * (rule.nodes[q] + 1.0);
        const cplx kernel = std::exp(cplx(0.0, -z * log_k)) / cplx(0.0, z);
        i1 += rule.weights[q] * std::real(kernel * char_fn(1, z, log_x, y, tau, p, r));
        i2 += rule.weights[q] * std::real(kernel * char_fn(2, z, log_x, y, tau, p, r));
    }
    const double p1 = 0.5 + half * i1 / std::numbers::pi;
    const double p2 = 0.5 + half * i2 / std::numbers::pi;
    return x * p1 - strike * std::exp(-r * tau) * p2;
}

constexpr double kTailLevel = 1e-14;
constexpr double kMaxCutoff = 1e6;
constexpr int kMaxDoublings = 6;

// Smallest z_max * 2^k whose integrand envelope |f_j(z)| / z is below kTailLevel for both j.
double cutoff(double x, double y, double tau, const HestonParams& p, double r, double z_max) {
    const double log_x = std::log(x);
    double z = z_max;
    while (z < kMaxCutoff) {
        const double tail = std::max(std::abs(char_fn(1, z, log_x, y, tau, p, r)) / x,
                                     std::abs(char_fn(2, z, log_x, y, tau, p, r)));
        if (tail / z < kTailLevel) break;
        z *= 2.0;
    }
    return z;
}

}  // namespace

double fourier_call_price(double x, double y, double tau, const HestonParams& p, const MarketEnv& env,
                          double strike, const QuadratureConfig& quad) {
    require_feasible(p);
    env.validate();
    quad.validate();
    if (env.lambda_risk != 0.0) {
        throw Error(ErrorCategory::InvalidArgument, "the Fourier oracle only supports lambda = 0");
    }
    if (!(x > 0.0) || !(y >= 0.0) || !(tau > 0.0) || !(strike > 0.0)) {
        throw Error(ErrorCategory::InvalidArgument, "Fourier oracle needs x, tau, K > 0 and y >= 0");
    }
    const double z_hi = cutoff(x, y, tau, p, env.r, quad.z_max);
    // Keep the node density of the configured rule when the cutoff grows.
    int nodes = static_cast<int>(std::ceil(quad.nodes * z_hi / quad.z_max));
    const double scale_floor = 1e-6 * strike;
    double coarse = integrate_price(nodes, x, y, tau, p, env.r, strike, z_hi);
    for (int k = 0; k < kMaxDoublings; ++k) {
        nodes *= 2;
        const double fine = integrate_price(nodes, x, y, tau, p, env.r, strike, z_hi);
        if (!std::isfinite(fine)) break;
        if (std::abs(fine - coarse) <= quad.tolerance * std::max(std::abs(fine), scale_floor)) return fine;
        coarse = fine;
    }
    std::ostringstream os;
    os << "Fourier quadrature did not converge (last estimate " << coarse << ", " << nodes << " nodes on [0, "
       << z_hi << "])";
    throw Error(ErrorCategory::Numerical, os.str());
}

double parameter_value(Parameter which, const HestonParams& p, const MarketEnv& env) {
    switch (which) {
        case Parameter::Kappa: return p.kappa;
        case Parameter::Theta: return p.theta;
        case Parameter::Gamma: return p.gamma;
        case Parameter::Rho: return p.rho;
        case Parameter::Lambda: return env.lambda_risk;
    }
    return 0.0;
}

void set_parameter(Parameter which, HestonParams& p, MarketEnv& env, double value) {
    switch (which) {
        case Parameter::Kappa: p.kappa = value; break;
        case Parameter::Theta: p.theta = value; break;
        case Parameter::Gamma: p.gamma = value; break;
        case Parameter::Rho: p.rho = value; break;
        case Parameter::Lambda: env.lambda_risk = value; break;
    }
}

double bump_gradient(Parameter which, const Pricer& pricer, const HestonParams& p, const MarketEnv& env,
                     double h_rel, double h_abs) {
    const double base = parameter_value(which, p, env);
    const double h = h_abs > 0.0 ? h_abs : (base != 0.0 ? h_rel * std::abs(base) : h_rel);
    if (!(h > 0.0)) throw Error(ErrorCategory::InvalidArgument, "bump size must be > 0");

    HestonParams up_p = p, dn_p = p;
    MarketEnv up_env = env, dn_env = env;
    set_parameter(which, up_p, up_env, base + h);
    set_parameter(which, dn_p, dn_env, base - h);
    for (const auto* q : {&up_p, &dn_p}) require_feasible(*q);
    up_env.validate();
    dn_env.validate();
    return (pricer(up_p, up_env) - pricer(dn_p, dn_env)) / (2.0 * h);
}

}  // namespace heston
