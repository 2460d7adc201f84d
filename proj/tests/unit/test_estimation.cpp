#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "heston/estimation.hpp"
#include "heston/simulate.hpp"
#include "support.hpp"

using namespace heston;

namespace {

ObservationSeries series_from(std::vector<double> v, double T = 1.0) {
    ObservationSeries s;
    s.step = T;
    s.squared_vols = std::move(v);
    s.prices.assign(s.squared_vols.size(), 1.0);
    for (std::size_t n = 0; n < s.prices.size(); ++n) s.prices[n] = 100.0 + (n % 3);
    return s;
}

ObservationSeries simulated(std::uint64_t seed, const HestonParams& p = fixtures::desk_params()) {
    const auto path = simulate_path(p, 1426.0, p.theta, 252 * kTradingDay, kTradingDay / 20, seed);
    return subsample(path, kTradingDay);
}

}  // namespace

TEST(SufficientStats, HandEvaluatedExample) {
    const auto s = sufficient_stats(std::vector<double>{1, 2, 1});
    EXPECT_DOUBLE_EQ(s.a, 0.75);
    EXPECT_DOUBLE_EQ(s.b, -0.5);
    EXPECT_DOUBLE_EQ(s.c, 0.0);
    EXPECT_DOUBLE_EQ(s.d, 1.5);
    EXPECT_DOUBLE_EQ(s.f, 3.0);
}

TEST(SufficientStats, ConstantSeriesIsDegenerate) {
    const double theta = 0.017;
    const auto s = sufficient_stats(std::vector<double>(10, theta));
    EXPECT_EQ(s.a, 0.0);
    EXPECT_EQ(s.b, 0.0);
    EXPECT_EQ(s.c, 0.0);
    EXPECT_DOUBLE_EQ(s.d, 2.0 / theta);
    EXPECT_DOUBLE_EQ(s.f, 2.0 * theta);
    EXPECT_NEAR(s.d * s.f, 4.0, 1e-12);
}

TEST(SufficientStats, RejectsNonPositiveValues) {
    EXPECT_THROW(sufficient_stats(std::vector<double>{1, 0, 1}), Error);
    EXPECT_THROW(sufficient_stats(std::vector<double>{1}), Error);
}

TEST(SufficientStats, InequalitiesHoldOnRandomSeries) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> len(2, 60);
    std::lognormal_distribution<double> value(-3.0, 1.5);
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<double> v(len(rng));
        for (double& x : v) x = value(rng);
        const auto s = sufficient_stats(v);
        // Cauchy-Schwarz and AM-GM, allowing only rounding of the sums.
        EXPECT_GE(s.d * s.f, 4.0 * (1.0 - 1e-12)) << trial;
        EXPECT_GE(2.0 * s.a * s.f, s.c * s.c * (1.0 - 1e-12)) << trial;
    }
}

TEST(EstimateVolParams, HandEvaluatedExample) {
    const auto e = estimate_vol_params({0.75, -0.5, 0.0, 1.5, 3.0}, 1.0);
    EXPECT_DOUBLE_EQ(e.kappa, 2.0);
    EXPECT_DOUBLE_EQ(e.theta, 1.5);
    EXPECT_NEAR(e.gamma_sq, 0.0, 1e-15);
}

TEST(EstimateVolParams, ConstantSeriesIsSingular) {
    try {
        estimate_vol_params(sufficient_stats(std::vector<double>(5, 0.04)), kTradingDay);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::EstimationSingular);
    }
}

TEST(EstimateVolParams, ScaleEquivariance) {
    std::mt19937_64 rng(7);
    std::lognormal_distribution<double> value(-4.0, 0.5);
    std::uniform_real_distribution<double> scale(0.01, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(40);
        for (double& x : v) x = value(rng);
        const double c = scale(rng);
        std::vector<double> w = v;
        for (double& x : w) x *= c;
        const auto e1 = estimate_vol_params(sufficient_stats(v), kTradingDay);
        const auto e2 = estimate_vol_params(sufficient_stats(w), kTradingDay);
        EXPECT_NEAR(e2.kappa, e1.kappa, 1e-9 * std::abs(e1.kappa));
        EXPECT_NEAR(e2.theta, c * e1.theta, 1e-9 * std::abs(c * e1.theta));
        EXPECT_NEAR(e2.gamma_sq, c * e1.gamma_sq, 1e-8 * std::abs(c * e1.gamma_sq));
    }
}

TEST(EstimateDriftAndRho, PerfectlyCorrelatedNoise) {
    // V moves with the same noise as the price returns, and V's drift is zero.
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z(0.0, 1.0);
    ObservationSeries s;
    s.step = kTradingDay;
    double u = 100.0, v = 0.04;
    for (int n = 0; n <= 500; ++n) {
        s.prices.push_back(u);
        s.squared_vols.push_back(v);
        const double e = z(rng) * std::sqrt(kTradingDay);
        u *= 1.0 + std::sqrt(v) * e;
        v += 0.1 * std::sqrt(v) * e;
    }
    const auto r = estimate_drift_and_rho(s, 0.0, 0.04, 0.1);
    EXPECT_GE(r.rho, 0.999);
    EXPECT_LT(r.rho, 1.0);
}

TEST(EstimateDriftAndRho, IndependentNoise) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> z(0.0, 1.0);
    ObservationSeries s;
    s.step = kTradingDay;
    double u = 100.0, v = 0.04;
    for (int n = 0; n <= 10000; ++n) {
        s.prices.push_back(u);
        s.squared_vols.push_back(v);
        u *= 1.0 + std::sqrt(v * kTradingDay) * z(rng);
        v = std::max(1e-4, v + 3.0 * (0.04 - v) * kTradingDay + 0.2 * std::sqrt(v * kTradingDay) * z(rng));
    }
    const auto est = estimate_all(s);
    EXPECT_LE(std::abs(est.params.rho), 0.05);
}

TEST(EstimateDriftAndRho, RhoInvariantUnderPriceScaling) {
    auto s = simulated(5);
    const auto base = estimate_all(s);
    for (double c : {0.001, 3.0, 1e4}) {
        auto t = s;
        for (double& u : t.prices) u *= c;
        const auto est = estimate_all(t);
        EXPECT_NEAR(est.params.rho, base.params.rho, 1e-12);
        EXPECT_NEAR(est.params.mu, base.params.mu, 1e-9 * std::abs(base.params.mu) + 1e-12);
    }
}

TEST(EstimateDriftAndRho, DriftIsTheAverageReturn) {
    ObservationSeries s{0.5, {100, 110, 99}, {0.04, 0.05, 0.045}};
    const auto r = estimate_drift_and_rho(s, 1.0, 0.04, 0.2);
    EXPECT_NEAR(r.mu, (0.1 - 0.1) / (2 * 0.5), 1e-15);
}

TEST(EstimateDriftAndRho, RejectsZeroGamma) {
    ObservationSeries s{0.5, {100, 110, 99}, {0.04, 0.05, 0.045}};
    EXPECT_THROW(estimate_drift_and_rho(s, 1.0, 0.04, 0.0), Error);
}

TEST(EstimateAll, ConstantSeriesIsSingular) {
    try {
        estimate_all(series_from(std::vector<double>(30, 0.017), kTradingDay));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::EstimationSingular);
    }
}

TEST(EstimateAll, ZeroGammaSquaredIsFlaggedInfeasible) {
    const auto est = estimate_all(series_from({1, 2, 1}));
    EXPECT_NEAR(est.gamma_sq, 0.0, 1e-15);
    EXPECT_FALSE(est.feasible);
    EXPECT_TRUE(est.report.violated(Constraint::GammaPositive));
}

TEST(EstimateAll, SimulatedSeriesRecoversParameters) {
    const auto p = fixtures::desk_params();
    double sum_rho = 0.0;
    int feasible = 0;
    const int seeds = 100;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto est = estimate_all(simulated(1000 + seed));
        feasible += est.feasible;
        sum_rho += est.params.rho;
        // Loose per-series sanity at three reference sds.
        EXPECT_NEAR(est.params.theta, p.theta, 3 * 0.002 * 2) << seed;
        EXPECT_NEAR(est.params.gamma, p.gamma, 3 * 0.01 * 2) << seed;
    }
    EXPECT_GE(feasible, 95);
    EXPECT_NEAR(sum_rho / seeds, p.rho, 0.1);
}

TEST(Bootstrap, TwoPathsGiveRankOneCovariance) {
    BootstrapConfig cfg;
    cfg.paths = 2;
    cfg.seed = 17;
    cfg.x0 = 1426;
    const auto em = bootstrap_covariance(fixtures::desk_params(), cfg);
    ASSERT_EQ(em.accepted, 2u);
    const auto& a = em.draws[0];
    const auto& b = em.draws[1];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            // Two-sample covariance: (a - b)(a - b)^T / 2.
            const double expected = 0.5 * (a[i] - b[i]) * (a[j] - b[j]);
            EXPECT_NEAR(em.sigma(i, j), expected, 1e-12 * (1.0 + std::abs(expected)));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(em.sigma);
    int nonzero = 0;
    for (int i = 0; i < 4; ++i) nonzero += eig.eigenvalues()[i] > 1e-10 * em.sigma.trace();
    EXPECT_EQ(nonzero, 1);
}

TEST(Bootstrap, CovarianceIsSymmetricPsdAndBoxIsCentered) {
    BootstrapConfig cfg;
    cfg.paths = 300;
    cfg.x0 = 1426;
    const auto p = fixtures::desk_params();
    const auto em = bootstrap_covariance(p, cfg);
    EXPECT_TRUE(em.sigma.isApprox(em.sigma.transpose(), 0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(em.sigma);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12 * em.sigma.trace());
    const auto c = theta_vector(p);
    for (int i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(em.sds[i], std::sqrt(em.sigma(i, i)));
        EXPECT_DOUBLE_EQ(0.5 * (em.box[i].lo + em.box[i].hi), c[i]);
        EXPECT_NEAR(em.box[i].hi - c[i], em.sds[i], 1e-15 * (1 + std::abs(c[i])));
    }
    EXPECT_EQ(em.accepted + em.skipped, cfg.paths);
}

TEST(Bootstrap, ThreadCountDoesNotChangeTheResult) {
    BootstrapConfig cfg;
    cfg.paths = 64;
    cfg.x0 = 1426;
    cfg.threads = 1;
    const auto a = bootstrap_covariance(fixtures::desk_params(), cfg);
    cfg.threads = 4;
    const auto b = bootstrap_covariance(fixtures::desk_params(), cfg);
    EXPECT_EQ(a.sigma, b.sigma);
    EXPECT_EQ(a.draws, b.draws);
}

TEST(Bootstrap, RejectsTooFewPathsAndInfeasibleCenter) {
    BootstrapConfig cfg;
    cfg.paths = 1;
    EXPECT_THROW(bootstrap_covariance(fixtures::desk_params(), cfg), Error);
    cfg.paths = 10;
    EXPECT_THROW(bootstrap_covariance({1, 0.1, 1, 0, 0}, cfg), Error);
}

TEST(SampleCovariance, MatchesDirectFormula) {
    std::vector<std::array<double, 4>> draws{{1, 2, 3, 4}, {2, 2, 1, 0}, {0, 5, 2, 1}};
    const auto cov = sample_covariance(draws);
    EXPECT_NEAR(cov(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(cov(1, 1), 3.0, 1e-15);
    EXPECT_NEAR(cov(0, 1), -1.5, 1e-15);
}

TEST(VixToSquaredVol, Examples) {
    EXPECT_DOUBLE_EQ(vix_to_squared_vol(11), 0.0121);
    EXPECT_DOUBLE_EQ(vix_to_squared_vol(100), 1.0);
    EXPECT_DOUBLE_EQ(vix_to_squared_vol(20), 0.04);
    EXPECT_THROW(vix_to_squared_vol(0), Error);
    EXPECT_THROW(vix_to_squared_vol(-3), Error);
}
