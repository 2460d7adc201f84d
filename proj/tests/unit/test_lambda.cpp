#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "../common/synthetic.hpp"
#include "heston/lambda_calibration.hpp"
#include "support.hpp"

using namespace heston;

namespace {

CalibrationGrid coarse_grid() {
    CalibrationGrid g;
    g.m = 30;
    g.n = 24;
    return g;
}

RatioTable table_of(std::vector<double> L, std::vector<std::vector<double>> ratios) {
    return {std::move(L), std::move(ratios)};
}

// Small pool shared across tests: 2 maturities x 3 strikes at lambda = 2.
const std::vector<BenchmarkOption>& small_pool() {
    static const auto pool = fixtures::synthetic_pool(fixtures::desk_params(), 0.01, 2.0, coarse_grid(),
                                                     {1380, 1420, 1460}, {21, 42}, 9);
    return pool;
}

}  // namespace

TEST(Median, OddEvenAndSingle) {
    EXPECT_EQ(median({0.9, 0.1, 0.2}), 0.2);
    EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
    EXPECT_EQ(median({7.0}), 7.0);
    EXPECT_THROW(median({}), Error);
}

TEST(CurveFromTable, MedianOfRatiosAndTieBreak) {
    const auto t = table_of({1.0}, {{0.1}, {0.2}, {0.9}});
    EXPECT_DOUBLE_EQ(curve_from_table(t).values[0], 0.2);
    EXPECT_DOUBLE_EQ(curve_from_table(t, {2}).values[0], 0.9);

    const auto tie = table_of({0.5, 1.0, 1.5}, {{0.3, 0.1, 0.1}});
    EXPECT_EQ(curve_from_table(tie).argmin, 1.0);
    const auto single = table_of({3.25}, {{0.4}, {0.5}});
    EXPECT_EQ(curve_from_table(single).argmin, 3.25);
}

TEST(CurveFromTable, InvariantUnderRelabeling) {
    const auto t = table_of({0, 1, 2}, {{0.3, 0.2, 0.4}, {0.1, 0.5, 0.6}, {0.9, 0.05, 0.2}, {0.4, 0.4, 0.1}});
    auto shuffled = t;
    std::reverse(shuffled.ratios.begin(), shuffled.ratios.end());
    EXPECT_EQ(curve_from_table(t).values, curve_from_table(shuffled).values);
}

TEST(LambdaErrorBootstrap, HandCheckedThreeOptionPool) {
    // Full-pool medians (0.6, 0.5, 0.6), argmin 1.
    const auto t = table_of({0, 1, 2}, {{0.1, 0.5, 0.9}, {0.6, 0.2, 0.6}, {0.9, 0.5, 0.1}});
    EXPECT_EQ(curve_from_table(t).argmin, 1.0);
    // Subsets {0,1}: (0.35, 0.35, 0.75) -> 0; {0,2}: (0.5, 0.5, 0.5) -> 0; {1,2}: (0.75, 0.35, 0.35) -> 1.
    EXPECT_DOUBLE_EQ(lambda_error_bootstrap(t, 2), (1.0 + 1.0 + 0.0) / 3.0);
}

TEST(LambdaErrorBootstrap, IdenticalOptionsGiveZero) {
    const std::vector<double> row{0.4, 0.2, 0.3};
    const auto t = table_of({0, 1, 2}, std::vector<std::vector<double>>(6, row));
    EXPECT_EQ(lambda_error_bootstrap(t, 4), 0.0);
}

TEST(LambdaErrorBootstrap, RejectsBadSubsetSizes) {
    const auto t = table_of({0}, std::vector<std::vector<double>>(40, {0.1}));
    EXPECT_THROW(lambda_error_bootstrap(t, 40), Error);
    EXPECT_THROW(lambda_error_bootstrap(t, 0), Error);
    EXPECT_THROW(lambda_error_bootstrap(t, 20), Error);  // C(40, 20) > 1e5
    EXPECT_NO_THROW(lambda_error_bootstrap(t, 2));
}

TEST(RmsPredictionError, SelfConsistentQuotesGiveZero) {
    const auto grid = coarse_grid();
    for (const auto& b : small_pool()) {
        const double rms = rms_prediction_error(b, fixtures::desk_params(), {0.01, 2.0}, grid);
        EXPECT_LE(rms, 1e-12 * b.median_price);
    }
}

TEST(RmsPredictionError, ConstantShiftAndSingleDay) {
    const auto grid = coarse_grid();
    auto b = small_pool().front();
    for (double& q : b.quotes) q += 0.75;
    EXPECT_NEAR(rms_prediction_error(b, fixtures::desk_params(), {0.01, 2.0}, grid), 0.75, 1e-9);

    const auto p = fixtures::desk_params();
    auto fine = grid;
    fine.steps_per_day = 2;
    const CallOption one_day{1400, grid.T};
    const auto surface = solve_price(assemble_operator(fine.grid_for(grid.T), p, {0.01, 2.0}), one_day);
    const double model = price_at(surface, 1410, 0.02, 0.0);
    const auto single = make_benchmark(one_day, {model + 0.3}, {1410}, {0.02});
    EXPECT_NEAR(rms_prediction_error(single, surface, grid.T), 0.3, 1e-12);
}

TEST(RmsPredictionError, ScaleFreeRatio) {
    const auto grid = coarse_grid();
    const auto& b = small_pool()[1];
    const auto surface =
        solve_price(assemble_operator(grid.grid_for(b.option.maturity), fixtures::desk_params(), {0.01, 1.0}), b.option);
    const double base = rms_prediction_error(b, surface, grid.T) / b.median_price;
    const double c = 3.7;
    auto scaled_surface = surface;
    for (double& v : scaled_surface.values()) v *= c;
    auto scaled = b;
    for (double& q : scaled.quotes) q *= c;
    scaled.median_price *= c;
    EXPECT_NEAR(rms_prediction_error(scaled, scaled_surface, grid.T) / scaled.median_price, base, 1e-12);
}

TEST(RmsPredictionError, RejectsMisalignedInputs) {
    const auto grid = coarse_grid();
    auto b = small_pool().front();
    b.quotes.pop_back();
    EXPECT_THROW(rms_prediction_error(b, fixtures::desk_params(), {0.01, 2.0}, grid), Error);
    auto c = small_pool().front();
    c.spots[3] = 5000.0;  // outside the PDE domain
    try {
        rms_prediction_error(c, fixtures::desk_params(), {0.01, 2.0}, grid);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::Domain);
    }
}

TEST(EstimateLambda, RecoversTheGeneratingValue) {
    const auto curve =
        estimate_lambda(small_pool(), fixtures::desk_params(), 0.01, arithmetic_grid(0, 0.5, 4), coarse_grid());
    EXPECT_EQ(curve.argmin, 2.0);
    EXPECT_EQ(curve.values.size(), 9u);
    EXPECT_EQ(*std::min_element(curve.values.begin(), curve.values.end()), curve.values[4]);
}

TEST(EstimateLambda, CachedTableMatchesFromScratch) {
    const auto grid = coarse_grid();
    const auto table = build_ratio_table(small_pool(), fixtures::desk_params(), 0.01, {0.5, 3.0}, grid);
    for (std::size_t j = 0; j < small_pool().size(); ++j) {
        const auto& b = small_pool()[j];
        EXPECT_DOUBLE_EQ(table.ratios[j][1],
                         rms_prediction_error(b, fixtures::desk_params(), {0.01, 3.0}, grid) / b.median_price);
    }
    EXPECT_DOUBLE_EQ(prederr(0.5, small_pool(), fixtures::desk_params(), 0.01, grid), curve_from_table(table).values[0]);
}

TEST(EstimateLambda, RefinedGridNeverDoesWorse) {
    const auto grid = coarse_grid();
    const auto p = fixtures::desk_params();
    const auto coarse = estimate_lambda(small_pool(), p, 0.01, {0.0, 1.5, 3.0}, grid);
    const auto fine = estimate_lambda(small_pool(), p, 0.01, arithmetic_grid(0, 0.75, 3.0), grid);
    EXPECT_LE(*std::min_element(fine.values.begin(), fine.values.end()),
              *std::min_element(coarse.values.begin(), coarse.values.end()));
}

TEST(EstimateLambda, RejectsBadInputs) {
    const auto grid = coarse_grid();
    EXPECT_THROW(estimate_lambda({}, fixtures::desk_params(), 0.01, {1.0}, grid), Error);
    EXPECT_THROW(estimate_lambda(small_pool(), fixtures::desk_params(), 0.01, {}, grid), Error);
    EXPECT_THROW(estimate_lambda(small_pool(), fixtures::desk_params(), 0.01, {-1.0}, grid), Error);
}

TEST(ArithmeticGrid, InclusiveEnd) {
    const auto g = arithmetic_grid(0, 0.25, 4);
    ASSERT_EQ(g.size(), 17u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 4.0);
    EXPECT_THROW(arithmetic_grid(0, 0, 1), Error);
}
