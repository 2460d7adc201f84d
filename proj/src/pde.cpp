#include "heston/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

namespace heston {

void Grid::validate() const {
    if (!(x_min >= 0.0) || !(x_max > x_min)) {
        throw Error(ErrorCategory::InvalidArgument, "grid needs 0 <= x_min < x_max");
    }
    if (!(y_max > 0.0)) throw Error(ErrorCategory::InvalidArgument, "grid needs y_max > 0");
    if (!(tau > 0.0)) throw Error(ErrorCategory::InvalidArgument, "grid needs tau > 0");
    if (m < 2 || n < 2 || s < 2) throw Error(ErrorCategory::InvalidArgument, "grid needs m, n, s >= 2");
}

bool Grid::same_as(const Grid& o) const {
    return x_min == o.x_min && x_max == o.x_max && y_max == o.y_max && tau == o.tau && m == o.m &&
           n == o.n && s == o.s;
}

Surface::Surface(const Grid& grid) : grid_(grid), values_(grid.nodes_per_slice() * (grid.s + 1), 0.0) {}

std::span<double> Surface::slice(int k) {
    return {values_.data() + static_cast<std::size_t>(k) * grid_.nodes_per_slice(), grid_.nodes_per_slice()};
}

std::span<const double> Surface::slice(int k) const {
    return {values_.data() + static_cast<std::size_t>(k) * grid_.nodes_per_slice(), grid_.nodes_per_slice()};
}

namespace {

struct StencilTerm {
    int di;
    int dj;
    double w;
};

}  // namespace

DiscreteOperator assemble_operator(const Grid& grid, const HestonParams& p, const MarketEnv& env) {
    grid.validate();
    if (grid.m < 3 || grid.n < 3) {
        throw Error(ErrorCategory::InvalidArgument, "grid too small for the stencils (m, n >= 3)");
    }
    require_feasible(p);
    env.validate();

    DiscreteOperator op{grid, p, env, {}, {}};
    const int m = grid.m;
    const int n = grid.n;
    const double hx = grid.dx();
    const double hy = grid.dy();
    const auto rows = static_cast<Eigen::Index>(op.unknowns());
    op.B = Eigen::VectorXd::Zero(rows);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(rows) * 9);
    std::vector<StencilTerm> terms;
    terms.reserve(16);

    for (int j = 0; j < n; ++j) {
        const double y = grid.y(j);
        for (int i = 1; i <= m; ++i) {
            const double x = grid.x(i);
            terms.clear();
            if (j == 0) {
                // Degenerate boundary operator r x d_x + kappa theta d_y - r.
                const double bx = env.r * x / (2.0 * hx);
                const double by = p.kappa * p.theta / (2.0 * hy);
                terms.push_back({1, 0, bx});
                terms.push_back({-1, 0, -bx});
                terms.push_back({0, 0, -3.0 * by - env.r});
                terms.push_back({0, 1, 4.0 * by});
                terms.push_back({0, 2, -by});
            } else {
                const double axx = 0.5 * x * x * y / (hx * hx);
                const double ayy = 0.5 * p.gamma * p.gamma * y / (hy * hy);
                const double axy = p.rho * p.gamma * x * y / (2.0 * hx * hy);
                const double bx = env.r * x / (2.0 * hx);
                const double by = (p.kappa * (p.theta - y) - env.lambda_risk * p.gamma * std::sqrt(y)) / (2.0 * hy);
                terms.push_back({0, 0, -2.0 * axx - 2.0 * ayy + 2.0 * axy - env.r});
                terms.push_back({1, 0, axx - axy + bx});
                terms.push_back({-1, 0, axx - axy - bx});
                terms.push_back({0, 1, ayy - axy + by});
                terms.push_back({0, -1, ayy - axy - by});
                terms.push_back({1, 1, axy});
                terms.push_back({-1, -1, axy});
            }

            const auto row = static_cast<Eigen::Index>(op.unknown(i, j));
            for (const auto& t : terms) {
                int ii = i + t.di;
                int jj = j + t.dj;
                if (jj >= n) jj = n - 1;
                if (ii == m + 1) {
                    op.B[row] += t.w * 2.0 * hx;
                    ii = m - 1;
                }
                if (ii == 0) continue;
                triplets.emplace_back(row, static_cast<Eigen::Index>(op.unknown(ii, jj)), -t.w);
            }
        }
    }
    op.A.resize(rows, rows);
    op.A.setFromTriplets(triplets.begin(), triplets.end());
    op.A.makeCompressed();
    return op;
}

struct TimeStepper::Factors {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> euler;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> bdf2;
};

namespace {

void factorize(Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>& lu,
               const Eigen::SparseMatrix<double>& A, double scale) {
    Eigen::SparseMatrix<double> I(A.rows(), A.cols());
    I.setIdentity();
    const Eigen::SparseMatrix<double> M = I + scale * A;
    lu.analyzePattern(M);
    lu.factorize(M);
    if (lu.info() != Eigen::Success) {
        throw Error(ErrorCategory::Numerical, "singular time-step matrix: " + lu.lastErrorMessage());
    }
}

}  // namespace

TimeStepper::TimeStepper(DiscreteOperator op) : op_(std::move(op)), factors_(std::make_unique<Factors>()) {
    const double dt = op_.grid.dt();
    factorize(factors_->euler, op_.A, dt);
    factorize(factors_->bdf2, op_.A, 2.0 / 3.0 * dt);
}

TimeStepper::~TimeStepper() = default;
TimeStepper::TimeStepper(TimeStepper&&) noexcept = default;
TimeStepper& TimeStepper::operator=(TimeStepper&&) noexcept = default;

Eigen::VectorXd TimeStepper::solve_euler(const Eigen::VectorXd& rhs) const { return factors_->euler.solve(rhs); }

Eigen::VectorXd TimeStepper::solve_bdf2(const Eigen::VectorXd& rhs) const { return factors_->bdf2.solve(rhs); }

void TimeStepper::store(Surface& out, int k, const Eigen::VectorXd& g, double x_min_value) const {
    const Grid& grid = op_.grid;
    for (int j = 0; j < grid.n; ++j) {
        out.at(0, j, k) = x_min_value;
        for (int i = 1; i <= grid.m; ++i) {
            out.at(i, j, k) = g[static_cast<Eigen::Index>(op_.unknown(i, j))];
        }
    }
    for (int i = 0; i <= grid.m; ++i) out.at(i, grid.n, k) = out.at(i, grid.n - 1, k);
}

PriceSurface solve_price(const TimeStepper& stepper, const CallOption& option) {
    option.validate();
    const DiscreteOperator& op = stepper.op();
    const Grid& grid = op.grid;
    if (std::abs(grid.tau - option.maturity) > 1e-12 * std::max(1.0, option.maturity)) {
        throw Error(ErrorCategory::InvalidArgument, "grid horizon does not match the option maturity");
    }
    Eigen::VectorXd payoff(static_cast<Eigen::Index>(op.unknowns()));
    for (int j = 0; j < grid.n; ++j) {
        for (int i = 1; i <= grid.m; ++i) {
            payoff[static_cast<Eigen::Index>(op.unknown(i, j))] = call_payoff(grid.x(i), option.strike);
        }
    }
    PriceSurface surface = stepper.march(payoff, 0.0, [&](int, Eigen::VectorXd& src) { src = op.B; });
    // Slice 0 is the payoff everywhere, including the Dirichlet column.
    for (int j = 0; j <= grid.n; ++j) surface.at(0, j, 0) = call_payoff(grid.x(0), option.strike);
    for (const double v : surface.values()) {
        if (!std::isfinite(v)) throw Error(ErrorCategory::Numerical, "price solve produced non-finite values");
    }
    return surface;
}

PriceSurface solve_price(const DiscreteOperator& op, const CallOption& option) {
    return solve_price(TimeStepper(op), option);
}

double price_at(const Surface& surface, double x, double y, double time_to_maturity) {
    const Grid& g = surface.grid();
    const double dt = g.dt();
    const double kf = std::round(time_to_maturity / dt);
    if (!(std::abs(time_to_maturity - kf * dt) <= 0.5 * dt * (1.0 + 1e-12)) || kf < 0.0 || kf > g.s) {
        std::ostringstream os;
        os << "time to maturity " << time_to_maturity << " is outside the grid";
        throw Error(ErrorCategory::Domain, os.str());
    }
    const double ex = 1e-12 * (g.x_max - g.x_min);
    const double ey = 1e-12 * g.y_max;
    if (!(x >= g.x_min - ex && x <= g.x_max + ex && y >= -ey && y <= g.y_max + ey)) {
        std::ostringstream os;
        os << "query (" << x << ", " << y << ") is outside the grid";
        throw Error(ErrorCategory::Domain, os.str());
    }
    const int k = static_cast<int>(kf);
    const double u = std::clamp((x - g.x_min) / g.dx(), 0.0, static_cast<double>(g.m));
    const double v = std::clamp(y / g.dy(), 0.0, static_cast<double>(g.n));
    const int i = std::min(static_cast<int>(u), g.m - 1);
    const int j = std::min(static_cast<int>(v), g.n - 1);
    const double fu = u - i;
    const double fv = v - j;
    return (1.0 - fu) * (1.0 - fv) * surface.at(i, j, k) + fu * (1.0 - fv) * surface.at(i + 1, j, k) +
           (1.0 - fu) * fv * surface.at(i, j + 1, k) + fu * fv * surface.at(i + 1, j + 1, k);
}

}  // namespace heston
