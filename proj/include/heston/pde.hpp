#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "heston/model.hpp"

namespace heston {

/// Uniform space-time grid on [x_min, x_max] x [0, y_max] x [0, tau].
/// Node (i, j, k) sits at (x_min + i dx, j dy, k dt) with i = 0..m, j = 0..n, k = 0..s, where
/// k counts time to maturity.
struct Grid {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
    double tau = 0.0;
    int m = 0;
    int n = 0;
    int s = 0;

    double dx() const { return (x_max - x_min) / m; }
    double dy() const { return y_max / n; }
    double dt() const { return tau / s; }
    double x(int i) const { return x_min + i * dx(); }
    double y(int j) const { return j * dy(); }
    double t(int k) const { return k * dt(); }
    std::size_t nodes_per_slice() const { return static_cast<std::size_t>(m + 1) * (n + 1); }

    void validate() const;
    bool same_as(const Grid& other) const;
};

/// Field on every node of a grid and every time slice; storage is row-major in (k, j, i).
class Surface {
public:
    Surface() = default;
    explicit Surface(const Grid& grid);

    const Grid& grid() const { return grid_; }

    double& at(int i, int j, int k) { return values_[index(i, j, k)]; }
    double at(int i, int j, int k) const { return values_[index(i, j, k)]; }

    std::span<double> slice(int k);
    std::span<const double> slice(int k) const;

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * (grid_.n + 1) + j) * (grid_.m + 1) + i;
    }

    Grid grid_;
    std::vector<double> values_;
};

using PriceSurface = Surface;

/// Semi-discrete system dg/dt + A g = B for the unknowns i = 1..m, j = 0..n-1 (m*n rows,
/// x-major ordering). The x_min column (Dirichlet g = 0) and the y_max row (eliminated through
/// the discrete Neumann condition g_{i,n} = g_{i,n-1}) are not unknowns.
///
/// Interior rows discretize -L with central first differences, three-point second differences
/// and the seven-point mixed stencil
///   2 dx dy d_xy g = 2 g + g(i+1,j+1) + g(i-1,j-1) - g(i+1,j) - g(i-1,j) - g(i,j+1) - g(i,j-1).
/// Rows j = 0 discretize r x d_x + kappa theta d_y - r with the upwind d_y stencil
/// (-3 g0 + 4 g1 - g2) / (2 dy). The x_max Neumann condition d_x g = 1 uses the ghost node
/// g(m+1, j) = g(m-1, j) + 2 dx and contributes the load B.
struct DiscreteOperator {
    Grid grid;
    HestonParams params;
    MarketEnv env;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd B;

    std::size_t unknowns() const { return static_cast<std::size_t>(grid.m) * grid.n; }
    std::size_t unknown(int i, int j) const { return static_cast<std::size_t>(j) * grid.m + (i - 1); }
};

DiscreteOperator assemble_operator(const Grid& grid, const HestonParams& p, const MarketEnv& env);

/// Holds the LU factorizations of I + dt A (first, implicit Euler step) and I + 2/3 dt A (every
/// BDF2 step). Solves are read-only with respect to the factorizations.
class TimeStepper {
public:
    explicit TimeStepper(DiscreteOperator op);
    ~TimeStepper();
    TimeStepper(TimeStepper&&) noexcept;
    TimeStepper& operator=(TimeStepper&&) noexcept;

    const DiscreteOperator& op() const { return op_; }
    const Grid& grid() const { return op_.grid; }

    /// Marches from the initial unknowns to slice s. `load(k, out)` fills the right-hand-side
    /// source for the step landing on slice k (B for prices, the forcing for sensitivities).
    /// Boundary nodes of the returned surface are filled with `x_min_value` at i = 0 and with
    /// the j = n-1 values on the eliminated y_max row.
    template <typename LoadFn>
    Surface march(const Eigen::VectorXd& initial, double x_min_value, LoadFn&& load) const;

private:
    Eigen::VectorXd solve_euler(const Eigen::VectorXd& rhs) const;
    Eigen::VectorXd solve_bdf2(const Eigen::VectorXd& rhs) const;
    void store(Surface& out, int k, const Eigen::VectorXd& g, double x_min_value) const;

    struct Factors;
    DiscreteOperator op_;
    std::unique_ptr<Factors> factors_;
};

/// Solves the pricing PDE for a call with payoff (x - K)^+ at time to maturity 0.
/// The grid's tau must match the option maturity.
PriceSurface solve_price(const TimeStepper& stepper, const CallOption& option);
PriceSurface solve_price(const DiscreteOperator& op, const CallOption& option);

/// Bilinear interpolation in (x, y) on the time slice nearest to time_to_maturity, which must
/// lie within dt/2 of a slice.
double price_at(const Surface& surface, double x, double y, double time_to_maturity);

// ---------------------------------------------------------------------------------------------

template <typename LoadFn>
Surface TimeStepper::march(const Eigen::VectorXd& initial, double x_min_value, LoadFn&& load) const {
    const Grid& g = op_.grid;
    const double dt = g.dt();
    Surface out(g);
    store(out, 0, initial, x_min_value);

    Eigen::VectorXd src(static_cast<Eigen::Index>(op_.unknowns()));
    Eigen::VectorXd prev = initial;
    load(1, src);
    Eigen::VectorXd curr = solve_euler(initial + dt * src);
    store(out, 1, curr, x_min_value);

    for (int k = 1; k < g.s; ++k) {
        load(k + 1, src);
        Eigen::VectorXd rhs = (4.0 / 3.0) * curr - (1.0 / 3.0) * prev + (2.0 / 3.0) * dt * src;
        Eigen::VectorXd next = solve_bdf2(rhs);
        prev = std::move(curr);
        curr = std::move(next);
        store(out, k + 1, curr, x_min_value);
    }
    return out;
}

}  // namespace heston
