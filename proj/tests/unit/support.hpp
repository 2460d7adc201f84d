#pragma once

#include "heston/model.hpp"
#include "heston/pde.hpp"

namespace heston::fixtures {

// Parameter set estimated from one year of daily index data.
inline HestonParams desk_params() { return {16.6, 0.017, 0.28, -0.54, 0.0}; }

inline Grid desk_grid(int m = 90, int n = 80, int s = 63, double tau = 0.25) {
    return {100.0, 2800.0, 1.0, tau, m, n, s};
}

inline Grid small_grid(double tau = 0.25) { return {100.0, 2800.0, 1.0, tau, 30, 24, 16}; }

}  // namespace heston::fixtures
