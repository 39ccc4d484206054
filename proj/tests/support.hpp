#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "jamdet/matrix.hpp"
#include "jamdet/measurement.hpp"
#include "oracle/brute_force.hpp"

namespace testing_support {

inline jamdet::ComponentLayout layout_for(std::size_t n) {
    std::vector<jamdet::Component> roles = jamdet::ComponentLayout::all().roles();
    roles.resize(n);
    return jamdet::ComponentLayout(roles);
}

inline jamdet::WindowMatrix window_from(const oracle::Columns& z) {
    return jamdet::WindowMatrix(oracle::flatten(z), layout_for(z.front().size()));
}

inline jamdet::WindowMatrix scalar_window(std::vector<double> values) {
    return jamdet::WindowMatrix::scalar(std::move(values));
}

inline double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline std::vector<std::size_t> full_grid(std::size_t n, std::size_t k) {
    std::vector<std::size_t> g;
    for (std::size_t k1 = n + 1; k1 + n + 1 <= k; ++k1) g.push_back(k1);
    return g;
}

}  // namespace testing_support
