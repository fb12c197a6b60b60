#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "idseries/error.hpp"

namespace idseries {

struct QuadratureResult {
    double value = 0.0;
    std::size_t subintervals = 0;
    std::size_t evaluations = 0;
};

/// Composite Simpson on [a, b], doubling the subinterval count until two
/// successive estimates agree to `rel_tol`. Earlier nodes are reused, so each
/// doubling only evaluates the new midpoints.
template <class F>
QuadratureResult simpson_doubling(F&& f, double a, double b, double rel_tol, std::size_t max_subintervals,
                                  std::size_t min_subintervals = 16) {
    if (b == a) return {0.0, 0, 0};
    const double width = b - a;
    // Sums over nodes by Simpson weight class: endpoints, even interior, odd interior.
    const double ends = f(a) + f(b);
    double even = 0.0;
    double odd = f(a + 0.5 * width);
    std::size_t n = 2;
    std::size_t evals = 3;
    double prev = width / 6.0 * (ends + 4.0 * odd);

    while (true) {
        const std::size_t next = 2 * n;
        if (next > max_subintervals)
            throw Error("tail_bounds", ErrorCode::not_converged, "Simpson quadrature hit the subinterval cap");
        const double h = width / static_cast<double>(next);
        double fresh = 0.0;
        for (std::size_t i = 1; i < next; i += 2) fresh += f(a + h * static_cast<double>(i));
        evals += next / 2;
        even += odd;
        odd = fresh;
        n = next;
        const double cur = h / 3.0 * (ends + 2.0 * even + 4.0 * odd);
        if (n >= min_subintervals && std::abs(cur - prev) <= rel_tol * std::abs(cur)) return {cur, n, evals};
        if (n >= min_subintervals && cur == 0.0 && prev == 0.0) return {0.0, n, evals};
        prev = cur;
    }
}

}  // namespace idseries
