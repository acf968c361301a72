// This file is part of rmdp, a C++ library for studying static and dynamic
// formulations of finite-horizon robust Markov decision processes.
//
// MIT License
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to deal
// in the Software without restriction, including without limitation the rights
// to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
// copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in
// all copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
// OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
// SOFTWARE.


#pragma once

// Partial minimization of the 2 x 2 local-minimizer gadget over its second
// stage policy. With x = Pr(first action 0), a = pi(0 | state 0) and
// b = pi(0 | state 1) at the second stage, the robust value is
//   g_x(a, b) = max{ x a + (1-x)(1 - 2b), x b + (1-x)(1 - 2a) }
// and f(x) = min_{a,b} g_x(a, b) = min{1 - x, 2x - 1}.

#include "rmdp/definitions.hpp"
#include "rmdp/mdp.hpp"

#include <algorithm>
#include <cmath>

namespace rmdp::landscape {

/// Robust value of the gadget as a function of the three free coordinates.
inline prec_t g(prec_t pi1_0, prec_t a, prec_t b) {
    const prec_t pi1_1 = 1.0 - pi1_0;
    return std::max(pi1_0 * a + pi1_1 * (1.0 - 2.0 * b), pi1_0 * b + pi1_1 * (1.0 - 2.0 * a));
}

enum class ScanMode { diagonal, full };

namespace detail {

inline void check_probability(prec_t x) {
    if (!(x >= 0 && x <= 1)) throw ModelError("first-stage probability must be in [0, 1]");
}

/// 0, step, 2 step, ..., closing with exactly 1
inline numvec unit_grid(prec_t step, prec_t max_step = 0.1) {
    if (!(step > 0 && step <= max_step))
        throw ModelError(rmdp::detail::concat("grid step must be in (0, ", max_step, "]"));
    numvec points;
    for (std::size_t k = 0;; ++k) {
        const prec_t x = prec_t(k) * step;
        if (x >= 1.0 - 1e-9) break;
        points.push_back(x);
    }
    points.push_back(1.0);
    return points;
}

} // namespace detail

/**
 * Minimum of g over a grid of second-stage policies. The diagonal mode scans
 * only a = b, which suffices because g is convex and symmetric; the full mode
 * scans the whole (a, b) square.
 */
inline prec_t f_numeric(prec_t pi1_0, prec_t grid_step, ScanMode mode = ScanMode::diagonal) {
    detail::check_probability(pi1_0);
    const numvec grid = detail::unit_grid(grid_step);
    prec_t best = std::numeric_limits<prec_t>::infinity();
    for (prec_t a : grid) {
        if (mode == ScanMode::diagonal) {
            best = std::min(best, g(pi1_0, a, a));
            continue;
        }
        for (prec_t b : grid) best = std::min(best, g(pi1_0, a, b));
    }
    return best;
}

/// Closed form min{pi1_1, pi1_0 - pi1_1} with pi1_1 = 1 - pi1_0.
inline prec_t f_closed(prec_t pi1_0) {
    detail::check_probability(pi1_0);
    const prec_t pi1_1 = 1.0 - pi1_0;
    return std::min(pi1_1, pi1_0 - pi1_1);
}

struct ScanRow {
    prec_t pi1_0 = 0;
    prec_t f_numeric = 0;
    prec_t f_closed = 0;
    prec_t gap = 0;
};

/// Rows at pi1_0 = 0, step, 2 step, ..., ending with 1.
inline std::vector<ScanRow> scan(prec_t grid_step_pi1, prec_t grid_step_inner,
                                 ScanMode mode = ScanMode::diagonal) {
    detail::unit_grid(grid_step_inner);
    std::vector<ScanRow> rows;
    for (prec_t x : detail::unit_grid(grid_step_pi1, 1.0)) {
        ScanRow row;
        row.pi1_0 = x;
        row.f_numeric = f_numeric(x, grid_step_inner, mode);
        row.f_closed = f_closed(x);
        row.gap = row.f_numeric - row.f_closed;
        rows.push_back(row);
    }
    return rows;
}

} // namespace rmdp::landscape
