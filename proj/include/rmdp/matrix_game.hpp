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

#include "rmdp/definitions.hpp"
#include "rmdp/mdp.hpp"

#include <algorithm>
#include <cmath>

namespace rmdp {

/// Zero-sum game: the row player (actions) minimizes, the column player (kernels) maximizes.
struct MatrixGame {
    /// payoff[a][k]
    std::vector<numvec> payoff;

    std::size_t rows() const { return payoff.size(); }
    std::size_t cols() const { return payoff.empty() ? 0 : payoff.front().size(); }
};

struct MatrixGameSolution {
    /// minimizing mixed strategy over rows
    numvec strategy;
    /// worst column payoff of strategy
    prec_t value = 0;
    /// optimal mixture of columns from the dual
    numvec adversary;
    /// worst column payoff of strategy minus best row response to adversary
    prec_t gap = 0;
};

/// Default tolerance of matrix_game_solve
constexpr prec_t MATRIX_GAME_EPS = 1e-9;

namespace detail {

/// Worst column payoff of a row mixture.
inline prec_t max_column(const MatrixGame& game, const numvec& strategy) {
    prec_t worst = -std::numeric_limits<prec_t>::infinity();
    for (std::size_t k = 0; k < game.cols(); ++k) {
        prec_t v = 0;
        for (std::size_t a = 0; a < game.rows(); ++a) v += strategy[a] * game.payoff[a][k];
        worst = std::max(worst, v);
    }
    return worst;
}

/// Best row response payoff against a column mixture.
inline prec_t min_row(const MatrixGame& game, const numvec& adversary) {
    prec_t best = std::numeric_limits<prec_t>::infinity();
    for (std::size_t a = 0; a < game.rows(); ++a) {
        prec_t v = 0;
        for (std::size_t k = 0; k < game.cols(); ++k) v += adversary[k] * game.payoff[a][k];
        best = std::min(best, v);
    }
    return best;
}

} // namespace detail

/**
 * Solves min_{p in simplex} max_k sum_a p_a payoff[a][k].
 *
 * After shifting the payoff to be positive, the game becomes the linear
 * program max 1'x s.t. M'x <= 1, x >= 0, whose solution gives p = x / 1'x. The
 * program is solved by a dense tableau simplex with Bland's rule; the dual
 * yields the adversary's optimal mixture, and the duality gap certifies the
 * value to within eps.
 *
 * A single column reduces to the smallest entry, taking the lowest row on ties.
 *
 * @throws NumericError when the certified gap exceeds eps
 */
inline MatrixGameSolution matrix_game_solve(const MatrixGame& game,
                                            prec_t eps = MATRIX_GAME_EPS) {
    if (!(eps > 0)) throw ModelError("matrix game tolerance must be positive");
    const std::size_t A = game.rows(), K = game.cols();
    if (A == 0 || K == 0) throw ModelError("matrix game must be nonempty");
    prec_t lowest = std::numeric_limits<prec_t>::infinity();
    for (const auto& row : game.payoff) {
        if (row.size() != K) throw ModelError("matrix game rows differ in length");
        for (prec_t v : row) {
            if (!std::isfinite(v)) throw ModelError("matrix game entries must be finite");
            lowest = std::min(lowest, v);
        }
    }

    MatrixGameSolution solution;
    if (K == 1 || A == 1) {
        solution.strategy.assign(A, 0.0);
        solution.adversary.assign(K, 0.0);
        if (K == 1) {
            std::size_t best = 0;
            for (std::size_t a = 1; a < A; ++a)
                if (game.payoff[a][0] < game.payoff[best][0]) best = a;
            solution.strategy[best] = 1.0;
            solution.adversary[0] = 1.0;
        } else {
            solution.strategy[0] = 1.0;
            std::size_t worst = 0;
            for (std::size_t k = 1; k < K; ++k)
                if (game.payoff[0][k] > game.payoff[0][worst]) worst = k;
            solution.adversary[worst] = 1.0;
        }
        solution.value = detail::max_column(game, solution.strategy);
        solution.gap = solution.value - detail::min_row(game, solution.adversary);
        return solution;
    }

    // tableau: K constraint rows, then the objective row; columns x (A), slacks (K), rhs
    const prec_t shift = 1.0 - lowest;
    const std::size_t width = A + K + 1;
    std::vector<numvec> tab(K + 1, numvec(width, 0.0));
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t a = 0; a < A; ++a) tab[k][a] = game.payoff[a][k] + shift;
        tab[k][A + k] = 1.0;
        tab[k][width - 1] = 1.0;
    }
    // objective row holds reduced costs of the maximization
    for (std::size_t a = 0; a < A; ++a) tab[K][a] = 1.0;
    std::vector<std::size_t> basis(K);
    for (std::size_t k = 0; k < K; ++k) basis[k] = A + k;

    constexpr prec_t pivot_tol = 1e-12;
    const std::size_t max_pivots = 1000 * (A + K);
    std::size_t pivots = 0;
    for (;; ++pivots) {
        if (pivots > max_pivots) throw NumericError("matrix game simplex did not terminate");
        std::size_t enter = width;
        for (std::size_t j = 0; j + 1 < width; ++j)
            if (tab[K][j] > pivot_tol) {
                enter = j;
                break;
            }
        if (enter == width) break;

        std::size_t leave = K;
        prec_t best_ratio = std::numeric_limits<prec_t>::infinity();
        for (std::size_t k = 0; k < K; ++k) {
            if (tab[k][enter] <= pivot_tol) continue;
            const prec_t ratio = tab[k][width - 1] / tab[k][enter];
            if (ratio < best_ratio - 1e-15 ||
                (std::abs(ratio - best_ratio) <= 1e-15 && leave < K &&
                 basis[k] < basis[leave])) {
                best_ratio = ratio;
                leave = k;
            }
        }
        // M' is positive, so the program is bounded
        if (leave == K) throw NumericError("matrix game program reported unbounded");

        const prec_t pivot = tab[leave][enter];
        for (auto& v : tab[leave]) v /= pivot;
        for (std::size_t r = 0; r <= K; ++r) {
            if (r == leave || tab[r][enter] == 0) continue;
            const prec_t factor = tab[r][enter];
            for (std::size_t j = 0; j < width; ++j) tab[r][j] -= factor * tab[leave][j];
        }
        basis[leave] = enter;
    }

    numvec x(A, 0.0);
    for (std::size_t k = 0; k < K; ++k)
        if (basis[k] < A) x[basis[k]] = std::max(0.0, tab[k][width - 1]);
    numvec y(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) y[k] = std::max(0.0, -tab[K][A + k]);

    const auto normalize = [](numvec& v) {
        prec_t sum = 0;
        for (prec_t e : v) sum += e;
        if (!(sum > 0)) throw NumericError("matrix game simplex produced a zero solution");
        for (auto& e : v) e /= sum;
    };
    normalize(x);
    normalize(y);
    solution.strategy = std::move(x);
    solution.adversary = std::move(y);
    solution.value = detail::max_column(game, solution.strategy);
    solution.gap = solution.value - detail::min_row(game, solution.adversary);
    if (solution.gap > eps)
        throw NumericError(detail::concat("matrix game duality gap ", solution.gap,
                                          " exceeds tolerance ", eps));
    return solution;
}

} // namespace rmdp
