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

#include "rmdp/mdp.hpp"

#include <cmath>
#include <cstdint>

namespace rmdp {

// **************************************************************************
// Set-partition gadget
// **************************************************************************

/// Weights w_1..w_n of a set-partition problem.
struct PartitionSpec {
    numvec weights;
};

namespace detail {

inline numvec point_mass(std::size_t size, std::size_t index) {
    numvec p(size, 0.0);
    p[index] = 1.0;
    return p;
}

} // namespace detail

/**
 * Two-kernel instance whose deterministic robust optimum encodes a set
 * partition of the weights.
 *
 * The horizon is 2n. Stage 2i (0-based) has a single state and actions {0,1};
 * stage 2i+1 has states {0,1} and a placeholder action, with cost w_i in
 * state 0 and 0 in state 1. The first kernel sends action a to state a, the
 * second sends action a to state 1-a, and both return to the next decision
 * stage deterministically. A deterministic policy then pays the weights it
 * selects with action 0 under the first kernel and the complement under the
 * second.
 */
inline RobustInstance partition_instance(const PartitionSpec& spec) {
    if (spec.weights.empty()) throw ModelError("partition weights must be nonempty");
    for (prec_t w : spec.weights)
        if (!(w > 0) || !std::isfinite(w))
            throw ModelError("partition weights must be positive and finite");

    const std::size_t n = spec.weights.size();
    RobustInstance instance;
    auto& mdp = instance.mdp;
    for (std::size_t i = 0; i < n; ++i) {
        mdp.stages.push_back({1, 2});
        mdp.cost.push_back({{0.0, 0.0}});
        mdp.stages.push_back({2, 1});
        mdp.cost.push_back({{spec.weights[i]}, {0.0}});
    }

    Kernel same, flipped;
    for (std::size_t i = 0; i < n; ++i) {
        same.trans.push_back({{detail::point_mass(2, 0), detail::point_mass(2, 1)}});
        flipped.trans.push_back({{detail::point_mass(2, 1), detail::point_mass(2, 0)}});
        if (i + 1 < n) {
            const std::vector<std::vector<numvec>> advance{{detail::point_mass(1, 0)},
                                                           {detail::point_mass(1, 0)}};
            same.trans.push_back(advance);
            flipped.trans.push_back(advance);
        }
    }
    instance.ambiguity.kernels = {std::move(same), std::move(flipped)};
    instance.initial_state = 0;
    return instance;
}

/// Largest total weight accepted by subset_sum_oracle
constexpr std::uint64_t SUBSET_SUM_LIMIT = 10'000'000;

/**
 * Decides whether the weights split into two parts of equal sum, by the
 * pseudo-polynomial reachable-sums table. Weights must be integers.
 */
inline bool subset_sum_oracle(const PartitionSpec& spec) {
    std::uint64_t total = 0;
    std::vector<std::uint64_t> weights;
    for (prec_t w : spec.weights) {
        if (!(w > 0) || w != std::floor(w))
            throw ModelError("subset-sum weights must be positive integers");
        weights.push_back(static_cast<std::uint64_t>(w));
        total += weights.back();
        if (total > SUBSET_SUM_LIMIT)
            throw SizeGuardError("subset-sum total exceeds limit");
    }
    if (total % 2 != 0) return false;
    const std::uint64_t target = total / 2;
    std::vector<char> reachable(target + 1, 0);
    reachable[0] = 1;
    for (std::uint64_t w : weights)
        for (std::uint64_t v = target; v >= w; --v) {
            if (reachable[v - w]) reachable[v] = 1;
            if (v == w) break;
        }
    return reachable[target] != 0;
}

// **************************************************************************
// Local-minimizer gadget
// **************************************************************************

/// Square cost matrix for the three-stage matrix gadget.
struct MatrixGadgetSpec {
    std::size_t n = 0;
    /// row-major n x n matrix
    numvec matrix;

    prec_t at(std::size_t i, std::size_t j) const { return matrix[i * n + j]; }
};

/**
 * Three-stage two-kernel instance built from an n x n matrix A.
 *
 * Stage 0 has one state and actions [n]; stage 1 has states [n] and actions
 * [n]; stage 2 has states [n] x [n] (state (i,j) has index i*n + j) with a
 * placeholder action and cost A(i,j). The first kernel moves action i to state
 * i and then (i, j) to (i, j). The second moves action i to state n-1-i and
 * then (i, j) to (n-1-i, j), so both kernels end in (i, j) when the first action
 * was i, but the second-stage decision is read at the reversed state.
 */
inline RobustInstance matrix_gadget_instance(const MatrixGadgetSpec& spec) {
    const std::size_t n = spec.n;
    if (n == 0) throw ModelError("matrix gadget needs n >= 1");
    if (spec.matrix.size() != n * n)
        throw ModelError(detail::concat("matrix gadget needs ", n * n, " entries"));
    for (prec_t v : spec.matrix)
        if (!std::isfinite(v)) throw ModelError("matrix gadget entries must be finite");

    RobustInstance instance;
    auto& mdp = instance.mdp;
    mdp.stages = {{1, n}, {n, n}, {n * n, 1}};
    mdp.cost.resize(3);
    mdp.cost[0] = {numvec(n, 0.0)};
    mdp.cost[1].assign(n, numvec(n, 0.0));
    mdp.cost[2].resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) mdp.cost[2][i * n + j] = {spec.at(i, j)};

    Kernel straight, reversed;
    straight.trans.resize(2);
    reversed.trans.resize(2);
    straight.trans[0].resize(1);
    reversed.trans[0].resize(1);
    for (std::size_t i = 0; i < n; ++i) {
        straight.trans[0][0].push_back(detail::point_mass(n, i));
        reversed.trans[0][0].push_back(detail::point_mass(n, n - 1 - i));
    }
    straight.trans[1].resize(n);
    reversed.trans[1].resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            straight.trans[1][i].push_back(detail::point_mass(n * n, i * n + j));
            reversed.trans[1][i].push_back(detail::point_mass(n * n, (n - 1 - i) * n + j));
        }
    instance.ambiguity.kernels = {std::move(straight), std::move(reversed)};
    instance.initial_state = 0;
    return instance;
}

/// The 2 x 2 matrix gadget with A = [[1, 0], [-1, 1]].
inline RobustInstance local_minimizer_instance() {
    return matrix_gadget_instance({2, {1.0, 0.0, -1.0, 1.0}});
}

/// The sub-optimal strict local minimizer of the 2 x 2 gadget.
inline PolicyMR local_minimizer_trap_policy() {
    PolicyMR policy;
    policy.dist = {{{1.0, 0.0}}, {{0.0, 1.0}, {0.0, 1.0}}, {{1.0}, {1.0}, {1.0}, {1.0}}};
    return policy;
}

/// A global minimizer of the 2 x 2 gadget (robust value -1).
inline PolicyMR local_minimizer_optimal_policy() {
    PolicyMR policy;
    policy.dist = {{{0.0, 1.0}}, {{1.0, 0.0}, {1.0, 0.0}}, {{1.0}, {1.0}, {1.0}, {1.0}}};
    return policy;
}

} // namespace rmdp
