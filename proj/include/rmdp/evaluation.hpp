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
#include <optional>

namespace rmdp {

namespace detail {

inline void check_evaluation_inputs(const FiniteHorizonMDP& mdp, const Kernel& kernel,
                                    const PolicyMR& policy, std::size_t s1) {
    auto violations = validate(mdp);
    if (violations.empty()) {
        auto kv = validate(mdp, kernel);
        auto pv = validate(mdp, policy);
        violations.insert(violations.end(), kv.begin(), kv.end());
        violations.insert(violations.end(), pv.begin(), pv.end());
        if (s1 >= mdp.num_states(0))
            violations.push_back(concat("initial state ", s1, " out of range"));
    }
    throw_if_invalid(violations);
}

/// Backward pass without input checks. values[t][s], with t = 0..T-1.
inline std::vector<numvec> backward_values(const FiniteHorizonMDP& mdp,
                                           const Kernel& kernel, const PolicyMR& policy) {
    const std::size_t T = mdp.horizon();
    std::vector<numvec> values(T);
    for (std::size_t t = T; t-- > 0;) {
        values[t].assign(mdp.num_states(t), 0.0);
        for (std::size_t s = 0; s < mdp.num_states(t); ++s) {
            prec_t v = 0;
            for (std::size_t a = 0; a < mdp.num_actions(t); ++a) {
                const prec_t pa = policy.dist[t][s][a];
                if (pa == 0) continue;
                prec_t q = mdp.cost[t][s][a];
                if (t + 1 < T) {
                    const numvec& row = kernel.trans[t][s][a];
                    for (std::size_t sn = 0; sn < row.size(); ++sn)
                        q += row[sn] * values[t + 1][sn];
                }
                v += pa * q;
            }
            values[t][s] = v;
        }
    }
    return values;
}

/// Forward pass without input checks. occupancy[t][s] = Pr(S_t = s).
inline std::vector<numvec> forward_occupancy(const FiniteHorizonMDP& mdp,
                                             const Kernel& kernel, const PolicyMR& policy,
                                             std::size_t s1) {
    const std::size_t T = mdp.horizon();
    std::vector<numvec> occ(T);
    occ[0].assign(mdp.num_states(0), 0.0);
    occ[0][s1] = 1.0;
    for (std::size_t t = 0; t + 1 < T; ++t) {
        occ[t + 1].assign(mdp.num_states(t + 1), 0.0);
        for (std::size_t s = 0; s < mdp.num_states(t); ++s) {
            if (occ[t][s] == 0) continue;
            for (std::size_t a = 0; a < mdp.num_actions(t); ++a) {
                const prec_t w = occ[t][s] * policy.dist[t][s][a];
                if (w == 0) continue;
                const numvec& row = kernel.trans[t][s][a];
                for (std::size_t sn = 0; sn < row.size(); ++sn)
                    occ[t + 1][sn] += w * row[sn];
            }
        }
    }
    return occ;
}

} // namespace detail

/**
 * Expected total cost of a randomized Markov policy under a fixed kernel,
 * computed by backward induction:
 *   V_T(s) = sum_a pi_T(a|s) c_T(s,a)
 *   V_t(s) = sum_a pi_t(a|s) [c_t(s,a) + sum_s' P_t(s'|s,a) V_{t+1}(s')]
 *
 * @throws ModelError when the inputs are malformed or mutually incompatible
 */
inline prec_t evaluate(const FiniteHorizonMDP& mdp, const Kernel& kernel,
                       const PolicyMR& policy, std::size_t s1) {
    detail::check_evaluation_inputs(mdp, kernel, policy, s1);
    return detail::backward_values(mdp, kernel, policy)[0][s1];
}

/// Value function for every stage and state (checked inputs).
inline std::vector<numvec> stage_values(const FiniteHorizonMDP& mdp, const Kernel& kernel,
                                        const PolicyMR& policy) {
    detail::check_evaluation_inputs(mdp, kernel, policy, 0);
    return detail::backward_values(mdp, kernel, policy);
}

/// State-visit probabilities Pr(S_t = s) when starting from s1 (checked inputs).
inline std::vector<numvec> state_occupancy(const FiniteHorizonMDP& mdp,
                                           const Kernel& kernel, const PolicyMR& policy,
                                           std::size_t s1) {
    detail::check_evaluation_inputs(mdp, kernel, policy, s1);
    return detail::forward_occupancy(mdp, kernel, policy, s1);
}

/// Expected cost incurred at each stage, E[c_t(S_t, A_t)], for t = 0..T-1.
inline numvec stage_expected_costs(const FiniteHorizonMDP& mdp, const Kernel& kernel,
                                   const PolicyMR& policy, std::size_t s1) {
    const auto occ = state_occupancy(mdp, kernel, policy, s1);
    numvec result(mdp.horizon(), 0.0);
    for (std::size_t t = 0; t < mdp.horizon(); ++t)
        for (std::size_t s = 0; s < mdp.num_states(t); ++s)
            for (std::size_t a = 0; a < mdp.num_actions(t); ++a)
                result[t] += occ[t][s] * policy.dist[t][s][a] * mdp.cost[t][s][a];
    return result;
}

/// Maximal number of enumerated trajectories in brute_force_evaluate
constexpr std::uint64_t BRUTE_FORCE_LIMIT = 10'000'000;

/**
 * Reference evaluation by enumerating every trajectory (s_1, a_1, ..., s_T, a_T)
 * and summing probability-weighted cumulative costs. Exponential; meant as an
 * oracle for the backward induction in evaluate().
 *
 * @throws SizeGuardError when the product of |S_t| |A_t| exceeds BRUTE_FORCE_LIMIT
 */
inline prec_t brute_force_evaluate(const FiniteHorizonMDP& mdp, const Kernel& kernel,
                                   const PolicyMR& policy, std::size_t s1) {
    detail::check_evaluation_inputs(mdp, kernel, policy, s1);
    std::uint64_t count = 1;
    for (std::size_t t = 0; t < mdp.horizon(); ++t)
        count = detail::saturating_mul(count, mdp.num_states(t) * mdp.num_actions(t));
    if (count > BRUTE_FORCE_LIMIT)
        throw SizeGuardError(detail::concat("trajectory count ", count,
                                            " exceeds limit ", BRUTE_FORCE_LIMIT));

    const std::size_t T = mdp.horizon();
    prec_t total = 0;
    // explicit stack of partial trajectories: (stage, state, probability, accumulated cost)
    struct Node {
        std::size_t t, s;
        prec_t prob, acc;
    };
    std::vector<Node> stack{{0, s1, 1.0, 0.0}};
    while (!stack.empty()) {
        const Node node = stack.back();
        stack.pop_back();
        for (std::size_t a = 0; a < mdp.num_actions(node.t); ++a) {
            const prec_t pa = node.prob * policy.dist[node.t][node.s][a];
            const prec_t acc = node.acc + mdp.cost[node.t][node.s][a];
            if (node.t + 1 == T) {
                total += pa * acc;
                continue;
            }
            const numvec& row = kernel.trans[node.t][node.s][a];
            for (std::size_t sn = 0; sn < row.size(); ++sn)
                stack.push_back({node.t + 1, sn, pa * row[sn], acc});
        }
    }
    return total;
}

/**
 * Exact integer value of a deterministic policy. Applies when all costs on the
 * followed path are integers and every transition row used is a point mass.
 * Returns nullopt otherwise.
 */
inline std::optional<std::int64_t> exact_md_value(const FiniteHorizonMDP& mdp,
                                                  const Kernel& kernel,
                                                  const PolicyMD& policy, std::size_t s1) {
    constexpr prec_t max_exact = 9007199254740992.0; // 2^53
    std::int64_t total = 0;
    std::size_t s = s1;
    for (std::size_t t = 0; t < mdp.horizon(); ++t) {
        const std::size_t a = policy.act[t][s];
        const prec_t c = mdp.cost[t][s][a];
        if (c != std::floor(c) || std::abs(c) >= max_exact) return std::nullopt;
        total += static_cast<std::int64_t>(c);
        if (t + 1 == mdp.horizon()) break;
        const numvec& row = kernel.trans[t][s][a];
        std::optional<std::size_t> next;
        for (std::size_t sn = 0; sn < row.size(); ++sn) {
            if (row[sn] == 1.0 && !next) next = sn;
            else if (row[sn] != 0.0) return std::nullopt;
        }
        if (!next) return std::nullopt;
        s = *next;
    }
    return total;
}

} // namespace rmdp
