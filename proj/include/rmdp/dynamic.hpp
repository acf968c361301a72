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

#include "rmdp/matrix_game.hpp"
#include "rmdp/robust.hpp"

#include <optional>

namespace rmdp {

enum class PolicyClass { deterministic, randomized };

/// Backward-induction solution of the dynamic (per-stage adversary) formulation.
struct DynamicSolution {
    /// values[t][s] for t = 0..T-1; the value after the last stage is zero
    std::vector<numvec> values;
    /// optimal policy; point masses for the deterministic class
    PolicyMR policy;
    std::optional<PolicyMD> deterministic_policy;
    /// largest certified duality gap of the stage games
    prec_t game_values_residual = 0;
};

/**
 * Stage game at (t, s): entry (a, k) is c_t(s,a) + sum_s' P_(k),t(s'|s,a) V_{t+1}(s').
 * At the last stage the continuation is zero, so entries are just costs.
 */
inline MatrixGame stage_game(const RobustInstance& instance, std::size_t t, std::size_t s,
                             const numvec& next_values) {
    const auto& mdp = instance.mdp;
    MatrixGame game;
    game.payoff.assign(mdp.num_actions(t), numvec(instance.ambiguity.size(), 0.0));
    for (std::size_t a = 0; a < mdp.num_actions(t); ++a)
        for (std::size_t k = 0; k < instance.ambiguity.size(); ++k) {
            prec_t v = mdp.cost[t][s][a];
            if (t + 1 < mdp.horizon()) {
                const numvec& row = instance.ambiguity.kernels[k].trans[t][s][a];
                for (std::size_t sn = 0; sn < row.size(); ++sn) v += row[sn] * next_values[sn];
            }
            game.payoff[a][k] = v;
        }
    return game;
}

/**
 * Backward induction for the dynamic formulation, where the adversary picks a
 * kernel index at each stage and state after seeing the state:
 *   V_t(s) = min_{pi(.|s)} max_k sum_a pi(a|s) [c_t(s,a) + P_(k),t(.|s,a) V_{t+1}]
 *
 * The randomized class solves each stage game in mixed strategies; the
 * deterministic class takes min_a max_k with ties to the lowest action.
 */
inline DynamicSolution dynamic_dp_solve(const RobustInstance& instance,
                                        PolicyClass policy_class,
                                        prec_t eps = MATRIX_GAME_EPS) {
    if (!(eps > 0)) throw ModelError("tolerance must be positive");
    detail::check_instance(instance);
    const auto& mdp = instance.mdp;
    const std::size_t T = mdp.horizon();

    DynamicSolution solution;
    solution.values.resize(T);
    solution.policy.dist.resize(T);
    PolicyMD md;
    md.act.resize(T);
    const numvec empty;
    for (std::size_t t = T; t-- > 0;) {
        const std::size_t S = mdp.num_states(t);
        solution.values[t].assign(S, 0.0);
        solution.policy.dist[t].resize(S);
        md.act[t].assign(S, 0);
        const numvec& next = t + 1 < T ? solution.values[t + 1] : empty;
        for (std::size_t s = 0; s < S; ++s) {
            const MatrixGame game = stage_game(instance, t, s, next);
            if (policy_class == PolicyClass::randomized) {
                const auto sol = matrix_game_solve(game, eps);
                solution.values[t][s] = sol.value;
                solution.policy.dist[t][s] = sol.strategy;
                solution.game_values_residual =
                    std::max(solution.game_values_residual, sol.gap);
            } else {
                std::size_t best = 0;
                prec_t best_value = 0;
                for (std::size_t a = 0; a < game.rows(); ++a) {
                    const prec_t worst =
                        *std::max_element(game.payoff[a].begin(), game.payoff[a].end());
                    if (a == 0 || worst < best_value) {
                        best = a;
                        best_value = worst;
                    }
                }
                solution.values[t][s] = best_value;
                md.act[t][s] = best;
                numvec p(game.rows(), 0.0);
                p[best] = 1.0;
                solution.policy.dist[t][s] = std::move(p);
            }
        }
    }
    if (policy_class == PolicyClass::deterministic) solution.deterministic_policy = md;
    return solution;
}

/**
 * Value of a fixed policy against the per-stage adversary:
 *   V_t(s) = max_k sum_a pi(a|s) [c_t(s,a) + P_(k),t(.|s,a) V_{t+1}]
 * Returns values[t][s].
 */
inline std::vector<numvec> dynamic_policy_values(const RobustInstance& instance,
                                                 const PolicyMR& policy) {
    detail::check_instance_policy(instance, policy);
    const auto& mdp = instance.mdp;
    const std::size_t T = mdp.horizon();
    std::vector<numvec> values(T);
    const numvec empty;
    for (std::size_t t = T; t-- > 0;) {
        values[t].assign(mdp.num_states(t), 0.0);
        const numvec& next = t + 1 < T ? values[t + 1] : empty;
        for (std::size_t s = 0; s < mdp.num_states(t); ++s) {
            const MatrixGame game = stage_game(instance, t, s, next);
            values[t][s] = detail::max_column(game, policy.dist[t][s]);
        }
    }
    return values;
}

inline prec_t dynamic_policy_value(const RobustInstance& instance, const PolicyMR& policy) {
    return dynamic_policy_values(instance, policy)[0][instance.initial_state];
}

// **************************************************************************
// Rectangularization
// **************************************************************************

/**
 * Granularity of independent kernel choice. With state_action every
 * (stage, state, action) row is chosen independently; with state the whole
 * row block of each (stage, state) comes from one kernel. The stage-game
 * recursion of dynamic_dp_solve corresponds to the state variant.
 */
enum class Rectangularity { state_action, state };

/// Maximal number of composite kernels built by rectangularize_enumerate
constexpr std::uint64_t RECTANGULAR_LIMIT = std::uint64_t(1) << 20;

/// Number of composite kernels of the rectangularized ambiguity set.
inline std::uint64_t rectangular_size(const RobustInstance& instance,
                                      Rectangularity granularity = Rectangularity::state_action) {
    const auto& mdp = instance.mdp;
    std::uint64_t count = 1;
    for (std::size_t t = 0; t + 1 < mdp.horizon(); ++t) {
        const std::size_t choices = granularity == Rectangularity::state_action
                                        ? mdp.num_states(t) * mdp.num_actions(t)
                                        : mdp.num_states(t);
        for (std::size_t i = 0; i < choices; ++i)
            count = detail::saturating_mul(count, instance.ambiguity.size());
    }
    return count;
}

/**
 * Explicit Cartesian-product closure of the ambiguity set: every kernel
 * formed by independently choosing one of the K original kernels for each row
 * (or row block, see Rectangularity). Order is lexicographic in the choices,
 * stage-major, with the last row varying fastest; the first composite is the
 * first original kernel.
 *
 * @throws SizeGuardError when more than RECTANGULAR_LIMIT kernels would be built
 */
inline AmbiguitySet rectangularize_enumerate(
    const RobustInstance& instance,
    Rectangularity granularity = Rectangularity::state_action) {
    detail::check_instance(instance);
    const std::uint64_t total = rectangular_size(instance, granularity);
    if (total > RECTANGULAR_LIMIT)
        throw SizeGuardError(detail::concat("rectangularized set of ", total,
                                            " kernels exceeds limit ", RECTANGULAR_LIMIT));

    const auto& mdp = instance.mdp;
    const auto& kernels = instance.ambiguity.kernels;
    struct Row {
        std::size_t t, s, a;
    };
    std::vector<Row> rows;
    for (std::size_t t = 0; t + 1 < mdp.horizon(); ++t)
        for (std::size_t s = 0; s < mdp.num_states(t); ++s) {
            if (granularity == Rectangularity::state) {
                rows.push_back({t, s, 0});
                continue;
            }
            for (std::size_t a = 0; a < mdp.num_actions(t); ++a) rows.push_back({t, s, a});
        }

    AmbiguitySet result;
    result.kernels.reserve(total);
    std::vector<std::size_t> choice(rows.size(), 0);
    Kernel current = kernels.front();
    const auto assign = [&](std::size_t r) {
        const Row& row = rows[r];
        const Kernel& source = kernels[choice[r]];
        if (granularity == Rectangularity::state)
            current.trans[row.t][row.s] = source.trans[row.t][row.s];
        else
            current.trans[row.t][row.s][row.a] = source.trans[row.t][row.s][row.a];
    };
    for (std::uint64_t index = 0; index < total; ++index) {
        if (index > 0) {
            for (std::size_t r = rows.size(); r-- > 0;) {
                if (++choice[r] < kernels.size()) {
                    assign(r);
                    break;
                }
                choice[r] = 0;
                assign(r);
            }
        }
        result.kernels.push_back(current);
    }
    return result;
}

} // namespace rmdp
