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

#include <Eigen/Dense>

#include <cmath>

namespace rmdp {

/**
 * Stationary discounted model obtained by taking the union of the stage state
 * spaces of a finite-horizon instance and appending an absorbing zero-cost
 * sink. State s of stage t has index stage_offset[t] + s; the sink is the last
 * state.
 */
struct InfiniteHorizonInstance {
    std::size_t num_states = 0;
    std::size_t sink = 0;
    std::vector<std::size_t> stage_offset;
    std::vector<std::size_t> num_actions;
    /// cost[s][a]
    std::vector<numvec> cost;
    /// kernels[k][s][a] is a distribution over all num_states states
    std::vector<std::vector<std::vector<numvec>>> kernels;
    prec_t gamma = 0;
    std::size_t initial_state = 0;
};

/// Stationary randomized policy: dist[s] is a distribution over actions of state s.
struct StationaryPolicy {
    std::vector<numvec> dist;
};

/**
 * Embeds a finite-horizon robust instance into a discounted stationary one.
 * Every kernel acts as before on its own stage block, the last stage moves to
 * the sink with probability one, and the sink loops on itself at zero cost.
 */
inline InfiniteHorizonInstance extend_infinite_horizon(const RobustInstance& instance,
                                                       prec_t gamma) {
    if (!(gamma > 0 && gamma < 1))
        throw ModelError("discount factor must lie strictly between 0 and 1");
    detail::throw_if_invalid(validate(instance));

    const auto& mdp = instance.mdp;
    const std::size_t T = mdp.horizon();
    InfiniteHorizonInstance result;
    result.gamma = gamma;
    for (std::size_t t = 0; t < T; ++t) {
        result.stage_offset.push_back(result.num_states);
        result.num_states += mdp.num_states(t);
    }
    result.sink = result.num_states++;
    result.initial_state = result.stage_offset[0] + instance.initial_state;

    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t s = 0; s < mdp.num_states(t); ++s) {
            result.num_actions.push_back(mdp.num_actions(t));
            result.cost.push_back(mdp.cost[t][s]);
        }
    result.num_actions.push_back(1);
    result.cost.push_back({0.0});

    for (const auto& kernel : instance.ambiguity.kernels) {
        std::vector<std::vector<numvec>> stationary;
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t s = 0; s < mdp.num_states(t); ++s) {
                std::vector<numvec> rows;
                for (std::size_t a = 0; a < mdp.num_actions(t); ++a) {
                    numvec row(result.num_states, 0.0);
                    if (t + 1 < T) {
                        const numvec& p = kernel.trans[t][s][a];
                        for (std::size_t sn = 0; sn < p.size(); ++sn)
                            row[result.stage_offset[t + 1] + sn] = p[sn];
                    } else {
                        row[result.sink] = 1.0;
                    }
                    rows.push_back(std::move(row));
                }
                stationary.push_back(std::move(rows));
            }
        numvec sink_row(result.num_states, 0.0);
        sink_row[result.sink] = 1.0;
        stationary.push_back({std::move(sink_row)});
        result.kernels.push_back(std::move(stationary));
    }
    return result;
}

/// Stationary policy that plays the stage policy of a finite-horizon instance on each block.
inline StationaryPolicy stationary_from_markov(const InfiniteHorizonInstance& inst,
                                               const PolicyMR& policy) {
    StationaryPolicy result;
    for (const auto& stage : policy.dist)
        for (const auto& p : stage) result.dist.push_back(p);
    result.dist.push_back({1.0});
    if (result.dist.size() != inst.num_states)
        throw ModelError("policy does not match the stationary state set");
    return result;
}

/// Residual tolerance of evaluate_discounted, relative to max(1, |V|_inf)
constexpr prec_t DISCOUNTED_RESIDUAL = 1e-12;

/**
 * Discounted value V = c_pi + gamma P_pi V for every state, by a dense LU solve
 * with iterative refinement until the fixed-point residual is below
 * DISCOUNTED_RESIDUAL.
 */
inline numvec evaluate_discounted_all(const InfiniteHorizonInstance& inst,
                                      std::size_t kernel_index,
                                      const StationaryPolicy& policy) {
    if (kernel_index >= inst.kernels.size()) throw ModelError("kernel index out of range");
    if (policy.dist.size() != inst.num_states)
        throw ModelError("policy does not cover the stationary state set");
    const std::size_t n = inst.num_states;
    const auto& kernel = inst.kernels[kernel_index];

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (std::size_t s = 0; s < n; ++s) {
        const numvec& p = policy.dist[s];
        if (p.size() != inst.num_actions[s])
            throw ModelError(detail::concat("policy row ", s, " has wrong action count"));
        prec_t sum = 0;
        for (std::size_t a = 0; a < p.size(); ++a) {
            if (p[a] < 0) throw ModelError("policy has a negative probability");
            sum += p[a];
            c[s] += p[a] * inst.cost[s][a];
            for (std::size_t sn = 0; sn < n; ++sn) P(s, sn) += p[a] * kernel[s][a][sn];
        }
        if (std::abs(sum - 1) > SIMPLEX_TOLERANCE)
            throw ModelError(detail::concat("policy row ", s, " does not sum to 1"));
    }
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - inst.gamma * P;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd v = lu.solve(c);
    for (int refinement = 0;; ++refinement) {
        const Eigen::VectorXd residual = c - A * v;
        const prec_t scale = std::max(1.0, v.lpNorm<Eigen::Infinity>());
        if (!residual.allFinite()) throw NumericError("discounted evaluation diverged");
        if (residual.lpNorm<Eigen::Infinity>() <= DISCOUNTED_RESIDUAL * scale) break;
        if (refinement >= 5)
            throw NumericError("discounted evaluation did not reach residual tolerance");
        v += lu.solve(residual);
    }
    return numvec(v.data(), v.data() + n);
}

inline prec_t evaluate_discounted(const InfiniteHorizonInstance& inst,
                                  std::size_t kernel_index, const StationaryPolicy& policy,
                                  std::size_t s0) {
    if (s0 >= inst.num_states) throw ModelError("start state out of range");
    return evaluate_discounted_all(inst, kernel_index, policy)[s0];
}

} // namespace rmdp
