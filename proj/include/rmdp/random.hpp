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

#include "rmdp/solvers.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace rmdp {

// **************************************************************************
// Random instances
// **************************************************************************

/**
 * Seeded random source. Built on std::mt19937_64, whose output sequence is
 * fixed by the standard, with explicit conversions so that results do not
 * depend on the standard library's distribution implementations.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// uniform on [0, 1)
    prec_t uniform() { return prec_t(engine_() >> 11) * 0x1.0p-53; }
    prec_t uniform(prec_t lo, prec_t hi) { return lo + (hi - lo) * uniform(); }
    /// uniform on {0, ..., n-1}
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    /// uniform on {lo, ..., hi}
    long integer(long lo, long hi) {
        return lo + static_cast<long>(engine_() % std::uint64_t(hi - lo + 1));
    }
    bool bernoulli(prec_t p) { return uniform() < p; }

    /// random point of the simplex; sparse rows put all mass on few entries
    numvec distribution(std::size_t n, prec_t sparsity = 0) {
        numvec p(n, 0.0);
        prec_t sum = 0;
        for (auto& x : p) {
            x = bernoulli(sparsity) ? 0.0 : -std::log(1.0 - uniform());
            sum += x;
        }
        if (sum == 0) {
            p[index(n)] = 1.0;
            return p;
        }
        for (auto& x : p) x /= sum;
        return p;
    }

private:
    std::mt19937_64 engine_;
};

/// Shape and value ranges of random_instance.
struct RandomInstanceOptions {
    std::size_t min_horizon = 1, max_horizon = 4;
    std::size_t max_states = 3, max_actions = 3;
    std::size_t min_kernels = 1, max_kernels = 3;
    prec_t cost_lo = -1.0, cost_hi = 1.0;
    /// probability that a cost is exactly zero
    prec_t zero_cost_probability = 0.0;
    /// probability that a transition entry is forced to zero
    prec_t transition_sparsity = 0.0;
};

inline RobustInstance random_instance(Rng& rng, const RandomInstanceOptions& options) {
    RobustInstance instance;
    auto& mdp = instance.mdp;
    const std::size_t T =
        options.min_horizon + rng.index(options.max_horizon - options.min_horizon + 1);
    for (std::size_t t = 0; t < T; ++t)
        mdp.stages.push_back(
            {1 + rng.index(options.max_states), 1 + rng.index(options.max_actions)});
    mdp.cost.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        mdp.cost[t].assign(mdp.num_states(t), numvec(mdp.num_actions(t)));
        for (auto& row : mdp.cost[t])
            for (auto& c : row)
                c = rng.bernoulli(options.zero_cost_probability)
                        ? 0.0
                        : rng.uniform(options.cost_lo, options.cost_hi);
    }
    const std::size_t K =
        options.min_kernels + rng.index(options.max_kernels - options.min_kernels + 1);
    instance.ambiguity.kernels.resize(K);
    for (auto& kernel : instance.ambiguity.kernels) {
        kernel.trans.resize(T - 1);
        for (std::size_t t = 0; t + 1 < T; ++t) {
            kernel.trans[t].resize(mdp.num_states(t));
            for (auto& srow : kernel.trans[t]) {
                srow.resize(mdp.num_actions(t));
                for (auto& row : srow)
                    row = rng.distribution(mdp.num_states(t + 1), options.transition_sparsity);
            }
        }
    }
    instance.initial_state = rng.index(mdp.num_states(0));
    return instance;
}

/// Random randomized policy; with sparsity > 0 some rows become (near) deterministic.
inline PolicyMR random_policy(Rng& rng, const FiniteHorizonMDP& mdp, prec_t sparsity = 0) {
    PolicyMR policy;
    policy.dist.resize(mdp.horizon());
    for (std::size_t t = 0; t < mdp.horizon(); ++t) {
        policy.dist[t].resize(mdp.num_states(t));
        for (auto& p : policy.dist[t]) p = rng.distribution(mdp.num_actions(t), sparsity);
    }
    return policy;
}

inline PolicyMD random_md_policy(Rng& rng, const FiniteHorizonMDP& mdp) {
    PolicyMD policy;
    policy.act.resize(mdp.horizon());
    for (std::size_t t = 0; t < mdp.horizon(); ++t) {
        policy.act[t].resize(mdp.num_states(t));
        for (auto& a : policy.act[t]) a = rng.index(mdp.num_actions(t));
    }
    return policy;
}

/**
 * Random policy within Euclidean distance radius of center: a random
 * direction in the zero-sum subspace of every decision row, scaled to a random
 * length below radius, then projected row-wise onto the simplex. Projection is
 * non-expansive, so the result stays inside the ball.
 */
inline PolicyMR perturbed_policy(Rng& rng, const PolicyMR& center, prec_t radius) {
    PolicyMR result = center;
    std::vector<std::vector<numvec>> direction = center.dist;
    prec_t norm_sq = 0;
    for (auto& stage : direction)
        for (auto& row : stage) {
            if (row.size() == 1) {
                row[0] = 0;
                continue;
            }
            prec_t mean = 0;
            for (auto& x : row) {
                x = rng.uniform(-1.0, 1.0);
                mean += x;
            }
            mean /= prec_t(row.size());
            for (auto& x : row) {
                x -= mean;
                norm_sq += x * x;
            }
        }
    if (norm_sq == 0) return result;
    const prec_t scale = radius * rng.uniform() / std::sqrt(norm_sq);
    for (std::size_t t = 0; t < result.dist.size(); ++t)
        for (std::size_t s = 0; s < result.dist[t].size(); ++s) {
            auto& p = result.dist[t][s];
            if (p.size() == 1) continue;
            for (std::size_t a = 0; a < p.size(); ++a) p[a] += scale * direction[t][s][a];
            p = project_simplex(p);
        }
    return result;
}

} // namespace rmdp
