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

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace rmdp {

/**
 * Sizes of the state and action spaces at one stage. States and actions are
 * dense indices 0..num_states-1 and 0..num_actions-1. Stages that have no
 * decision use a single placeholder action.
 */
struct StageDims {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;

    friend bool operator==(const StageDims&, const StageDims&) = default;
};

/**
 * Finite-horizon decision problem with stage-dependent state and action
 * spaces. Stages are indexed 0..horizon()-1.
 *
 * cost[t][s][a] is the cost incurred at stage t in state s taking action a.
 */
struct FiniteHorizonMDP {
    std::vector<StageDims> stages;
    std::vector<std::vector<numvec>> cost;

    std::size_t horizon() const { return stages.size(); }
    std::size_t num_states(std::size_t t) const { return stages[t].num_states; }
    std::size_t num_actions(std::size_t t) const { return stages[t].num_actions; }
};

/**
 * Transition kernel of a finite-horizon model: trans[t][s][a] is the
 * distribution over states of stage t+1, for t = 0..horizon-2. The last stage
 * has no transitions.
 */
struct Kernel {
    std::vector<std::vector<std::vector<numvec>>> trans;
};

/// Ordered finite list of candidate kernels; the static adversary picks one.
struct AmbiguitySet {
    std::vector<Kernel> kernels;

    std::size_t size() const { return kernels.size(); }
};

/// Deterministic Markov policy: act[t][s] is the action taken in state s of stage t.
struct PolicyMD {
    std::vector<indvec> act;

    friend bool operator==(const PolicyMD&, const PolicyMD&) = default;
};

/// Randomized Markov policy: dist[t][s] is a distribution over actions of stage t.
struct PolicyMR {
    std::vector<std::vector<numvec>> dist;
};

/// Model, ambiguity set, and initial state; the unit consumed by every solver.
struct RobustInstance {
    FiniteHorizonMDP mdp;
    AmbiguitySet ambiguity;
    std::size_t initial_state = 0;
};

// **************************************************************************
// Validation
// **************************************************************************

namespace detail {

template <class... Args> std::string concat(const Args&... args) {
    std::ostringstream out;
    (out << ... << args);
    return out.str();
}

template <class Where>
void validate_distribution(const numvec& p, const Where& where,
                           std::vector<std::string>& violations) {
    prec_t sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i])) {
            violations.push_back(concat(where(), ": entry ", i, " is not finite"));
            return;
        }
        if (p[i] < 0) {
            violations.push_back(
                concat(where(), ": entry ", i, " is negative (", p[i], ")"));
            return;
        }
        sum += p[i];
    }
    if (std::abs(sum - 1.0) > SIMPLEX_TOLERANCE)
        violations.push_back(concat(where(), ": sums to ", sum, ", not 1"));
}

} // namespace detail

/// Checks the shape and finiteness of the model. Returns human readable violations.
inline std::vector<std::string> validate(const FiniteHorizonMDP& mdp) {
    using detail::concat;
    std::vector<std::string> violations;
    if (mdp.horizon() == 0) violations.push_back("horizon must be positive");
    for (std::size_t t = 0; t < mdp.horizon(); ++t) {
        if (mdp.num_states(t) == 0)
            violations.push_back(concat("stage ", t, ": state set is empty"));
        if (mdp.num_actions(t) == 0)
            violations.push_back(concat("stage ", t, ": action set is empty"));
    }
    if (mdp.cost.size() != mdp.horizon()) {
        violations.push_back(concat("cost table has ", mdp.cost.size(),
                                    " stages, expected ", mdp.horizon()));
        return violations;
    }
    for (std::size_t t = 0; t < mdp.horizon(); ++t) {
        const auto& ct = mdp.cost[t];
        for (std::size_t s = 0; s < mdp.num_states(t); ++s) {
            if (s >= ct.size()) {
                violations.push_back(
                    concat("stage ", t, ", state ", s, ": cost row missing"));
                continue;
            }
            for (std::size_t a = 0; a < mdp.num_actions(t); ++a) {
                if (a >= ct[s].size())
                    violations.push_back(concat("stage ", t, ", state ", s, ", action ",
                                                a, ": cost missing"));
                else if (!std::isfinite(ct[s][a]))
                    violations.push_back(concat("stage ", t, ", state ", s, ", action ",
                                                a, ": cost is not finite"));
            }
            if (ct[s].size() > mdp.num_actions(t))
                violations.push_back(concat("stage ", t, ", state ", s, ": ",
                                            ct[s].size(), " costs for ",
                                            mdp.num_actions(t), " actions"));
        }
        if (ct.size() > mdp.num_states(t))
            violations.push_back(concat("stage ", t, ": ", ct.size(),
                                        " cost rows for ", mdp.num_states(t),
                                        " states"));
    }
    return violations;
}

/// Checks that the kernel is total and row-stochastic with respect to the model.
inline std::vector<std::string> validate(const FiniteHorizonMDP& mdp,
                                         const Kernel& kernel,
                                         const std::string& label = "kernel") {
    using detail::concat;
    std::vector<std::string> violations;
    const std::size_t expected = mdp.horizon() == 0 ? 0 : mdp.horizon() - 1;
    if (kernel.trans.size() != expected) {
        violations.push_back(concat(label, ": has ", kernel.trans.size(),
                                    " transition stages, expected ", expected));
        return violations;
    }
    for (std::size_t t = 0; t < expected; ++t) {
        const auto& tt = kernel.trans[t];
        if (tt.size() != mdp.num_states(t)) {
            violations.push_back(concat(label, ", stage ", t, ": ", tt.size(),
                                        " state rows, expected ", mdp.num_states(t)));
            continue;
        }
        for (std::size_t s = 0; s < tt.size(); ++s) {
            if (tt[s].size() != mdp.num_actions(t)) {
                violations.push_back(concat(label, ", stage ", t, ", state ", s, ": ",
                                            tt[s].size(), " action rows, expected ",
                                            mdp.num_actions(t)));
                continue;
            }
            for (std::size_t a = 0; a < tt[s].size(); ++a) {
                const auto where = [&] {
                    return concat(label, ", stage ", t, ", state ", s, ", action ", a);
                };
                if (tt[s][a].size() != mdp.num_states(t + 1)) {
                    violations.push_back(concat(where(), ": distribution over ",
                                                tt[s][a].size(), " states, expected ",
                                                mdp.num_states(t + 1)));
                    continue;
                }
                detail::validate_distribution(tt[s][a], where, violations);
            }
        }
    }
    return violations;
}

/// Checks every invariant of a robust instance: model, kernels, initial state.
inline std::vector<std::string> validate(const RobustInstance& instance) {
    using detail::concat;
    auto violations = validate(instance.mdp);
    if (instance.ambiguity.kernels.empty())
        violations.push_back("ambiguity set is empty");
    if (!violations.empty() && instance.mdp.horizon() == 0) return violations;
    for (std::size_t k = 0; k < instance.ambiguity.size(); ++k) {
        auto kv = validate(instance.mdp, instance.ambiguity.kernels[k],
                           concat("kernel ", k));
        violations.insert(violations.end(), kv.begin(), kv.end());
    }
    if (instance.mdp.horizon() > 0 &&
        instance.initial_state >= instance.mdp.num_states(0))
        violations.push_back(concat("initial state ", instance.initial_state,
                                    " is not a stage 0 state"));
    return violations;
}

/// Checks that the randomized policy is a distribution over the actions of every state.
inline std::vector<std::string> validate(const FiniteHorizonMDP& mdp,
                                         const PolicyMR& policy) {
    using detail::concat;
    std::vector<std::string> violations;
    if (policy.dist.size() != mdp.horizon()) {
        violations.push_back(concat("policy has ", policy.dist.size(),
                                    " stages, expected ", mdp.horizon()));
        return violations;
    }
    for (std::size_t t = 0; t < mdp.horizon(); ++t) {
        if (policy.dist[t].size() != mdp.num_states(t)) {
            violations.push_back(concat("policy stage ", t, ": ", policy.dist[t].size(),
                                        " states, expected ", mdp.num_states(t)));
            continue;
        }
        for (std::size_t s = 0; s < mdp.num_states(t); ++s) {
            const auto where = [&] { return concat("policy stage ", t, ", state ", s); };
            if (policy.dist[t][s].size() != mdp.num_actions(t)) {
                violations.push_back(concat(where(), ": ", policy.dist[t][s].size(),
                                            " actions, expected ", mdp.num_actions(t)));
                continue;
            }
            detail::validate_distribution(policy.dist[t][s], where, violations);
        }
    }
    return violations;
}

/// Checks that the deterministic policy picks a valid action in every state.
inline std::vector<std::string> validate(const FiniteHorizonMDP& mdp,
                                         const PolicyMD& policy) {
    using detail::concat;
    std::vector<std::string> violations;
    if (policy.act.size() != mdp.horizon()) {
        violations.push_back(concat("policy has ", policy.act.size(),
                                    " stages, expected ", mdp.horizon()));
        return violations;
    }
    for (std::size_t t = 0; t < mdp.horizon(); ++t) {
        if (policy.act[t].size() != mdp.num_states(t)) {
            violations.push_back(concat("policy stage ", t, ": ", policy.act[t].size(),
                                        " states, expected ", mdp.num_states(t)));
            continue;
        }
        for (std::size_t s = 0; s < mdp.num_states(t); ++s)
            if (policy.act[t][s] >= mdp.num_actions(t))
                violations.push_back(concat("policy stage ", t, ", state ", s,
                                            ": action ", policy.act[t][s],
                                            " out of range"));
    }
    return violations;
}

namespace detail {

inline void throw_if_invalid(const std::vector<std::string>& violations) {
    if (violations.empty()) return;
    std::string message = violations.front();
    if (violations.size() > 1)
        message += concat(" (and ", violations.size() - 1, " more)");
    throw ModelError(message);
}

} // namespace detail

// **************************************************************************
// Construction helpers
// **************************************************************************

/// Uniform randomized policy over every action set of the model.
inline PolicyMR uniform_policy(const FiniteHorizonMDP& mdp) {
    PolicyMR policy;
    policy.dist.resize(mdp.horizon());
    for (std::size_t t = 0; t < mdp.horizon(); ++t)
        policy.dist[t].assign(mdp.num_states(t),
                              numvec(mdp.num_actions(t), 1.0 / prec_t(mdp.num_actions(t))));
    return policy;
}

/// Deterministic policy that takes the given action everywhere (clamped to the action set).
inline PolicyMD constant_policy(const FiniteHorizonMDP& mdp, std::size_t action) {
    PolicyMD policy;
    policy.act.resize(mdp.horizon());
    for (std::size_t t = 0; t < mdp.horizon(); ++t)
        policy.act[t].assign(mdp.num_states(t), std::min(action, mdp.num_actions(t) - 1));
    return policy;
}

/// Point-mass embedding of a deterministic policy into the randomized class.
inline PolicyMR embed_md(const FiniteHorizonMDP& mdp, const PolicyMD& policy) {
    PolicyMR result;
    result.dist.resize(policy.act.size());
    for (std::size_t t = 0; t < policy.act.size(); ++t) {
        const std::size_t na = t < mdp.horizon() ? mdp.num_actions(t) : 0;
        result.dist[t].resize(policy.act[t].size());
        for (std::size_t s = 0; s < policy.act[t].size(); ++s) {
            const std::size_t a = policy.act[t][s];
            numvec p(std::max(na, a + 1), 0.0);
            p[a] = 1.0;
            result.dist[t][s] = std::move(p);
        }
    }
    return result;
}

/// Most probable action in each state (ties go to the lowest action).
inline PolicyMD argmax_policy(const PolicyMR& policy) {
    PolicyMD result;
    result.act.resize(policy.dist.size());
    for (std::size_t t = 0; t < policy.dist.size(); ++t) {
        result.act[t].resize(policy.dist[t].size());
        for (std::size_t s = 0; s < policy.dist[t].size(); ++s) {
            const auto& p = policy.dist[t][s];
            std::size_t best = 0;
            for (std::size_t a = 1; a < p.size(); ++a)
                if (p[a] > p[best]) best = a;
            result.act[t][s] = best;
        }
    }
    return result;
}

/// Number of (stage, state) rows that actually involve a decision.
inline std::size_t free_coordinates(const FiniteHorizonMDP& mdp) {
    std::size_t count = 0;
    for (std::size_t t = 0; t < mdp.horizon(); ++t)
        count += mdp.num_states(t) * (mdp.num_actions(t) - 1);
    return count;
}

} // namespace rmdp
