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

#include "rmdp/evaluation.hpp"

#include <algorithm>

namespace rmdp {

/// Worst-case value of a policy over a finite ambiguity set.
struct RobustEvaluation {
    prec_t value = 0;
    /// first kernel attaining the maximum
    std::size_t worst_kernel_index = 0;
    numvec per_kernel_values;
};

namespace detail {

inline void check_instance(const RobustInstance& instance) {
    throw_if_invalid(validate(instance));
}

inline void check_instance_policy(const RobustInstance& instance, const PolicyMR& policy) {
    auto violations = validate(instance);
    if (violations.empty()) violations = validate(instance.mdp, policy);
    throw_if_invalid(violations);
}

/// Index-ordered maximum; ties go to the lowest index.
inline RobustEvaluation reduce_max(numvec per_kernel) {
    RobustEvaluation result;
    result.worst_kernel_index = 0;
    for (std::size_t k = 1; k < per_kernel.size(); ++k)
        if (per_kernel[k] > per_kernel[result.worst_kernel_index])
            result.worst_kernel_index = k;
    result.value = per_kernel.empty() ? 0 : per_kernel[result.worst_kernel_index];
    result.per_kernel_values = std::move(per_kernel);
    return result;
}

/// Robust evaluation without input checks.
inline RobustEvaluation robust_value_unchecked(const RobustInstance& instance,
                                               const PolicyMR& policy) {
    numvec per_kernel(instance.ambiguity.size());
    for (std::size_t k = 0; k < instance.ambiguity.size(); ++k)
        per_kernel[k] = backward_values(instance.mdp, instance.ambiguity.kernels[k],
                                        policy)[0][instance.initial_state];
    return reduce_max(std::move(per_kernel));
}

} // namespace detail

/**
 * Static robust value: max over the kernels of the ambiguity set of the
 * policy's expected cost from the initial state. One backward induction per
 * kernel.
 */
inline RobustEvaluation robust_value(const RobustInstance& instance, const PolicyMR& policy) {
    detail::check_instance_policy(instance, policy);
    return detail::robust_value_unchecked(instance, policy);
}

inline RobustEvaluation robust_value(const RobustInstance& instance, const PolicyMD& policy) {
    return robust_value(instance, embed_md(instance.mdp, policy));
}

/// Outcome of comparing the max- and sum-aggregated kernel values.
struct MaxSumCheck {
    prec_t max_value = 0;
    prec_t sum_value = 0;
    /// every per-kernel value is at most the tolerance
    bool all_nonpositive = false;
    /// (max <= tol) iff (sum <= tol)
    bool both_nonpositive_agree = false;
};

/// Tolerance used to decide nonpositivity in max_sum_equivalence_check
constexpr prec_t MAX_SUM_TOLERANCE = 1e-9;

/**
 * Compares max_k V_k and sum_k V_k for a policy on an instance with
 * nonnegative costs. With nonnegative costs every V_k is nonnegative, so the
 * maximum is nonpositive exactly when the sum is, and then all V_k vanish.
 *
 * @throws PreconditionError when some cost is negative
 */
inline MaxSumCheck max_sum_equivalence_check(const RobustInstance& instance,
                                             const PolicyMR& policy) {
    detail::check_instance_policy(instance, policy);
    for (std::size_t t = 0; t < instance.mdp.horizon(); ++t)
        for (std::size_t s = 0; s < instance.mdp.num_states(t); ++s)
            for (std::size_t a = 0; a < instance.mdp.num_actions(t); ++a)
                if (instance.mdp.cost[t][s][a] < 0)
                    throw PreconditionError(detail::concat(
                        "negative cost at stage ", t, ", state ", s, ", action ", a));

    const auto eval = detail::robust_value_unchecked(instance, policy);
    MaxSumCheck result;
    result.max_value = eval.value;
    for (prec_t v : eval.per_kernel_values) result.sum_value += v;
    result.all_nonpositive =
        std::all_of(eval.per_kernel_values.begin(), eval.per_kernel_values.end(),
                    [](prec_t v) { return v <= MAX_SUM_TOLERANCE; });
    result.both_nonpositive_agree = (result.max_value <= MAX_SUM_TOLERANCE) ==
                                    (result.sum_value <= MAX_SUM_TOLERANCE);
    return result;
}

} // namespace rmdp
