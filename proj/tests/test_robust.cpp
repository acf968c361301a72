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


#include "oracles.hpp"

#include "rmdp/generators.hpp"
#include "rmdp/random.hpp"
#include "rmdp/robust.hpp"

#include <gtest/gtest.h>

using namespace rmdp;

TEST(RobustValue, TrapPolicyOfGadget) {
    const auto eval = robust_value(local_minimizer_instance(), local_minimizer_trap_policy());
    EXPECT_EQ(eval.value, 0.0);
    EXPECT_EQ(eval.per_kernel_values, (numvec{0.0, 0.0}));
    EXPECT_EQ(eval.worst_kernel_index, 0u);
}

TEST(RobustValue, SingleKernelIsPlainEvaluation) {
    Rng rng(1);
    RandomInstanceOptions opt;
    opt.max_kernels = 1;
    for (int i = 0; i < 20; ++i) {
        const auto instance = random_instance(rng, opt);
        const auto policy = random_policy(rng, instance.mdp);
        const auto eval = robust_value(instance, policy);
        EXPECT_EQ(eval.value, evaluate(instance.mdp, instance.ambiguity.kernels[0], policy,
                                       instance.initial_state));
        EXPECT_EQ(eval.worst_kernel_index, 0u);
    }
}

TEST(RobustValue, PartitionSingletonSubset) {
    const auto instance = partition_instance({{1, 2, 3}});
    PolicyMD md = constant_policy(instance.mdp, 1);
    md.act[4][0] = 0;
    const auto eval = robust_value(instance, md);
    EXPECT_EQ(eval.value, 3.0);
    EXPECT_EQ(eval.per_kernel_values, (numvec{3.0, 3.0}));
    EXPECT_EQ(eval.worst_kernel_index, 0u);
    for (std::size_t k = 0; k < 2; ++k)
        EXPECT_EQ(brute_force_evaluate(instance.mdp, instance.ambiguity.kernels[k],
                                       embed_md(instance.mdp, md), 0),
                  3.0);
}

TEST(RobustValue, IsMaxOfPerKernelValues) {
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        const auto instance = random_instance(rng, {});
        const auto policy = random_policy(rng, instance.mdp);
        const auto eval = robust_value(instance, policy);
        ASSERT_EQ(eval.per_kernel_values.size(), instance.ambiguity.size());
        prec_t best = -1e300;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < instance.ambiguity.size(); ++k) {
            const prec_t v = evaluate(instance.mdp, instance.ambiguity.kernels[k], policy,
                                      instance.initial_state);
            EXPECT_EQ(v, eval.per_kernel_values[k]);
            EXPECT_GE(eval.value, v);
            if (v > best) {
                best = v;
                best_k = k;
            }
        }
        EXPECT_EQ(eval.value, best);
        EXPECT_EQ(eval.worst_kernel_index, best_k);
    }
}

TEST(RobustValue, TiesGoToLowestIndex) {
    auto instance = local_minimizer_instance();
    instance.ambiguity.kernels.push_back(instance.ambiguity.kernels[0]);
    instance.ambiguity.kernels.insert(instance.ambiguity.kernels.begin(),
                                      instance.ambiguity.kernels[1]);
    // kernels: reversed, straight, reversed, straight
    const auto eval = robust_value(instance, oracle::gadget_policy(0.0, 1.0, 0.0));
    EXPECT_EQ(eval.per_kernel_values, (numvec{-1.0, 1.0, -1.0, 1.0}));
    EXPECT_EQ(eval.worst_kernel_index, 1u);
}

TEST(RobustValue, AppendingKernelNeverDecreases) {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        auto instance = random_instance(rng, {});
        const auto policy = random_policy(rng, instance.mdp);
        const prec_t before = robust_value(instance, policy).value;
        Kernel extra = instance.ambiguity.kernels[0];
        for (auto& stage : extra.trans)
            for (auto& state : stage)
                for (auto& row : state) row = rng.distribution(row.size());
        instance.ambiguity.kernels.push_back(extra);
        EXPECT_GE(robust_value(instance, policy).value, before);
    }
}

TEST(RobustValue, GadgetMatchesHandFormulaOnGrid) {
    const auto instance = local_minimizer_instance();
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j)
            for (int l = 0; l <= 20; ++l) {
                const prec_t x = i / 20.0, p0 = j / 20.0, p1 = l / 20.0;
                EXPECT_NEAR(robust_value(instance, oracle::gadget_policy(x, p0, p1)).value,
                            oracle::gadget_value(x, p0, p1), 1e-12);
            }
}

TEST(RobustValue, RejectsIncompatiblePolicy) {
    const auto instance = local_minimizer_instance();
    EXPECT_THROW(robust_value(instance, uniform_policy(partition_instance({{1}}).mdp)),
                 ModelError);
}

TEST(MaxSum, ZeroCosts) {
    auto instance = partition_instance({{1, 2}});
    for (auto& stage : instance.mdp.cost)
        for (auto& row : stage)
            for (auto& c : row) c = 0;
    const auto check = max_sum_equivalence_check(instance, uniform_policy(instance.mdp));
    EXPECT_EQ(check.max_value, 0.0);
    EXPECT_EQ(check.sum_value, 0.0);
    EXPECT_TRUE(check.both_nonpositive_agree);
    EXPECT_TRUE(check.all_nonpositive);
}

TEST(MaxSum, PositiveValue) {
    const auto instance = partition_instance({{1, 2, 3}});
    const auto check = max_sum_equivalence_check(instance, uniform_policy(instance.mdp));
    EXPECT_GT(check.max_value, 0.0);
    EXPECT_GT(check.sum_value, 0.0);
    EXPECT_TRUE(check.both_nonpositive_agree);
    EXPECT_FALSE(check.all_nonpositive);
}

TEST(MaxSum, RejectsNegativeCosts) {
    EXPECT_THROW(max_sum_equivalence_check(local_minimizer_instance(),
                                           local_minimizer_trap_policy()),
                 PreconditionError);
}

TEST(MaxSum, EquivalenceChainOnRandomNonnegativeInstances) {
    Rng rng(4);
    RandomInstanceOptions opt;
    opt.cost_lo = 0.0;
    opt.min_kernels = 2;
    opt.max_kernels = 3;
    opt.zero_cost_probability = 0.7;
    opt.transition_sparsity = 0.4;
    int zero_cases = 0;
    for (int i = 0; i < 200; ++i) {
        const auto instance = random_instance(rng, opt);
        const auto policy = random_policy(rng, instance.mdp, 0.5);
        const auto check = max_sum_equivalence_check(instance, policy);
        const bool max_np = check.max_value <= 1e-9;
        const bool sum_np = check.sum_value <= 1e-9;
        bool each_np = true;
        prec_t sum = 0;
        for (const auto& k : instance.ambiguity.kernels) {
            const prec_t v =
                oracle::trajectory_value(instance.mdp, k, policy, instance.initial_state);
            each_np = each_np && v <= 1e-9;
            sum += v;
        }
        EXPECT_NEAR(sum, check.sum_value, 1e-10);
        EXPECT_EQ(max_np, sum_np);
        EXPECT_EQ(max_np, each_np);
        EXPECT_TRUE(check.both_nonpositive_agree);
        zero_cases += max_np;
    }
    // the sample exercises both sides of the equivalence
    EXPECT_GT(zero_cases, 0);
    EXPECT_LT(zero_cases, 200);
}
