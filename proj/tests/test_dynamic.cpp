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

#include "rmdp/dynamic.hpp"
#include "rmdp/generators.hpp"
#include "rmdp/random.hpp"
#include "rmdp/solvers.hpp"
#include "rmdp/verify.hpp"

#include <gtest/gtest.h>

#include <iostream>

using namespace rmdp;

// **************************************************************************
// Matrix games
// **************************************************************************

TEST(MatrixGame, Symmetric) {
    const auto sol = matrix_game_solve({{{1, 0}, {0, 1}}});
    EXPECT_NEAR(sol.value, 0.5, 1e-12);
    EXPECT_NEAR(sol.strategy[0], 0.5, 1e-12);
    EXPECT_NEAR(sol.strategy[1], 0.5, 1e-12);
    EXPECT_NEAR(sol.adversary[0], 0.5, 1e-12);
}

TEST(MatrixGame, SingleColumn) {
    auto sol = matrix_game_solve({{{3}, {1}, {2}, {1}}});
    EXPECT_EQ(sol.value, 1.0);
    EXPECT_EQ(sol.strategy, (numvec{0, 1, 0, 0}));
    sol = matrix_game_solve({{{2, 5, -1}}});
    EXPECT_EQ(sol.value, 5.0);
    EXPECT_EQ(sol.strategy, (numvec{1}));
}

TEST(MatrixGame, ThreeByTwoAgainstGrid) {
    const MatrixGame game{{{3, 0}, {1, 1}, {0, 3}}};
    const auto sol = matrix_game_solve(game);
    const auto grid = oracle::matrix_game_grid(game.payoff, 1e-4);
    EXPECT_NEAR(sol.value, grid.value, 1e-4);
    EXPECT_NEAR(sol.value, 1.0, 1e-9);
    for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(sol.strategy[a], grid.strategy[a], 1e-3);
}

TEST(MatrixGame, RandomGamesCertificates) {
    Rng rng(40);
    for (int i = 0; i < 300; ++i) {
        const std::size_t rows = 1 + rng.index(3), cols = 1 + rng.index(4);
        MatrixGame game;
        game.payoff.assign(rows, numvec(cols));
        for (auto& row : game.payoff)
            for (auto& x : row) x = rng.bernoulli(0.2) ? 0.0 : rng.uniform(-5, 5);
        const auto sol = matrix_game_solve(game, 1e-9);
        prec_t sum = 0;
        for (prec_t p : sol.strategy) {
            EXPECT_GE(p, 0.0);
            sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
        // value is the worst column of the returned strategy
        prec_t worst = -1e300;
        for (std::size_t k = 0; k < cols; ++k) {
            prec_t v = 0;
            for (std::size_t a = 0; a < rows; ++a) v += sol.strategy[a] * game.payoff[a][k];
            worst = std::max(worst, v);
        }
        EXPECT_NEAR(worst, sol.value, 1e-12);
        // weak duality bounds
        prec_t maxmin = -1e300, minmax = 1e300;
        for (std::size_t k = 0; k < cols; ++k) {
            prec_t col_min = 1e300;
            for (std::size_t a = 0; a < rows; ++a) col_min = std::min(col_min, game.payoff[a][k]);
            maxmin = std::max(maxmin, col_min);
        }
        for (std::size_t a = 0; a < rows; ++a)
            minmax = std::min(minmax, *std::max_element(game.payoff[a].begin(),
                                                         game.payoff[a].end()));
        EXPECT_GE(sol.value, maxmin - 1e-9);
        EXPECT_LE(sol.value, minmax + 1e-9);
        EXPECT_LE(sol.gap, 1e-9);
        if (rows <= 3) {
            const auto grid = oracle::matrix_game_grid(game.payoff, 1e-3);
            EXPECT_LE(sol.value, grid.value + 1e-9);
            // the grid is within one step of any point, payoffs are at most 5
            EXPECT_GE(sol.value, grid.value - 2 * 5 * 1e-3 - 1e-9);
        }
    }
}

TEST(MatrixGame, RejectsBadInput) {
    EXPECT_THROW(matrix_game_solve({{{1}}}, 0.0), ModelError);
    EXPECT_THROW(matrix_game_solve({{}}), ModelError);
}

// **************************************************************************
// Dynamic programming
// **************************************************************************

TEST(DynamicDp, SingleKernelIsClassicalOptimum) {
    Rng rng(41);
    RandomInstanceOptions opt;
    opt.max_kernels = 1;
    for (int i = 0; i < 30; ++i) {
        const auto instance = random_instance(rng, opt);
        const auto md = dynamic_dp_solve(instance, PolicyClass::deterministic);
        const auto mr = dynamic_dp_solve(instance, PolicyClass::randomized);
        const prec_t classical = oracle::bellman_optimum(
            instance.mdp, instance.ambiguity.kernels[0], instance.initial_state);
        EXPECT_NEAR(md.values[0][instance.initial_state], classical, 1e-12);
        EXPECT_NEAR(mr.values[0][instance.initial_state], classical, 1e-9);
    }
}

TEST(DynamicDp, PartitionStageGames) {
    const auto instance = partition_instance({{1, 2, 3}});
    const auto md = dynamic_dp_solve(instance, PolicyClass::deterministic);
    const auto mr = dynamic_dp_solve(instance, PolicyClass::randomized);
    // each decision stage is the game [[w, 0], [0, w]] shifted by the continuation
    EXPECT_EQ(md.values[0][0], 6.0);
    EXPECT_NEAR(mr.values[0][0], 3.0, 1e-9);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto game = stage_game(instance, 2 * i, 0, md.values[2 * i + 1]);
        const prec_t w = prec_t(i + 1), rest = md.values[2 * i + 1][1];
        EXPECT_EQ(game.payoff, (std::vector<numvec>{{w + rest, rest}, {rest, w + rest}}));
    }
    ASSERT_TRUE(md.deterministic_policy);
    EXPECT_EQ(md.deterministic_policy->act[0][0], 0u);
    EXPECT_NEAR(mr.policy.dist[0][0][0], 0.5, 1e-9);
}

TEST(DynamicDp, GadgetValues) {
    const auto instance = local_minimizer_instance();
    const auto mr = dynamic_dp_solve(instance, PolicyClass::randomized);
    const auto md = dynamic_dp_solve(instance, PolicyClass::deterministic);
    EXPECT_NEAR(mr.values[0][0], 1.0 / 3, 1e-9);
    EXPECT_EQ(md.values[0][0], 1.0);
    // the per-stage adversary is at least as strong as the static one
    EXPECT_GE(mr.values[0][0], -1.0);
    EXPECT_LE(mr.game_values_residual, 1e-9);
}

TEST(DynamicDp, RandomizedNeverAboveDeterministic) {
    Rng rng(42);
    for (int i = 0; i < 100; ++i) {
        const auto instance = random_instance(rng, {});
        const auto md = dynamic_dp_solve(instance, PolicyClass::deterministic);
        const auto mr = dynamic_dp_solve(instance, PolicyClass::randomized);
        for (std::size_t t = 0; t < md.values.size(); ++t)
            for (std::size_t s = 0; s < md.values[t].size(); ++s)
                EXPECT_LE(mr.values[t][s], md.values[t][s] + 1e-10);
    }
}

TEST(DynamicDp, ValuesSatisfyStageEquations) {
    Rng rng(43);
    for (int i = 0; i < 50; ++i) {
        const auto instance = random_instance(rng, {});
        const auto mr = dynamic_dp_solve(instance, PolicyClass::randomized);
        const std::size_t T = instance.mdp.horizon();
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t s = 0; s < instance.mdp.num_states(t); ++s) {
                const auto game =
                    stage_game(instance, t, s, t + 1 < T ? mr.values[t + 1] : numvec{});
                const auto grid_ok = game.rows() <= 3;
                if (grid_ok) {
                    const auto grid = oracle::matrix_game_grid(game.payoff, 1e-3);
                    EXPECT_LE(mr.values[t][s], grid.value + 1e-9);
                }
                // the stored policy attains the stored value against every kernel
                prec_t worst = -1e300;
                for (std::size_t k = 0; k < game.cols(); ++k) {
                    prec_t v = 0;
                    for (std::size_t a = 0; a < game.rows(); ++a)
                        v += mr.policy.dist[t][s][a] * game.payoff[a][k];
                    worst = std::max(worst, v);
                }
                EXPECT_NEAR(worst, mr.values[t][s], 1e-9);
            }
        // evaluating the DP policy against a per-stage adversary reproduces its values
        EXPECT_NEAR(dynamic_policy_value(instance, mr.policy),
                    mr.values[0][instance.initial_state], 1e-9);
    }
}

TEST(DynamicDp, AdversaryPowerInequality) {
    Rng rng(44);
    for (int i = 0; i < 200; ++i) {
        const auto instance = random_instance(rng, {});
        const auto policy = random_policy(rng, instance.mdp, i % 2 ? 0.3 : 0.0);
        EXPECT_GE(dynamic_policy_value(instance, policy),
                  robust_value(instance, policy).value - 1e-10);
    }
}

TEST(DynamicDp, RejectsBadTolerance) {
    EXPECT_THROW(dynamic_dp_solve(local_minimizer_instance(), PolicyClass::randomized, 0),
                 ModelError);
}

// **************************************************************************
// Rectangularization
// **************************************************************************

TEST(Rectangularize, Counts) {
    auto single = local_minimizer_instance();
    single.ambiguity.kernels.pop_back();
    EXPECT_EQ(rectangularize_enumerate(single).size(), 1u);

    RobustInstance tiny;
    tiny.mdp.stages = {{1, 1}, {2, 1}};
    tiny.mdp.cost = {{{0}}, {{1}, {0}}};
    tiny.ambiguity.kernels = {Kernel{{{{{1, 0}}}}}, Kernel{{{{{0, 1}}}}}};
    EXPECT_EQ(rectangular_size(tiny), 2u);
    EXPECT_EQ(rectangularize_enumerate(tiny).size(), 2u);

    const auto partition = partition_instance({{1}});
    const auto set = rectangularize_enumerate(partition);
    EXPECT_EQ(set.size(), 4u);
    EXPECT_EQ(rectangularize_enumerate(partition, Rectangularity::state).size(), 2u);
    for (const auto& k : set.kernels)
        EXPECT_TRUE(validate(partition.mdp, k, "kernel").empty());
}

TEST(Rectangularize, ProductContainsOriginalsAndIsDistinct) {
    const auto instance = local_minimizer_instance();
    const auto set = rectangularize_enumerate(instance);
    // rows: stage 0 has 2, stage 1 has 4 (state, action) pairs
    EXPECT_EQ(set.size(), 64u);
    for (const auto& original : instance.ambiguity.kernels) {
        bool found = false;
        for (const auto& k : set.kernels) found = found || k.trans == original.trans;
        EXPECT_TRUE(found);
    }
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = i + 1; j < set.size(); ++j)
            EXPECT_NE(set.kernels[i].trans, set.kernels[j].trans);
    EXPECT_EQ(rectangularize_enumerate(instance, Rectangularity::state).size(), 8u);
}

TEST(Rectangularize, Guard) {
    const auto big = matrix_gadget_instance({5, numvec(25, 0.0)});
    // 5 + 25 rows with two choices each
    EXPECT_GT(rectangular_size(big), RECTANGULAR_LIMIT);
    EXPECT_THROW(rectangularize_enumerate(big), SizeGuardError);
}

TEST(Rectangularize, DeterministicDpMatchesStateActionProduct) {
    Rng rng(45);
    verify::DynamicSuiteOptions opt;
    opt.seed = 45;
    int checked = 0;
    for (const auto& instance : verify::tiny_dynamic_instances(opt)) {
        if (rectangular_size(instance) > 4096) continue;
        ++checked;
        RobustInstance rect = instance;
        rect.ambiguity = rectangularize_enumerate(instance);
        const auto md = dynamic_dp_solve(instance, PolicyClass::deterministic);
        EXPECT_NEAR(md.values[0][instance.initial_state], oracle::md_optimum(rect), 1e-10);
    }
    EXPECT_GT(checked, 0);
}

TEST(Rectangularize, RandomizedDpMatchesStateProductOnGrid) {
    verify::DynamicSuiteOptions opt;
    opt.seed = 46;
    opt.instances = 8;
    for (const auto& instance : verify::tiny_dynamic_instances(opt)) {
        const auto cmp = verify::compare_rectangular(instance, 0.02);
        EXPECT_TRUE(cmp.passed);
        // the grid minimum can only lie above the true minimum
        EXPECT_GE(cmp.static_grid_value, cmp.dynamic_value - 1e-9);
    }
}

TEST(Rectangularize, GadgetStaticValueOverProductSetEqualsDynamicValue) {
    // over the state-rectangularized set, the optimal static value of the gadget is
    // the dynamic one, 1/3, rather than the non-rectangular optimum -1
    const auto instance = local_minimizer_instance();
    RobustInstance rect = instance;
    rect.ambiguity = rectangularize_enumerate(instance, Rectangularity::state);
    const auto grid = grid_search_mr(rect, 0.01);
    EXPECT_NEAR(grid.best_value, 1.0 / 3, 0.01);
    EXPECT_GE(grid.best_value, 1.0 / 3 - 1e-12);
}
