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

// Invariant suites driven by the command-line `verify` subcommand.

#include "rmdp/dynamic.hpp"
#include "rmdp/generators.hpp"
#include "rmdp/io.hpp"
#include "rmdp/landscape.hpp"
#include "rmdp/random.hpp"
#include "rmdp/solvers.hpp"

#include <string>

namespace rmdp::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    /// serialized failing case, null when passed
    io::json failing_case;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }

    io::json to_json() const {
        io::json doc;
        doc["suite"] = suite;
        doc["passed"] = passed();
        io::json list = io::json::array();
        for (const auto& c : checks) {
            io::json item{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}};
            if (!c.passed) item["failing_case"] = c.failing_case;
            list.push_back(std::move(item));
        }
        doc["checks"] = std::move(list);
        return doc;
    }
};

// **************************************************************************
// Set-partition equivalence
// **************************************************************************

struct PartitionSuiteOptions {
    std::size_t n_max = 10;
    std::size_t trials = 50;
    std::uint64_t seed = 1;
    std::uint64_t max_total = 200;
};

/// Hand-picked edge cases for the partition equivalence.
inline std::vector<PartitionSpec> partition_edge_cases() {
    return {{{1}}, {{1, 1}}, {{1, 2}}, {{2, 2, 2}}, {{1, 2, 3}}, {{1, 1, 3}}};
}

/// Seeded random integer weight sets with n <= n_max and total <= max_total.
inline std::vector<PartitionSpec> random_partition_specs(const PartitionSuiteOptions& opt) {
    Rng rng(opt.seed);
    std::vector<PartitionSpec> specs;
    for (std::size_t trial = 0; trial < opt.trials; ++trial) {
        const std::size_t n = 1 + rng.index(opt.n_max);
        const long cap = std::max<long>(1, static_cast<long>(opt.max_total / n));
        PartitionSpec spec;
        for (std::size_t i = 0; i < n; ++i) spec.weights.push_back(prec_t(rng.integer(1, cap)));
        specs.push_back(std::move(spec));
    }
    return specs;
}

/**
 * Exhaustive deterministic optimum equals total/2 exactly iff a partition
 * exists, and is strictly larger otherwise.
 */
inline CheckResult check_partition_equivalence(const PartitionSpec& spec) {
    CheckResult result;
    result.name = "partition_equivalence";
    std::int64_t total = 0;
    for (prec_t w : spec.weights) total += static_cast<std::int64_t>(w);
    const auto report = solve_md_exhaustive(partition_instance(spec));
    const bool partition = subset_sum_oracle(spec);
    if (!report.exact_best_value) {
        result.detail = "exhaustive search did not use exact arithmetic";
    } else {
        const std::int64_t twice = 2 * *report.exact_best_value;
        result.passed = partition ? twice == total : twice > total;
        result.detail = rmdp::detail::concat("total ", total, ", optimum ",
                                             *report.exact_best_value, ", partition ",
                                             partition ? "yes" : "no");
    }
    if (!result.passed) result.failing_case = io::json{{"weights", spec.weights}};
    return result;
}

inline SuiteReport run_partition_suite(const PartitionSuiteOptions& opt) {
    SuiteReport report;
    report.suite = "partition";
    auto specs = partition_edge_cases();
    for (auto& s : random_partition_specs(opt)) specs.push_back(std::move(s));
    std::size_t with_partition = 0, failures = 0;
    CheckResult summary;
    summary.name = "partition_equivalence";
    for (const auto& spec : specs) {
        auto r = check_partition_equivalence(spec);
        if (subset_sum_oracle(spec)) ++with_partition;
        if (!r.passed && failures++ == 0) summary.failing_case = r.failing_case;
    }
    summary.passed = failures == 0;
    summary.detail = rmdp::detail::concat(specs.size(), " weight sets, ", with_partition,
                                          " partitionable, ", failures, " failures");
    report.checks.push_back(std::move(summary));
    return report;
}

// **************************************************************************
// Local-minimizer gadget
// **************************************************************************

struct GadgetSuiteOptions {
    std::uint64_t seed = 7;
    prec_t radius = 0.05;
    prec_t certificate_step = 0.01;
    prec_t grid_step = 0.01;
    prec_t trap_step0 = 0.05;
    std::size_t trap_iters = 2000;
    prec_t escape_step0 = 0.1;
    std::size_t escape_iters = 5000;
    /// single-kernel descent runs; the budget covers near-tied actions
    std::size_t fixed_kernel_runs = 20;
    prec_t fixed_kernel_step0 = 2.0;
    std::size_t fixed_kernel_iters = 500000;
};

/// Start policy from which subgradient descent escapes to the global minimum.
inline PolicyMR escape_init_policy() {
    PolicyMR policy;
    policy.dist = {{{0.0, 1.0}}, {{0.5, 0.5}, {0.5, 0.5}}, {{1.0}, {1.0}, {1.0}, {1.0}}};
    return policy;
}

/// Seeded random start inside the ball of radius 0.8 * radius around the trap.
inline PolicyMR near_trap_init(std::uint64_t seed, prec_t radius = 0.05) {
    Rng rng(seed);
    return perturbed_policy(rng, local_minimizer_trap_policy(), 0.8 * radius);
}

/// Gadget-shaped instance ({1,2}, {2,2}, {4,1}) with one random kernel and random costs.
inline RobustInstance fixed_kernel_instance(Rng& rng) {
    RobustInstance instance;
    auto& mdp = instance.mdp;
    mdp.stages = {{1, 2}, {2, 2}, {4, 1}};
    Kernel kernel;
    kernel.trans.resize(2);
    mdp.cost.resize(3);
    for (std::size_t t = 0; t < 3; ++t) {
        mdp.cost[t].resize(mdp.num_states(t));
        for (auto& row : mdp.cost[t]) {
            row.resize(mdp.num_actions(t));
            for (auto& c : row) c = rng.uniform(-1.0, 1.0);
        }
        if (t + 1 == 3) break;
        kernel.trans[t].resize(mdp.num_states(t));
        for (auto& row : kernel.trans[t])
            for (std::size_t a = 0; a < mdp.num_actions(t); ++a)
                row.push_back(rng.distribution(mdp.num_states(t + 1)));
    }
    instance.ambiguity.kernels = {std::move(kernel)};
    instance.initial_state = 0;
    return instance;
}

/**
 * With a single kernel that reaches every state, subgradient descent from
 * random starts reaches the deterministic optimum. Kernels with unreachable
 * states (such as either kernel of the local-minimizer gadget taken alone)
 * can leave the descent at a non-strict sub-optimal minimizer and are not
 * covered.
 */
inline CheckResult check_fixed_kernel_descent(std::uint64_t seed, std::size_t runs,
                                              prec_t step0, std::size_t iters,
                                              prec_t tolerance = 1e-4) {
    using rmdp::detail::concat;
    CheckResult c;
    c.name = "fixed_kernel_no_trapping";
    c.passed = true;
    Rng rng(seed);
    std::vector<RobustInstance> instances;
    for (std::size_t i = 0; i < runs; ++i) instances.push_back(fixed_kernel_instance(rng));
    prec_t worst = 0;
    for (const auto& instance : instances) {
        const auto init = random_policy(rng, instance.mdp);
        const prec_t optimum = solve_md_exhaustive(instance).best_value;
        const prec_t found = solve_mr_subgradient(instance, init, step0, iters).best_value;
        worst = std::max(worst, found - optimum);
        if (found - optimum > tolerance && c.passed) {
            c.passed = false;
            c.failing_case = io::json{{"instance", io::to_json(instance)},
                                      {"initial_policy", io::to_json(init)},
                                      {"deterministic_optimum", optimum},
                                      {"subgradient_best", found}};
        }
    }
    c.detail = concat(instances.size(), " runs, largest excess over the optimum ", worst);
    return c;
}

inline SuiteReport run_gadget_suite(const GadgetSuiteOptions& opt) {
    using rmdp::detail::concat;
    SuiteReport report;
    report.suite = "theorem2";
    const auto instance = local_minimizer_instance();
    const auto trap = local_minimizer_trap_policy();

    {
        CheckResult c;
        c.name = "trap_value_zero";
        const auto eval = robust_value(instance, trap);
        c.passed = std::abs(eval.value) <= 1e-9;
        c.detail = concat("robust value at the trap ", eval.value);
        report.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "grid_global_minimum";
        const auto grid = grid_search_mr(instance, opt.grid_step);
        c.passed = std::abs(grid.best_value + 1.0) <= 1e-9;
        c.detail = concat("grid minimum ", grid.best_value, " over ", grid.iterations,
                          " policies");
        report.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "strict_local_minimizer";
        const auto cert =
            local_min_certificate(instance, trap, opt.radius, opt.certificate_step);
        c.passed = cert.is_local_min && cert.is_strict;
        c.detail = concat(cert.points_checked, " grid points within radius ", opt.radius);
        if (!c.passed && cert.witness) c.failing_case = io::to_json(*cert.witness);
        report.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "subgradient_trapped";
        const auto init = near_trap_init(opt.seed, opt.radius);
        const auto run = solve_mr_subgradient(instance, init, opt.trap_step0, opt.trap_iters);
        c.passed = std::abs(run.best_value) <= 1e-6;
        c.detail = concat("best value ", run.best_value);
        if (!c.passed) c.failing_case = io::to_json(init);
        report.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "subgradient_escapes";
        const auto run = solve_mr_subgradient(instance, escape_init_policy(),
                                              opt.escape_step0, opt.escape_iters);
        c.passed = std::abs(run.best_value + 1.0) <= 1e-6;
        c.detail = concat("best value ", run.best_value);
        report.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "partial_minimum_closed_form";
        prec_t worst = 0;
        for (const auto& row : landscape::scan(0.001, 0.001))
            worst = std::max(worst, std::abs(row.gap));
        c.passed = worst <= 0.002;
        c.detail = concat("largest gap ", worst);
        report.checks.push_back(c);
    }
    report.checks.push_back(check_fixed_kernel_descent(
        opt.seed, opt.fixed_kernel_runs, opt.fixed_kernel_step0, opt.fixed_kernel_iters));
    return report;
}

// **************************************************************************
// Dynamic formulation
// **************************************************************************

struct DynamicSuiteOptions {
    std::size_t instances = 20;
    std::size_t policy_pairs = 200;
    std::uint64_t seed = 11;
    prec_t grid_step = 0.02;
    /// cap on (grid policies) x (rectangular kernels) for the brute force
    std::uint64_t budget = 2'000'000;
};

/// Number of grid policies at the given step.
inline std::uint64_t grid_policy_count(const FiniteHorizonMDP& mdp, prec_t step) {
    const std::size_t m = rmdp::detail::grid_divisions(step);
    std::uint64_t total = 1;
    for (const auto& row : rmdp::detail::decision_rows(mdp))
        total = rmdp::detail::saturating_mul(
            total, rmdp::detail::binomial(m + row.num_actions - 1, row.num_actions - 1));
    return total;
}

/**
 * Upper bound on how much rounding a randomized policy to the step grid can
 * increase its value against the per-stage adversary:
 *   step * sum_t (|A_t| - 1) * span_t,
 * where span_t bounds the spread of stage-t continuation values by the sum of
 * the cost spreads of stages t..T-1.
 */
inline prec_t grid_slack(const FiniteHorizonMDP& mdp, prec_t step) {
    const std::size_t T = mdp.horizon();
    numvec spread(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        prec_t lo = std::numeric_limits<prec_t>::infinity(), hi = -lo;
        for (const auto& row : mdp.cost[t])
            for (prec_t c : row) {
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
        spread[t] = hi - lo;
    }
    prec_t slack = 0, span = 0;
    for (std::size_t t = T; t-- > 0;) {
        span += spread[t];
        slack += step * prec_t(mdp.num_actions(t) - 1) * span;
    }
    return slack;
}

/// Small random instances whose rectangularized brute force fits the budget.
inline std::vector<RobustInstance> tiny_dynamic_instances(const DynamicSuiteOptions& opt) {
    Rng rng(opt.seed);
    RandomInstanceOptions shape;
    shape.min_horizon = 2;
    shape.max_horizon = 3;
    shape.max_states = 2;
    shape.max_actions = 3;
    shape.min_kernels = 2;
    shape.max_kernels = 3;
    shape.cost_lo = 0.0;
    shape.cost_hi = 1.0;
    std::vector<RobustInstance> result;
    while (result.size() < opt.instances) {
        auto instance = random_instance(rng, shape);
        if (free_coordinates(instance.mdp) == 0) continue;
        const std::uint64_t kernels = rectangular_size(instance, Rectangularity::state);
        const std::uint64_t cost =
            rmdp::detail::saturating_mul(kernels, grid_policy_count(instance.mdp, opt.grid_step));
        if (cost > opt.budget) continue;
        result.push_back(std::move(instance));
    }
    return result;
}

struct RectangularComparison {
    prec_t dynamic_value = 0;
    prec_t static_grid_value = 0;
    prec_t slack = 0;
    bool passed = false;
};

/**
 * Randomized dynamic value against the grid-minimized static robust value
 * over the state-rectangularized ambiguity set: the grid value lies in
 * [dynamic - 1e-6, dynamic + slack + 1e-6].
 */
inline RectangularComparison compare_rectangular(const RobustInstance& instance,
                                                 prec_t grid_step) {
    RectangularComparison cmp;
    const auto dp = dynamic_dp_solve(instance, PolicyClass::randomized, 1e-9);
    cmp.dynamic_value = dp.values[0][instance.initial_state];
    RobustInstance rect = instance;
    rect.ambiguity = rectangularize_enumerate(instance, Rectangularity::state);
    cmp.static_grid_value = grid_search_mr(rect, grid_step).best_value;
    cmp.slack = grid_slack(instance.mdp, grid_step);
    cmp.passed = cmp.static_grid_value >= cmp.dynamic_value - 1e-6 &&
                 cmp.static_grid_value <= cmp.dynamic_value + cmp.slack + 1e-6;
    return cmp;
}

inline SuiteReport run_dynamic_suite(const DynamicSuiteOptions& opt) {
    using rmdp::detail::concat;
    SuiteReport report;
    report.suite = "dynamic";
    const auto instances = tiny_dynamic_instances(opt);

    {
        CheckResult c;
        c.name = "rectangular_consistency";
        c.passed = true;
        prec_t worst_excess = 0;
        for (const auto& instance : instances) {
            const auto cmp = compare_rectangular(instance, opt.grid_step);
            worst_excess = std::max(worst_excess, cmp.static_grid_value - cmp.dynamic_value);
            if (!cmp.passed && c.passed) {
                c.passed = false;
                c.failing_case = io::to_json(instance);
            }
        }
        c.detail = concat(instances.size(), " instances, largest grid excess ", worst_excess);
        report.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "deterministic_rectangular_consistency";
        c.passed = true;
        for (const auto& instance : instances) {
            const auto dp = dynamic_dp_solve(instance, PolicyClass::deterministic);
            RobustInstance rect = instance;
            rect.ambiguity = rectangularize_enumerate(instance, Rectangularity::state_action);
            if (rect.ambiguity.size() > 4096) continue;
            const auto md = solve_md_exhaustive(rect);
            if (std::abs(md.best_value - dp.values[0][instance.initial_state]) > 1e-9 &&
                c.passed) {
                c.passed = false;
                c.failing_case = io::to_json(instance);
            }
        }
        c.detail = "deterministic dynamic value equals exhaustive optimum over the "
                   "state-action rectangularized set";
        report.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "adversary_power_inequality";
        c.passed = true;
        Rng rng(opt.seed + 1);
        RandomInstanceOptions shape;
        shape.max_kernels = 3;
        std::size_t count = 0;
        for (; count < opt.policy_pairs; ++count) {
            const auto instance = random_instance(rng, shape);
            const auto policy = random_policy(rng, instance.mdp, 0.3);
            const prec_t dynamic = dynamic_policy_value(instance, policy);
            const prec_t stat = robust_value(instance, policy).value;
            if (dynamic < stat - 1e-10 && c.passed) {
                c.passed = false;
                c.failing_case = io::json{{"instance", io::to_json(instance)},
                                          {"policy", io::to_json(policy)}};
            }
        }
        c.detail = concat(count, " instance/policy pairs");
        report.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "randomized_below_deterministic";
        c.passed = true;
        for (const auto& instance : instances) {
            const auto mr = dynamic_dp_solve(instance, PolicyClass::randomized);
            const auto md = dynamic_dp_solve(instance, PolicyClass::deterministic);
            for (std::size_t t = 0; t < mr.values.size(); ++t)
                for (std::size_t s = 0; s < mr.values[t].size(); ++s)
                    if (mr.values[t][s] > md.values[t][s] + 1e-10 && c.passed) {
                        c.passed = false;
                        c.failing_case = io::to_json(instance);
                    }
        }
        c.detail = "randomized dynamic values never exceed deterministic ones";
        report.checks.push_back(c);
    }
    return report;
}

} // namespace rmdp::verify
