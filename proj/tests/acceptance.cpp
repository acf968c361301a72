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


// Acceptance checks; prints one PASS/FAIL line per criterion.

#include "oracles.hpp"

#include "rmdp/rmdp.hpp"
#include "rmdp/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace rmdp;

namespace {

using clock_type = std::chrono::steady_clock;

struct Outcome {
    bool passed;
    std::string detail;
};

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

const verify::CheckResult& find_check(const verify::SuiteReport& report, const std::string& name) {
    for (const auto& c : report.checks)
        if (c.name == name) return c;
    throw std::runtime_error("missing check " + name);
}

Outcome from_checks(const verify::SuiteReport& report, std::initializer_list<const char*> names) {
    Outcome out{true, ""};
    for (const char* name : names) {
        const auto& c = find_check(report, name);
        out.passed = out.passed && c.passed;
        if (!out.detail.empty()) out.detail += "; ";
        out.detail += c.name + ": " + c.detail;
    }
    return out;
}

Outcome partition_equivalence() {
    const auto start = clock_type::now();
    const auto report = verify::run_partition_suite({});
    const double elapsed = seconds_since(start);
    auto out = from_checks(report, {"partition_equivalence"});
    out.passed = out.passed && elapsed < 10.0;
    out.detail += detail::concat("; ", elapsed, " s");
    return out;
}

Outcome gadget_values() {
    const auto start = clock_type::now();
    const auto instance = local_minimizer_instance();
    const prec_t trap = robust_value(instance, local_minimizer_trap_policy()).value;
    const auto grid = grid_search_mr(instance, 0.01);
    const double elapsed = seconds_since(start);
    return {std::abs(trap) <= 1e-9 && std::abs(grid.best_value + 1) <= 1e-9 && elapsed < 60,
            detail::concat("trap ", trap, ", grid minimum ", grid.best_value, " over ",
                           grid.iterations, " policies, ", elapsed, " s")};
}

Outcome strict_certificate() {
    const auto cert = local_min_certificate(local_minimizer_instance(),
                                            local_minimizer_trap_policy(), 0.05, 0.01);
    return {cert.is_local_min && cert.is_strict,
            detail::concat(cert.points_checked, " points checked")};
}

Outcome basin_separation() {
    const auto instance = local_minimizer_instance();
    const verify::GadgetSuiteOptions opt;
    const auto trapped = solve_mr_subgradient(instance, verify::near_trap_init(opt.seed, 0.05),
                                              opt.trap_step0, opt.trap_iters);
    const auto escaped = solve_mr_subgradient(instance, verify::escape_init_policy(),
                                              opt.escape_step0, 5000);
    return {std::abs(trapped.best_value) <= 1e-6 && std::abs(escaped.best_value + 1) <= 1e-6,
            detail::concat("near trap ", trapped.best_value, ", from (0,1) ",
                           escaped.best_value)};
}

Outcome closed_form() {
    prec_t worst = 0;
    for (const auto& row : landscape::scan(0.001, 0.001)) worst = std::max(worst, std::abs(row.gap));
    return {worst <= 0.002, detail::concat("largest gap ", worst)};
}

Outcome oracle_equivalence() {
    Rng rng(101);
    prec_t worst = 0;
    bool max_exact = true;
    for (int i = 0; i < 200; ++i) {
        const auto instance = random_instance(rng, {});
        const auto policy = random_policy(rng, instance.mdp);
        const auto eval = robust_value(instance, policy);
        prec_t best = -std::numeric_limits<prec_t>::infinity();
        for (std::size_t k = 0; k < instance.ambiguity.size(); ++k) {
            const auto& kernel = instance.ambiguity.kernels[k];
            const prec_t v = evaluate(instance.mdp, kernel, policy, instance.initial_state);
            const prec_t b =
                brute_force_evaluate(instance.mdp, kernel, policy, instance.initial_state);
            const prec_t r =
                oracle::trajectory_value(instance.mdp, kernel, policy, instance.initial_state);
            worst = std::max({worst, std::abs(v - b), std::abs(v - r)});
            max_exact = max_exact && eval.per_kernel_values[k] == v;
            best = std::max(best, v);
        }
        max_exact = max_exact && eval.value == best;
    }
    return {worst <= 1e-10 && max_exact,
            detail::concat("largest difference ", worst, ", max exact ", max_exact)};
}

Outcome gradient_check() {
    Rng rng(102);
    constexpr prec_t h = 1e-6;
    int points = 0;
    prec_t worst = 0;
    while (points < 50) {
        const auto instance = random_instance(rng, {});
        const auto policy = random_policy(rng, instance.mdp);
        const auto eval = robust_value(instance, policy);
        bool unique = true;
        for (std::size_t k = 0; k < eval.per_kernel_values.size(); ++k)
            if (k != eval.worst_kernel_index && eval.value - eval.per_kernel_values[k] <= 1e-3)
                unique = false;
        if (!unique) continue;
        ++points;
        const auto g = robust_subgradient(instance, policy);
        const auto& kernel = instance.ambiguity.kernels[eval.worst_kernel_index];
        for (std::size_t t = 0; t < instance.mdp.horizon(); ++t)
            for (std::size_t s = 0; s < instance.mdp.num_states(t); ++s)
                for (std::size_t a = 0; a < instance.mdp.num_actions(t); ++a) {
                    auto plus = policy, minus = policy;
                    plus.dist[t][s][a] += h;
                    minus.dist[t][s][a] -= h;
                    const prec_t fd = (oracle::trajectory_value(instance.mdp, kernel, plus,
                                                                instance.initial_state) -
                                       oracle::trajectory_value(instance.mdp, kernel, minus,
                                                                instance.initial_state)) /
                                      (2 * h);
                    worst = std::max(worst, std::abs(fd - g.grad[t][s][a]));
                }
    }
    return {worst <= 1e-6, detail::concat(points, " points, largest error ", worst)};
}

Outcome max_sum_property() {
    Rng rng(103);
    RandomInstanceOptions opt;
    opt.cost_lo = 0.0;
    opt.min_kernels = 2;
    opt.max_kernels = 3;
    opt.zero_cost_probability = 0.7;
    opt.transition_sparsity = 0.4;
    int agree = 0, zero_cases = 0;
    for (int i = 0; i < 200; ++i) {
        const auto instance = random_instance(rng, opt);
        const auto policy = random_policy(rng, instance.mdp, 0.5);
        const auto check = max_sum_equivalence_check(instance, policy);
        bool each = true;
        for (const auto& k : instance.ambiguity.kernels)
            each = each &&
                   oracle::trajectory_value(instance.mdp, k, policy, instance.initial_state) <= 1e-9;
        const bool max_np = check.max_value <= 1e-9, sum_np = check.sum_value <= 1e-9;
        agree += max_np == sum_np && sum_np == each;
        zero_cases += max_np;
    }
    return {agree == 200,
            detail::concat(agree, "/200 agree, ", zero_cases, " with nonpositive value")};
}

Outcome dynamic_consistency() {
    const auto report = verify::run_dynamic_suite({});
    auto out = from_checks(report, {"rectangular_consistency", "adversary_power_inequality"});
    return out;
}

Outcome fixed_kernel() {
    const verify::GadgetSuiteOptions opt;
    const auto c = verify::check_fixed_kernel_descent(opt.seed, opt.fixed_kernel_runs,
                                                      opt.fixed_kernel_step0,
                                                      opt.fixed_kernel_iters);
    return {c.passed, c.detail};
}

Outcome infinite_embedding() {
    const auto base = partition_instance({{1, 2, 3}});
    const auto inst = extend_infinite_horizon(base, 0.9);
    const auto policy =
        stationary_from_markov(inst, embed_md(base.mdp, constant_policy(base.mdp, 0)));
    const prec_t value = evaluate_discounted(inst, 0, policy, inst.initial_state);
    const prec_t expected = 0.9 + 2 * std::pow(0.9, 3) + 3 * std::pow(0.9, 5);
    return {std::abs(value - expected) <= 1e-10,
            detail::concat("value ", value, ", expected ", expected)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"partition equivalence", partition_equivalence},
        {"gadget trap and global values", gadget_values},
        {"strict local minimizer certificate", strict_certificate},
        {"subgradient basin separation", basin_separation},
        {"partial minimum closed form", closed_form},
        {"evaluation oracle equivalence", oracle_equivalence},
        {"subgradient finite differences", gradient_check},
        {"max and sum nonpositivity", max_sum_property},
        {"dynamic and rectangular consistency", dynamic_consistency},
        {"single kernel descent", fixed_kernel},
        {"infinite horizon embedding", infinite_embedding},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out{false, ""};
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out.detail = std::string("exception: ") + e.what();
        }
        failures += !out.passed;
        std::printf("%s %zu %s (%s)\n", out.passed ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
