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

#include "rmdp/robust.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>

namespace rmdp {

/// One step of an optimizer's history.
struct TraceEntry {
    std::size_t iteration = 0;
    prec_t robust_value = 0;
    std::size_t worst_kernel_index = 0;
};

/**
 * Result of a static robust policy optimization.
 *
 * best_value equals robust_value(instance, best_policy).value. When the
 * instance admits exact integer arithmetic, exact_best_value holds the same
 * value as an integer.
 */
template <class Policy> struct SolveReport {
    Policy best_policy;
    prec_t best_value = 0;
    std::optional<std::int64_t> exact_best_value;
    std::size_t worst_kernel_index = 0;
    /// policies examined (exhaustive, grid) or iterations performed (subgradient)
    std::uint64_t iterations = 0;
    std::vector<TraceEntry> trace;
};

// **************************************************************************
// Exhaustive search over deterministic Markov policies
// **************************************************************************

/// Maximal number of deterministic policies enumerated by solve_md_exhaustive
constexpr std::uint64_t EXHAUSTIVE_LIMIT = std::uint64_t(1) << 24;

/// Number of deterministic Markov policies, saturating on overflow.
inline std::uint64_t count_md_policies(const FiniteHorizonMDP& mdp) {
    std::uint64_t count = 1;
    for (std::size_t t = 0; t < mdp.horizon(); ++t)
        for (std::size_t s = 0; s < mdp.num_states(t); ++s)
            count = detail::saturating_mul(count, mdp.num_actions(t));
    return count;
}

namespace detail {

struct DecisionRow {
    std::size_t t, s, num_actions;
};

/// (stage, state) pairs with more than one action, stage-major then state-minor.
inline std::vector<DecisionRow> decision_rows(const FiniteHorizonMDP& mdp) {
    std::vector<DecisionRow> rows;
    for (std::size_t t = 0; t < mdp.horizon(); ++t)
        if (mdp.num_actions(t) > 1)
            for (std::size_t s = 0; s < mdp.num_states(t); ++s)
                rows.push_back({t, s, mdp.num_actions(t)});
    return rows;
}

/// True when costs are integers and every kernel row is a point mass.
inline bool admits_exact_arithmetic(const RobustInstance& instance) {
    const auto& mdp = instance.mdp;
    for (const auto& ct : mdp.cost)
        for (const auto& cs : ct)
            for (prec_t c : cs)
                if (c != std::floor(c) || std::abs(c) >= 9007199254740992.0) return false;
    for (const auto& kernel : instance.ambiguity.kernels)
        for (const auto& tt : kernel.trans)
            for (const auto& ts : tt)
                for (const auto& row : ts) {
                    std::size_t ones = 0;
                    for (prec_t p : row) {
                        if (p == 1.0) ++ones;
                        else if (p != 0.0) return false;
                    }
                    if (ones != 1) return false;
                }
    return true;
}

} // namespace detail

/**
 * Minimizes the static robust value over all deterministic Markov policies by
 * enumeration. Policies are visited in lexicographic order (stage-major,
 * state-minor, action index) and only a strictly better value replaces the
 * incumbent, so ties resolve to the lexicographically smallest policy.
 *
 * Instances with integer costs and point-mass kernels are compared in exact
 * integer arithmetic.
 *
 * @throws SizeGuardError when there are more than EXHAUSTIVE_LIMIT policies
 */
inline SolveReport<PolicyMD> solve_md_exhaustive(const RobustInstance& instance) {
    detail::check_instance(instance);
    const auto& mdp = instance.mdp;
    const std::uint64_t total = count_md_policies(mdp);
    if (total > EXHAUSTIVE_LIMIT)
        throw SizeGuardError(detail::concat("deterministic policy count ", total,
                                            " exceeds limit ", EXHAUSTIVE_LIMIT));

    const auto rows = detail::decision_rows(mdp);
    const bool exact = detail::admits_exact_arithmetic(instance);
    PolicyMD policy = constant_policy(mdp, 0);

    SolveReport<PolicyMD> report;
    bool have_best = false;
    std::int64_t best_exact = 0;
    for (std::uint64_t index = 0; index < total; ++index) {
        if (index > 0) {
            // increment the mixed-radix counter, last row least significant
            for (std::size_t r = rows.size(); r-- > 0;) {
                auto& digit = policy.act[rows[r].t][rows[r].s];
                if (++digit < rows[r].num_actions) break;
                digit = 0;
            }
        }
        if (exact) {
            std::int64_t worst = 0;
            std::size_t worst_k = 0;
            for (std::size_t k = 0; k < instance.ambiguity.size(); ++k) {
                const std::int64_t v = *exact_md_value(mdp, instance.ambiguity.kernels[k],
                                                       policy, instance.initial_state);
                if (k == 0 || v > worst) {
                    worst = v;
                    worst_k = k;
                }
            }
            if (!have_best || worst < best_exact) {
                have_best = true;
                best_exact = worst;
                report.best_policy = policy;
                report.worst_kernel_index = worst_k;
            }
        } else {
            const auto eval =
                detail::robust_value_unchecked(instance, embed_md(mdp, policy));
            if (!have_best || eval.value < report.best_value) {
                have_best = true;
                report.best_value = eval.value;
                report.best_policy = policy;
                report.worst_kernel_index = eval.worst_kernel_index;
            }
        }
    }
    if (exact) {
        report.exact_best_value = best_exact;
        report.best_value = static_cast<prec_t>(best_exact);
    }
    report.iterations = total;
    return report;
}

// **************************************************************************
// Projected subgradient over randomized Markov policies
// **************************************************************************

/**
 * Euclidean projection onto the probability simplex, using the sort-based
 * threshold rule: find the largest rho with u_rho > (sum_{i<=rho} u_i - 1)/rho
 * for u sorted in decreasing order, and clip v at that threshold.
 */
inline numvec project_simplex(const numvec& v) {
    if (v.empty()) throw ModelError("cannot project an empty vector");
    for (prec_t x : v)
        if (!std::isfinite(x)) throw ModelError("cannot project a non-finite vector");

    numvec u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    prec_t cumulative = 0, theta = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cumulative += u[i];
        const prec_t candidate = (cumulative - 1.0) / prec_t(i + 1);
        if (u[i] - candidate > 0) theta = candidate;
    }
    numvec result(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) result[i] = std::max(v[i] - theta, 0.0);
    return result;
}

/// Gradient with respect to each coordinate pi_t(a|s), shaped like PolicyMR::dist.
struct RobustGradient {
    std::vector<std::vector<numvec>> grad;
    std::size_t worst_kernel_index = 0;
    prec_t value = 0;
};

namespace detail {

inline RobustGradient robust_subgradient_unchecked(const RobustInstance& instance,
                                                   const PolicyMR& policy) {
    const auto eval = robust_value_unchecked(instance, policy);
    const auto& mdp = instance.mdp;
    const Kernel& kernel = instance.ambiguity.kernels[eval.worst_kernel_index];
    const auto values = backward_values(mdp, kernel, policy);
    const auto occ = forward_occupancy(mdp, kernel, policy, instance.initial_state);

    RobustGradient result;
    result.worst_kernel_index = eval.worst_kernel_index;
    result.value = eval.value;
    result.grad.resize(mdp.horizon());
    for (std::size_t t = 0; t < mdp.horizon(); ++t) {
        result.grad[t].assign(mdp.num_states(t), numvec(mdp.num_actions(t), 0.0));
        for (std::size_t s = 0; s < mdp.num_states(t); ++s) {
            if (occ[t][s] == 0) continue;
            for (std::size_t a = 0; a < mdp.num_actions(t); ++a) {
                prec_t q = mdp.cost[t][s][a];
                if (t + 1 < mdp.horizon()) {
                    const numvec& row = kernel.trans[t][s][a];
                    for (std::size_t sn = 0; sn < row.size(); ++sn)
                        q += row[sn] * values[t + 1][sn];
                }
                result.grad[t][s][a] = occ[t][s] * q;
            }
        }
    }
    return result;
}

} // namespace detail

/**
 * Gradient of the worst kernel's value at the policy. At ties the lowest
 * index worst kernel is used, which gives an element of the subdifferential's
 * generating set.
 *
 * dV/dpi_t(a|s) = Pr(S_t = s) * Q_t(s,a), with the state-visit probability
 * from a forward pass and Q from a backward pass under the worst kernel.
 */
inline RobustGradient robust_subgradient(const RobustInstance& instance,
                                         const PolicyMR& policy) {
    detail::check_instance_policy(instance, policy);
    return detail::robust_subgradient_unchecked(instance, policy);
}

/**
 * Projected subgradient descent over randomized Markov policies:
 *   pi <- Proj(pi - step0 / sqrt(j+1) * g_j)
 * projecting each state's action distribution onto its simplex. Reports the
 * best iterate by robust value, not the last one. The trace has one entry per
 * evaluated iterate, starting with the initial policy at iteration 0.
 */
inline SolveReport<PolicyMR> solve_mr_subgradient(const RobustInstance& instance,
                                                  const PolicyMR& init, prec_t step0,
                                                  std::size_t iters) {
    if (iters < 1) throw ModelError("iteration count must be at least 1");
    if (!(step0 > 0) || !std::isfinite(step0))
        throw ModelError("initial step size must be positive");
    detail::check_instance_policy(instance, init);

    const auto& mdp = instance.mdp;
    PolicyMR policy = init;
    SolveReport<PolicyMR> report;
    report.trace.reserve(iters + 1);

    auto gradient = detail::robust_subgradient_unchecked(instance, policy);
    report.best_policy = policy;
    report.best_value = gradient.value;
    report.worst_kernel_index = gradient.worst_kernel_index;
    report.trace.push_back({0, gradient.value, gradient.worst_kernel_index});

    for (std::size_t j = 0; j < iters; ++j) {
        const prec_t step = step0 / std::sqrt(prec_t(j + 1));
        for (std::size_t t = 0; t < mdp.horizon(); ++t)
            for (std::size_t s = 0; s < mdp.num_states(t); ++s) {
                numvec& p = policy.dist[t][s];
                if (p.size() == 1) continue;
                for (std::size_t a = 0; a < p.size(); ++a) p[a] -= step * gradient.grad[t][s][a];
                p = project_simplex(p);
            }
        gradient = detail::robust_subgradient_unchecked(instance, policy);
        report.trace.push_back({j + 1, gradient.value, gradient.worst_kernel_index});
        if (gradient.value < report.best_value) {
            report.best_value = gradient.value;
            report.best_policy = policy;
            report.worst_kernel_index = gradient.worst_kernel_index;
        }
    }
    report.iterations = iters;
    return report;
}

// **************************************************************************
// Grid search and local-minimum certificate over randomized policies
// **************************************************************************

namespace detail {

/// Number of grid intervals encoded by a step; the step must divide 1.
inline std::size_t grid_divisions(prec_t step) {
    if (!(step > 0) || step > 1) throw ModelError("grid step must be in (0, 1]");
    const prec_t m = std::round(1.0 / step);
    if (std::abs(m * step - 1.0) > 1e-9)
        throw ModelError(concat("grid step ", step, " does not divide 1"));
    return static_cast<std::size_t>(m);
}

/// All points of the simplex with coordinates in {0, 1/m, ..., 1}.
inline std::vector<numvec> simplex_grid(std::size_t dimension, std::size_t m) {
    std::vector<numvec> points;
    std::vector<std::size_t> parts(dimension, 0);
    std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t i,
                                                             std::size_t remaining) {
        if (i + 1 == dimension) {
            parts[i] = remaining;
            numvec p(dimension);
            for (std::size_t j = 0; j < dimension; ++j) p[j] = prec_t(parts[j]) / prec_t(m);
            points.push_back(std::move(p));
            return;
        }
        for (std::size_t k = 0; k <= remaining; ++k) {
            parts[i] = k;
            fill(i + 1, remaining - k);
        }
    };
    fill(0, m);
    return points;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = saturating_mul(result, n - k + i);
        result /= i;
    }
    return result;
}

} // namespace detail

/// Maximal number of policies visited by grid_search_mr
constexpr std::uint64_t GRID_SEARCH_LIMIT = 50'000'000;

/**
 * Global grid search of the static robust value over randomized Markov
 * policies whose action probabilities are multiples of step.
 */
inline SolveReport<PolicyMR> grid_search_mr(const RobustInstance& instance, prec_t step) {
    detail::check_instance(instance);
    const auto& mdp = instance.mdp;
    const std::size_t m = detail::grid_divisions(step);
    const auto rows = detail::decision_rows(mdp);

    std::uint64_t total = 1;
    for (const auto& row : rows)
        total = detail::saturating_mul(
            total, detail::binomial(m + row.num_actions - 1, row.num_actions - 1));
    if (total > GRID_SEARCH_LIMIT)
        throw SizeGuardError(detail::concat("grid of ", total, " policies exceeds limit ",
                                            GRID_SEARCH_LIMIT));

    std::vector<std::vector<numvec>> grids;
    for (const auto& row : rows) grids.push_back(detail::simplex_grid(row.num_actions, m));

    PolicyMR policy = uniform_policy(mdp);
    std::vector<std::size_t> digits(rows.size(), 0);
    for (std::size_t r = 0; r < rows.size(); ++r)
        policy.dist[rows[r].t][rows[r].s] = grids[r][0];

    SolveReport<PolicyMR> report;
    bool have_best = false;
    for (std::uint64_t index = 0; index < total; ++index) {
        if (index > 0) {
            for (std::size_t r = rows.size(); r-- > 0;) {
                if (++digits[r] < grids[r].size()) {
                    policy.dist[rows[r].t][rows[r].s] = grids[r][digits[r]];
                    break;
                }
                digits[r] = 0;
                policy.dist[rows[r].t][rows[r].s] = grids[r][0];
            }
        }
        const auto eval = detail::robust_value_unchecked(instance, policy);
        if (!have_best || eval.value < report.best_value) {
            have_best = true;
            report.best_value = eval.value;
            report.best_policy = policy;
            report.worst_kernel_index = eval.worst_kernel_index;
        }
    }
    report.iterations = total;
    return report;
}

/// Result of local_min_certificate.
struct LocalMinCertificate {
    bool is_local_min = false;
    bool is_strict = false;
    prec_t center_value = 0;
    std::uint64_t points_checked = 0;
    /// a grid point contradicting strictness (or local minimality), if any
    std::optional<PolicyMR> witness;
    std::optional<prec_t> witness_value;
};

/// Maximal number of free policy coordinates accepted by local_min_certificate
constexpr std::size_t CERTIFICATE_MAX_COORDINATES = 8;

/// Comparison margin of local_min_certificate
constexpr prec_t CERTIFICATE_MARGIN = 1e-10;

/**
 * Grid-based check of local minimality of the static robust value.
 *
 * Visits every feasible policy of the form center + grid_step * k, with k an
 * integer vector whose entries sum to zero within each state's action block,
 * lying within Euclidean distance radius of the center. The policy is a local
 * minimizer on the grid when no point improves by more than the margin, and
 * a strict one when every other point is worse by more than the margin.
 *
 * The certificate is bounded by the grid resolution; it is evidence, not a
 * proof.
 */
inline LocalMinCertificate local_min_certificate(const RobustInstance& instance,
                                                 const PolicyMR& policy, prec_t radius,
                                                 prec_t grid_step) {
    detail::check_instance_policy(instance, policy);
    if (!(grid_step > 0) || !(grid_step <= radius))
        throw ModelError("grid step must satisfy 0 < grid_step <= radius");
    const auto& mdp = instance.mdp;
    const std::size_t coordinates = free_coordinates(mdp);
    if (coordinates > CERTIFICATE_MAX_COORDINATES)
        throw SizeGuardError(detail::concat(coordinates, " free policy coordinates exceed ",
                                            CERTIFICATE_MAX_COORDINATES));

    const auto rows = detail::decision_rows(mdp);
    const long reach = static_cast<long>(std::floor(radius / grid_step + 1e-9));
    const prec_t radius_sq = radius * radius * (1 + 1e-12);

    // per row: feasible offsets as (point, squared distance)
    struct Offset {
        numvec point;
        prec_t dist_sq;
        bool is_center;
    };
    std::vector<std::vector<Offset>> offsets(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const numvec& center = policy.dist[rows[r].t][rows[r].s];
        const std::size_t n = center.size();
        std::vector<long> k(n, 0);
        std::function<void(std::size_t, long, long)> fill = [&](std::size_t i, long sum,
                                                                long norm_sq) {
            if (i + 1 == n) {
                k[i] = -sum;
                if (std::labs(k[i]) > reach) return;
                const long total_sq = norm_sq + k[i] * k[i];
                const prec_t dist_sq = grid_step * grid_step * prec_t(total_sq);
                if (dist_sq > radius_sq) return;
                numvec p(n);
                for (std::size_t j = 0; j < n; ++j) {
                    p[j] = center[j] + grid_step * prec_t(k[j]);
                    if (p[j] < -1e-12 || p[j] > 1 + 1e-12) return;
                    p[j] = std::clamp(p[j], 0.0, 1.0);
                }
                offsets[r].push_back({std::move(p), dist_sq, total_sq == 0});
                return;
            }
            for (long v = -reach; v <= reach; ++v) {
                k[i] = v;
                fill(i + 1, sum + v, norm_sq + v * v);
            }
        };
        fill(0, 0, 0);
    }

    LocalMinCertificate cert;
    cert.center_value = detail::robust_value_unchecked(instance, policy).value;
    cert.is_local_min = true;
    cert.is_strict = true;

    PolicyMR point = policy;
    std::function<void(std::size_t, prec_t, bool)> visit = [&](std::size_t r, prec_t dist_sq,
                                                               bool at_center) {
        if (r == rows.size()) {
            if (at_center) return;
            ++cert.points_checked;
            const prec_t v = detail::robust_value_unchecked(instance, point).value;
            if (v < cert.center_value - CERTIFICATE_MARGIN) {
                if (cert.is_local_min || v < *cert.witness_value) {
                    cert.witness = point;
                    cert.witness_value = v;
                }
                cert.is_local_min = false;
                cert.is_strict = false;
            } else if (v <= cert.center_value + CERTIFICATE_MARGIN && cert.is_strict) {
                cert.is_strict = false;
                cert.witness = point;
                cert.witness_value = v;
            }
            return;
        }
        for (const auto& off : offsets[r]) {
            const prec_t next = dist_sq + off.dist_sq;
            if (next > radius_sq) continue;
            point.dist[rows[r].t][rows[r].s] = off.point;
            visit(r + 1, next, at_center && off.is_center);
        }
        point.dist[rows[r].t][rows[r].s] = policy.dist[rows[r].t][rows[r].s];
    };
    visit(0, 0.0, true);
    return cert;
}

} // namespace rmdp
