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

// Text documents for instances, policies, and reports; CSV tables.
//
// Instance document (finite horizon):
//   {"kind": "finite_horizon", "horizon": T,
//    "stages": [{"num_states": n, "num_actions": m}, ...],
//    "costs": [t][s][a], "kernels": [k][t][s][a][s'], "initial_state": s}
//
// Instance document (discounted, with sink):
//   {"kind": "infinite_horizon", "gamma": g, "num_states": n, "sink": i,
//    "initial_state": s, "stage_offsets": [...], "num_actions": [...],
//    "costs": [s][a], "kernels": [k][s][a][s']}

#include "rmdp/dynamic.hpp"
#include "rmdp/infinite_horizon.hpp"
#include "rmdp/landscape.hpp"
#include "rmdp/solvers.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>

namespace rmdp::io {

using json = nlohmann::ordered_json;

namespace detail {

template <class T> T get_field(const json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key))
        throw ModelError(rmdp::detail::concat("document is missing field '", key, "'"));
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ModelError(rmdp::detail::concat("field '", key, "' has the wrong type: ",
                                              e.what()));
    }
}

} // namespace detail

// **************************************************************************
// Instances
// **************************************************************************

inline json to_json(const RobustInstance& instance) {
    json doc;
    doc["kind"] = "finite_horizon";
    doc["horizon"] = instance.mdp.horizon();
    json stages = json::array();
    for (const auto& st : instance.mdp.stages)
        stages.push_back({{"num_states", st.num_states}, {"num_actions", st.num_actions}});
    doc["stages"] = std::move(stages);
    doc["costs"] = instance.mdp.cost;
    json kernels = json::array();
    for (const auto& kernel : instance.ambiguity.kernels) kernels.push_back(kernel.trans);
    doc["kernels"] = std::move(kernels);
    doc["initial_state"] = instance.initial_state;
    return doc;
}

/// Parses a finite-horizon instance document. Shape checks are left to validate().
inline RobustInstance instance_from_json(const json& doc) {
    const auto kind = detail::get_field<std::string>(doc, "kind");
    if (kind != "finite_horizon")
        throw ModelError("expected a finite_horizon instance document, got '" + kind + "'");
    RobustInstance instance;
    const auto horizon = detail::get_field<std::size_t>(doc, "horizon");
    for (const auto& st : detail::get_field<json>(doc, "stages"))
        instance.mdp.stages.push_back({detail::get_field<std::size_t>(st, "num_states"),
                                       detail::get_field<std::size_t>(st, "num_actions")});
    if (instance.mdp.stages.size() != horizon)
        throw ModelError("horizon does not match the number of stages");
    instance.mdp.cost = detail::get_field<std::vector<std::vector<numvec>>>(doc, "costs");
    for (const auto& k : detail::get_field<json>(doc, "kernels")) {
        Kernel kernel;
        try {
            kernel.trans = k.get<std::vector<std::vector<std::vector<numvec>>>>();
        } catch (const json::exception& e) {
            throw ModelError(std::string("malformed kernel: ") + e.what());
        }
        instance.ambiguity.kernels.push_back(std::move(kernel));
    }
    instance.initial_state = detail::get_field<std::size_t>(doc, "initial_state");
    return instance;
}

inline json to_json(const InfiniteHorizonInstance& inst) {
    json doc;
    doc["kind"] = "infinite_horizon";
    doc["gamma"] = inst.gamma;
    doc["num_states"] = inst.num_states;
    doc["sink"] = inst.sink;
    doc["initial_state"] = inst.initial_state;
    doc["stage_offsets"] = inst.stage_offset;
    doc["num_actions"] = inst.num_actions;
    doc["costs"] = inst.cost;
    doc["kernels"] = inst.kernels;
    return doc;
}

inline InfiniteHorizonInstance infinite_from_json(const json& doc) {
    const auto kind = detail::get_field<std::string>(doc, "kind");
    if (kind != "infinite_horizon")
        throw ModelError("expected an infinite_horizon instance document, got '" + kind + "'");
    InfiniteHorizonInstance inst;
    inst.gamma = detail::get_field<prec_t>(doc, "gamma");
    inst.num_states = detail::get_field<std::size_t>(doc, "num_states");
    inst.sink = detail::get_field<std::size_t>(doc, "sink");
    inst.initial_state = detail::get_field<std::size_t>(doc, "initial_state");
    inst.stage_offset = detail::get_field<std::vector<std::size_t>>(doc, "stage_offsets");
    inst.num_actions = detail::get_field<std::vector<std::size_t>>(doc, "num_actions");
    inst.cost = detail::get_field<std::vector<numvec>>(doc, "costs");
    inst.kernels =
        detail::get_field<std::vector<std::vector<std::vector<numvec>>>>(doc, "kernels");
    if (!(inst.gamma > 0 && inst.gamma < 1)) throw ModelError("gamma must lie in (0, 1)");
    if (inst.num_actions.size() != inst.num_states || inst.cost.size() != inst.num_states ||
        inst.sink >= inst.num_states || inst.initial_state >= inst.num_states)
        throw ModelError("infinite-horizon document dimensions disagree");
    for (const auto& kernel : inst.kernels) {
        if (kernel.size() != inst.num_states)
            throw ModelError("infinite-horizon kernel has the wrong number of states");
        for (std::size_t s = 0; s < inst.num_states; ++s) {
            if (kernel[s].size() != inst.num_actions[s] ||
                inst.cost[s].size() != inst.num_actions[s])
                throw ModelError("infinite-horizon kernel has the wrong number of actions");
            for (const auto& row : kernel[s])
                if (row.size() != inst.num_states)
                    throw ModelError("infinite-horizon kernel row has the wrong length");
        }
    }
    return inst;
}

// **************************************************************************
// Policies
// **************************************************************************

inline json to_json(const PolicyMR& policy) {
    return json{{"kind", "randomized"}, {"dist", policy.dist}};
}

inline json to_json(const PolicyMD& policy) {
    return json{{"kind", "deterministic"}, {"act", policy.act}};
}

inline json to_json(const StationaryPolicy& policy) {
    return json{{"kind", "stationary"}, {"dist", policy.dist}};
}

/// Reads a randomized or deterministic policy; deterministic ones are embedded as point masses.
inline PolicyMR policy_from_json(const json& doc, const FiniteHorizonMDP& mdp) {
    const auto kind = detail::get_field<std::string>(doc, "kind");
    if (kind == "randomized")
        return PolicyMR{detail::get_field<std::vector<std::vector<numvec>>>(doc, "dist")};
    if (kind == "deterministic") {
        PolicyMD md{detail::get_field<std::vector<indvec>>(doc, "act")};
        rmdp::detail::throw_if_invalid(validate(mdp, md));
        return embed_md(mdp, md);
    }
    throw ModelError("unknown policy kind '" + kind + "'");
}

inline StationaryPolicy stationary_policy_from_json(const json& doc) {
    const auto kind = detail::get_field<std::string>(doc, "kind");
    if (kind != "stationary") throw ModelError("expected a stationary policy document");
    return StationaryPolicy{detail::get_field<std::vector<numvec>>(doc, "dist")};
}

// **************************************************************************
// Reports
// **************************************************************************

inline json to_json(const RobustEvaluation& eval) {
    return json{{"value", eval.value},
                {"worst_kernel_index", eval.worst_kernel_index},
                {"per_kernel_values", eval.per_kernel_values}};
}

template <class Policy>
json to_json(const SolveReport<Policy>& report, const std::string& solver) {
    json doc;
    doc["solver"] = solver;
    doc["best_value"] = report.best_value;
    if (report.exact_best_value) doc["exact_best_value"] = *report.exact_best_value;
    doc["worst_kernel_index"] = report.worst_kernel_index;
    doc["iterations"] = report.iterations;
    doc["best_policy"] = to_json(report.best_policy);
    return doc;
}

inline json to_json(const DynamicSolution& solution, PolicyClass policy_class) {
    json doc;
    doc["solver"] = "dynamic_dp";
    doc["policy_class"] = policy_class == PolicyClass::randomized ? "mr" : "md";
    doc["values"] = solution.values;
    doc["policy"] = solution.deterministic_policy ? to_json(*solution.deterministic_policy)
                                                  : to_json(solution.policy);
    doc["game_values_residual"] = solution.game_values_residual;
    return doc;
}

// **************************************************************************
// CSV tables
// **************************************************************************

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(prec_t value) {
    for (int precision = 15; precision <= 17; ++precision) {
        char buffer[40];
        std::snprintf(buffer, sizeof buffer, "%.*g", precision, value);
        if (std::strtod(buffer, nullptr) == value) return buffer;
    }
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

inline void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
    out << "iteration,robust_value,worst_kernel_index\n";
    for (const auto& e : trace)
        out << e.iteration << ',' << format_number(e.robust_value) << ','
            << e.worst_kernel_index << '\n';
}

inline void write_values_csv(std::ostream& out, const std::vector<numvec>& values) {
    out << "stage,state,value\n";
    for (std::size_t t = 0; t < values.size(); ++t)
        for (std::size_t s = 0; s < values[t].size(); ++s)
            out << t << ',' << s << ',' << format_number(values[t][s]) << '\n';
}

inline void write_scan_csv(std::ostream& out, const std::vector<landscape::ScanRow>& rows) {
    out << "pi1_0,f_numeric,f_closed,gap\n";
    for (const auto& r : rows)
        out << format_number(r.pi1_0) << ',' << format_number(r.f_numeric) << ','
            << format_number(r.f_closed) << ',' << format_number(r.gap) << '\n';
}

// **************************************************************************
// Files
// **************************************************************************

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in), {});
}

inline json parse(const std::string& text, const std::string& origin = "document") {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError(origin + " is not valid JSON: " + e.what());
    }
}

/// Serialized form used for every document written by the tools.
inline std::string dump(const json& doc) { return doc.dump(1) + "\n"; }

} // namespace rmdp::io
