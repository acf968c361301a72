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


// Command-line entry point: generate instances, evaluate policies, run the
// static and dynamic solvers, scan the gadget landscape, and run the
// invariant suites.
//
// Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 size guard.

#include "rmdp/io.hpp"
#include "rmdp/rmdp.hpp"
#include "rmdp/verify.hpp"

#include "CLI11.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#ifndef RMDP_VERSION
#define RMDP_VERSION "0.0.0"
#endif

namespace {

using rmdp::io::json;

enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("RMDP_LOG");
    if (!env) return LogLevel::info;
    const std::string v = env;
    if (v == "error") return LogLevel::error;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::info;
}

void log(LogLevel level, const std::string& message) {
    static const LogLevel threshold = log_level();
    if (level > threshold) return;
    static const char* names[] = {"error", "info", "debug"};
    std::cerr << "[rmdp " << names[static_cast<int>(level)] << "] " << message << '\n';
}

/// Exit code carrier; thrown to unwind with a specific status.
struct ExitStatus {
    int code;
};

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &length) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream out;
    for (unsigned int i = 0; i < length; ++i)
        out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return "sha256:" + out.str();
}

/// Bookkeeping for one invocation; writes artifacts and their manifests.
class Run {
public:
    Run(std::string subcommand, const CLI::App* app)
        : subcommand_(std::move(subcommand)), app_(app),
          start_(std::chrono::steady_clock::now()) {}

    void set_input(const std::string& document) { input_digest_ = sha256_hex(document); }

    /// Writes an artifact to path, or to stdout when path is empty or "-".
    void emit(const std::string& path, const std::string& content) {
        if (!input_digest_) input_digest_ = sha256_hex(content);
        if (path.empty() || path == "-") {
            std::cout << content;
            log(LogLevel::info, "manifest " + manifest("-").dump());
            return;
        }
        write_file(path, content);
        write_file(path + ".manifest.json", rmdp::io::dump(manifest(path)));
        log(LogLevel::info, "wrote " + path);
    }

private:
    static void write_file(const std::string& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write '" << path << "'\n";
            throw ExitStatus{2};
        }
        out << content;
    }

    json flags() const {
        json result = json::object();
        for (const CLI::App* app = app_; app; app = app->get_subcommands().empty()
                                                        ? nullptr
                                                        : app->get_subcommands().front()) {
            for (const CLI::Option* opt : app->get_options()) {
                const std::string name = opt->get_name(false, true);
                if (name == "--help" || name == "-h") continue;
                if (opt->count() > 0) {
                    const auto& results = opt->results();
                    result[name] = results.size() == 1 ? json(results.front()) : json(results);
                } else {
                    result[name] = opt->get_default_str();
                }
            }
        }
        return result;
    }

    json manifest(const std::string& output) const {
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        json doc;
        doc["subcommand"] = subcommand_;
        doc["flags"] = flags();
        doc["input_digest"] = input_digest_ ? json(*input_digest_) : json(nullptr);
        doc["output"] = output;
        doc["tool_version"] = RMDP_VERSION;
        doc["wall_clock_seconds"] = elapsed;
        return doc;
    }

    std::string subcommand_;
    const CLI::App* app_;
    std::chrono::steady_clock::time_point start_;
    std::optional<std::string> input_digest_;
};

rmdp::numvec parse_number_list(const std::string& text) {
    rmdp::numvec values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw rmdp::ModelError("'" + item + "' is not a number");
        }
    }
    if (values.empty()) throw rmdp::ModelError("empty number list");
    return values;
}

struct LoadedInstance {
    std::string text;
    json doc;
};

LoadedInstance load_document(const std::string& path) {
    LoadedInstance loaded;
    loaded.text = rmdp::io::read_file(path);
    loaded.doc = rmdp::io::parse(loaded.text, path);
    return loaded;
}

rmdp::RobustInstance checked_instance(const json& doc) {
    auto instance = rmdp::io::instance_from_json(doc);
    const auto violations = rmdp::validate(instance);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "invalid instance: " << v << '\n';
        throw ExitStatus{2};
    }
    return instance;
}

// **************************************************************************
// Subcommands
// **************************************************************************

struct GenOptions {
    std::string output;
    std::string weights;
    std::size_t n = 2;
    std::string entries = "1,0,-1,1";
    std::string base;
    double gamma = 0.9;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t max_horizon = 4, max_states = 3, max_actions = 3, kernels = 2;
    bool nonnegative = false;
};

int cmd_gen(const std::string& kind, const GenOptions& opt, Run& run) {
    json doc;
    if (kind == "partition") {
        doc = rmdp::io::to_json(rmdp::partition_instance({parse_number_list(opt.weights)}));
    } else if (kind == "theorem2") {
        doc = rmdp::io::to_json(rmdp::local_minimizer_instance());
    } else if (kind == "matrix") {
        doc = rmdp::io::to_json(
            rmdp::matrix_gadget_instance({opt.n, parse_number_list(opt.entries)}));
    } else if (kind == "random") {
        if (!opt.seed_given) {
            std::cerr << "error: gen random requires --seed\n";
            return 2;
        }
        rmdp::Rng rng(opt.seed);
        rmdp::RandomInstanceOptions shape;
        shape.max_horizon = opt.max_horizon;
        shape.max_states = opt.max_states;
        shape.max_actions = opt.max_actions;
        shape.min_kernels = shape.max_kernels = opt.kernels;
        if (opt.nonnegative) shape.cost_lo = 0.0;
        doc = rmdp::io::to_json(rmdp::random_instance(rng, shape));
    } else if (kind == "infinite") {
        const auto base = load_document(opt.base);
        run.set_input(base.text);
        doc = rmdp::io::to_json(
            rmdp::extend_infinite_horizon(checked_instance(base.doc), opt.gamma));
    }
    run.emit(opt.output, rmdp::io::dump(doc));
    return 0;
}

struct EvalOptions {
    std::string instance;
    std::string policy;
    bool uniform = false;
    std::string output;
};

int cmd_eval(const EvalOptions& opt, Run& run) {
    const auto loaded = load_document(opt.instance);
    run.set_input(loaded.text);
    json out;
    const bool infinite = loaded.doc.value("kind", "") == "infinite_horizon";
    if (infinite) {
        const auto inst = rmdp::io::infinite_from_json(loaded.doc);
        rmdp::StationaryPolicy policy;
        if (opt.uniform || opt.policy.empty()) {
            for (std::size_t n : inst.num_actions) policy.dist.emplace_back(n, 1.0 / double(n));
        } else {
            policy = rmdp::io::stationary_policy_from_json(
                rmdp::io::parse(rmdp::io::read_file(opt.policy), opt.policy));
        }
        rmdp::numvec per_kernel;
        for (std::size_t k = 0; k < inst.kernels.size(); ++k)
            per_kernel.push_back(
                rmdp::evaluate_discounted(inst, k, policy, inst.initial_state));
        out["kind"] = "discounted";
        out["gamma"] = inst.gamma;
        out["per_kernel_values"] = per_kernel;
        out["value"] = per_kernel.empty()
                           ? 0.0
                           : *std::max_element(per_kernel.begin(), per_kernel.end());
    } else {
        const auto instance = checked_instance(loaded.doc);
        rmdp::PolicyMR policy =
            opt.uniform || opt.policy.empty()
                ? rmdp::uniform_policy(instance.mdp)
                : rmdp::io::policy_from_json(
                      rmdp::io::parse(rmdp::io::read_file(opt.policy), opt.policy),
                      instance.mdp);
        out = rmdp::io::to_json(rmdp::robust_value(instance, policy));
        out["per_stage_adversary_value"] = rmdp::dynamic_policy_value(instance, policy);
    }
    run.emit(opt.output, rmdp::io::dump(out));
    return 0;
}

struct SolveOptions {
    std::string instance;
    std::string output;
    std::string trace;
    std::string values;
    std::string init = "uniform";
    std::string init_file;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double step0 = 0.05;
    std::size_t iters = 2000;
    std::string policy_class = "mr";
    double eps = rmdp::MATRIX_GAME_EPS;
};

bool has_gadget_shape(const rmdp::FiniteHorizonMDP& mdp) {
    const std::vector<rmdp::StageDims> shape{{1, 2}, {2, 2}, {4, 1}};
    return mdp.stages == shape;
}

rmdp::PolicyMR initial_policy(const SolveOptions& opt, const rmdp::RobustInstance& instance) {
    if (opt.init == "uniform") return rmdp::uniform_policy(instance.mdp);
    if (opt.init == "file")
        return rmdp::io::policy_from_json(
            rmdp::io::parse(rmdp::io::read_file(opt.init_file), opt.init_file), instance.mdp);
    if (!opt.seed_given) {
        std::cerr << "error: --init " << opt.init << " requires --seed\n";
        throw ExitStatus{2};
    }
    if (opt.init == "random") {
        rmdp::Rng rng(opt.seed);
        return rmdp::random_policy(rng, instance.mdp);
    }
    // near-trap
    if (!has_gadget_shape(instance.mdp)) {
        std::cerr << "error: --init near-trap needs the 2x2 local-minimizer gadget\n";
        throw ExitStatus{2};
    }
    return rmdp::verify::near_trap_init(opt.seed);
}

int cmd_solve(const std::string& mode, const SolveOptions& opt, Run& run) {
    const auto loaded = load_document(opt.instance);
    run.set_input(loaded.text);
    const auto instance = checked_instance(loaded.doc);

    if (mode == "md") {
        const auto report = rmdp::solve_md_exhaustive(instance);
        log(LogLevel::debug, "examined " + std::to_string(report.iterations) + " policies");
        run.emit(opt.output, rmdp::io::dump(rmdp::io::to_json(report, "md_exhaustive")));
    } else if (mode == "mr") {
        const auto init = initial_policy(opt, instance);
        const auto report = rmdp::solve_mr_subgradient(instance, init, opt.step0, opt.iters);
        auto doc = rmdp::io::to_json(report, "mr_subgradient");
        doc["step0"] = opt.step0;
        doc["initial_policy"] = rmdp::io::to_json(init);
        run.emit(opt.output, rmdp::io::dump(doc));
        if (!opt.trace.empty()) {
            std::ostringstream csv;
            rmdp::io::write_trace_csv(csv, report.trace);
            run.emit(opt.trace, csv.str());
        }
    } else {
        const auto cls = opt.policy_class == "md" ? rmdp::PolicyClass::deterministic
                                                  : rmdp::PolicyClass::randomized;
        const auto solution = rmdp::dynamic_dp_solve(instance, cls, opt.eps);
        run.emit(opt.output, rmdp::io::dump(rmdp::io::to_json(solution, cls)));
        std::ostringstream csv;
        rmdp::io::write_values_csv(csv, solution.values);
        if (!opt.values.empty()) run.emit(opt.values, csv.str());
    }
    return 0;
}

int cmd_dp(const SolveOptions& opt, Run& run) {
    const auto loaded = load_document(opt.instance);
    run.set_input(loaded.text);
    const auto instance = checked_instance(loaded.doc);
    const auto cls = opt.policy_class == "md" ? rmdp::PolicyClass::deterministic
                                              : rmdp::PolicyClass::randomized;
    const auto solution = rmdp::dynamic_dp_solve(instance, cls, opt.eps);
    std::ostringstream csv;
    rmdp::io::write_values_csv(csv, solution.values);
    run.emit(opt.output, csv.str());
    return 0;
}

struct ScanOptions {
    double step = 0.01;
    double inner_step = 0.001;
    bool full = false;
    std::string output;
};

int cmd_scan(const ScanOptions& opt, Run& run) {
    const auto rows = rmdp::landscape::scan(
        opt.step, opt.inner_step,
        opt.full ? rmdp::landscape::ScanMode::full : rmdp::landscape::ScanMode::diagonal);
    std::ostringstream csv;
    rmdp::io::write_scan_csv(csv, rows);
    run.emit(opt.output, csv.str());
    return 0;
}

struct VerifyOptions {
    std::size_t n_max = 10;
    std::size_t trials = 50;
    std::uint64_t seed = 1;
    bool tiny = false;
    std::string output;
};

int cmd_verify(const std::string& suite, const VerifyOptions& opt, Run& run) {
    rmdp::verify::SuiteReport report;
    if (suite == "partition") {
        rmdp::verify::PartitionSuiteOptions p;
        p.n_max = opt.n_max;
        p.trials = opt.trials;
        p.seed = opt.seed;
        report = rmdp::verify::run_partition_suite(p);
    } else if (suite == "theorem2") {
        rmdp::verify::GadgetSuiteOptions t;
        t.seed = opt.seed;
        report = rmdp::verify::run_gadget_suite(t);
    } else {
        rmdp::verify::DynamicSuiteOptions d;
        d.seed = opt.seed;
        if (!opt.tiny) {
            d.instances = 50;
            d.policy_pairs = 500;
        }
        report = rmdp::verify::run_dynamic_suite(d);
    }
    for (const auto& c : report.checks)
        log(LogLevel::info,
            std::string(c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail);
    run.emit(opt.output, rmdp::io::dump(report.to_json()));
    return report.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Static and dynamic robust MDP toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", RMDP_VERSION);

    GenOptions gen_opt;
    std::string gen_kind;
    auto* gen = app.add_subcommand("gen", "Generate an instance document");
    gen->add_option("kind", gen_kind, "partition | theorem2 | matrix | random | infinite")
        ->required()
        ->check(CLI::IsMember({"partition", "theorem2", "matrix", "random", "infinite"}));
    gen->add_option("-o,--output", gen_opt.output, "Output file (stdout when omitted)");
    gen->add_option("--weights", gen_opt.weights, "Comma-separated partition weights");
    gen->add_option("--n", gen_opt.n, "Matrix gadget size");
    gen->add_option("--entries", gen_opt.entries, "Row-major matrix gadget entries");
    gen->add_option("--base", gen_opt.base, "Finite-horizon instance to embed");
    gen->add_option("--gamma", gen_opt.gamma, "Discount factor for the embedding");
    auto* gen_seed = gen->add_option("--seed", gen_opt.seed, "Seed for random instances");
    gen->add_option("--max-horizon", gen_opt.max_horizon, "Largest random horizon");
    gen->add_option("--max-states", gen_opt.max_states, "Largest random state count per stage");
    gen->add_option("--max-actions", gen_opt.max_actions, "Largest random action count per stage");
    gen->add_option("--kernels", gen_opt.kernels, "Largest random kernel count");
    gen->add_flag("--nonnegative", gen_opt.nonnegative, "Draw costs from [0, 1]");

    EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "Evaluate a policy on an instance");
    eval->add_option("--instance", eval_opt.instance, "Instance document")->required();
    eval->add_option("--policy", eval_opt.policy, "Policy document");
    eval->add_flag("--uniform", eval_opt.uniform, "Evaluate the uniform policy");
    eval->add_option("-o,--output", eval_opt.output, "Output file (stdout when omitted)");

    SolveOptions solve_opt;
    std::string solve_mode;
    auto* solve = app.add_subcommand("solve", "Run a solver on an instance");
    solve->add_option("mode", solve_mode, "md | mr | dp")
        ->required()
        ->check(CLI::IsMember({"md", "mr", "dp"}));
    solve->add_option("--instance", solve_opt.instance, "Instance document")->required();
    solve->add_option("-o,--output", solve_opt.output, "Report document");
    solve->add_option("--trace", solve_opt.trace, "Trace CSV (mr)");
    solve->add_option("--values", solve_opt.values, "Value table CSV (dp)");
    solve->add_option("--init", solve_opt.init, "uniform | near-trap | random | file")
        ->check(CLI::IsMember({"uniform", "near-trap", "random", "file"}));
    solve->add_option("--init-file", solve_opt.init_file, "Initial policy document");
    auto* solve_seed = solve->add_option("--seed", solve_opt.seed, "Seed for near-trap and random starts");
    solve->add_option("--step0", solve_opt.step0, "Initial step size (mr)")->check(CLI::PositiveNumber);
    solve->add_option("--iters", solve_opt.iters, "Iterations (mr)")->check(CLI::PositiveNumber);
    solve->add_option("--class", solve_opt.policy_class, "Policy class (dp)")->check(CLI::IsMember({"md", "mr"}));
    solve->add_option("--eps", solve_opt.eps, "Matrix game tolerance (dp)")->check(CLI::PositiveNumber);

    SolveOptions dp_opt;
    auto* dp = app.add_subcommand("dp", "Dynamic programming; per-stage values as CSV");
    dp->add_option("--instance", dp_opt.instance, "Instance document")->required();
    dp->add_option("--class", dp_opt.policy_class, "Policy class")->check(CLI::IsMember({"md", "mr"}));
    dp->add_option("--eps", dp_opt.eps, "Matrix game tolerance")->check(CLI::PositiveNumber);
    dp->add_option("-o,--output", dp_opt.output, "Value table CSV (stdout when omitted)");

    ScanOptions scan_opt;
    auto* scan = app.add_subcommand("scan", "Partial-minimum landscape of the 2x2 gadget");
    scan->add_option("--step", scan_opt.step, "First-stage grid step");
    scan->add_option("--inner-step", scan_opt.inner_step, "Second-stage grid step");
    scan->add_flag("--full", scan_opt.full, "Scan the full second-stage square");
    scan->add_option("-o,--output", scan_opt.output, "Scan CSV (stdout when omitted)");

    VerifyOptions verify_opt;
    std::string verify_suite;
    auto* verify = app.add_subcommand("verify", "Run an invariant suite");
    verify->add_option("suite", verify_suite, "partition | theorem2 | dynamic")
        ->required()
        ->check(CLI::IsMember({"partition", "theorem2", "dynamic"}));
    verify->add_option("--n-max", verify_opt.n_max, "Largest partition size");
    verify->add_option("--trials", verify_opt.trials, "Random partition weight sets");
    verify->add_option("--seed", verify_opt.seed, "Suite seed");
    verify->add_flag("--tiny", verify_opt.tiny, "Desk-scale instance counts");
    verify->add_option("-o,--output", verify_opt.output, "Report document (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    gen_opt.seed_given = gen_seed->count() > 0;
    solve_opt.seed_given = solve_seed->count() > 0;

    const CLI::App* selected = app.get_subcommands().front();
    Run run(selected->get_name(), selected);
    try {
        if (*gen) return cmd_gen(gen_kind, gen_opt, run);
        if (*eval) return cmd_eval(eval_opt, run);
        if (*solve) return cmd_solve(solve_mode, solve_opt, run);
        if (*dp) return cmd_dp(dp_opt, run);
        if (*scan) return cmd_scan(scan_opt, run);
        if (*verify) return cmd_verify(verify_suite, verify_opt, run);
    } catch (const ExitStatus& status) {
        return status.code;
    } catch (const rmdp::SizeGuardError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const rmdp::ModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const rmdp::PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
