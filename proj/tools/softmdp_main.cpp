// softmdp command-line front end: MDP file validation, instance generation,
// solving by either route, equivalence sweeps, and oracle verification.
//
// Exit codes: 0 ok, 1 parse/usage error, 2 validation failure,
// 3 equivalence/check failure, 4 solver non-convergence, 5 guard violation.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "softmdp/equivalence.hpp"
#include "softmdp/io.hpp"
#include "softmdp/mdp.hpp"
#include "softmdp/operators.hpp"
#include "softmdp/oracle.hpp"
#include "softmdp/rng.hpp"
#include "softmdp/solvers.hpp"

namespace {

using namespace softmdp;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitNoConvergence = 4;
constexpr int kExitGuard = 5;

double default_tolerance() {
    if (const char* env = std::getenv("SOFTMDP_DEFAULT_TOL")) {
        char* end = nullptr;
        const double tol = std::strtod(env, &end);
        if (end != env && tol > 0.0) return tol;
        std::cerr << "warning: ignoring invalid SOFTMDP_DEFAULT_TOL='" << env << "'\n";
    }
    return 1e-10;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Loaded {
    MdpDocument doc;
    std::string digest;
};

// Parse (exit 1 on failure) and validate (exit 2), printing diagnostics.
Loaded load_or_exit(const std::string& path) {
    Loaded loaded;
    std::string text;
    try {
        text = read_file(path);
        loaded.doc = parse_mdp_text(text);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        std::exit(kExitParse);
    }
    loaded.digest = digest_hex(text);

    const auto result = validate_mdp(loaded.doc.mdp);
    for (const auto& v : result.violations) std::cerr << "violation: " << v.str() << "\n";
    if (!result.ok()) std::exit(kExitValidation);

    if (loaded.doc.prior_policy) {
        const auto prior = validate_policy(*loaded.doc.prior_policy, loaded.doc.mdp.num_states,
                                           loaded.doc.mdp.num_actions, true, "prior_policy");
        for (const auto& v : prior.violations) std::cerr << "violation: " << v.str() << "\n";
        if (!prior.ok()) std::exit(kExitValidation);
    }
    if (loaded.doc.initial_distribution) {
        Policy rho;
        rho.probs.push_back(*loaded.doc.initial_distribution);
        const auto res = validate_policy(rho, 1, loaded.doc.mdp.num_states, false,
                                         "initial_distribution");
        for (const auto& v : res.violations) std::cerr << "violation: " << v.str() << "\n";
        if (!res.ok()) std::exit(kExitValidation);
    }
    return loaded;
}

RegularizerSpec make_regularizer(const std::string& reg_name, double eta,
                                 const MdpDocument& doc, bool uniform_prior) {
    if (reg_name == "none") return RegularizerSpec::none();
    if (reg_name == "entropy") return RegularizerSpec::entropy(eta);
    if (doc.prior_policy) return RegularizerSpec::kl_to_prior(eta, *doc.prior_policy);
    if (uniform_prior) {
        return RegularizerSpec::kl_to_prior(
            eta, uniform_policy(doc.mdp.num_states, doc.mdp.num_actions));
    }
    std::cerr << "error: --reg kl requires prior_policy in the file or --uniform-prior\n";
    std::exit(kExitParse);
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

int cmd_check(const std::string& path) {
    MdpDocument doc;
    try {
        doc = parse_mdp_file(path);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    }
    auto result = validate_mdp(doc.mdp);
    if (doc.prior_policy) {
        auto prior = validate_policy(*doc.prior_policy, doc.mdp.num_states, doc.mdp.num_actions,
                                     true, "prior_policy");
        result.violations.insert(result.violations.end(), prior.violations.begin(),
                                 prior.violations.end());
    }
    for (const auto& v : result.violations) std::cout << v.str() << "\n";
    return result.ok() ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int cmd_generate(uint64_t seed, int states, int actions, double gamma,
                 const std::vector<double>& reward_range, const std::string& out_path) {
    MdpDocument doc;
    try {
        doc.mdp = random_mdp(seed, states, actions, gamma, reward_range[0], reward_range[1]);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    try {
        write_file(out_path, write_mdp_text(doc));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

int cmd_solve(const std::string& path, const std::string& method, const std::string& reg_name,
              double eta, bool eta_given, const SolveConfig& config, bool uniform_prior,
              const std::string& out_path, bool deterministic) {
    const Loaded loaded = load_or_exit(path);
    if (reg_name == "none" && eta_given) {
        std::cout << "warning: --eta is ignored with --reg none\n";
    }
    if (reg_name != "none" && !(eta > 0.0)) {
        std::cerr << "error: --eta must be strictly positive with --reg " << reg_name << "\n";
        return kExitParse;
    }
    const RegularizerSpec reg = make_regularizer(reg_name, eta, loaded.doc, uniform_prior);

    SolveReport report;
    try {
        report = (method == "vi") ? soft_value_iteration(loaded.doc.mdp, reg, config)
                                  : soft_policy_iteration(loaded.doc.mdp, reg, config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }

    std::cout << "method: " << method << "  regularizer: " << reg_name;
    if (reg_name != "none") std::cout << "  eta: " << format_real(eta);
    std::cout << "\n";
    std::cout << "converged: " << (report.converged ? "yes" : "no")
              << "  iterations: " << report.iterations
              << "  final_residual: " << format_real(report.final_residual) << "\n";
    const int shown = std::min(loaded.doc.mdp.num_states, 10);
    for (int s = 0; s < shown; ++s) {
        std::cout << "V[" << s << "] = " << format_real(report.fixed_point_v.v[s]) << "\n";
    }
    if (loaded.doc.mdp.num_states > shown) {
        std::cout << "(" << loaded.doc.mdp.num_states - shown
                  << " more states in the report file)\n";
    }

    if (!out_path.empty()) {
        Provenance prov;
        prov.input_digest = loaded.digest;
        if (!deterministic) prov.timestamp = utc_timestamp();
        write_file(out_path, write_solve_report(report, method, reg_name, eta, config, prov));
    }
    return report.converged ? kExitOk : kExitNoConvergence;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string path;
    int random_suite = 0;
    uint64_t seed = 1;
    std::vector<int> s_range = {2, 20};
    std::vector<int> a_range = {2, 8};
    std::vector<double> gamma_range = {0.5, 0.95};
    std::vector<double> reward_range = {-1.0, 1.0};
    std::string reg = "both";
    std::vector<double> eta_list = {0.01, 0.1, 1.0, 10.0};
    double threshold = 1e-6;
    bool uniform_prior = false;
    std::string out_path;
    std::string csv_path;
    bool deterministic = false;
};

int cmd_compare(const CompareArgs& args, const SolveConfig& config) {
    std::vector<SuiteEntry> entries;
    Provenance prov;
    if (!args.deterministic) prov.timestamp = utc_timestamp();

    if (args.random_suite > 0) {
        SuiteParams params;
        params.count = args.random_suite;
        params.seed = args.seed;
        params.states_lo = args.s_range[0];
        params.states_hi = args.s_range[1];
        params.actions_lo = args.a_range[0];
        params.actions_hi = args.a_range[1];
        params.gamma_lo = args.gamma_range[0];
        params.gamma_hi = args.gamma_range[1];
        params.reward_lo = args.reward_range[0];
        params.reward_hi = args.reward_range[1];
        params.etas = args.eta_list;
        params.entropy = args.reg == "entropy" || args.reg == "both";
        params.kl = args.reg == "kl" || args.reg == "both";
        try {
            entries = build_random_suite(params);
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitParse;
        }
        prov.seed = args.seed;
        prov.input_digest = "random-suite";
    } else {
        const Loaded loaded = load_or_exit(args.path);
        prov.input_digest = loaded.digest;
        const std::string base = "file";
        char buf[32];
        for (double eta : args.eta_list) {
            std::snprintf(buf, sizeof(buf), "%g", eta);
            if (args.reg == "entropy" || args.reg == "both") {
                SuiteEntry entry;
                entry.instance = {loaded.doc.mdp, RegularizerSpec::entropy(eta)};
                entry.eta = eta;
                entry.reg_name = "entropy";
                entry.id = base + "-entropy-eta" + buf;
                entries.push_back(std::move(entry));
            }
            if (args.reg == "kl" || args.reg == "both") {
                SuiteEntry entry;
                entry.instance = {loaded.doc.mdp,
                                  make_regularizer("kl", eta, loaded.doc, args.uniform_prior)};
                entry.eta = eta;
                entry.reg_name = "kl";
                entry.id = base + "-kl-eta" + buf;
                entries.push_back(std::move(entry));
            }
        }
    }
    if (entries.empty()) {
        std::cerr << "error: no instances to compare\n";
        return kExitParse;
    }

    std::vector<SweepInstance> instances;
    instances.reserve(entries.size());
    for (const auto& e : entries) instances.push_back(e.instance);
    const SweepResult result = sweep(instances, config, args.threshold);

    std::vector<CompareRow> rows;
    rows.reserve(entries.size());
    for (size_t i = 0; i < entries.size(); ++i) {
        CompareRow row;
        row.instance_id = entries[i].id;
        row.num_states = entries[i].instance.mdp.num_states;
        row.num_actions = entries[i].instance.mdp.num_actions;
        row.gamma = entries[i].instance.mdp.gamma;
        row.eta = entries[i].eta;
        row.reg = entries[i].reg_name;
        row.report = result.reports[i];
        rows.push_back(std::move(row));
    }

    const std::string csv = compare_csv(rows);
    std::cout << csv;
    std::cout << "summary: " << result.summary.passed << "/" << result.summary.total
              << " pass, max q_gap " << format_real(result.summary.max_q_gap)
              << ", max policy_gap " << format_real(result.summary.max_policy_gap) << "\n";

    if (!args.csv_path.empty()) write_file(args.csv_path, csv);
    if (!args.out_path.empty()) {
        write_file(args.out_path,
                   write_compare_report(rows, result.summary, args.threshold, config, prov));
    }

    bool any_nonconverged = false;
    bool any_failed = false;
    for (const auto& r : result.reports) {
        if (!r.vi_converged || !r.spi_converged) any_nonconverged = true;
        if (!r.pass) any_failed = true;
    }
    if (any_nonconverged) return kExitNoConvergence;
    if (any_failed) return kExitCheckFailed;
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string path;
    std::string reg = "entropy";
    double eta = 1.0;
    std::vector<std::string> checks = {"all"};
    bool uniform_prior = false;
    int grid_resolution = 11;
    int trials = 500;
    uint64_t seed = 0;
};

int cmd_verify(const VerifyArgs& args, const SolveConfig& config) {
    const Loaded loaded = load_or_exit(args.path);
    if (!(args.eta > 0.0)) {
        std::cerr << "error: --eta must be strictly positive\n";
        return kExitParse;
    }
    const RegularizerSpec reg = make_regularizer(args.reg, args.eta, loaded.doc,
                                                 args.uniform_prior);

    bool want_kkt = false, want_prop1 = false, want_exhaustive = false;
    for (const auto& c : args.checks) {
        if (c == "all") want_kkt = want_prop1 = want_exhaustive = true;
        else if (c == "kkt") want_kkt = true;
        else if (c == "prop1") want_prop1 = true;
        else if (c == "exhaustive") want_exhaustive = true;
        else {
            std::cerr << "error: unknown check '" << c << "'\n";
            return kExitParse;
        }
    }
    if (want_kkt && reg.kind == RegKind::None) {
        std::cerr << "error: the kkt check requires --reg entropy or kl\n";
        return kExitParse;
    }
    if (want_exhaustive &&
        (loaded.doc.mdp.num_states > 3 || loaded.doc.mdp.num_actions > 3)) {
        std::cerr << "error: exhaustive check restricted to |S| <= 3 and |A| <= 3 (got "
                  << loaded.doc.mdp.num_states << "x" << loaded.doc.mdp.num_actions << ")\n";
        return kExitGuard;
    }

    const SolveReport solved = soft_value_iteration(loaded.doc.mdp, reg, config);
    if (!solved.converged) {
        std::cerr << "error: solver did not converge within " << config.max_iterations
                  << " iterations (residual " << format_real(solved.final_residual) << ")\n";
        return kExitNoConvergence;
    }

    bool all_pass = true;
    auto report_line = [&](const std::string& name, const std::string& measure, bool pass) {
        std::cout << "check " << name << ": " << measure << " -> " << (pass ? "pass" : "FAIL")
                  << "\n";
        if (!pass) all_pass = false;
    };

    if (want_kkt) {
        const KktReport kkt = kkt_residual(loaded.doc.mdp, reg, solved.fixed_point_v,
                                           solved.policy);
        report_line("kkt", "max stationarity residual " + format_real(kkt.max_abs_residual),
                    kkt.max_abs_residual <= 1e-8);
        if (reg.kind == RegKind::Entropy) {
            double worst = 0.0;
            for (int s = 0; s < loaded.doc.mdp.num_states; ++s) {
                worst = std::max(worst, std::abs(kkt.multiplier[s] -
                                                 (solved.fixed_point_v.v[s] - reg.eta)));
            }
            report_line("kkt-multiplier", "max |lambda - (V* - eta)| " + format_real(worst),
                        worst <= 1e-8);
        }
    }
    if (want_prop1) {
        const DominanceReport dom = proposition1_check(loaded.doc.mdp, reg, solved.fixed_point_v,
                                                       args.trials, args.seed);
        report_line("prop1",
                    std::to_string(dom.violations) + " violations in " +
                        std::to_string(dom.trials) + " trials (worst excess " +
                        format_real(dom.worst_excess) + ")",
                    dom.pass);
    }
    if (want_exhaustive) {
        try {
            const ExhaustiveReport ex = exhaustive_policy_check(
                loaded.doc.mdp, reg, solved.fixed_point_q, args.grid_resolution);
            report_line("exhaustive",
                        std::to_string(ex.policies_checked) + " policies, max excess " +
                            format_real(ex.max_excess),
                        ex.pass);
        } catch (const GuardViolation& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitGuard;
        }
    }
    return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"softmdp: entropy/KL-regularized tabular MDP solvers and certification tools"};
    app.require_subcommand(1);

    SolveConfig config;
    config.tolerance = default_tolerance();

    // check
    auto* check = app.add_subcommand("check", "parse and validate an MDP file");
    std::string check_path;
    check->add_option("path", check_path, "MDP file")->required();

    // generate
    auto* gen = app.add_subcommand("generate", "write a seeded random MDP file");
    uint64_t gen_seed = 0;
    int gen_states = 0, gen_actions = 0;
    double gen_gamma = 0.9;
    std::vector<double> gen_reward_range = {-1.0, 1.0};
    std::string gen_out;
    bool gen_deterministic = false;
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--states", gen_states, "number of states")->required();
    gen->add_option("--actions", gen_actions, "number of actions")->required();
    gen->add_option("--gamma", gen_gamma, "discount factor in [0,1)")->required();
    gen->add_option("--reward-range", gen_reward_range, "reward interval LO HI")
        ->expected(2);
    gen->add_option("--out", gen_out, "output path")->required();
    gen->add_flag("--deterministic", gen_deterministic,
                  "no-op for generate; files carry no timestamp");

    // solve
    auto* solve = app.add_subcommand("solve", "solve an MDP file by vi or spi");
    std::string solve_path, solve_method = "vi", solve_reg = "entropy", solve_out;
    double solve_eta = 1.0;
    std::string solve_eval = "exact";
    bool solve_uniform_prior = false, solve_deterministic = false, solve_trace = false;
    solve->add_option("path", solve_path, "MDP file")->required();
    solve->add_option("--method", solve_method, "solver route")
        ->check(CLI::IsMember({"vi", "spi"}));
    solve->add_option("--reg", solve_reg, "regularizer")
        ->check(CLI::IsMember({"entropy", "kl", "none"}));
    auto* solve_eta_opt = solve->add_option("--eta", solve_eta, "temperature (> 0)");
    solve->add_option("--tol", config.tolerance, "stopping tolerance");
    solve->add_option("--max-iter", config.max_iterations, "iteration budget");
    solve->add_option("--eval-mode", solve_eval, "spi policy evaluation mode")
        ->check(CLI::IsMember({"iterative", "exact"}));
    solve->add_flag("--uniform-prior", solve_uniform_prior,
                    "use a uniform prior when the file has none (kl only)");
    solve->add_flag("--trace", solve_trace, "record per-iteration residuals in the report");
    solve->add_option("--out", solve_out, "report file path");
    solve->add_flag("--deterministic", solve_deterministic, "omit the report timestamp");

    // compare
    auto* compare = app.add_subcommand("compare", "run both routes and compare fixed points");
    CompareArgs cargs;
    compare->add_option("path", cargs.path, "MDP file (omit with --random-suite)");
    compare->add_option("--random-suite", cargs.random_suite, "number of random base instances");
    compare->add_option("--seed", cargs.seed, "suite seed");
    compare->add_option("--s-range", cargs.s_range, "state-count range LO HI")->expected(2);
    compare->add_option("--a-range", cargs.a_range, "action-count range LO HI")->expected(2);
    compare->add_option("--gamma-range", cargs.gamma_range, "discount range LO HI")->expected(2);
    compare->add_option("--reward-range", cargs.reward_range, "reward interval LO HI")
        ->expected(2);
    compare->add_option("--reg", cargs.reg, "regularizers to cover")
        ->check(CLI::IsMember({"entropy", "kl", "both"}));
    compare->add_option("--eta-list", cargs.eta_list, "temperatures to cover")
        ->expected(-1);
    compare->add_option("--threshold", cargs.threshold, "gap threshold for a pass verdict");
    compare->add_option("--tol", config.tolerance, "solver tolerance");
    compare->add_option("--max-iter", config.max_iterations, "solver iteration budget");
    compare->add_flag("--uniform-prior", cargs.uniform_prior,
                      "use a uniform prior when the file has none (kl only)");
    compare->add_option("--out", cargs.out_path, "structured report path");
    compare->add_option("--csv", cargs.csv_path, "also write the CSV table here");
    compare->add_flag("--deterministic", cargs.deterministic, "omit the report timestamp");

    // verify
    auto* verify = app.add_subcommand("verify", "solve, then run oracle checks");
    VerifyArgs vargs;
    bool verify_deterministic = false;
    verify->add_option("path", vargs.path, "MDP file")->required();
    verify->add_option("--reg", vargs.reg, "regularizer")
        ->check(CLI::IsMember({"entropy", "kl"}));
    verify->add_option("--eta", vargs.eta, "temperature (> 0)");
    verify->add_option("--checks", vargs.checks, "subset of {kkt,prop1,exhaustive,all}")
        ->delimiter(',');
    verify->add_option("--tol", config.tolerance, "solver tolerance");
    verify->add_option("--max-iter", config.max_iterations, "solver iteration budget");
    verify->add_option("--grid-resolution", vargs.grid_resolution,
                       "simplex grid resolution for the exhaustive check");
    verify->add_option("--trials", vargs.trials, "dominated-V draws for prop1");
    verify->add_option("--seed", vargs.seed, "prop1 trial seed");
    verify->add_flag("--uniform-prior", vargs.uniform_prior,
                     "use a uniform prior when the file has none (kl only)");
    verify->add_flag("--deterministic", verify_deterministic, "no-op; verify writes no files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitParse;
    }

    try {
        if (*check) return cmd_check(check_path);
        if (*gen) {
            return cmd_generate(gen_seed, gen_states, gen_actions, gen_gamma, gen_reward_range,
                                gen_out);
        }
        if (*solve) {
            SolveConfig solve_config = config;
            solve_config.evaluation_mode =
                solve_eval == "iterative" ? EvalMode::Iterative : EvalMode::ExactLinear;
            solve_config.record_trace = solve_trace;
            return cmd_solve(solve_path, solve_method, solve_reg, solve_eta,
                             solve_eta_opt->count() > 0, solve_config, solve_uniform_prior,
                             solve_out, solve_deterministic);
        }
        if (*compare) {
            if (cargs.random_suite == 0 && cargs.path.empty()) {
                std::cerr << "error: compare needs a file path or --random-suite N\n";
                return kExitParse;
            }
            return cmd_compare(cargs, config);
        }
        if (*verify) return cmd_verify(vargs, config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitParse;
}
