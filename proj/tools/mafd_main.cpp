#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mafd/ma_operator.hpp"
#include "mafd/poisson.hpp"
#include "mafd/problems.hpp"
#include "mafd/rng.hpp"
#include "mafd/solvers.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

// Accepts "1/2^k", "1/n" (any integer numerator), or a decimal.
double parse_h(const std::string& text) {
    long long num = 0, base = 0, exp = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lld/%lld^%lld%c", &num, &base, &exp, &tail) == 3) {
        if (num <= 0 || base <= 1 || exp < 0) throw CLI::ValidationError("invalid h: " + text);
        return static_cast<double>(num) / std::pow(static_cast<double>(base),
                                                   static_cast<double>(exp));
    }
    if (std::sscanf(text.c_str(), "%lld/%lld%c", &num, &base, &tail) == 2) {
        if (num <= 0 || base <= 0) throw CLI::ValidationError("invalid h: " + text);
        return static_cast<double>(num) / static_cast<double>(base);
    }
    try {
        std::size_t pos = 0;
        const double value = std::stod(text, &pos);
        if (pos != text.size() || !(value > 0.0)) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw CLI::ValidationError("invalid h: " + text);
    }
}

std::vector<double> parse_h_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_h(item));
    }
    if (out.empty()) throw CLI::ValidationError("empty h list");
    return out;
}

struct CommonOptions {
    std::string problem = "smooth_radial";
    std::string method = "precond";
    double mu = 50.0;
    double tol = 1e-8;
    long max_iter = 1000000;
    int stencil_width = 2;
    double epsilon = 1e-14;
    int epsilon_sign = +1;
    std::string init = "auto";
    std::string poisson = "fast";
    double poisson_tol = 1e-12;
    std::string dirac_spread = "nearest";
    std::string stop_rule = "residual";
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int threads = 0;  // 0: hardware concurrency
};

void add_common_flags(CLI::App& cmd, CommonOptions& opt) {
    cmd.add_option("--method", opt.method, "Iteration: basic|precond")
        ->check(CLI::IsMember({"basic", "precond"}));
    cmd.add_option("--mu", opt.mu, "Damping parameter (steps scale by 1/mu)");
    cmd.add_option("--tol", opt.tol, "Stopping tolerance on the interior residual");
    cmd.add_option("--max-iter", opt.max_iter, "Iteration cap");
    cmd.add_option("--stencil-width", opt.stencil_width,
                   "Max direction component; 2 is the 17-point stencil");
    cmd.add_option("--epsilon", opt.epsilon, "Properness term coefficient");
    cmd.add_option("--epsilon-sign", opt.epsilon_sign, "Properness term sign (+1 or -1)")
        ->check(CLI::IsMember({1, -1}));
    cmd.add_option("--poisson", opt.poisson, "Poisson backend: fast|iterative")
        ->check(CLI::IsMember({"fast", "iterative"}));
    cmd.add_option("--poisson-tol", opt.poisson_tol, "Iterative Poisson residual target");
    cmd.add_option("--dirac-spread", opt.dirac_spread, "Atom discretization: nearest|bilinear")
        ->check(CLI::IsMember({"nearest", "bilinear"}));
    cmd.add_option("--stop-rule", opt.stop_rule,
                   "Stopping rule: residual (authoritative) or increment")
        ->check(CLI::IsMember({"residual", "increment"}));
    cmd.add_option("--out", opt.out_dir, "Output directory");
    cmd.add_option("--seed", opt.seed, "Seed for any sampling");
    cmd.add_option("--threads", opt.threads, "Worker parallelism cap (0: all cores)");
}

mafd::OperatorConfig operator_config(const CommonOptions& opt) {
    mafd::OperatorConfig cfg;
    cfg.stencil = mafd::enumerate_bases(opt.stencil_width);
    cfg.epsilon = opt.epsilon;
    cfg.epsilon_sign = opt.epsilon_sign;
    return cfg;
}

mafd::PoissonConfig poisson_config(const CommonOptions& opt) {
    mafd::PoissonConfig cfg;
    cfg.method = opt.poisson == "fast" ? mafd::PoissonMethod::FastDiagonalization
                                       : mafd::PoissonMethod::Iterative;
    cfg.rel_tol = opt.poisson_tol;
    return cfg;
}

mafd::SolverConfig solver_config(const CommonOptions& opt) {
    mafd::SolverConfig cfg;
    cfg.method = opt.method == "basic" ? mafd::SolveMethod::Basic
                                       : mafd::SolveMethod::Preconditioned;
    cfg.mu = opt.mu;
    cfg.tol = opt.tol;
    cfg.max_iter = opt.max_iter;
    cfg.increment_rule = opt.stop_rule == "increment";
    return cfg;
}

mafd::DiracSpread spread_of(const CommonOptions& opt) {
    return opt.dirac_spread == "nearest" ? mafd::DiracSpread::Nearest
                                         : mafd::DiracSpread::Bilinear;
}

int effective_threads(const CommonOptions& opt) {
    if (opt.threads > 0) return opt.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

json base_summary(const CommonOptions& opt) {
    json j;
    j["schema"] = 1;
    j["problem"] = opt.problem;
    j["method"] = opt.method;
    j["mu"] = opt.mu;
    j["tol"] = opt.tol;
    j["max_iter"] = opt.max_iter;
    j["stencil_width"] = opt.stencil_width;
    j["epsilon"] = opt.epsilon;
    j["epsilon_sign"] = opt.epsilon_sign;
    j["poisson"] = opt.poisson;
    j["poisson_tol"] = opt.poisson_tol;
    j["dirac_spread"] = opt.dirac_spread;
    j["seed"] = opt.seed;
    return j;
}

int cmd_solve(const CommonOptions& opt, const std::string& h_text) {
    const double h = parse_h(h_text);
    const mafd::Problem problem = mafd::problem_by_name(opt.problem);
    mafd::SolverConfig cfg = solver_config(opt);
    if (opt.init == "auto") {
        cfg.init = mafd::InitialGuess::Auto;
    } else if (opt.init == "exact") {
        cfg.init = mafd::InitialGuess::ExactRestriction;
    } else if (opt.init == "extension") {
        cfg.init = mafd::InitialGuess::BoundaryExtension;
    } else if (opt.init.rfind("file:", 0) == 0) {
        cfg.init = mafd::InitialGuess::Custom;
        const mafd::GridPtr grid = mafd::build_grid({problem.domain, h});
        std::ifstream is(opt.init.substr(5));
        if (!is) throw std::invalid_argument("cannot read initial guess file " +
                                             opt.init.substr(5));
        cfg.custom_init = mafd::read_solution_csv(is, grid);
    } else {
        throw CLI::ValidationError("--init must be auto, exact, extension, or file:PATH");
    }

    std::optional<mafd::SolveResult> solved;
    try {
        solved = mafd::solve(problem, h, cfg, operator_config(opt), poisson_config(opt),
                             spread_of(opt));
    } catch (const mafd::DivergenceError& e) {

        std::cerr << "solve: " << e.what() << "\n";
        json j = base_summary(opt);
        j["h"] = h;
        j["init"] = opt.init;
        j["converged"] = false;
        j["diverged"] = true;
        j["iterations"] = e.iterations();
        j["final_residual"] = e.last_residual();
        j["max_error"] = nullptr;
        j["wall_ms"] = nullptr;
        open_output(opt.out_dir, "summary.json") << j.dump(2) << "\n";
        return 2;
    }
    const mafd::SolveResult& result = *solved;

    {
        auto os = open_output(opt.out_dir, "solution.csv");
        mafd::write_solution_csv(os, result.solution);
    }
    {
        auto os = open_output(opt.out_dir, "residuals.csv");
        os << "iter,residual\n";
        char buf[64];
        for (std::size_t k = 0; k < result.residual_history.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", k + 1, result.residual_history[k]);
            os << buf;
        }
    }
    std::optional<double> max_error;
    if (problem.has_exact()) {
        const mafd::MeshFunction exact =
            mafd::restrict_to_grid(problem.exact, result.solution.grid());
        max_error = mafd::max_norm_diff(result.solution, exact, mafd::Region::Interior);
    }
    json j = base_summary(opt);
    j["h"] = h;
    j["init"] = opt.init;
    j["converged"] = result.converged;
    j["diverged"] = false;
    j["iterations"] = result.iterations;
    j["final_residual"] = result.final_residual;
    if (max_error) {
        j["max_error"] = *max_error;
    } else {
        j["max_error"] = nullptr;
    }
    j["wall_ms"] = result.wall_ms;
    open_output(opt.out_dir, "summary.json") << j.dump(2) << "\n";

    std::cout << opt.problem << " h=" << h_text << " method=" << opt.method
              << " iterations=" << result.iterations
              << " converged=" << (result.converged ? "yes" : "no")
              << " residual=" << result.final_residual;
    if (max_error) std::cout << " max_error=" << *max_error;
    std::cout << "\n";
    return result.converged ? 0 : 2;
}

int cmd_study(const CommonOptions& opt, const std::string& h_list_text) {
    const std::vector<double> h_list = parse_h_list(h_list_text);
    const mafd::Problem problem = mafd::problem_by_name(opt.problem);
    mafd::SolverConfig cfg = solver_config(opt);
    if (opt.init == "extension") {
        cfg.init = mafd::InitialGuess::BoundaryExtension;
    } else if (opt.init == "exact") {
        cfg.init = mafd::InitialGuess::ExactRestriction;
    }

    const mafd::ErrorTable table =
        mafd::run_convergence_study(problem, h_list, cfg, operator_config(opt),
                                    poisson_config(opt), spread_of(opt), effective_threads(opt));
    {
        auto os = open_output(opt.out_dir, "table.csv");
        mafd::write_error_table_csv(os, table);
    }
    {
        auto os = open_output(opt.out_dir, "table.txt");
        mafd::write_error_table_text(os, table);
    }
    mafd::write_error_table_text(std::cout, table);
    const bool all_converged =
        std::all_of(table.rows.begin(), table.rows.end(),
                    [](const mafd::ErrorTableRow& r) { return r.converged; });
    return all_converged ? 0 : 2;
}

// ---- verify suites ----

json run_measure_convergence(const CommonOptions& opt, const std::vector<double>& h_list) {
    const mafd::Problem problem = mafd::problem_by_name(opt.problem);
    if (!problem.has_exact()) {
        throw std::invalid_argument("measure-convergence needs a problem with an exact solution");
    }
    const mafd::BorelBox box{0.2, 0.1, 0.6, 0.7};
    const double reference = mafd::reference_measure(problem.measure, box);
    mafd::OperatorConfig opcfg = operator_config(opt);

    json values;
    values["box"] = {box.x0, box.y0, box.x1, box.y1};
    values["reference"] = reference;
    std::vector<double> diffs;
    for (double h : h_list) {
        const mafd::GridPtr grid = mafd::build_grid({problem.domain, h});
        const mafd::MeshFunction u = mafd::restrict_to_grid(problem.exact, grid);
        const double m = mafd::discrete_ma_measure(u, box, opcfg);
        diffs.push_back(std::abs(m - reference));
        values["measures"].push_back(m);
        values["abs_diffs"].push_back(diffs.back());
    }
    bool monotone = true;
    for (std::size_t k = 1; k < diffs.size(); ++k) monotone &= diffs[k] < diffs[k - 1];
    const bool final_ok = diffs.back() <= 0.01 * std::abs(reference);

    json checks = json::array();
    checks.push_back({{"name", "abs_diff_monotone_decreasing"}, {"pass", monotone}});
    checks.push_back({{"name", "final_rel_error_le_1pct"},
                      {"value", diffs.back() / std::abs(reference)},
                      {"pass", final_ok}});
    return json{{"values", values}, {"checks", checks}};
}

json run_contraction(const CommonOptions& opt, double h, int trials) {
    const mafd::GridPtr grid = mafd::build_grid({{0.0, 0.0, 1.0, 1.0}, h});
    mafd::OperatorConfig opcfg = operator_config(opt);
    const mafd::PoissonConfig pcfg = poisson_config(opt);

    json checks = json::array();
    json values;
    std::vector<std::pair<std::string, mafd::SolveMethod>> methods;
    if (opt.method == "basic") {
        methods = {{"basic", mafd::SolveMethod::Basic}};
    } else if (opt.method == "precond") {
        methods = {{"precond", mafd::SolveMethod::Preconditioned}};
    }
    for (const auto& [name, method] : methods) {
        const double ratio =
            mafd::contraction_ratio(method, opt.mu, grid, opcfg, trials, opt.seed, pcfg);
        values[name + "_ratio"] = ratio;
        checks.push_back({{"name", name + "_ratio_lt_1"}, {"value", ratio}, {"pass", ratio < 1.0}});
        // Informational: smallest mu in a geometric scan with a contraction.
        double mu_star = std::numeric_limits<double>::quiet_NaN();
        for (double mu = opt.mu; mu <= 1e9; mu *= 10.0) {
            if (mafd::contraction_ratio(method, mu, grid, opcfg, trials, opt.seed, pcfg) < 1.0) {
                mu_star = mu;
                break;
            }
        }
        values[name + "_mu_star"] = mu_star;
    }
    return json{{"values", values}, {"checks", checks}};
}

json run_laplacian_norm(const CommonOptions& opt, const std::vector<double>& h_list) {
    const mafd::PoissonConfig pcfg = poisson_config(opt);
    std::vector<double> norms;
    json values;
    for (double h : h_list) {
        const mafd::GridPtr grid = mafd::build_grid({{0.0, 0.0, 1.0, 1.0}, h});
        norms.push_back(mafd::inv_norm_estimate(grid, pcfg));
        values["norms"].push_back(norms.back());
    }
    double spread = 0.0;
    for (std::size_t a = 0; a < norms.size(); ++a) {
        for (std::size_t b = 0; b < norms.size(); ++b) {
            if (norms[b] != 0.0) {
                spread = std::max(spread, std::abs(norms[a] - norms[b]) / norms[b]);
            }
        }
    }
    const bool bounded = std::all_of(norms.begin(), norms.end(),
                                     [](double n) { return n <= 0.125 * (1.0 + 1e-12); });
    json checks = json::array();
    checks.push_back(
        {{"name", "pairwise_spread_lt_5pct"}, {"value", spread}, {"pass", spread < 0.05}});
    checks.push_back({{"name", "all_le_one_eighth"}, {"pass", bounded}});
    return json{{"values", values}, {"checks", checks}};
}

json run_ellipticity(const CommonOptions& opt, double h, int trials) {
    const mafd::GridPtr grid = mafd::build_grid({{0.0, 0.0, 1.0, 1.0}, h});
    mafd::OperatorConfig opcfg = operator_config(opt);
    opcfg.epsilon = 0.0;  // monotonicity in the center value holds only at epsilon 0
    mafd::Rng rng(opt.seed);
    mafd::MeshFunction v(grid);
    long violations = 0;
    for (int t = 0; t < trials; ++t) {
        for (double& x : v.values()) x = rng.next_symmetric();
        const auto interior = grid->interior();
        const mafd::GridIndex x = interior[rng.next_below(interior.size())];
        const auto bases = mafd::admissible_bases(*grid, x, opcfg.stencil);
        const mafd::OrthogonalBasis basis = bases[rng.next_below(bases.size())];
        const mafd::Direction dirs[4] = {basis.a1,
                                         {-basis.a1.p, -basis.a1.q},
                                         basis.a2,
                                         {-basis.a2.p, -basis.a2.q}};
        const mafd::Direction d = dirs[rng.next_below(4)];
        const double delta = rng.next_unit() + 1e-6;
        const double base_value = mafd::ma_apply(v, x, opcfg);
        const mafd::GridIndex neighbor{x.i + d.p, x.j + d.q};
        v[neighbor] += delta;
        const double neighbor_up = mafd::ma_apply(v, x, opcfg);
        v[neighbor] -= delta;
        v[x] += delta;
        const double center_up = mafd::ma_apply(v, x, opcfg);
        v[x] -= delta;
        if (neighbor_up < base_value) ++violations;
        if (center_up > base_value) ++violations;
    }
    json checks = json::array();
    checks.push_back({{"name", "monotonicity_violations"},
                      {"value", violations},
                      {"pass", violations == 0}});
    return json{{"values", {{"trials", trials}}}, {"checks", checks}};
}

int cmd_verify(const CommonOptions& opt, const std::string& suite, const std::string& h_text,
               const std::string& h_list_text, int trials) {
    json report = base_summary(opt);
    report["suite"] = suite;
    int exit_code = 0;
    try {
        json result;
        if (suite == "measure-convergence") {
            const std::vector<double> h_list =
                parse_h_list(h_list_text.empty() ? "1/16,1/32,1/64,1/128" : h_list_text);
            result = run_measure_convergence(opt, h_list);
        } else if (suite == "contraction") {
            result = run_contraction(opt, parse_h(h_text.empty() ? "1/32" : h_text),
                                     trials > 0 ? trials : 100);
        } else if (suite == "laplacian-norm") {
            const std::vector<double> h_list =
                parse_h_list(h_list_text.empty() ? "1/16,1/64,1/256" : h_list_text);
            result = run_laplacian_norm(opt, h_list);
        } else if (suite == "ellipticity") {
            result = run_ellipticity(opt, parse_h(h_text.empty() ? "1/16" : h_text),
                                     trials > 0 ? trials : 1000);
        } else {
            throw CLI::ValidationError("unknown suite: " + suite);
        }
        report["values"] = result["values"];
        report["checks"] = result["checks"];
        bool all_pass = true;
        for (const auto& check : result["checks"]) {
            const bool pass = check.at("pass").get<bool>();
            all_pass &= pass;
            std::cout << (pass ? "[pass] " : "[FAIL] ") << check.at("name").get<std::string>();
            if (check.contains("value")) std::cout << " = " << check["value"].dump();
            std::cout << "\n";
        }
        report["pass"] = all_pass;
        exit_code = all_pass ? 0 : 2;
    } catch (const CLI::ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        report["crashed"] = true;
        report["error"] = e.what();
        report["pass"] = false;
        std::cerr << "verify: suite crashed: " << e.what() << "\n";
        exit_code = 3;
    }
    open_output(opt.out_dir, "report.json") << report.dump(2) << "\n";
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wide-stencil finite-difference solver for the Dirichlet Monge-Ampere equation"};
    app.require_subcommand(1);
    // --h is a real option below, so help must not claim the short -h.
    app.set_help_flag("--help", "Print help");

    CommonOptions opt;
    std::string h_text, h_list_text, suite;
    int trials = 0;

    CLI::App* solve_cmd = app.add_subcommand("solve", "Run a single solve and dump artifacts");
    solve_cmd->set_help_flag("--help", "Print help");
    solve_cmd->add_option("--problem", opt.problem, "Problem name")->required();
    solve_cmd->add_option("--h", h_text, "Mesh length (1/2^k, 1/n, or decimal)")->required();
    solve_cmd->add_option("--init", opt.init,
                          "Initial guess: auto|exact|extension|file:PATH");
    add_common_flags(*solve_cmd, opt);

    CLI::App* study_cmd = app.add_subcommand("study", "Convergence study over an h list");
    study_cmd->set_help_flag("--help", "Print help");
    study_cmd->add_option("--problem", opt.problem, "Problem name")->required();
    study_cmd->add_option("--h-list", h_list_text, "Comma-separated h values")->required();
    study_cmd->add_option("--init", opt.init, "Initial guess: auto|exact|extension");
    add_common_flags(*study_cmd, opt);

    CLI::App* verify_cmd = app.add_subcommand("verify", "Property verification suites");
    verify_cmd->set_help_flag("--help", "Print help");
    verify_cmd
        ->add_option("--suite", suite,
                     "measure-convergence|contraction|laplacian-norm|ellipticity")
        ->required();
    verify_cmd->add_option("--problem", opt.problem, "Problem name (measure-convergence)");
    verify_cmd->add_option("--h", h_text, "Mesh length for single-grid suites");
    verify_cmd->add_option("--h-list", h_list_text, "h values for multi-grid suites");
    verify_cmd->add_option("--trials", trials, "Sampling trials");
    add_common_flags(*verify_cmd, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(opt, h_text);
        if (study_cmd->parsed()) return cmd_study(opt, h_list_text);
        if (verify_cmd->parsed()) return cmd_verify(opt, suite, h_text, h_list_text, trials);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
