#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "commands.hpp"

namespace {

enum ExitCode { ok = 0, config_error = 2, numeric_error = 3, check_failed = 4 };

int execute(const std::string& name, const std::string& config_path, const fatiq::cli::RunOptions& opts) {
    using namespace fatiq;
    try {
        std::optional<io::Config> user;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw io::ConfigError(config_path, 0, "cannot open config file");
            user = io::Config::parse(in, config_path);
        }
        const auto cfg = cli::resolve_config(user ? &*user : nullptr, opts);
        const auto report = cli::run(name, cfg, opts);

        std::cout << name << ": wrote " << report.files.size() << " files to " << opts.out_dir.string() << '\n';
        for (const auto& note : report.notes) std::cout << "note: " << note << '\n';
        if (!opts.check) return ok;
        for (const auto& c : report.checks)
            std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
        if (!report.all_passed()) {
            std::cerr << name << ": acceptance checks failed\n";
            return check_failed;
        }
        return ok;
    } catch (const io::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const SequenceExhausted& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return numeric_error;
    } catch (const GridTooShort& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return numeric_error;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return numeric_error;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic fatigue life of specimens and beam structures"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fatiq::cli::version);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0, reps = 0, n_grid = 0;
    std::vector<double> ks;
    bool check = false;
    app.add_option("--config", config_path, "INI config file; defaults reproduce the reference setup")
        ->check(CLI::ExistingFile);
    app.add_option("--out-dir", out_dir, "Directory for CSV outputs and manifest.json");
    auto* seed_opt = app.add_option("--seed", seed, "Master seed for all random streams");
    auto* reps_opt = app.add_option("--replications", reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
    auto* grid_opt = app.add_option("--n-grid", n_grid, "Number of log-spaced points on the cycle grid")
                         ->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1000000}));
    app.add_flag("--check", check, "Evaluate acceptance checks; exit 4 if any fails");

    std::string chosen;
    app.fallthrough();
    const std::map<std::string, std::string> about{
        {"sn-simulate", "Simulated fatigue tests at constant severity against the S-N quantile curves"},
        {"miner-demo", "Miner damage and survival for a variable severity sequence, with Monte Carlo NCFs"},
        {"beam", "I-beam structure constant, constant-load survival, severity profiles, failure density"},
        {"random-load", "Gamma-alpha random loads: fitted laws, densities, Monte Carlo survival, median NCF"},
        {"equiv-load", "Equivalent constant load ratio P_eq/P_mean against the load CV"},
        {"laplace", "Laplace approximation of the severity integral against quadrature, with reference rows"},
    };
    for (const auto& [name, fn] : fatiq::cli::commands()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->callback([&chosen, name = name] { chosen = name; });
        if (name == "laplace") sub->add_option("--k", ks, "Comma-separated exponents alpha*m")->delimiter(',');
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : config_error;
    }

    fatiq::cli::RunOptions opts;
    opts.out_dir = out_dir;
    opts.check = check;
    if (*seed_opt) opts.seed = seed;
    if (*reps_opt) opts.replications = reps;
    if (*grid_opt) opts.n_points = n_grid;
    if (!ks.empty()) opts.ks = ks;
    return execute(chosen, config_path, opts);
}
