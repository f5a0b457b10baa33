#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

using namespace fatiq;

TEST(FormatDouble, SeventeenDigitsRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5}) EXPECT_EQ(std::stod(io::format_double(v)), v);
    EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(CsvWriter, HeaderAndArity) {
    std::ostringstream os;
    io::CsvWriter csv(os, {"a", "b"});
    csv.row(1.5, std::string("x"));
    EXPECT_EQ(os.str(), "a,b\n1.5,x\n");
    EXPECT_ANY_THROW(csv.row(1.0));
}

TEST(Config, ParsesSectionsAndTypes) {
    const auto cfg = io::Config::parse_string("# c\n[specimen]\nm = 1.5 ; note\nlist = 1, 2,3\n\n[mc]\nseed=7\n", "t.ini");
    EXPECT_EQ(cfg.get_double("specimen", "m", 0.0), 1.5);
    EXPECT_EQ(cfg.get_list("specimen", "list", {}), (std::vector<double>{1.0, 2.0, 3.0}));
    EXPECT_EQ(cfg.get_count("mc", "seed", 0), 7u);
    EXPECT_EQ(cfg.get_double("mc", "missing", 4.0), 4.0);
}

TEST(Config, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text, auto&& use) -> std::size_t {
        try {
            use(io::Config::parse_string(text, "t.ini"));
        } catch (const io::ConfigError& e) {
            return e.line();
        }
        return 0;
    };
    auto none = [](const io::Config&) {};
    EXPECT_EQ(line_of("[a]\nx = 1\nx = 2\n", none), 3u);
    EXPECT_EQ(line_of("x = 1\n", none), 1u);
    EXPECT_EQ(line_of("[a]\n\nnonsense\n", none), 3u);
    EXPECT_EQ(line_of("[a\n", none), 1u);
    EXPECT_EQ(line_of("[a]\n\nm = abc\n", [](const io::Config& c) { c.get_double("a", "m", 0.0); }), 3u);
    EXPECT_EQ(line_of("[a]\nn = 2.5\n", [](const io::Config& c) { c.get_count("a", "n", 0); }), 2u);
}

TEST(SeverityCsv, ReadsBlocks) {
    std::istringstream in("severity_mpa,count\n150,100\n300,20\n");
    const auto seq = io::read_severity_csv(in);
    EXPECT_EQ(seq.total_cycles(), 120u);
    std::istringstream bad("severity,count\n150,100\n");
    EXPECT_THROW(io::read_severity_csv(bad), io::ConfigError);
    std::istringstream negative("severity_mpa,count\n-150,100\n");
    EXPECT_ANY_THROW(io::read_severity_csv(negative));
}

TEST(PartitionCsv, RoundTrip) {
    CellPartition cells({Cell{1e-5, 12.5}, Cell{2.5e-6, 0.125}});
    std::ostringstream os;
    io::write_partition_csv(os, cells);
    std::istringstream in(os.str());
    const auto back = io::read_partition_csv(in);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].measure, 1e-5);
    EXPECT_EQ(back[1].severity, 0.125);
}

// --- CLI plumbing ----------------------------------------------------------

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("fatiq_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST(ResolveConfig, DefaultsAndOverrides) {
    cli::RunOptions opts;
    opts.seed = 42;
    opts.replications = 123;
    opts.ks = std::vector<double>{4.5, 6.0};
    const auto user = io::Config::parse_string("[specimen]\nm = 2\n", "user.ini");
    const auto cfg = cli::resolve_config(&user, opts);
    EXPECT_EQ(cfg.get_double("specimen", "m", 0.0), 2.0);
    EXPECT_EQ(cfg.get_double("specimen", "alpha", 0.0), 3.0);
    EXPECT_EQ(cfg.get_count("mc", "seed", 0), 42u);
    EXPECT_EQ(cfg.get_count("mc", "replications", 0), 123u);
    EXPECT_EQ(cfg.get_list("laplace", "k", {}), (std::vector<double>{4.5, 6.0}));
}

TEST(ResolveConfig, DefaultSpecimenMatchesReferenceSetup) {
    const auto cfg = cli::resolve_config(nullptr, {});
    const auto w = cli::specimen_params(cfg);
    EXPECT_EQ(w.m, 1.5);
    EXPECT_EQ(w.alpha, 3.0);
    EXPECT_TRUE(test::rel_near(w.kappa, test::reference_params().kappa, 1e-15));
    EXPECT_EQ(cfg.get_count("sn", "specimens", 0), 50u);
    EXPECT_EQ(cfg.get_list("sn", "severities", {}).size(), 5u);
}

TEST(ResolveConfig, RejectsUnknownKeysWithLine) {
    const auto user = io::Config::parse_string("[specimen]\nm = 2\nmu = 3\n", "user.ini");
    try {
        cli::resolve_config(&user, {});
        FAIL() << "expected ConfigError";
    } catch (const io::ConfigError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    const auto section = io::Config::parse_string("[bogus]\nx = 1\n", "user.ini");
    EXPECT_THROW(cli::resolve_config(&section, {}), io::ConfigError);
}

TEST(ResolveConfig, InvariantViolationsAreConfigErrors) {
    auto expect_line = [](const std::string& text, const std::string& cmd, std::size_t line) {
        const auto user = io::Config::parse_string(text, "user.ini");
        const auto cfg = cli::resolve_config(&user, {});
        cli::OutputDir out(scratch("invalid"));
        try {
            cli::commands().at(cmd)(cfg, out);
            ADD_FAILURE() << "expected ConfigError for " << text;
        } catch (const io::ConfigError& e) {
            EXPECT_EQ(e.line(), line) << e.what();
        }
    };
    expect_line("[specimen]\nm = -1\n", "sn-simulate", 2);
    expect_line("[specimen]\np = 1.5\n", "sn-simulate", 2);
    expect_line("[beam]\n\ne = 0.9\n", "beam", 3);
    expect_line("[load]\nc_values = 0, -0.2\n", "random-load", 2);
    expect_line("[miner]\nblocks = 150:abc\n", "miner-demo", 2);
    expect_line("[mc]\nn_min = 1e6\nn_max = 1e3\n", "equiv-load", 3);
}

TEST(Run, ManifestDigestsMatchFiles) {
    cli::RunOptions opts;
    opts.out_dir = scratch("manifest");
    const auto cfg = cli::resolve_config(nullptr, opts);
    const auto report = cli::run("laplace", cfg, opts);
    std::ifstream in(opts.out_dir / "manifest.json");
    const auto manifest = nlohmann::json::parse(in);
    EXPECT_EQ(manifest["subcommand"], "laplace");
    ASSERT_EQ(manifest["files"].size(), report.files.size());
    for (const auto& f : manifest["files"])
        EXPECT_EQ(f["sha256"], cli::sha256_file(opts.out_dir / f["name"].get<std::string>()));
    EXPECT_TRUE(report.all_passed());
}

TEST(Run, ResolvedSnapshotReproducesOutputs) {
    cli::RunOptions first;
    first.out_dir = scratch("snap1");
    first.seed = 5;
    first.replications = 500;
    const auto cfg = cli::resolve_config(nullptr, first);
    cli::run("miner-demo", cfg, first);

    std::ifstream snap(first.out_dir / "config.resolved.ini");
    const auto user = io::Config::parse(snap, "config.resolved.ini");
    cli::RunOptions second;
    second.out_dir = scratch("snap2");
    cli::run("miner-demo", cli::resolve_config(&user, second), second);
    for (const auto& name : {"miner_ncf.csv", "ncf_samples.csv", "empirical_survival.csv", "damage_survival.csv"})
        EXPECT_EQ(cli::sha256_file(first.out_dir / name), cli::sha256_file(second.out_dir / name)) << name;
}

TEST(Run, ConstantSeverityMinerMatchesSnSimulation) {
    // One-block sequence: the miner crossing is the S-N quantile.
    const auto user = io::Config::parse_string("[miner]\nblocks = 250:100000000\nrepeat = 1\n", "user.ini");
    cli::RunOptions opts;
    opts.out_dir = scratch("constant");
    opts.replications = 2000;
    const auto cfg = cli::resolve_config(&user, opts);
    const auto report = cli::run("miner-demo", cfg, opts);
    EXPECT_TRUE(report.all_passed());
    const auto w = cli::specimen_params(cfg);
    std::ifstream in(opts.out_dir / "miner_ncf.csv");
    std::string header, line;
    std::getline(in, header);
    while (std::getline(in, line)) {
        const double p = std::stod(line.substr(0, line.find(',')));
        const double crossing = std::stod(line.substr(line.find(',') + 1));
        EXPECT_TRUE(test::rel_near(crossing, sn_quantile(w, p, 250.0), 1e-12));
    }
}
