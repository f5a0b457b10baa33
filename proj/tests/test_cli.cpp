#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

const std::filesystem::path work = std::filesystem::temp_directory_path() / "fatiq_cli_test";

int run_cli(const std::string& args, const std::string& config_text = "") {
    std::filesystem::create_directories(work);
    std::string line = std::string("\"") + FATIQ_CLI_PATH + "\" " + args + " --out-dir \"" + (work / "out").string() + "\"";
    if (!config_text.empty()) {
        std::ofstream(work / "run.ini") << config_text;
        line += " --config \"" + (work / "run.ini").string() + "\"";
    }
    line += " > /dev/null 2>&1";
    const int status = std::system(line.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(CliExitCodes, Success) { EXPECT_EQ(run_cli("laplace --check"), 0); }

TEST(CliExitCodes, ConfigErrors) {
    EXPECT_EQ(run_cli("sn-simulate", "[specimen]\nmu = 3\n"), 2);
    EXPECT_EQ(run_cli("sn-simulate", "[specimen]\nm = zero\n"), 2);
    EXPECT_EQ(run_cli("beam", "[beam]\ne = 2\n"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("beam --config /nonexistent.ini"), 2);
}

TEST(CliExitCodes, NumericErrors) {
    EXPECT_EQ(run_cli("miner-demo", "[miner]\nblocks = 100:10\nrepeat = 1\n"), 3);
    EXPECT_EQ(run_cli("random-load", "[mc]\nn_max = 1e4\n"), 3);
}

TEST(CliExitCodes, CheckFailure) {
    // Two equal loads cannot give strictly ordered survival curves.
    EXPECT_EQ(run_cli("beam --check", "[load]\nP_values = 0.25, 0.25\n"), 4);
    EXPECT_EQ(run_cli("beam", "[load]\nP_values = 0.25, 0.25\n"), 0);
}
