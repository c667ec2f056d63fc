#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "toruslab/cli.hpp"
#include "toruslab/numerics.hpp"

using namespace toruslab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("csv float formatting is shortest round trip") {
    CHECK(cli::format_double(0.5) == "0.5");
    CHECK(cli::format_double(1.0 / 3.0) == "0.3333333333333333");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(cli::format_double(x)) == x);
}

TEST_CASE("gramian command: full torus gives K = 1/T") {
    TempDir dir("toruslab_cli_gramian");
    cli::json config{{"command", "gramian"}, {"cutoff", 2}, {"T", 2.0}};
    const int code = cli::run(config, dir.path, 1, false);
    CHECK(code == 0);
    cli::json summary;
    std::ifstream(dir.path / "summary.json") >> summary;
    CHECK(summary["K"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(summary.contains("config_hash"));
    CHECK(summary.contains("seed"));
}

TEST_CASE("identical configs produce byte-identical csv bodies") {
    TempDir d1("toruslab_cli_repro1"), d2("toruslab_cli_repro2");
    cli::json config{{"command", "scan-zygmund"},
                     {"kappas", {1.0, 2.0}},
                     {"hs", {1.0 / 16.0}},
                     {"trials", 20},
                     {"seed", 9}};
    CHECK(cli::run(config, d1.path, 2, false) == 0);
    CHECK(cli::run(config, d2.path, 1, false) == 0);  // thread count must not matter
    CHECK(slurp(d1.path / "detail.csv") == slurp(d2.path / "detail.csv"));
    CHECK(!slurp(d1.path / "detail.csv").empty());
}

TEST_CASE("control command meets the terminal tolerance") {
    TempDir dir("toruslab_cli_control");
    cli::json config{{"command", "control"},
                     {"cutoff", 2},
                     {"T", 1.0},
                     {"u0", "mode(1,1)"},
                     {"region", {{0.0, kPi, 0.0, kTwoPi}}}};
    const int code = cli::run(config, dir.path, 1, false);
    CHECK(code == 0);
    cli::json summary;
    std::ifstream(dir.path / "summary.json") >> summary;
    CHECK(summary["terminal_norm"].get<double>() <= 1e-8);
    CHECK(summary["cost_bound_pass"].get<bool>());
}

TEST_CASE("invalid configs exit with code 2") {
    TempDir dir("toruslab_cli_invalid");
    CHECK(cli::run(cli::json{{"command", "no-such-command"}}, dir.path, 1, false) == 2);
    CHECK(cli::run(cli::json::object(), dir.path, 1, false) == 2);
    CHECK(cli::run(cli::json{{"command", "gramian"}, {"region", cli::json::array()},
                             {"cutoff", 2}},
                   dir.path, 1, false) == 2);
}

TEST_CASE("verify-geom command reports Q_min within the bound") {
    TempDir dir("toruslab_cli_geom");
    cli::json config{{"command", "verify-geom"}, {"epsilon", 1.0 / 8.0}};
    const int code = cli::run(config, dir.path, 4, false);
    CHECK(code == 0);
    cli::json summary;
    std::ifstream(dir.path / "summary.json") >> summary;
    CHECK(summary["Q_min"].get<int>() <= 12);
    CHECK(summary["inconclusive_count"].get<int>() == 0);
}
