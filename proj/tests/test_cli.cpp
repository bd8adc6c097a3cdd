#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eqvar/bench.hpp"
#include "eqvar/io.hpp"
#include "test_paths.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(EQVAR_CLI_PATH) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("eqvar_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes the three artifacts deterministically") {
    const fs::path dir = fresh_dir("simulate");
    const std::string args = "simulate --family chain-random --p 5 --n 100 --pc 0.3 --seed 7 "
                             "--out " + (dir / "d").string();
    CHECK(run_cli(args, dir).exit_code == 0);
    CHECK(fs::exists(dir / "d" / "data.csv"));
    CHECK(fs::exists(dir / "d" / "truth_edges.csv"));
    CHECK(fs::exists(dir / "d" / "model.json"));

    const std::string first = slurp(dir / "d" / "data.csv");
    CHECK(run_cli(args, dir).exit_code == 0);
    CHECK(slurp(dir / "d" / "data.csv") == first);

    // the truth edges parse back into the model
    const eqvar::SemModel model =
        eqvar::read_model((dir / "d" / "model.json").string(), (dir / "d" / "truth_edges.csv").string());
    CHECK(model.p() == 5);
    CHECK(model.sigma2() == doctest::Approx(1.0));
}

TEST_CASE("bad flag values name the flag and exit 2") {
    const fs::path dir = fresh_dir("badpc");
    const CliResult r = run_cli("simulate --family chain-random --p 5 --n 10 --pc 1.5 --out " +
                                    (dir / "d").string(),
                                dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("--pc") != std::string::npos);
}

TEST_CASE("discover recovers the chain ordering end to end") {
    const fs::path dir = fresh_dir("discover");
    REQUIRE(run_cli("simulate --family chain-random --p 3 --n 1000 --pc 0 --seed 11 --out " +
                        (dir / "d").string(),
                    dir)
                .exit_code == 0);
    const CliResult r = run_cli("discover --data " + (dir / "d" / "data.csv").string() +
                                    " --method td --out " + (dir / "o").string(),
                                dir);
    CHECK(r.exit_code == 0);
    const eqvar::Ordering ordering =
        eqvar::read_ordering_json((dir / "o" / "ordering.json").string());
    CHECK(ordering.sequence == std::vector<int>{0, 1, 2});
    CHECK(fs::exists(dir / "o" / "edges.csv"));

    const eqvar::Matrix est = eqvar::read_edge_csv((dir / "o" / "edges.csv").string(), 3);
    CHECK(est(1, 0) != 0.0);
    CHECK(est(2, 1) != 0.0);
}

TEST_CASE("subset method without q exits 2") {
    const fs::path dir = fresh_dir("noq");
    REQUIRE(run_cli("simulate --family chain-random --p 4 --n 50 --pc 0 --out " +
                        (dir / "d").string(),
                    dir)
                .exit_code == 0);
    const CliResult r = run_cli("discover --data " + (dir / "d" / "data.csv").string() +
                                    " --method td-hd --out " + (dir / "o").string(),
                                dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("--q") != std::string::npos);
}

TEST_CASE("p > n discovery exits 3 and writes the partial prefix") {
    const fs::path dir = fresh_dir("exhaust");
    REQUIRE(run_cli("simulate --family chain-random --p 150 --n 100 --pc 0.02 --seed 3 --out " +
                        (dir / "d").string(),
                    dir)
                .exit_code == 0);
    const CliResult r = run_cli("discover --data " + (dir / "d" / "data.csv").string() +
                                    " --method td --out " + (dir / "o").string(),
                                dir);
    CHECK(r.exit_code == 3);
    const eqvar::Ordering partial =
        eqvar::read_ordering_json((dir / "o" / "ordering.json").string());
    CHECK(partial.sequence.size() > 0);
    CHECK(partial.sequence.size() < 150);
}

TEST_CASE("order-only skips edge selection") {
    const fs::path dir = fresh_dir("orderonly");
    REQUIRE(run_cli("simulate --family chain-random --p 4 --n 200 --pc 0 --seed 2 --out " +
                        (dir / "d").string(),
                    dir)
                .exit_code == 0);
    CHECK(run_cli("discover --data " + (dir / "d" / "data.csv").string() +
                      " --method bu --order-only --out " + (dir / "o").string(),
                  dir)
              .exit_code == 0);
    CHECK(fs::exists(dir / "o" / "ordering.json"));
    CHECK_FALSE(fs::exists(dir / "o" / "edges.csv"));
}

TEST_CASE("bench runs a config and is byte-identical across thread counts") {
    const fs::path dir = fresh_dir("bench");
    {
        std::ofstream config(dir / "config.json");
        config << R"({
          "master_seed": 123,
          "settings": [
            {"label": "smoke",
             "recipe": {"family": "chain-random", "p": 5, "pc": 0.3,
                        "coeff": {"law": "plus-minus", "lo": 0.3, "hi": 1.0}},
             "error": {"kind": "gaussian", "sigma2": 1.0},
             "n": 100, "estimators": ["td", "bu"], "replicates": 3, "folds": 3}
          ]
        })";
    }
    const std::string base = "bench --config " + (dir / "config.json").string();
    CHECK(run_cli(base + " --threads 1 --out " + (dir / "r1.csv").string(), dir).exit_code == 0);
    CHECK(run_cli(base + " --threads 8 --out " + (dir / "r8.csv").string(), dir).exit_code == 0);
    CHECK(slurp(dir / "r1.csv") == slurp(dir / "r8.csv"));
    CHECK(slurp(dir / "r1.csv").find("tau_mean") != std::string::npos);

    const CliResult md = run_cli(base + " --format md", dir);
    CHECK(md.exit_code == 0);
    CHECK(md.out.find("| p | n |") != std::string::npos);

    CHECK(run_cli("bench --config " + (dir / "missing.json").string(), dir).exit_code == 2);
    {
        std::ofstream bad(dir / "bad.json");
        bad << "{ not json";
    }
    CHECK(run_cli("bench --config " + (dir / "bad.json").string(), dir).exit_code == 2);
}

TEST_CASE("bundled table configs parse") {
    for (const std::string name :
         {"table1.json", "table2.json", "table3.json", "appendix_b.json", "appendix_c.json",
          "appendix_d.json"}) {
        const eqvar::BenchmarkConfig config =
            eqvar::read_config_file(std::string(EQVAR_CONFIG_DIR) + "/" + name);
        CHECK(config.settings.size() > 0);
        for (const eqvar::BenchSetting& s : config.settings) {
            CHECK(s.replicates >= 1);
            CHECK(s.full_replicates == 500);
        }
    }
}

}  // TEST_SUITE
