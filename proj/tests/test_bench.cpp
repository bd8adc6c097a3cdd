#include <doctest.h>

#include "eqvar/bench.hpp"

using namespace eqvar;

namespace {

BenchmarkConfig tiny_config() {
    BenchmarkConfig config;
    config.master_seed = 90210;

    BenchSetting a;
    a.recipe = GraphRecipe{GraphFamily::ChainRandom, 6, 0.3, {CoeffLaw::PlusMinus, 0.3, 1.0}, 0};
    a.error = ErrorSpec::gaussian(1.0);
    a.n = 120;
    a.estimators = {EstimatorSpec::parse("td", 0), EstimatorSpec::parse("bu", 0)};
    a.replicates = 4;
    a.folds = 4;
    a.label = "tiny-dense";
    config.settings.push_back(a);

    BenchSetting b;
    b.recipe = GraphRecipe{GraphFamily::HighDimSmallK, 12, 0.0, {CoeffLaw::PlusMinus, 0.3, 1.0}, 0};
    b.error = ErrorSpec::gaussian(1.0);
    b.n = 100;
    b.estimators = {EstimatorSpec::parse("td-hd", 3)};
    b.replicates = 3;
    b.edge_metrics = false;
    b.label = "tiny-hd";
    config.settings.push_back(b);

    return config;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("reports are identical across thread counts") {
    const BenchmarkConfig config = tiny_config();
    const BenchmarkReport one = run_benchmark(config, 1);
    const BenchmarkReport three = run_benchmark(config, 3);
    CHECK(reports_equal(one, three));
    CHECK(report_to_csv(one) == report_to_csv(three));
    CHECK(report_to_json(one) == report_to_json(three));
}

TEST_CASE("report shape and metric presence") {
    const BenchmarkReport report = run_benchmark(tiny_config(), 2);
    REQUIRE(report.settings.size() == 2);
    REQUIRE(report.settings[0].cells.size() == 2);
    const EstimatorCell& td = report.settings[0].cells[0];
    CHECK(td.estimator == "td");
    CHECK(td.replicates == 4);
    CHECK(td.failures == 0);
    CHECK(td.tau.mean.has_value());
    CHECK(td.recall.mean.has_value());
    CHECK(*td.tau.mean <= 1.0);
    CHECK(*td.tau.mean >= -1.0);

    const EstimatorCell& htd = report.settings[1].cells[0];
    CHECK(htd.estimator == "td-hd(q=3)");
    CHECK(htd.tau.mean.has_value());
    CHECK_FALSE(htd.recall.mean.has_value());  // edge metrics disabled
}

TEST_CASE("exhausted replicates become missing cells, never aborts") {
    BenchmarkConfig config;
    config.master_seed = 5;
    BenchSetting s;
    s.recipe = GraphRecipe{GraphFamily::ChainRandom, 30, 0.1, {CoeffLaw::PlusMinus, 0.3, 1.0}, 0};
    s.error = ErrorSpec::gaussian(1.0);
    s.n = 10;  // p > n: full-mode ordering exhausts
    s.estimators = {EstimatorSpec::parse("td", 0)};
    s.replicates = 3;
    s.edge_metrics = false;
    config.settings.push_back(s);

    const BenchmarkReport report = run_benchmark(config, 1);
    const EstimatorCell& cell = report.settings[0].cells[0];
    CHECK(cell.failures == 3);
    CHECK_FALSE(cell.tau.mean.has_value());
}

TEST_CASE("csv report round-trips exactly") {
    const BenchmarkReport report = run_benchmark(tiny_config(), 1);
    const std::string text = report_to_csv(report);
    const BenchmarkReport parsed = report_from_csv(text);
    CHECK(reports_equal(report, parsed));
    CHECK(report_to_csv(parsed) == text);
}

TEST_CASE("config json parsing") {
    const std::string text = R"({
      "master_seed": 7,
      "settings": [
        {
          "label": "cell",
          "recipe": {"family": "chain-random", "p": 5, "pc": 0.3,
                     "coeff": {"law": "plus-minus", "lo": 0.3, "hi": 1.0}},
          "error": {"kind": "gaussian", "sigma2": 1.0},
          "n": 50,
          "estimators": ["td", "bu", {"name": "td-hd", "q": 2}],
          "replicates": 2,
          "folds": 3
        }
      ]
    })";
    const BenchmarkConfig config = config_from_json(text);
    CHECK(config.master_seed == 7);
    REQUIRE(config.settings.size() == 1);
    CHECK(config.settings[0].estimators.size() == 3);
    CHECK(config.settings[0].estimators[2].q == 2);
    CHECK(config.settings[0].folds == 3);

    CHECK_THROWS_AS(config_from_json("{"), InvalidArgument);
    CHECK_THROWS_AS(config_from_json("{\"settings\": []}"), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(R"({"settings":[{"recipe":{"family":"nope","p":3},
      "error":{},"n":10,"estimators":["td"]}]})"),
                    InvalidArgument);
}

TEST_CASE("random-ordering family reports hamming but no tau") {
    BenchmarkConfig config;
    config.master_seed = 11;
    BenchSetting s;
    s.recipe = GraphRecipe{GraphFamily::RandomOrder, 5, 0.4, {CoeffLaw::TwoSided, 0.1, 1.0}, 0};
    s.error = ErrorSpec::gaussian(1.0);
    s.n = 200;
    s.estimators = {EstimatorSpec::parse("td", 0)};
    s.replicates = 2;
    s.folds = 4;
    config.settings.push_back(s);

    const BenchmarkReport report = run_benchmark(config, 1);
    const EstimatorCell& cell = report.settings[0].cells[0];
    CHECK_FALSE(cell.tau.mean.has_value());
    CHECK(cell.hamming.mean.has_value());
}

TEST_CASE("markdown table contains estimator columns") {
    const BenchmarkReport report = run_benchmark(tiny_config(), 1);
    const std::string md = report_to_markdown(report);
    CHECK(md.find("tau td") != std::string::npos);
    CHECK(md.find("tau bu") != std::string::npos);
    CHECK(md.find("tau td-hd(q=3)") != std::string::npos);
}

}  // TEST_SUITE
