#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eqvar/bench.hpp"
#include "eqvar/io.hpp"
#include "eqvar/rng.hpp"

namespace fs = std::filesystem;
using namespace eqvar;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitExhausted = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

GraphFamily parse_family(const std::string& name) {
    if (name == "chain-random") return GraphFamily::ChainRandom;
    if (name == "highdim-smallk") return GraphFamily::HighDimSmallK;
    if (name == "highdim-hub") return GraphFamily::HighDimHub;
    if (name == "random-order") return GraphFamily::RandomOrder;
    if (name == "fully-connected") return GraphFamily::FullyConnected;
    throw UsageError("--family must be one of chain-random, highdim-smallk, highdim-hub, "
                     "random-order, fully-connected");
}

CoeffSpec parse_coeff(const std::string& text) {
    std::stringstream ss(text);
    std::string law, lo, hi;
    if (!std::getline(ss, law, ':') || !std::getline(ss, lo, ':') || !std::getline(ss, hi, ':'))
        throw UsageError("--coeff must look like pm:0.3:1 or two-sided:0.1:1");
    CoeffSpec out;
    if (law == "pm" || law == "plus-minus") out.law = CoeffLaw::PlusMinus;
    else if (law == "two-sided") out.law = CoeffLaw::TwoSided;
    else throw UsageError("--coeff law must be pm or two-sided");
    try {
        out.lo = std::stod(lo);
        out.hi = std::stod(hi);
    } catch (...) {
        throw UsageError("--coeff bounds must be numeric");
    }
    if (!(out.lo > 0.0 && out.lo < out.hi)) throw UsageError("--coeff needs 0 < lo < hi");
    return out;
}

ErrorSpec parse_error(const std::string& text) {
    std::stringstream ss(text);
    std::string kind, s2;
    if (!std::getline(ss, kind, ':')) throw UsageError("--error must look like gaussian:1.0");
    double sigma2 = 1.0;
    if (std::getline(ss, s2, ':')) {
        try {
            sigma2 = std::stod(s2);
        } catch (...) {
            throw UsageError("--error variance must be numeric");
        }
    }
    if (!(sigma2 > 0.0)) throw UsageError("--error variance must be positive");
    if (kind == "gaussian") return ErrorSpec::gaussian(sigma2);
    if (kind == "rademacher") return ErrorSpec::rademacher(sigma2);
    throw UsageError("--error kind must be gaussian or rademacher");
}

int run_simulate(const std::string& family, int p, long n, double pc, const std::string& coeff,
                 const std::string& error, std::uint64_t seed, const std::string& out_dir,
                 bool header) {
    GraphRecipe recipe;
    recipe.family = parse_family(family);
    if (p < 1) throw UsageError("--p must be at least 1");
    if (n < 1) throw UsageError("--n must be at least 1");
    if (!(pc >= 0.0 && pc <= 1.0)) throw UsageError("--pc must lie in [0, 1]");
    recipe.p = p;
    recipe.pc = pc;
    recipe.coeff = parse_coeff(coeff);
    recipe.seed = seed;
    const ErrorSpec spec = parse_error(error);

    const WeightedDag dag = generate_graph(recipe);
    const SemModel model(dag, spec);
    const Matrix x = sample_data(model, n, Rng::derive(seed, 1));

    fs::create_directories(out_dir);
    write_data_csv((fs::path(out_dir) / "data.csv").string(), x, header);
    write_edge_csv((fs::path(out_dir) / "truth_edges.csv").string(), dag.coefficients());
    write_model_json((fs::path(out_dir) / "model.json").string(), model);
    return 0;
}

int run_discover(const std::string& data_path, const std::string& method, int q, int folds,
                 bool order_only, std::uint64_t seed, const std::string& out_dir) {
    OrderingConfig config;
    if (method == "td") config = OrderingConfig::top_down_full();
    else if (method == "bu") config = OrderingConfig::bottom_up();
    else if (method == "td-hd") {
        if (q < 1) throw UsageError("--method td-hd requires --q >= 1");
        config = OrderingConfig::top_down_subset(q);
    } else {
        throw UsageError("--method must be td, td-hd or bu");
    }
    if (folds < 2) throw UsageError("--folds must be at least 2");

    const Matrix x = read_data_csv(data_path);
    const CovarianceEstimate cov = sample_covariance(x);
    fs::create_directories(out_dir);
    const std::string ordering_path = (fs::path(out_dir) / "ordering.json").string();

    Ordering ordering;
    try {
        ordering = run_ordering(cov, config);
    } catch (const Exhausted& e) {
        write_ordering_json(ordering_path, e.partial);
        std::cerr << "discover: exhausted at step " << e.step << " after placing "
                  << e.partial.sequence.size() << " of " << cov.p()
                  << " variables (p > n regime); partial ordering written\n";
        return kExitExhausted;
    } catch (const SingularConditioningSet& e) {
        write_ordering_json(ordering_path, Ordering{});
        std::cerr << "discover: " << e.what() << " (p >= n regime); empty ordering written\n";
        return kExitExhausted;
    }

    write_ordering_json(ordering_path, ordering);
    if (!order_only) {
        const EstimatedGraph graph = select_edges(x, ordering, folds, seed);
        write_edge_csv((fs::path(out_dir) / "edges.csv").string(), graph.adjacency);
    }
    return 0;
}

int run_bench(const std::string& config_path, int threads, const std::string& format,
              const std::string& out_path, bool full, bool timing) {
    BenchmarkConfig config;
    try {
        config = read_config_file(config_path);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (threads == 0) {
        if (const char* env = std::getenv("EQVAR_THREADS")) threads = std::atoi(env);
        if (threads <= 0) threads = 1;
    }
    if (format != "csv" && format != "json" && format != "md")
        throw UsageError("--format must be csv, json or md");

    const BenchmarkReport report = run_benchmark(config, threads, full);

    std::string text;
    if (format == "csv") text = report_to_csv(report, timing);
    else if (format == "json") text = report_to_json(report, timing);
    else text = report_to_markdown(report);

    std::string target = out_path.empty() ? config.output : out_path;
    if (target.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(target, std::ios::binary);
        if (!out) throw Error("cannot open for writing: " + target);
        out << text;
        if (!out) throw Error("write failed: " + target);
    }

    for (const SettingReport& sr : report.settings) {
        for (const EstimatorCell& cell : sr.cells) {
            std::fprintf(stderr, "bench: %s p=%d n=%ld %s: %.2fs over %d replicates (%d failed)\n",
                         sr.family.c_str(), sr.p, sr.n, cell.estimator.c_str(), cell.seconds,
                         cell.replicates, cell.failures);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal ordering and structure discovery for equal-variance linear SEMs"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a random model and sample data from it");
    std::string sim_family = "chain-random";
    int sim_p = 0;
    long sim_n = 0;
    double sim_pc = 0.0;
    std::string sim_coeff = "pm:0.3:1";
    std::string sim_error = "gaussian:1.0";
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    bool sim_header = false;
    sim->add_option("--family", sim_family, "graph family");
    sim->add_option("--p", sim_p, "number of variables")->required();
    sim->add_option("--n", sim_n, "number of samples")->required();
    sim->add_option("--pc", sim_pc, "extra-edge probability");
    sim->add_option("--coeff", sim_coeff, "coefficient law LAW:LO:HI");
    sim->add_option("--error", sim_error, "error law KIND:SIGMA2");
    sim->add_option("--seed", sim_seed, "random seed");
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->add_flag("--header", sim_header, "write a header row in data.csv");

    // discover
    auto* dis = app.add_subcommand("discover", "estimate a causal ordering (and edges) from data");
    std::string dis_data, dis_method = "td", dis_out;
    int dis_q = 0, dis_folds = 5;
    bool dis_order_only = false;
    std::uint64_t dis_seed = 0;
    dis->add_option("--data", dis_data, "input data csv")->required();
    dis->add_option("--method", dis_method, "td | td-hd | bu");
    dis->add_option("--q", dis_q, "max in-degree bound (td-hd)");
    dis->add_option("--folds", dis_folds, "cross-validation folds for edge selection");
    dis->add_flag("--order-only", dis_order_only, "skip edge selection");
    dis->add_option("--seed", dis_seed, "seed for fold assignment");
    dis->add_option("--out", dis_out, "output directory")->required();

    // bench
    auto* ben = app.add_subcommand("bench", "run a benchmark config and write the report");
    std::string ben_config, ben_format = "csv", ben_out;
    int ben_threads = 0;
    bool ben_full = false, ben_timing = false;
    ben->add_option("--config", ben_config, "benchmark config json")->required();
    ben->add_option("--threads", ben_threads, "worker threads (EQVAR_THREADS as fallback)");
    ben->add_option("--format", ben_format, "csv | json | md");
    ben->add_option("--out", ben_out, "report path (overrides config output)");
    ben->add_flag("--full", ben_full, "use each setting's full replicate count");
    ben->add_flag("--timing", ben_timing, "include wall-clock seconds in the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim->parsed())
            return run_simulate(sim_family, sim_p, sim_n, sim_pc, sim_coeff, sim_error, sim_seed,
                                sim_out, sim_header);
        if (dis->parsed())
            return run_discover(dis_data, dis_method, dis_q, dis_folds, dis_order_only, dis_seed,
                                dis_out);
        if (ben->parsed())
            return run_bench(ben_config, ben_threads, ben_format, ben_out, ben_full, ben_timing);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
