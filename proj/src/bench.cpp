#include "eqvar/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "eqvar/edge_select.hpp"
#include "eqvar/metrics.hpp"
#include "eqvar/rng.hpp"

namespace eqvar {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string family_name(GraphFamily family) {
    switch (family) {
        case GraphFamily::ChainRandom: return "chain-random";
        case GraphFamily::HighDimSmallK: return "highdim-smallk";
        case GraphFamily::HighDimHub: return "highdim-hub";
        case GraphFamily::RandomOrder: return "random-order";
        case GraphFamily::FullyConnected: return "fully-connected";
    }
    return "?";
}

GraphFamily family_from_name(const std::string& name) {
    if (name == "chain-random") return GraphFamily::ChainRandom;
    if (name == "highdim-smallk") return GraphFamily::HighDimSmallK;
    if (name == "highdim-hub") return GraphFamily::HighDimHub;
    if (name == "random-order") return GraphFamily::RandomOrder;
    if (name == "fully-connected") return GraphFamily::FullyConnected;
    throw InvalidArgument("unknown graph family: " + name);
}

// Only the random-ordering family admits several topological orderings;
// rank comparison is meaningful for all others.
bool has_unique_ordering(GraphFamily family) { return family != GraphFamily::RandomOrder; }

struct ReplicateOutcome {
    bool failed = false;
    std::optional<double> tau, recall, flipped, fdr, hamming;
    double seconds = 0.0;
};

struct Accumulator {
    long count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(const std::optional<double>& v) {
        if (!v) return;
        ++count;
        sum += *v;
        sum_sq += *v * *v;
    }

    MetricSummary summarize() const {
        MetricSummary out;
        if (count == 0) return out;
        const double mean = sum / static_cast<double>(count);
        out.mean = mean;
        if (count >= 2) {
            const double var =
                std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(count - 1));
            out.se = std::sqrt(var / static_cast<double>(count));
        }
        return out;
    }
};

ReplicateOutcome run_replicate(const BenchSetting& setting, const EstimatorSpec& estimator,
                               const WeightedDag& dag, const Matrix& x,
                               const CovarianceEstimate& cov, std::uint64_t seed_r,
                               std::size_t estimator_index) {
    ReplicateOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Ordering ordering = run_ordering(cov, OrderingConfig{estimator.mode, estimator.q});
        if (has_unique_ordering(setting.recipe.family)) {
            Vector truth_ranks(dag.p());
            for (int v = 0; v < dag.p(); ++v) truth_ranks[v] = v + 1;
            out.tau = kendall_tau(truth_ranks, ordering_to_ranks(ordering));
        }
        if (setting.edge_metrics) {
            const EstimatedGraph graph = select_edges(
                x, ordering, setting.folds, Rng::derive(seed_r, 16 + estimator_index));
            const EdgeMetrics em = edge_metrics(dag, graph);
            out.recall = em.recall;
            out.flipped = em.flipped;
            out.fdr = em.fdr;
            out.hamming = static_cast<double>(em.hamming);
        }
    } catch (const Error&) {
        out.failed = true;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace

std::string EstimatorSpec::name() const {
    switch (mode) {
        case OrderingMode::TopDownFull: return "td";
        case OrderingMode::TopDownSubset: return "td-hd(q=" + std::to_string(q) + ")";
        case OrderingMode::BottomUp: return "bu";
    }
    return "?";
}

EstimatorSpec EstimatorSpec::parse(const std::string& name, int q) {
    if (name == "td" || name == "TD") return {OrderingMode::TopDownFull, 0};
    if (name == "bu" || name == "BU") return {OrderingMode::BottomUp, 0};
    if (name == "td-hd" || name == "TD_HD" || name == "htd") {
        if (q < 1) throw InvalidArgument("estimator td-hd requires q >= 1");
        return {OrderingMode::TopDownSubset, q};
    }
    throw InvalidArgument("unknown estimator: " + name);
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config, int threads, bool full) {
    if (threads < 1) threads = 1;
    BenchmarkReport report;
    report.master_seed = config.master_seed;

    for (std::size_t si = 0; si < config.settings.size(); ++si) {
        const BenchSetting& setting = config.settings[si];
        if (setting.replicates < 1) throw InvalidArgument("replicates must be at least 1");
        const int reps = (full && setting.full_replicates > 0) ? setting.full_replicates
                                                               : setting.replicates;
        const std::uint64_t setting_seed = Rng::derive(config.master_seed, si);

        std::vector<std::vector<ReplicateOutcome>> outcomes(
            setting.estimators.size(), std::vector<ReplicateOutcome>(reps));

        auto worker = [&](int worker_id) {
            for (int r = worker_id; r < reps; r += threads) {
                const std::uint64_t seed_r = Rng::derive(setting_seed, static_cast<std::uint64_t>(r));
                GraphRecipe recipe = setting.recipe;
                recipe.seed = Rng::derive(seed_r, 0);
                const WeightedDag dag = generate_graph(recipe);
                const SemModel model(dag, setting.error);
                const Matrix x = sample_data(model, setting.n, Rng::derive(seed_r, 1));
                const CovarianceEstimate cov = sample_covariance(x);
                for (std::size_t e = 0; e < setting.estimators.size(); ++e) {
                    outcomes[e][r] = run_replicate(setting, setting.estimators[e], dag, x, cov,
                                                   seed_r, e);
                }
            }
        };

        if (threads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(threads);
            for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
            for (std::thread& t : pool) t.join();
        }

        SettingReport sr;
        sr.label = setting.label;
        sr.family = family_name(setting.recipe.family);
        sr.p = setting.recipe.p;
        sr.n = setting.n;
        sr.pc = setting.recipe.pc;
        for (std::size_t e = 0; e < setting.estimators.size(); ++e) {
            EstimatorCell cell;
            cell.estimator = setting.estimators[e].name();
            cell.replicates = reps;
            Accumulator tau, recall, flipped, fdr, hamming;
            for (const ReplicateOutcome& o : outcomes[e]) {
                if (o.failed) ++cell.failures;
                tau.add(o.tau);
                recall.add(o.recall);
                flipped.add(o.flipped);
                fdr.add(o.fdr);
                hamming.add(o.hamming);
                cell.seconds += o.seconds;
            }
            cell.tau = tau.summarize();
            cell.recall = recall.summarize();
            cell.flipped = flipped.summarize();
            cell.fdr = fdr.summarize();
            cell.hamming = hamming.summarize();
            sr.cells.push_back(std::move(cell));
        }
        report.settings.push_back(std::move(sr));
    }
    return report;
}

namespace {

bool summary_equal(const MetricSummary& a, const MetricSummary& b) {
    return a.mean == b.mean && a.se == b.se;
}

std::string opt_field(const std::optional<double>& v) { return v ? fmt_double(*v) : ""; }

std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
}

void append_summary_fields(std::vector<std::string>& fields, const MetricSummary& m) {
    fields.push_back(opt_field(m.mean));
    fields.push_back(opt_field(m.se));
}

}  // namespace

bool reports_equal(const BenchmarkReport& a, const BenchmarkReport& b) {
    if (a.master_seed != b.master_seed || a.settings.size() != b.settings.size()) return false;
    for (std::size_t s = 0; s < a.settings.size(); ++s) {
        const SettingReport& x = a.settings[s];
        const SettingReport& y = b.settings[s];
        if (x.label != y.label || x.family != y.family || x.p != y.p || x.n != y.n || x.pc != y.pc)
            return false;
        if (x.cells.size() != y.cells.size()) return false;
        for (std::size_t c = 0; c < x.cells.size(); ++c) {
            const EstimatorCell& u = x.cells[c];
            const EstimatorCell& v = y.cells[c];
            if (u.estimator != v.estimator || u.replicates != v.replicates ||
                u.failures != v.failures)
                return false;
            if (!summary_equal(u.tau, v.tau) || !summary_equal(u.recall, v.recall) ||
                !summary_equal(u.flipped, v.flipped) || !summary_equal(u.fdr, v.fdr) ||
                !summary_equal(u.hamming, v.hamming))
                return false;
        }
    }
    return true;
}

std::string report_to_csv(const BenchmarkReport& report, bool include_timing) {
    std::ostringstream out;
    out << "master_seed," << report.master_seed << "\n";
    out << "label,family,p,n,pc,estimator,replicates,failures,tau_mean,tau_se,recall_mean,"
           "recall_se,flipped_mean,flipped_se,fdr_mean,fdr_se,hamming_mean,hamming_se";
    if (include_timing) out << ",seconds";
    out << "\n";
    for (const SettingReport& sr : report.settings) {
        for (const EstimatorCell& cell : sr.cells) {
            std::vector<std::string> fields{sr.label,
                                            sr.family,
                                            std::to_string(sr.p),
                                            std::to_string(sr.n),
                                            fmt_double(sr.pc),
                                            cell.estimator,
                                            std::to_string(cell.replicates),
                                            std::to_string(cell.failures)};
            append_summary_fields(fields, cell.tau);
            append_summary_fields(fields, cell.recall);
            append_summary_fields(fields, cell.flipped);
            append_summary_fields(fields, cell.fdr);
            append_summary_fields(fields, cell.hamming);
            if (include_timing) fields.push_back(fmt_double(cell.seconds));
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (i) out << ',';
                out << fields[i];
            }
            out << "\n";
        }
    }
    return out.str();
}

BenchmarkReport report_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    BenchmarkReport report;
    if (!std::getline(in, line)) throw Error("empty report");
    {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 2 || f[0] != "master_seed") throw Error("malformed report header");
        report.master_seed = std::stoull(f[1]);
    }
    if (!std::getline(in, line)) throw Error("missing column header");

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        {
            std::string field;
            std::stringstream ss(line);
            while (std::getline(ss, field, ',')) f.push_back(field);
            while (f.size() < 18) f.emplace_back();
        }
        SettingReport* sr = nullptr;
        if (!report.settings.empty()) {
            SettingReport& last = report.settings.back();
            if (last.label == f[0] && last.family == f[1] && last.p == std::stoi(f[2]) &&
                last.n == std::stol(f[3]) && last.pc == std::stod(f[4]))
                sr = &last;
        }
        if (!sr) {
            SettingReport next;
            next.label = f[0];
            next.family = f[1];
            next.p = std::stoi(f[2]);
            next.n = std::stol(f[3]);
            next.pc = std::stod(f[4]);
            report.settings.push_back(std::move(next));
            sr = &report.settings.back();
        }
        EstimatorCell cell;
        cell.estimator = f[5];
        cell.replicates = std::stoi(f[6]);
        cell.failures = std::stoi(f[7]);
        cell.tau = {parse_opt(f[8]), parse_opt(f[9])};
        cell.recall = {parse_opt(f[10]), parse_opt(f[11])};
        cell.flipped = {parse_opt(f[12]), parse_opt(f[13])};
        cell.fdr = {parse_opt(f[14]), parse_opt(f[15])};
        cell.hamming = {parse_opt(f[16]), parse_opt(f[17])};
        sr->cells.push_back(std::move(cell));
    }
    return report;
}

std::string report_to_json(const BenchmarkReport& report, bool include_timing) {
    json j;
    j["master_seed"] = report.master_seed;
    j["settings"] = json::array();
    auto summary = [](const MetricSummary& m) {
        json s;
        if (m.mean) s["mean"] = *m.mean;
        if (m.se) s["se"] = *m.se;
        return s;
    };
    for (const SettingReport& sr : report.settings) {
        json js;
        js["label"] = sr.label;
        js["family"] = sr.family;
        js["p"] = sr.p;
        js["n"] = sr.n;
        js["pc"] = sr.pc;
        js["estimators"] = json::array();
        for (const EstimatorCell& cell : sr.cells) {
            json jc;
            jc["estimator"] = cell.estimator;
            jc["replicates"] = cell.replicates;
            jc["failures"] = cell.failures;
            jc["tau"] = summary(cell.tau);
            jc["recall"] = summary(cell.recall);
            jc["flipped"] = summary(cell.flipped);
            jc["fdr"] = summary(cell.fdr);
            jc["hamming"] = summary(cell.hamming);
            if (include_timing) jc["seconds"] = cell.seconds;
            js["estimators"].push_back(std::move(jc));
        }
        j["settings"].push_back(std::move(js));
    }
    return j.dump(2) + "\n";
}

std::string report_to_markdown(const BenchmarkReport& report) {
    std::ostringstream out;
    auto cell_str = [](const MetricSummary& m, double scale) {
        if (!m.mean) return std::string("-");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", *m.mean * scale);
        return std::string(buf);
    };
    for (const SettingReport& sr : report.settings) {
        out << "### " << (sr.label.empty() ? sr.family : sr.label) << " (family " << sr.family
            << ")\n\n";
        out << "| p | n |";
        for (const EstimatorCell& cell : sr.cells) {
            out << " tau " << cell.estimator << " | recall% " << cell.estimator << " | flipped% "
                << cell.estimator << " | fdr% " << cell.estimator << " | hamming "
                << cell.estimator << " |";
        }
        out << "\n|---|---|";
        for (std::size_t c = 0; c < sr.cells.size(); ++c) out << "---|---|---|---|---|";
        out << "\n| " << sr.p << " | " << sr.n << " |";
        for (const EstimatorCell& cell : sr.cells) {
            out << ' ' << cell_str(cell.tau, 1.0) << " | " << cell_str(cell.recall, 100.0)
                << " | " << cell_str(cell.flipped, 100.0) << " | " << cell_str(cell.fdr, 100.0)
                << " | " << cell_str(cell.hamming, 1.0) << " |";
        }
        out << "\n\n";
    }
    return out.str();
}

BenchmarkConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed config json: ") + e.what());
    }
    BenchmarkConfig config;
    try {
        config.master_seed = j.value("master_seed", 0ull);
        config.output = j.value("output", std::string());
        for (const json& js : j.at("settings")) {
            BenchSetting setting;
            const json& jr = js.at("recipe");
            setting.recipe.family = family_from_name(jr.at("family").get<std::string>());
            setting.recipe.p = jr.at("p").get<int>();
            setting.recipe.pc = jr.value("pc", 0.0);
            if (jr.contains("coeff")) {
                const json& jc = jr.at("coeff");
                const std::string law = jc.value("law", std::string("plus-minus"));
                setting.recipe.coeff.law =
                    law == "two-sided" ? CoeffLaw::TwoSided : CoeffLaw::PlusMinus;
                setting.recipe.coeff.lo = jc.at("lo").get<double>();
                setting.recipe.coeff.hi = jc.at("hi").get<double>();
            }
            const json& je = js.at("error");
            const std::string kind = je.value("kind", std::string("gaussian"));
            const double sigma2 = je.value("sigma2", 1.0);
            setting.error =
                kind == "rademacher" ? ErrorSpec::rademacher(sigma2) : ErrorSpec::gaussian(sigma2);
            setting.n = js.at("n").get<long>();
            for (const json& jest : js.at("estimators")) {
                if (jest.is_string()) {
                    setting.estimators.push_back(EstimatorSpec::parse(jest.get<std::string>(), 0));
                } else {
                    setting.estimators.push_back(EstimatorSpec::parse(
                        jest.at("name").get<std::string>(), jest.value("q", 0)));
                }
            }
            setting.replicates = js.value("replicates", 100);
            setting.full_replicates = js.value("full_replicates", 0);
            setting.folds = js.value("folds", 5);
            setting.edge_metrics = js.value("edge_metrics", true);
            setting.label = js.value("label", std::string());
            config.settings.push_back(std::move(setting));
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed config json: ") + e.what());
    }
    if (config.settings.empty()) throw InvalidArgument("config has no settings");
    return config;
}

BenchmarkConfig read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

}  // namespace eqvar
