#include "fairgraph/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fairgraph/error.hpp"
#include "fairgraph/graph_io.hpp"

namespace fairgraph {

namespace {

using nlohmann::json;

// Independent streams per pipeline stage from one run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stage) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stage + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

enum Stage : std::uint64_t { stage_split = 1, stage_repair, stage_embed, stage_rb };

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : j.items())
        if (!keys.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& target) {
    if (!j.contains(key)) return;
    try {
        target = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

std::string format_number(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.10g", v);
    return buffer;
}

SbmSpec sbm_spec_from_json(const json& j, std::uint64_t seed) {
    reject_unknown(j, {"block_sizes", "probabilities", "label_mode", "num_labels", "label_noise"}, "SBM spec");
    SbmSpec spec;
    spec.seed = seed;
    read(j, "block_sizes", spec.block_sizes);
    std::vector<std::vector<double>> probs;
    read(j, "probabilities", probs);
    spec.probabilities.resize(static_cast<Eigen::Index>(probs.size()), static_cast<Eigen::Index>(probs.size()));
    for (std::size_t r = 0; r < probs.size(); ++r) {
        if (probs[r].size() != probs.size()) throw ConfigError("SBM probabilities must be a square matrix");
        for (std::size_t c = 0; c < probs.size(); ++c)
            spec.probabilities(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = probs[r][c];
    }
    std::string mode = "cluster";
    read(j, "label_mode", mode);
    spec.label_mode = parse_label_mode(mode);
    read(j, "num_labels", spec.num_labels);
    read(j, "label_noise", spec.label_noise);
    spec.validate();
    return spec;
}

void ExperimentConfig::validate() const {
    if (name.empty() || name.find('/') != std::string::npos) throw ConfigError("experiment name must be a plain, non-empty name");
    if (graph.empty() == edges_path.empty()) throw ConfigError("give either a builtin graph or an edge list");
    if (!edges_path.empty() && attrs_path.empty()) throw ConfigError("an edge list needs an attribute file");
    if (method != "none" && method != "emd" && method != "laplacian" && method != "random")
        throw ConfigError("unknown method '" + method + "' (expected none, emd, laplacian or random)");
    if (lambdas.empty()) throw ConfigError("lambda grid is empty");
    for (double l : lambdas)
        if (!(l >= 0.0)) throw ConfigError("lambda values must be >= 0");
    if (seeds.empty()) throw ConfigError("seed list is empty");
    if (target_mass && *target_mass < 0.0) throw ConfigError("target mass must be >= 0");
    if (knn_k <= 0 || rb_folds < 2 || consistency_k <= 0) throw ConfigError("knn_k, rb_folds and consistency_k must be positive");
    if (jobs <= 0) throw ConfigError("jobs must be positive");
    embedding.validate();
    split.validate();
}

ExperimentConfig experiment_config_from_json(const json& j) {
    reject_unknown(j, {"name", "graph", "edges", "attrs", "method", "lambdas", "metric", "knn_k", "target_mass", "embedding",
                       "split", "logreg", "rb_folds", "consistency_k", "seeds", "out", "jobs"},
                   "experiment config");
    ExperimentConfig cfg;
    read(j, "name", cfg.name);
    read(j, "graph", cfg.graph);
    read(j, "edges", cfg.edges_path);
    read(j, "attrs", cfg.attrs_path);
    read(j, "method", cfg.method);
    read(j, "lambdas", cfg.lambdas);
    std::string metric = to_string(cfg.metric);
    read(j, "metric", metric);
    cfg.metric = parse_cost_metric(metric);
    read(j, "knn_k", cfg.knn_k);
    if (j.contains("target_mass") && !j.at("target_mass").is_null()) cfg.target_mass = j.at("target_mass").get<double>();
    if (j.contains("embedding")) {
        const json& e = j.at("embedding");
        reject_unknown(e, {"dim", "walk_length", "window", "walks_per_node", "negatives", "epochs", "learning_rate"}, "embedding");
        read(e, "dim", cfg.embedding.dim);
        read(e, "walk_length", cfg.embedding.walk_length);
        read(e, "window", cfg.embedding.window);
        read(e, "walks_per_node", cfg.embedding.walks_per_node);
        read(e, "negatives", cfg.embedding.negatives);
        read(e, "epochs", cfg.embedding.epochs);
        read(e, "learning_rate", cfg.embedding.learning_rate);
    }
    if (j.contains("split")) {
        const json& s = j.at("split");
        reject_unknown(s, {"test_fraction", "negative_ratio"}, "split");
        read(s, "test_fraction", cfg.split.test_fraction);
        read(s, "negative_ratio", cfg.split.negative_ratio);
    }
    if (j.contains("logreg")) {
        const json& l = j.at("logreg");
        reject_unknown(l, {"l2", "max_iters"}, "logreg");
        read(l, "l2", cfg.logreg.l2);
        read(l, "max_iters", cfg.logreg.max_iters);
    }
    read(j, "rb_folds", cfg.rb_folds);
    read(j, "consistency_k", cfg.consistency_k);
    read(j, "seeds", cfg.seeds);
    read(j, "out", cfg.out_dir);
    read(j, "jobs", cfg.jobs);
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json j{{"name", cfg.name},
           {"method", cfg.method},
           {"lambdas", cfg.lambdas},
           {"metric", to_string(cfg.metric)},
           {"knn_k", cfg.knn_k},
           {"target_mass", cfg.target_mass ? json(*cfg.target_mass) : json(nullptr)},
           {"embedding",
            {{"dim", cfg.embedding.dim},
             {"walk_length", cfg.embedding.walk_length},
             {"window", cfg.embedding.window},
             {"walks_per_node", cfg.embedding.walks_per_node},
             {"negatives", cfg.embedding.negatives},
             {"epochs", cfg.embedding.epochs},
             {"learning_rate", cfg.embedding.learning_rate}}},
           {"split", {{"test_fraction", cfg.split.test_fraction}, {"negative_ratio", cfg.split.negative_ratio}}},
           {"logreg", {{"l2", cfg.logreg.l2}, {"max_iters", cfg.logreg.max_iters}}},
           {"rb_folds", cfg.rb_folds},
           {"consistency_k", cfg.consistency_k},
           {"seeds", cfg.seeds},
           {"out", cfg.out_dir},
           {"jobs", cfg.jobs}};
    if (!cfg.graph.empty()) j["graph"] = cfg.graph;
    if (!cfg.edges_path.empty()) j["edges"] = cfg.edges_path, j["attrs"] = cfg.attrs_path;
    return j;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return experiment_config_from_json(j);
}

AttributedGraph experiment_graph(const ExperimentConfig& cfg, std::uint64_t seed) {
    if (!cfg.graph.empty()) return generate_sbm(builtin_sbm(cfg.graph, seed));
    return read_graph_files(cfg.edges_path, cfg.attrs_path).graph;
}

std::optional<RepairConfig> run_repair_config(const ExperimentConfig& cfg, const AttributedGraph& g, double lambda,
                                              std::uint64_t seed) {
    if (cfg.method == "none") return std::nullopt;
    RepairConfig rc;
    rc.method = parse_repair_method(cfg.method);
    rc.lambda = lambda;
    rc.metric = cfg.metric;
    rc.knn_k = cfg.knn_k;
    rc.seed = derive_seed(seed, stage_repair);
    if (rc.method == RepairMethod::random) {
        if (cfg.target_mass) {
            rc.target_mass = *cfg.target_mass;
        } else {
            RepairConfig matched = rc;
            matched.method = RepairMethod::emd;
            rc.target_mass = repair(g, matched).added_mass;
        }
    }
    return rc;
}

FairnessReport run_single(const ExperimentConfig& cfg, std::uint64_t seed, double lambda) {
    const AttributedGraph g = experiment_graph(cfg, seed);
    SplitConfig split = cfg.split;
    split.seed = derive_seed(seed, stage_split);
    EmbeddingConfig embed = cfg.embedding;
    embed.seed = derive_seed(seed, stage_embed);

    // The repair acts on the training graph, so a matched random mass is
    // measured there as well.
    const std::optional<RepairConfig> rc = run_repair_config(cfg, split_edges(g, split).train_graph, lambda, seed);
    const LinkPredictionResult lp = link_prediction_pipeline(g, rc, embed, split, cfg.logreg);

    FairnessReport report;
    report.graph = cfg.graph.empty() ? cfg.edges_path : cfg.graph;
    report.method = cfg.method;
    report.lambda = lambda;
    report.seed = seed;
    const DiBer fair = di_ber(threshold(lp.scores), lp.split.test);
    report.di_xor = fair.di_xor;
    report.di_s = fair.di_s;
    report.ber_xor = fair.ber_xor;
    report.p1 = fair.p1;
    report.p0 = fair.p0;
    report.rb = representation_bias(lp.embedding.values, g.labels(), cfg.rb_folds, derive_seed(seed, stage_rb), cfg.logreg).value;
    report.consistency = consistency(lp.scores, lp.split.test.features, cfg.consistency_k);
    report.assortativity = assortativity(lp.embedded_graph);
    report.link_auc = lp.auc;
    report.added_mass = lp.repair ? lp.repair->added_mass : 0.0;
    return report;
}

std::size_t PipelineSummary::failures() const {
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunOutcome& r) { return !r.report; }));
}

namespace {

std::string lambda_dir(double lambda) { return "lambda_" + format_number(lambda); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

struct Moments {
    double mean = 0.0, sd = 0.0;
    std::size_t n = 0;
};

template <class Get>
Moments moments(const std::vector<const FairnessReport*>& reports, Get get) {
    std::vector<double> values;
    for (const auto* r : reports)
        if (const std::optional<double> v = get(*r)) values.push_back(*v);
    Moments m;
    m.n = values.size();
    if (values.empty()) return m;
    for (double v : values) m.mean += v;
    m.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        for (double v : values) m.sd += (v - m.mean) * (v - m.mean);
        m.sd = std::sqrt(m.sd / static_cast<double>(values.size() - 1));
    }
    return m;
}

std::vector<const FairnessReport*> reports_for(const std::vector<RunOutcome>& runs, double lambda) {
    std::vector<const FairnessReport*> out;
    for (const auto& r : runs)
        if (r.lambda == lambda && r.report) out.push_back(&*r.report);
    return out;
}

using Getter = std::optional<double> (*)(const FairnessReport&);
const std::vector<std::pair<const char*, Getter>>& columns() {
    static const std::vector<std::pair<const char*, Getter>> cols{
        {"di_xor", [](const FairnessReport& r) { return r.di_xor; }},
        {"di_s", [](const FairnessReport& r) { return r.di_s; }},
        {"ber_xor", [](const FairnessReport& r) { return std::optional<double>(r.ber_xor); }},
        {"rb", [](const FairnessReport& r) { return std::optional<double>(r.rb); }},
        {"consistency", [](const FairnessReport& r) { return std::optional<double>(r.consistency); }},
        {"assortativity", [](const FairnessReport& r) { return r.assortativity; }},
        {"link_auc", [](const FairnessReport& r) { return std::optional<double>(r.link_auc); }},
        {"added_mass", [](const FairnessReport& r) { return std::optional<double>(r.added_mass); }},
    };
    return cols;
}

std::string cell(const Moments& m, bool sd) {
    if (m.n == 0) return "";
    return format_number(sd ? m.sd : m.mean);
}

}  // namespace

std::string aggregate_csv(const std::vector<RunOutcome>& runs, const std::vector<double>& lambdas) {
    std::ostringstream out;
    out << "lambda,runs";
    for (const auto& [name, get] : columns()) out << ',' << name << "_mean," << name << "_std";
    out << '\n';
    for (double lambda : lambdas) {
        const auto reports = reports_for(runs, lambda);
        out << format_number(lambda) << ',' << reports.size();
        for (const auto& [name, get] : columns()) {
            const Moments m = moments(reports, get);
            out << ',' << cell(m, false) << ',' << cell(m, true);
        }
        out << '\n';
    }
    return out.str();
}

std::string plot_data_csv(const std::vector<RunOutcome>& runs, const std::vector<double>& lambdas) {
    std::ostringstream out;
    out << "lambda,DI,Cons,AUC,RB,assortativity\n";
    for (double lambda : lambdas) {
        const auto reports = reports_for(runs, lambda);
        const auto mean = [&](Getter get) { return cell(moments(reports, get), false); };
        const auto& c = columns();
        out << format_number(lambda) << ',' << mean(c[0].second) << ',' << mean(c[4].second) << ',' << mean(c[6].second) << ','
            << mean(c[3].second) << ',' << mean(c[5].second) << '\n';
    }
    return out.str();
}

PipelineSummary run_pipeline(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!cfg.graph.empty()) builtin_sbm(cfg.graph, 0);  // unknown names fail before any run starts

    PipelineSummary summary;
    summary.directory = std::filesystem::path(cfg.out_dir) / cfg.name;
    std::filesystem::create_directories(summary.directory);
    for (std::uint64_t seed : cfg.seeds)
        for (double lambda : cfg.lambdas) summary.runs.push_back({seed, lambda, std::nullopt, {}});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < summary.runs.size(); i = next++) {
            RunOutcome& run = summary.runs[i];
            try {
                const auto dir = summary.directory / std::to_string(run.seed) / lambda_dir(run.lambda);
                std::filesystem::create_directories(dir);
                json snapshot = to_json(cfg);
                snapshot["run"] = {{"seed", run.seed}, {"lambda", run.lambda}};
                write_text(dir / "config.json", snapshot.dump(2) + "\n");
                run.report = run_single(cfg, run.seed, run.lambda);
                write_text(dir / "report.json", json(*run.report).dump(2) + "\n");
            } catch (const std::exception& e) {
                run.report.reset();
                run.error = e.what();
            }
        }
    };
    const int threads = std::min<int>(cfg.jobs, static_cast<int>(summary.runs.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream failures, rows;
    rows << fairness_csv_header() << '\n';
    for (const auto& run : summary.runs) {
        if (run.report) rows << fairness_csv_row(*run.report) << '\n';
        else failures << "seed=" << run.seed << " lambda=" << format_number(run.lambda) << ": " << run.error << '\n';
    }
    write_text(summary.directory / "runs.csv", rows.str());
    write_text(summary.directory / "failures.log", failures.str());
    write_text(summary.directory / "aggregate.csv", aggregate_csv(summary.runs, cfg.lambdas));
    write_text(summary.directory / "plot_data.csv", plot_data_csv(summary.runs, cfg.lambdas));
    return summary;
}

}  // namespace fairgraph
