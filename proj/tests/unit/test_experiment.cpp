#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fairgraph/error.hpp"
#include "fairgraph/experiment.hpp"

using namespace fairgraph;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ExperimentConfig tiny(const std::string& out) {
    ExperimentConfig cfg = experiment_config_from_json(json::parse(R"({
        "name": "tiny", "graph": "G1", "method": "emd", "lambdas": [0],
        "embedding": {"dim": 8, "walks_per_node": 2, "epochs": 1},
        "rb_folds": 3, "seeds": [1, 2]
    })"));
    cfg.out_dir = out;
    return cfg;
}

}  // namespace

TEST_CASE("experiment config parsing") {
    const ExperimentConfig cfg = experiment_config_from_json(json::parse(R"({
        "name": "sweep", "graph": "G3", "method": "laplacian", "lambdas": [0, 0.005, 1],
        "metric": "hamming", "knn_k": 4, "split": {"test_fraction": 0.3},
        "logreg": {"l2": 0.01}, "seeds": [3], "jobs": 2
    })"));
    CHECK(cfg.lambdas == std::vector<double>{0.0, 0.005, 1.0});
    CHECK(cfg.metric == CostMetric::hamming);
    CHECK(cfg.knn_k == 4);
    CHECK(cfg.split.test_fraction == 0.3);
    CHECK(cfg.logreg.l2 == 0.01);
    CHECK(cfg.jobs == 2);
    CHECK_FALSE(cfg.target_mass.has_value());

    const ExperimentConfig back = experiment_config_from_json(to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));
}

TEST_CASE("experiment config errors") {
    CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"graph": "G1", "seeds": [1], "lamdas": [0]})")), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"graph": "G1", "seeds": [1], "lambdas": []})")).validate(), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"graph": "G1", "seeds": [1], "method": "ot"})")).validate(), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"graph": "G1", "seeds": [1], "lambdas": [-1]})")).validate(), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"seeds": [1]})")).validate(), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"graph": "G1", "seeds": [1], "embedding": {"dims": 3}})")),
                    ConfigError);
    CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("custom SBM spec from JSON") {
    const SbmSpec spec = sbm_spec_from_json(json::parse(R"({
        "block_sizes": [3, 4], "probabilities": [[0.5, 0.1], [0.1, 0.4]]
    })"), 5);
    CHECK(spec.block_sizes == std::vector<int>{3, 4});
    CHECK(spec.probabilities(1, 0) == 0.1);
    CHECK(spec.seed == 5);
    CHECK_THROWS_AS(sbm_spec_from_json(json::parse(R"({"block_sizes": [2], "probabilities": [[0.1, 0.2]]})"), 0),
                    ConfigError);
}

TEST_CASE("random repair mass defaults to the EMD mass") {
    ExperimentConfig cfg = tiny("unused");
    cfg.method = "random";
    const AttributedGraph g = experiment_graph(cfg, 1);
    const auto rc = run_repair_config(cfg, g, 0.0, 1);
    REQUIRE(rc.has_value());
    CHECK(rc->target_mass > 0.0);
    cfg.target_mass = 12.0;
    CHECK(run_repair_config(cfg, g, 0.0, 1)->target_mass == 12.0);
    cfg.method = "none";
    CHECK_FALSE(run_repair_config(cfg, g, 0.0, 1).has_value());
}

TEST_CASE("pipeline writes reproducible outputs") {
    const auto root = std::filesystem::temp_directory_path() / "fairgraph_pipeline_test";
    std::filesystem::remove_all(root);
    ExperimentConfig a = tiny((root / "a").string());
    ExperimentConfig b = tiny((root / "b").string());
    b.jobs = 2;
    const PipelineSummary sa = run_pipeline(a);
    const PipelineSummary sb = run_pipeline(b);
    CHECK(sa.failures() == 0);
    CHECK(sa.runs.size() == 2);
    for (const char* file : {"aggregate.csv", "plot_data.csv", "runs.csv"})
        CHECK(slurp(sa.directory / file) == slurp(sb.directory / file));
    CHECK(std::filesystem::exists(sa.directory / "1" / "lambda_0" / "report.json"));
    const json snapshot = json::parse(slurp(sa.directory / "2" / "lambda_0" / "config.json"));
    CHECK(snapshot.at("run").at("seed") == 2);
    CHECK(slurp(sa.directory / "failures.log").empty());
    CHECK(slurp(sa.directory / "plot_data.csv").rfind("lambda,DI,Cons,AUC,RB,assortativity\n", 0) == 0);
    std::filesystem::remove_all(root);
}

TEST_CASE("format_number keeps ten significant digits") {
    CHECK(format_number(0.005) == "0.005");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333");
    CHECK(format_number(5.0) == "5");
}
