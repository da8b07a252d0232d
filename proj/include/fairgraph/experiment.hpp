#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairgraph/embedding.hpp"
#include "fairgraph/graph.hpp"
#include "fairgraph/metrics.hpp"
#include "fairgraph/predict.hpp"
#include "fairgraph/repair.hpp"

namespace fairgraph {

/// Custom SBM from JSON: block_sizes, probabilities, label_mode, num_labels,
/// label_noise. The seed is supplied separately.
SbmSpec sbm_spec_from_json(const nlohmann::json& j, std::uint64_t seed);

struct ExperimentConfig {
    std::string name = "experiment";
    std::string graph;       // builtin G1..G5
    std::string edges_path;  // or an edge list plus attribute file
    std::string attrs_path;
    std::string method = "emd";  // none, emd, laplacian or random
    std::vector<double> lambdas{0.0};
    CostMetric metric = CostMetric::squared_euclidean;
    int knn_k = 3;
    std::optional<double> target_mass;  // random method; unset means matched to an EMD repair
    EmbeddingConfig embedding;
    SplitConfig split;
    LogRegOptions logreg;
    int rb_folds = 10;
    int consistency_k = 10;
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "runs";
    int jobs = 1;

    void validate() const;
};

/// Unknown keys are rejected so typos surface as ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Graph for one seed: a builtin drawn with that seed, or the loaded files.
AttributedGraph experiment_graph(const ExperimentConfig& cfg, std::uint64_t seed);

/// Repair configuration for one run, or nullopt for method "none".
std::optional<RepairConfig> run_repair_config(const ExperimentConfig& cfg, const AttributedGraph& g, double lambda,
                                              std::uint64_t seed);

/// One full run: split, repair, embed, predict, measure.
FairnessReport run_single(const ExperimentConfig& cfg, std::uint64_t seed, double lambda);

struct RunOutcome {
    std::uint64_t seed = 0;
    double lambda = 0.0;
    std::optional<FairnessReport> report;
    std::string error;
};

struct PipelineSummary {
    std::filesystem::path directory;
    std::vector<RunOutcome> runs;  // seed-major, lambda-minor
    std::size_t failures() const;
};

/// Runs every (seed, lambda) with up to cfg.jobs concurrent workers and writes
/// <out>/<name>/<seed>/lambda_<l>/{config.json,report.json}, plus
/// aggregate.csv, plot_data.csv, runs.csv and failures.log in <out>/<name>.
PipelineSummary run_pipeline(const ExperimentConfig& cfg);

/// Mean and sample standard deviation per lambda.
std::string aggregate_csv(const std::vector<RunOutcome>& runs, const std::vector<double>& lambdas);
/// lambda, DI, Cons, AUC, RB, assortativity (means per lambda).
std::string plot_data_csv(const std::vector<RunOutcome>& runs, const std::vector<double>& lambdas);

std::string format_number(double v);

}  // namespace fairgraph
