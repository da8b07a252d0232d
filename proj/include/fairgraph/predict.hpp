#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "fairgraph/embedding.hpp"
#include "fairgraph/graph.hpp"
#include "fairgraph/repair.hpp"

namespace fairgraph {

using NodePair = std::pair<int, int>;

/// Node pairs with edge labels and the sensitive values of both endpoints.
/// `features` stays empty until attach_features is called.
struct EdgeDataset {
    std::vector<NodePair> pairs;
    std::vector<int> labels;  // 1 edge, 0 non-edge
    std::vector<int> s_u;
    std::vector<int> s_v;
    Matrix features;

    std::size_t size() const { return pairs.size(); }
    /// 1 when the endpoints are in different groups.
    int cross(std::size_t i) const { return s_u[i] != s_v[i] ? 1 : 0; }
    void add(const AttributedGraph& g, int u, int v, int label);
};

struct SplitConfig {
    double test_fraction = 0.2;
    double negative_ratio = 1.0;  // negatives per positive
    std::uint64_t seed = 0;

    void validate() const;
};

struct EdgeSplit {
    AttributedGraph train_graph;
    EdgeDataset train;  // remaining edges plus sampled non-edges
    EdgeDataset test;   // held-out edges plus sampled non-edges
};

/// Holds out max(1, round(test_fraction * |E|)) edges, avoiding removals that
/// would leave a node without neighbours when another choice exists, and
/// samples disjoint negatives for both sets from the non-edges of `g`.
/// Throws DataError when the graph cannot hold anything out or has no
/// non-edge.
EdgeSplit split_edges(const AttributedGraph& g, const SplitConfig& cfg);

/// Row i becomes z_u * z_v (elementwise) for the i-th pair.
void attach_features(EdgeDataset& data, const EmbeddingMatrix& z);
Matrix hadamard_features(const std::vector<NodePair>& pairs, const Matrix& z);

struct LogRegOptions {
    double l2 = 1e-4;
    int max_iters = 500;
    double tol = 1e-8;  // gradient norm
};

/// Logistic regression on standardised features.
struct Classifier {
    Vector weights;  // in standardised feature space
    double bias = 0.0;
    Vector mean;
    Vector scale;
    double l2 = 0.0;
    int iterations = 0;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::vector<double> loss_trace;

    Vector decision(const Matrix& x) const;
    Vector predict_proba(const Matrix& x) const;
};

/// Mean log-loss plus (l2 / 2) * |w|^2; the bias is not penalised.
double logistic_loss(const Matrix& x, const std::vector<int>& y, const Vector& w, double b, double l2);
/// Gradient of logistic_loss; the last entry is the bias component.
Vector logistic_gradient(const Matrix& x, const std::vector<int>& y, const Vector& w, double b, double l2);

/// Full-batch gradient descent with Armijo backtracking. Throws
/// InvalidArgument when only one class is present.
Classifier train_logreg(const Matrix& features, const std::vector<int>& labels, const LogRegOptions& options = {});

/// Mann-Whitney statistic, ties count one half. Throws InvalidArgument when
/// either class is missing.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);
double auc(const Vector& scores, const std::vector<int>& labels);

struct LinkPredictionResult {
    EdgeSplit split;
    std::optional<RepairResult> repair;
    AttributedGraph embedded_graph;  // train graph after optional repair
    EmbeddingMatrix embedding;
    Classifier classifier;
    Vector scores;  // probabilities for split.test
    double auc = 0.0;
};

/// split -> optional repair of the train graph -> embed -> Hadamard features
/// -> logistic regression -> score the held-out pairs.
LinkPredictionResult link_prediction_pipeline(const AttributedGraph& g, const std::optional<RepairConfig>& repair_cfg,
                                              const EmbeddingConfig& embed_cfg, const SplitConfig& split_cfg,
                                              const LogRegOptions& logreg = {});

/// CSV with header `u,v,label,score,s_u,s_v`.
void write_scores_csv(std::ostream& out, const EdgeDataset& data, const Vector& scores);

}  // namespace fairgraph
