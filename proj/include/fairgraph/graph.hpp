#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fairgraph {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Undirected weighted graph with one categorical sensitive label per node.
///
/// The adjacency is symmetric, non-negative, with a zero diagonal. Labels are
/// dense in `0..K-1` and every group is non-empty. The constructor enforces
/// all of this and throws DataError otherwise.
class AttributedGraph {
public:
    AttributedGraph(Matrix adjacency, std::vector<int> labels);

    int size() const { return static_cast<int>(labels_.size()); }
    int num_groups() const { return num_groups_; }
    const Matrix& adjacency() const { return adjacency_; }
    const std::vector<int>& labels() const { return labels_; }
    int label(int node) const { return labels_[static_cast<std::size_t>(node)]; }

    /// True when every weight is exactly 0 or 1.
    bool is_binary_weights() const { return binary_; }

    /// Number of unordered pairs with positive weight.
    std::size_t edge_count() const;
    /// Sum of weights over unordered pairs.
    double total_weight() const;
    std::vector<int> group_sizes() const;

private:
    Matrix adjacency_;
    std::vector<int> labels_;
    int num_groups_ = 0;
    bool binary_ = true;
};

/// Rows of the adjacency split by sensitive label, original order kept.
struct GroupPartition {
    std::vector<std::vector<int>> indices;
    std::vector<Matrix> blocks;   // blocks[s] is N_s x N
    std::vector<double> ratios;   // N_s / N

    int num_groups() const { return static_cast<int>(indices.size()); }
};

enum class LabelMode { cluster, random, mixed };

/// Stochastic block model parameters.
///
/// In `cluster` mode a node's label is its block id capped at K-1. In `mixed`
/// mode blocks with id < K are labelled by id and the remaining blocks get
/// uniform labels. `label_noise` is the probability that a node's label is
/// redrawn uniformly in the non-random modes.
struct SbmSpec {
    std::vector<int> block_sizes;
    Matrix probabilities;
    LabelMode label_mode = LabelMode::cluster;
    int num_labels = 2;
    double label_noise = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

std::string to_string(LabelMode mode);
LabelMode parse_label_mode(const std::string& text);

/// Builtin synthetic graphs "G1".."G5" (150 nodes each).
SbmSpec builtin_sbm(const std::string& name, std::uint64_t seed);
std::vector<std::string> builtin_sbm_names();

AttributedGraph generate_sbm(const SbmSpec& spec);

GroupPartition partition_by_label(const AttributedGraph& g);

/// Symmetrised k-nearest-neighbour graph over the rows of `rows`, Euclidean
/// distance, ties to the lower index, union symmetrisation.
Matrix knn_graph(const Matrix& rows, int k);

/// Combinatorial Laplacian D - K of a symmetric similarity matrix.
Matrix laplacian(const Matrix& similarity);

/// Newman's attribute assortativity of the label with edge weights as mixing
/// mass. Returns nullopt when the coefficient is degenerate (zero denominator).
/// Throws UndefinedMetric when the graph has no edges.
std::optional<double> assortativity(const Matrix& adjacency, const std::vector<int>& labels);
std::optional<double> assortativity(const AttributedGraph& g);

}  // namespace fairgraph
