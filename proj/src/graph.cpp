#include "fairgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fairgraph/error.hpp"

namespace fairgraph {

AttributedGraph::AttributedGraph(Matrix adjacency, std::vector<int> labels)
    : adjacency_(std::move(adjacency)), labels_(std::move(labels)) {
    const auto n = static_cast<Eigen::Index>(labels_.size());
    if (n == 0) throw DataError("graph must have at least one node");
    if (adjacency_.rows() != n || adjacency_.cols() != n)
        throw DataError("adjacency shape does not match the number of labels");

    for (Eigen::Index i = 0; i < n; ++i) {
        if (adjacency_(i, i) != 0.0) throw DataError("adjacency diagonal must be zero");
        for (Eigen::Index j = 0; j < n; ++j) {
            const double w = adjacency_(i, j);
            if (!std::isfinite(w) || w < 0.0)
                throw DataError("adjacency weights must be finite and non-negative");
            if (w != adjacency_(j, i)) throw DataError("adjacency must be symmetric");
            if (w != 0.0 && w != 1.0) binary_ = false;
        }
    }

    int max_label = -1;
    for (int s : labels_) {
        if (s < 0) throw DataError("labels must be non-negative");
        max_label = std::max(max_label, s);
    }
    num_groups_ = max_label + 1;
    for (int count : group_sizes())
        if (count == 0) throw DataError("every label value in 0..K-1 must occur");
}

std::size_t AttributedGraph::edge_count() const {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < adjacency_.rows(); ++i)
        for (Eigen::Index j = i + 1; j < adjacency_.cols(); ++j)
            if (adjacency_(i, j) > 0.0) ++count;
    return count;
}

double AttributedGraph::total_weight() const { return adjacency_.sum() / 2.0; }

std::vector<int> AttributedGraph::group_sizes() const {
    std::vector<int> sizes(static_cast<std::size_t>(num_groups_), 0);
    for (int s : labels_) ++sizes[static_cast<std::size_t>(s)];
    return sizes;
}

void SbmSpec::validate() const {
    if (block_sizes.empty()) throw ConfigError("SBM needs at least one block");
    for (int size : block_sizes)
        if (size <= 0) throw ConfigError("SBM block sizes must be positive");
    const auto blocks = static_cast<Eigen::Index>(block_sizes.size());
    if (probabilities.rows() != blocks || probabilities.cols() != blocks)
        throw ConfigError("SBM probability matrix must be square with one row per block");
    for (Eigen::Index a = 0; a < blocks; ++a) {
        for (Eigen::Index b = 0; b < blocks; ++b) {
            const double p = probabilities(a, b);
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("SBM probabilities must lie in [0, 1]");
            if (p != probabilities(b, a)) throw ConfigError("SBM probability matrix must be symmetric");
        }
    }
    if (num_labels < 1) throw ConfigError("SBM label arity must be positive");
    if (!(label_noise >= 0.0 && label_noise <= 1.0)) throw ConfigError("label noise must lie in [0, 1]");
}

std::string to_string(LabelMode mode) {
    switch (mode) {
        case LabelMode::cluster: return "cluster";
        case LabelMode::random: return "random";
        case LabelMode::mixed: return "mixed";
    }
    return "cluster";
}

LabelMode parse_label_mode(const std::string& text) {
    if (text == "cluster") return LabelMode::cluster;
    if (text == "random") return LabelMode::random;
    if (text == "mixed") return LabelMode::mixed;
    throw ConfigError("unknown label mode '" + text + "'");
}

namespace {

Matrix two_block(double within_a, double within_b, double across) {
    Matrix p(2, 2);
    p << within_a, across, across, within_b;
    return p;
}

Matrix three_block() {
    Matrix p(3, 3);
    p << 0.20, 0.002, 0.003,
         0.002, 0.15, 0.003,
         0.003, 0.003, 0.10;
    return p;
}

// Community labels in the builtin graphs only "almost" match the block id;
// a tenth of the nodes get a uniformly redrawn label.
constexpr double kBuiltinLabelNoise = 0.1;

}  // namespace

std::vector<std::string> builtin_sbm_names() { return {"G1", "G2", "G3", "G4", "G5"}; }

SbmSpec builtin_sbm(const std::string& name, std::uint64_t seed) {
    SbmSpec spec;
    spec.seed = seed;
    spec.label_noise = kBuiltinLabelNoise;
    if (name == "G1") {
        spec.block_sizes = {75, 75};
        spec.probabilities = two_block(0.10, 0.10, 0.005);
        spec.label_mode = LabelMode::cluster;
        spec.num_labels = 2;
    } else if (name == "G2") {
        spec.block_sizes = {75, 75};
        spec.probabilities = two_block(0.10, 0.10, 0.005);
        spec.label_mode = LabelMode::random;
        spec.num_labels = 2;
    } else if (name == "G3") {
        spec.block_sizes = {125, 25};
        spec.probabilities = two_block(0.15, 0.35, 0.005);
        spec.label_mode = LabelMode::cluster;
        spec.num_labels = 2;
    } else if (name == "G4") {
        spec.block_sizes = {50, 50, 50};
        spec.probabilities = three_block();
        spec.label_mode = LabelMode::mixed;
        spec.num_labels = 2;
    } else if (name == "G5") {
        spec.block_sizes = {50, 50, 50};
        spec.probabilities = three_block();
        spec.label_mode = LabelMode::cluster;
        spec.num_labels = 3;
    } else {
        throw ConfigError("unknown builtin graph '" + name + "' (expected G1..G5)");
    }
    return spec;
}

AttributedGraph generate_sbm(const SbmSpec& spec) {
    spec.validate();
    const int n = std::accumulate(spec.block_sizes.begin(), spec.block_sizes.end(), 0);
    std::vector<int> block(static_cast<std::size_t>(n));
    for (int b = 0, node = 0; b < static_cast<int>(spec.block_sizes.size()); ++b)
        for (int k = 0; k < spec.block_sizes[static_cast<std::size_t>(b)]; ++k) block[static_cast<std::size_t>(node++)] = b;

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> any_label(0, spec.num_labels - 1);

    Matrix adjacency = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double p = spec.probabilities(block[static_cast<std::size_t>(i)], block[static_cast<std::size_t>(j)]);
            if (unit(rng) < p) adjacency(i, j) = adjacency(j, i) = 1.0;
        }
    }

    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int b = block[static_cast<std::size_t>(i)];
        int s = 0;
        switch (spec.label_mode) {
            case LabelMode::cluster:
                s = std::min(b, spec.num_labels - 1);
                if (spec.label_noise > 0.0 && unit(rng) < spec.label_noise) s = any_label(rng);
                break;
            case LabelMode::random:
                s = any_label(rng);
                break;
            case LabelMode::mixed:
                if (b < spec.num_labels) {
                    s = b;
                    if (spec.label_noise > 0.0 && unit(rng) < spec.label_noise) s = any_label(rng);
                } else {
                    s = any_label(rng);
                }
                break;
        }
        labels[static_cast<std::size_t>(i)] = s;
    }
    return AttributedGraph(std::move(adjacency), std::move(labels));
}

GroupPartition partition_by_label(const AttributedGraph& g) {
    GroupPartition part;
    const int k = g.num_groups();
    part.indices.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < g.size(); ++i) part.indices[static_cast<std::size_t>(g.label(i))].push_back(i);

    for (const auto& rows : part.indices) {
        Matrix block(static_cast<Eigen::Index>(rows.size()), g.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            block.row(static_cast<Eigen::Index>(r)) = g.adjacency().row(rows[r]);
        part.blocks.push_back(std::move(block));
        part.ratios.push_back(static_cast<double>(rows.size()) / g.size());
    }
    return part;
}

Matrix knn_graph(const Matrix& rows, int k) {
    const auto m = rows.rows();
    if (k <= 0) throw InvalidArgument("knn_graph: k must be positive");
    if (m <= k) throw InvalidArgument("knn_graph: need more rows than neighbours");

    // Direct differences keep exact ties exact (binary rows give integer distances).
    Matrix dist(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j)
            dist(i, j) = dist(j, i) = (rows.row(i) - rows.row(j)).squaredNorm();

    Matrix adjacency = Matrix::Zero(m, m);
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < m; ++i) {
        order.clear();
        for (Eigen::Index j = 0; j < m; ++j)
            if (j != i) order.push_back(j);
        std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Eigen::Index a, Eigen::Index b) {
            const double da = dist(i, a);
            const double db = dist(i, b);
            return da < db || (da == db && a < b);
        });
        for (int r = 0; r < k; ++r) {
            adjacency(i, order[static_cast<std::size_t>(r)]) = 1.0;
            adjacency(order[static_cast<std::size_t>(r)], i) = 1.0;
        }
    }
    return adjacency;
}

Matrix laplacian(const Matrix& similarity) {
    if (similarity.rows() != similarity.cols()) throw InvalidArgument("laplacian: matrix must be square");
    if (similarity != similarity.transpose()) throw InvalidArgument("laplacian: matrix must be symmetric");
    Matrix l = -similarity;
    l.diagonal() += similarity.rowwise().sum();
    return l;
}

std::optional<double> assortativity(const Matrix& adjacency, const std::vector<int>& labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (adjacency.rows() != n || adjacency.cols() != n)
        throw InvalidArgument("assortativity: adjacency shape does not match labels");
    const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;

    Matrix mixing = Matrix::Zero(k, k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) mixing(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]) += adjacency(i, j);
    const double total = mixing.sum();
    if (total <= 0.0) throw UndefinedMetric("assortativity: graph has no edges");
    mixing /= total;

    const double trace = mixing.trace();
    const double expected = mixing.rowwise().sum().dot(mixing.colwise().sum().transpose());
    const double denominator = 1.0 - expected;
    if (std::abs(denominator) < 1e-15) return std::nullopt;
    return (trace - expected) / denominator;
}

std::optional<double> assortativity(const AttributedGraph& g) { return assortativity(g.adjacency(), g.labels()); }

}  // namespace fairgraph
