#include "fairgraph/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>

#include "fairgraph/error.hpp"

namespace fairgraph {

void EmbeddingConfig::validate() const {
    if (dim < 2) throw ConfigError("embedding dimension must be >= 2");
    if (walk_length <= 0 || window <= 0 || walks_per_node <= 0 || negatives < 0 || epochs <= 0)
        throw ConfigError("embedding counts must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
}

namespace {

// Neighbour lists with cumulative weights for proportional sampling.
struct WeightedNeighbours {
    std::vector<std::vector<int>> nodes;
    std::vector<std::vector<double>> cumulative;

    explicit WeightedNeighbours(const Matrix& a) : nodes(a.rows()), cumulative(a.rows()) {
        for (Eigen::Index u = 0; u < a.rows(); ++u) {
            double total = 0.0;
            for (Eigen::Index v = 0; v < a.cols(); ++v) {
                if (a(u, v) <= 0.0) continue;
                total += a(u, v);
                nodes[u].push_back(static_cast<int>(v));
                cumulative[u].push_back(total);
            }
        }
    }

    template <class Rng>
    int sample(int u, Rng& rng) const {
        const auto& cum = cumulative[u];
        if (cum.empty()) return -1;
        const double r = std::uniform_real_distribution<double>(0.0, cum.back())(rng);
        const auto it = std::upper_bound(cum.begin(), cum.end(), r);
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
        return nodes[u][k];
    }
};

double log_sigmoid(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }
double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

}  // namespace

Corpus random_walks(const AttributedGraph& g, const EmbeddingConfig& cfg) {
    cfg.validate();
    const WeightedNeighbours neighbours(g.adjacency());
    std::mt19937_64 rng(cfg.seed);
    std::vector<int> order(static_cast<std::size_t>(g.size()));
    std::iota(order.begin(), order.end(), 0);

    Corpus corpus;
    corpus.reserve(static_cast<std::size_t>(g.size()) * cfg.walks_per_node);
    for (int round = 0; round < cfg.walks_per_node; ++round) {
        std::shuffle(order.begin(), order.end(), rng);
        for (int start : order) {
            Walk walk{start};
            walk.reserve(static_cast<std::size_t>(cfg.walk_length));
            while (static_cast<int>(walk.size()) < cfg.walk_length) {
                const int next = neighbours.sample(walk.back(), rng);
                if (next < 0) break;
                walk.push_back(next);
            }
            corpus.push_back(std::move(walk));
        }
    }
    return corpus;
}

SkipGramModel skipgram_train(const Corpus& corpus, int num_nodes, const EmbeddingConfig& cfg) {
    cfg.validate();
    std::size_t tokens = 0;
    std::vector<double> counts(static_cast<std::size_t>(num_nodes), 0.0);
    for (const auto& walk : corpus) {
        for (int node : walk) {
            if (node < 0 || node >= num_nodes) throw InvalidArgument("skipgram_train: node id out of range");
            counts[static_cast<std::size_t>(node)] += 1.0;
        }
        tokens += walk.size();
    }
    if (tokens == 0) throw InvalidArgument("skipgram_train: corpus is empty");

    std::vector<double> noise_cdf(counts.size());
    double noise_total = 0.0;
    for (std::size_t v = 0; v < counts.size(); ++v) noise_cdf[v] = noise_total += std::pow(counts[v], 0.75);

    const auto dim = static_cast<std::size_t>(cfg.dim);
    const auto n = static_cast<std::size_t>(num_nodes);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> init(-0.5 / cfg.dim, 0.5 / cfg.dim);
    std::uniform_real_distribution<double> unit(0.0, noise_total);
    std::uniform_int_distribution<int> shrink(1, cfg.window);

    // Row-major buffers keep each vector contiguous.
    std::vector<double> input(n * dim), output(n * dim, 0.0), grad(dim);
    for (auto& x : input) x = init(rng);

    auto draw_negative = [&] {
        const auto it = std::upper_bound(noise_cdf.begin(), noise_cdf.end(), unit(rng));
        return static_cast<int>(std::min<std::ptrdiff_t>(it - noise_cdf.begin(), num_nodes - 1));
    };

    SkipGramModel model;
    const double total_steps = static_cast<double>(tokens) * cfg.epochs;
    double step = 0.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss = 0.0;
        std::size_t pairs = 0;
        for (const auto& walk : corpus) {
            const int len = static_cast<int>(walk.size());
            for (int pos = 0; pos < len; ++pos, step += 1.0) {
                const double lr = cfg.learning_rate * std::max(1e-4, 1.0 - step / total_steps);
                const int centre = walk[static_cast<std::size_t>(pos)];
                const int reach = shrink(rng);
                double* in = &input[static_cast<std::size_t>(centre) * dim];
                for (int c = std::max(0, pos - reach); c <= std::min(len - 1, pos + reach); ++c) {
                    if (c == pos) continue;
                    const int context = walk[static_cast<std::size_t>(c)];
                    std::fill(grad.begin(), grad.end(), 0.0);
                    for (int k = 0; k <= cfg.negatives; ++k) {
                        const int target = k == 0 ? context : draw_negative();
                        if (k > 0 && (target == context || target == centre)) continue;
                        const double label = k == 0 ? 1.0 : 0.0;
                        double* out = &output[static_cast<std::size_t>(target) * dim];
                        double score = 0.0;
                        for (std::size_t d = 0; d < dim; ++d) score += in[d] * out[d];
                        loss -= k == 0 ? log_sigmoid(score) : log_sigmoid(-score);
                        const double g = lr * (label - sigmoid(score));
                        for (std::size_t d = 0; d < dim; ++d) {
                            grad[d] += g * out[d];
                            out[d] += g * in[d];
                        }
                    }
                    for (std::size_t d = 0; d < dim; ++d) in[d] += grad[d];
                    ++pairs;
                }
            }
        }
        model.epoch_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
    }

    model.embedding.config = cfg;
    model.embedding.values.resize(num_nodes, cfg.dim);
    model.context.resize(num_nodes, cfg.dim);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t d = 0; d < dim; ++d) {
            model.embedding.values(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(d)) = input[v * dim + d];
            model.context(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(d)) = output[v * dim + d];
        }
    return model;
}

EmbeddingMatrix embed_graph(const AttributedGraph& g, const EmbeddingConfig& cfg) {
    return skipgram_train(random_walks(g, cfg), g.size(), cfg).embedding;
}

EmbeddingMatrix spectral_embed(const AttributedGraph& g, int dim) {
    const int n = g.size();
    if (dim < 1 || dim >= n) throw InvalidArgument("spectral_embed: need 1 <= dim < N");
    Matrix l = laplacian(g.adjacency());
    // Shift the constant eigenvector above the spectrum (lambda_max <= 2 * max degree).
    const double shift = 2.0 * l.diagonal().maxCoeff() + 1.0;
    l.array() += shift / n;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(l);
    if (eig.info() != Eigen::Success) throw NumericalError("spectral_embed: eigen-decomposition failed");

    EmbeddingMatrix z;
    z.config.dim = dim;
    z.values = eig.eigenvectors().leftCols(dim);
    for (int c = 0; c < dim; ++c) {
        Eigen::Index at = 0;
        z.values.col(c).cwiseAbs().maxCoeff(&at);
        if (z.values(at, c) < 0.0) z.values.col(c) *= -1.0;
    }
    return z;
}

void write_embedding_csv(std::ostream& out, const EmbeddingMatrix& z) {
    out << "node";
    for (int d = 0; d < z.dim(); ++d) out << ",z" << d;
    out << '\n';
    char buffer[32];
    for (int i = 0; i < z.size(); ++i) {
        out << i;
        for (int d = 0; d < z.dim(); ++d) {
            std::snprintf(buffer, sizeof buffer, "%.10g", z.values(i, d));
            out << ',' << buffer;
        }
        out << '\n';
    }
}

}  // namespace fairgraph
