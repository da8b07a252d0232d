#include "fairgraph/predict.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include "fairgraph/error.hpp"

namespace fairgraph {

void EdgeDataset::add(const AttributedGraph& g, int u, int v, int label) {
    pairs.emplace_back(u, v);
    labels.push_back(label);
    s_u.push_back(g.label(u));
    s_v.push_back(g.label(v));
}

void SplitConfig::validate() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test fraction must lie in (0, 1)");
    if (!(negative_ratio > 0.0)) throw ConfigError("negative ratio must be positive");
}

EdgeSplit split_edges(const AttributedGraph& g, const SplitConfig& cfg) {
    cfg.validate();
    const Matrix& a = g.adjacency();
    std::vector<NodePair> edges, non_edges;
    std::vector<int> degree(static_cast<std::size_t>(g.size()), 0);
    for (int i = 0; i < g.size(); ++i)
        for (int j = i + 1; j < g.size(); ++j) {
            if (a(i, j) > 0.0) {
                edges.emplace_back(i, j);
                ++degree[static_cast<std::size_t>(i)];
                ++degree[static_cast<std::size_t>(j)];
            } else {
                non_edges.emplace_back(i, j);
            }
        }
    const auto n_edges = edges.size();
    const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.test_fraction * static_cast<double>(n_edges))));
    if (n_edges < 2 || n_test >= n_edges)
        throw DataError("graph too small to hold out edges (" + std::to_string(n_edges) + " edges)");
    if (non_edges.empty()) throw DataError("no negatives available: every pair is already an edge");

    std::mt19937_64 rng(cfg.seed);
    std::shuffle(edges.begin(), edges.end(), rng);
    std::vector<char> held(n_edges, 0);
    std::size_t taken = 0;
    for (std::size_t e = 0; e < n_edges && taken < n_test; ++e) {
        auto [u, v] = edges[e];
        if (degree[static_cast<std::size_t>(u)] > 1 && degree[static_cast<std::size_t>(v)] > 1) {
            held[e] = 1;
            --degree[static_cast<std::size_t>(u)];
            --degree[static_cast<std::size_t>(v)];
            ++taken;
        }
    }
    for (std::size_t e = 0; e < n_edges && taken < n_test; ++e)
        if (!held[e]) held[e] = 1, ++taken;

    Matrix train_adj = a;
    EdgeDataset train, test;
    for (std::size_t e = 0; e < n_edges; ++e) {
        auto [u, v] = edges[e];
        if (held[e]) {
            test.add(g, u, v, 1);
            train_adj(u, v) = train_adj(v, u) = 0.0;
        } else {
            train.add(g, u, v, 1);
        }
    }

    const auto want_test = static_cast<std::size_t>(std::lround(cfg.negative_ratio * static_cast<double>(test.size())));
    const auto want_train = static_cast<std::size_t>(std::lround(cfg.negative_ratio * static_cast<double>(train.size())));
    if (non_edges.size() < want_test)
        throw DataError("not enough non-edges for the test negatives (" + std::to_string(non_edges.size()) + " available)");
    std::shuffle(non_edges.begin(), non_edges.end(), rng);
    for (std::size_t k = 0; k < want_test; ++k) test.add(g, non_edges[k].first, non_edges[k].second, 0);
    const std::size_t train_end = std::min(non_edges.size(), want_test + want_train);
    for (std::size_t k = want_test; k < train_end; ++k) train.add(g, non_edges[k].first, non_edges[k].second, 0);

    return {AttributedGraph(std::move(train_adj), g.labels()), std::move(train), std::move(test)};
}

Matrix hadamard_features(const std::vector<NodePair>& pairs, const Matrix& z) {
    Matrix x(static_cast<Eigen::Index>(pairs.size()), z.cols());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        x.row(static_cast<Eigen::Index>(i)) = z.row(pairs[i].first).cwiseProduct(z.row(pairs[i].second));
    return x;
}

void attach_features(EdgeDataset& data, const EmbeddingMatrix& z) { data.features = hadamard_features(data.pairs, z.values); }

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

void check_training_data(const Matrix& x, const std::vector<int>& y) {
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw InvalidArgument("feature and label counts differ");
    bool has0 = false, has1 = false;
    for (int label : y) {
        if (label != 0 && label != 1) throw InvalidArgument("labels must be 0 or 1");
        (label ? has1 : has0) = true;
    }
    if (!has0 || !has1) throw InvalidArgument("logistic regression needs both classes");
}

}  // namespace

double logistic_loss(const Matrix& x, const std::vector<int>& y, const Vector& w, double b, double l2) {
    const Vector z = (x * w).array() + b;
    double total = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z(i)) - y[static_cast<std::size_t>(i)] * z(i);
    return total / static_cast<double>(z.size()) + 0.5 * l2 * w.squaredNorm();
}

Vector logistic_gradient(const Matrix& x, const std::vector<int>& y, const Vector& w, double b, double l2) {
    const Vector z = (x * w).array() + b;
    Vector residual(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) residual(i) = sigmoid(z(i)) - y[static_cast<std::size_t>(i)];
    residual /= static_cast<double>(z.size());
    Vector grad(w.size() + 1);
    grad.head(w.size()) = x.transpose() * residual + l2 * w;
    grad(w.size()) = residual.sum();
    return grad;
}

Vector Classifier::decision(const Matrix& x) const {
    const Matrix standard = (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
    return (standard * weights).array() + bias;
}

Vector Classifier::predict_proba(const Matrix& x) const { return decision(x).unaryExpr([](double v) { return sigmoid(v); }); }

Classifier train_logreg(const Matrix& features, const std::vector<int>& labels, const LogRegOptions& options) {
    check_training_data(features, labels);
    if (!(options.l2 >= 0.0) || options.max_iters <= 0) throw InvalidArgument("invalid logistic regression options");
    const auto n = static_cast<double>(features.rows());
    const Eigen::Index d = features.cols();

    Classifier clf;
    clf.l2 = options.l2;
    clf.mean = features.colwise().mean().transpose();
    clf.scale.resize(d);
    for (Eigen::Index c = 0; c < d; ++c) {
        const double sd = std::sqrt((features.col(c).array() - clf.mean(c)).square().sum() / n);
        clf.scale(c) = sd > 1e-12 ? sd : 1.0;
    }
    const Matrix x = (features.rowwise() - clf.mean.transpose()).array().rowwise() / clf.scale.transpose().array();

    Vector w = Vector::Zero(d);
    double b = 0.0;
    double f = logistic_loss(x, labels, w, b, options.l2);
    clf.initial_loss = f;
    clf.loss_trace.push_back(f);
    double step = 1.0;
    for (int it = 0; it < options.max_iters; ++it) {
        const Vector g = logistic_gradient(x, labels, w, b, options.l2);
        const double g2 = g.squaredNorm();
        if (std::sqrt(g2) < options.tol) break;
        bool accepted = false;
        while (step > 1e-20) {
            const Vector w_try = w - step * g.head(d);
            const double b_try = b - step * g(d);
            const double f_try = logistic_loss(x, labels, w_try, b_try, options.l2);
            if (f_try <= f - 0.5 * step * g2) {
                const double decrease = f - f_try;
                w = w_try;
                b = b_try;
                f = f_try;
                accepted = true;
                clf.iterations = it + 1;
                clf.loss_trace.push_back(f);
                step *= 2.0;
                if (decrease < 1e-14 * std::max(1.0, f)) step = 0.0;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || step == 0.0) break;
    }
    clf.weights = w;
    clf.bias = b;
    clf.final_loss = f;
    if (!w.allFinite() || !std::isfinite(b)) throw NumericalError("logistic regression diverged");
    return clf;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw InvalidArgument("auc: score and label counts differ");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });
    double positives = 0.0, rank_sum = 0.0;
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start;
        while (end < order.size() && scores[order[end]] == scores[order[start]]) ++end;
        const double mid_rank = 0.5 * static_cast<double>(start + 1 + end);
        for (std::size_t k = start; k < end; ++k)
            if (labels[order[k]] == 1) rank_sum += mid_rank, positives += 1.0;
        start = end;
    }
    const double negatives = static_cast<double>(scores.size()) - positives;
    if (positives == 0.0 || negatives == 0.0) throw InvalidArgument("auc needs both classes");
    return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double auc(const Vector& scores, const std::vector<int>& labels) {
    return auc(std::vector<double>(scores.data(), scores.data() + scores.size()), labels);
}

LinkPredictionResult link_prediction_pipeline(const AttributedGraph& g, const std::optional<RepairConfig>& repair_cfg,
                                              const EmbeddingConfig& embed_cfg, const SplitConfig& split_cfg,
                                              const LogRegOptions& logreg) {
    EdgeSplit split = split_edges(g, split_cfg);
    std::optional<RepairResult> repaired;
    if (repair_cfg) repaired = repair(split.train_graph, *repair_cfg);
    AttributedGraph embedded = repaired ? repaired->repaired : split.train_graph;

    EmbeddingMatrix z = embed_graph(embedded, embed_cfg);
    attach_features(split.train, z);
    attach_features(split.test, z);
    Classifier clf = train_logreg(split.train.features, split.train.labels, logreg);
    Vector scores = clf.predict_proba(split.test.features);
    const double score = auc(scores, split.test.labels);
    return {std::move(split), std::move(repaired), std::move(embedded), std::move(z), std::move(clf), std::move(scores), score};
}

void write_scores_csv(std::ostream& out, const EdgeDataset& data, const Vector& scores) {
    if (static_cast<std::size_t>(scores.size()) != data.size()) throw InvalidArgument("score count differs from pair count");
    out << "u,v,label,score,s_u,s_v\n";
    char buffer[32];
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::snprintf(buffer, sizeof buffer, "%.10g", scores(static_cast<Eigen::Index>(i)));
        out << data.pairs[i].first << ',' << data.pairs[i].second << ',' << data.labels[i] << ',' << buffer << ','
            << data.s_u[i] << ',' << data.s_v[i] << '\n';
    }
}

}  // namespace fairgraph
