#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fairgraph/embedding.hpp"
#include "fairgraph/error.hpp"

using namespace fairgraph;

namespace {

AttributedGraph weighted(int n, const std::vector<std::tuple<int, int, double>>& edges) {
    Matrix a = Matrix::Zero(n, n);
    for (auto [u, v, w] : edges) a(u, v) = a(v, u) = w;
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    labels.back() = n > 1 ? 1 : 0;
    return AttributedGraph(std::move(a), std::move(labels));
}

double cosine(const Matrix& z, int i, int j) {
    return z.row(i).dot(z.row(j)) / (z.row(i).norm() * z.row(j).norm());
}

EmbeddingConfig small_config(std::uint64_t seed = 1) {
    EmbeddingConfig cfg;
    cfg.dim = 8;
    cfg.walk_length = 10;
    cfg.window = 3;
    cfg.walks_per_node = 20;
    cfg.seed = seed;
    return cfg;
}

AttributedGraph two_cliques() {
    // Two 5-cliques joined by the single edge 4-5.
    std::vector<std::tuple<int, int, double>> edges;
    for (int base : {0, 5})
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) edges.emplace_back(base + i, base + j, 1.0);
    edges.emplace_back(4, 5, 1.0);
    Matrix a = Matrix::Zero(10, 10);
    for (auto [u, v, w] : edges) a(u, v) = a(v, u) = w;
    return AttributedGraph(std::move(a), {0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
}

}  // namespace

TEST_CASE("walks on a single edge alternate") {
    const Corpus corpus = random_walks(weighted(2, {{0, 1, 1.0}}), small_config());
    CHECK(corpus.size() == 40);
    for (const Walk& w : corpus) {
        REQUIRE(w.size() == 10);
        for (std::size_t t = 1; t < w.size(); ++t) CHECK(w[t] == 1 - w[t - 1]);
    }
}

TEST_CASE("star walks visit the centre on alternating steps") {
    const AttributedGraph star = weighted(5, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}});
    for (const Walk& w : random_walks(star, small_config())) {
        const std::size_t parity = w.front() == 0 ? 0 : 1;
        for (std::size_t t = 0; t < w.size(); ++t) CHECK((w[t] == 0) == (t % 2 == parity));
    }
}

TEST_CASE("steps follow edge weights") {
    // From node 0: weight 10 to node 1 and weight 1 to node 2.
    EmbeddingConfig cfg = small_config(3);
    cfg.walks_per_node = 3000;
    cfg.walk_length = 2;
    const Corpus corpus = random_walks(weighted(3, {{0, 1, 10.0}, {0, 2, 1.0}, {1, 2, 1.0}}), cfg);
    double starts = 0.0, to_one = 0.0;
    for (const Walk& w : corpus)
        if (w[0] == 0) starts += 1.0, to_one += w[1] == 1 ? 1.0 : 0.0;
    CHECK(to_one / starts == doctest::Approx(10.0 / 11.0).epsilon(0.02 / (10.0 / 11.0)));
}

TEST_CASE("first-step frequencies pass a chi-square test") {
    const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
    const AttributedGraph g = weighted(5, {{0, 1, w[0]}, {0, 2, w[1]}, {0, 3, w[2]}, {0, 4, w[3]}});
    EmbeddingConfig cfg = small_config(7);
    cfg.walks_per_node = 4000;
    cfg.walk_length = 2;
    std::vector<double> observed(4, 0.0);
    double total = 0.0;
    for (const Walk& walk : random_walks(g, cfg))
        if (walk[0] == 0) observed[static_cast<std::size_t>(walk[1] - 1)] += 1.0, total += 1.0;
    double chi2 = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double expected = total * w[k] / 10.0;
        chi2 += (observed[k] - expected) * (observed[k] - expected) / expected;
    }
    CHECK(chi2 < 11.345);  // 99th percentile, 3 degrees of freedom
}

TEST_CASE("isolated nodes produce one-node walks") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = a(1, 0) = 1.0;
    const AttributedGraph g(a, {0, 1, 1});
    const Corpus corpus = random_walks(g, small_config());
    for (const Walk& w : corpus)
        if (w.front() == 2) CHECK(w.size() == 1);
    const EmbeddingMatrix z = embed_graph(g, small_config());
    CHECK(z.values.allFinite());
}

TEST_CASE("embedding is deterministic given the seed") {
    const AttributedGraph g = two_cliques();
    const EmbeddingMatrix a = embed_graph(g, small_config(5));
    const EmbeddingMatrix b = embed_graph(g, small_config(5));
    const EmbeddingMatrix c = embed_graph(g, small_config(6));
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(a.size() == 10);
    CHECK(a.dim() == 8);
}

TEST_CASE("two cliques separate in embedding space") {
    const AttributedGraph g = two_cliques();
    const Matrix z = embed_graph(g, small_config(2)).values;
    double within = 0.0, across = 0.0;
    int nw = 0, na = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = i + 1; j < 10; ++j) {
            if ((i < 5) == (j < 5)) within += cosine(z, i, j), ++nw;
            else across += cosine(z, i, j), ++na;
        }
    MESSAGE("within " << within / nw << " across " << across / na);
    CHECK(within / nw > across / na);
}

TEST_CASE("a repeated pair is learned") {
    EmbeddingConfig cfg = small_config();
    cfg.epochs = 10;
    const Corpus corpus(50, Walk{0, 1});
    const SkipGramModel m = skipgram_train(corpus, 2, cfg);
    REQUIRE(m.epoch_loss.size() == 10);
    for (std::size_t e = 1; e < m.epoch_loss.size(); ++e) CHECK(m.epoch_loss[e] < m.epoch_loss[e - 1]);
    CHECK(m.embedding.values.row(0).dot(m.context.row(1)) > 0.0);
}

TEST_CASE("training loss falls on a clustered graph") {
    EmbeddingConfig cfg = small_config(4);
    cfg.epochs = 8;
    const SkipGramModel m = skipgram_train(random_walks(two_cliques(), cfg), 10, cfg);
    CHECK(m.epoch_loss.back() <= m.epoch_loss.front());
    const double early = (m.epoch_loss[0] + m.epoch_loss[1]) / 2.0;
    const double late = (m.epoch_loss[6] + m.epoch_loss[7]) / 2.0;
    CHECK(late < early);
}

TEST_CASE("skip-gram input validation") {
    const EmbeddingConfig cfg = small_config();
    CHECK_THROWS_AS(skipgram_train({}, 3, cfg), InvalidArgument);
    CHECK_THROWS_AS(skipgram_train({Walk{0, 3}}, 3, cfg), InvalidArgument);
    EmbeddingConfig bad = cfg;
    bad.dim = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.window = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("spectral embedding of two cliques splits on sign") {
    const Matrix z = spectral_embed(two_cliques(), 1).values;
    for (int i = 1; i < 5; ++i) CHECK(z(i, 0) * z(0, 0) > 0.0);
    for (int i = 5; i < 10; ++i) CHECK(z(i, 0) * z(0, 0) < 0.0);
}

TEST_CASE("spectral embedding of a path") {
    const Matrix z = spectral_embed(weighted(3, {{0, 1, 1.0}, {1, 2, 1.0}}), 1).values;
    CHECK(std::abs(z(1, 0)) <= 1e-10);
    CHECK(z(0, 0) == doctest::Approx(-z(2, 0)));
    CHECK(std::abs(z(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("spectral embedding of K4 is equidistant") {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) edges.emplace_back(i, j, 1.0);
    const Matrix z = spectral_embed(weighted(4, edges), 3).values;
    const double d01 = (z.row(0) - z.row(1)).norm();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) CHECK((z.row(i) - z.row(j)).norm() == doctest::Approx(d01));
    CHECK_THROWS_AS(spectral_embed(weighted(4, edges), 4), InvalidArgument);
}

TEST_CASE("embedding CSV layout") {
    EmbeddingMatrix z;
    z.values = Matrix::Zero(2, 2);
    z.values(1, 0) = 0.5;
    std::ostringstream out;
    write_embedding_csv(out, z);
    CHECK(out.str() == "node,z0,z1\n0,0,0\n1,0.5,0\n");
}
