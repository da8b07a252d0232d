#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fairgraph/graph.hpp"

namespace fairgraph {

struct EmbeddingConfig {
    int dim = 64;
    int walk_length = 15;
    int window = 10;
    int walks_per_node = 10;
    int negatives = 5;
    int epochs = 5;
    double learning_rate = 0.025;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EmbeddingMatrix {
    Matrix values;  // one row per node
    EmbeddingConfig config;

    int size() const { return static_cast<int>(values.rows()); }
    int dim() const { return static_cast<int>(values.cols()); }
};

using Walk = std::vector<int>;
using Corpus = std::vector<Walk>;

/// First-order weighted random walks: each step picks a neighbour with
/// probability proportional to the edge weight. A walk stops early at a node
/// without neighbours. Start nodes are visited in a fresh random order in
/// each of the `walks_per_node` rounds.
Corpus random_walks(const AttributedGraph& g, const EmbeddingConfig& cfg);

struct SkipGramModel {
    EmbeddingMatrix embedding;      // input (node) vectors
    Matrix context;                 // output (context) vectors
    std::vector<double> epoch_loss; // mean SGNS loss per (node, context) pair
};

/// Skip-gram with negative sampling over node ids 0..num_nodes-1. Negatives
/// follow the corpus unigram distribution raised to 0.75; a negative equal to
/// the centre or the context node is skipped. Throws InvalidArgument on an
/// empty corpus.
SkipGramModel skipgram_train(const Corpus& corpus, int num_nodes, const EmbeddingConfig& cfg);

/// random_walks followed by skipgram_train.
EmbeddingMatrix embed_graph(const AttributedGraph& g, const EmbeddingConfig& cfg);

/// Eigenvectors of the `dim` smallest non-trivial eigenvalues of the graph
/// Laplacian (the constant vector is excluded). Signs are fixed so the largest
/// magnitude entry of each column is positive.
EmbeddingMatrix spectral_embed(const AttributedGraph& g, int dim);

/// CSV with header `node,z0,...,z{d-1}`.
void write_embedding_csv(std::ostream& out, const EmbeddingMatrix& z);

}  // namespace fairgraph
