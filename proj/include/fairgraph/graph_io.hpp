#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fairgraph/graph.hpp"

namespace fairgraph {

/// A graph loaded from text files together with the original node names.
struct LoadedGraph {
    AttributedGraph graph;
    std::vector<std::string> names;  // names[i] is the file name of node i
};

// Edge list: `src<TAB>dst[<TAB>weight]`, `#` starts a comment. Attributes:
// `node<TAB>label`. Nodes are indexed densely in order of first appearance in
// the edge file, then in the attribute file for nodes without edges. Labels
// are arbitrary tokens mapped to 0..K-1 in order of first appearance unless
// they are all non-negative integers, in which case they are used as is.
LoadedGraph read_graph(std::istream& edges, std::istream& attributes);
LoadedGraph read_graph_files(const std::string& edges_path, const std::string& attributes_path);

/// Writes each unordered pair with positive weight once. Binary graphs omit
/// the weight column.
void write_edge_list(std::ostream& out, const AttributedGraph& g, const std::vector<std::string>& names);
void write_attributes(std::ostream& out, const AttributedGraph& g, const std::vector<std::string>& names);
void write_dense_csv(std::ostream& out, const Matrix& m);

/// Default node names "0".."N-1".
std::vector<std::string> index_names(int n);

}  // namespace fairgraph
