#include "fairgraph/graph_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "fairgraph/error.hpp"

namespace fairgraph {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string field;
    while (in >> field) fields.push_back(field);
    return fields;
}

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

double parse_weight(const std::string& text, int line_no) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw DataError("edge list line " + std::to_string(line_no) + ": bad weight '" + text + "'");
    return value;
}

bool is_non_negative_integer(const std::string& text) {
    if (text.empty()) return false;
    for (char c : text)
        if (c < '0' || c > '9') return false;
    return true;
}

std::string format_weight(double w) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", w);
    return buffer;
}

}  // namespace

LoadedGraph read_graph(std::istream& edges, std::istream& attributes) {
    std::unordered_map<std::string, int> index;
    std::vector<std::string> names;
    auto intern = [&](const std::string& name) {
        auto [it, inserted] = index.emplace(name, static_cast<int>(names.size()));
        if (inserted) names.push_back(name);
        return it->second;
    };

    struct RawEdge {
        int u, v;
        double w;
    };
    std::vector<RawEdge> raw;
    std::string line;
    int line_no = 0;
    while (std::getline(edges, line)) {
        ++line_no;
        const auto fields = split_fields(strip_comment(line));
        if (fields.empty()) continue;
        if (fields.size() < 2 || fields.size() > 3)
            throw DataError("edge list line " + std::to_string(line_no) + ": expected 2 or 3 fields");
        const double w = fields.size() == 3 ? parse_weight(fields[2], line_no) : 1.0;
        if (!(w >= 0.0)) throw DataError("edge list line " + std::to_string(line_no) + ": negative weight");
        raw.push_back({intern(fields[0]), intern(fields[1]), w});
    }

    std::vector<std::pair<int, std::string>> raw_labels;
    line_no = 0;
    while (std::getline(attributes, line)) {
        ++line_no;
        const auto fields = split_fields(strip_comment(line));
        if (fields.empty()) continue;
        if (fields.size() != 2)
            throw DataError("attribute line " + std::to_string(line_no) + ": expected 2 fields");
        raw_labels.emplace_back(intern(fields[0]), fields[1]);
    }

    const int n = static_cast<int>(names.size());
    if (n == 0) throw DataError("graph files contain no nodes");

    bool numeric = true;
    for (const auto& [node, token] : raw_labels) numeric = numeric && is_non_negative_integer(token);
    std::map<std::string, int> label_codes;
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    for (const auto& [node, token] : raw_labels) {
        int code = 0;
        if (numeric) {
            code = std::stoi(token);
        } else {
            auto [it, inserted] = label_codes.emplace(token, static_cast<int>(label_codes.size()));
            code = it->second;
        }
        auto& slot = labels[static_cast<std::size_t>(node)];
        if (slot != -1 && slot != code) throw DataError("node '" + names[static_cast<std::size_t>(node)] + "' has two labels");
        slot = code;
    }
    for (int i = 0; i < n; ++i)
        if (labels[static_cast<std::size_t>(i)] < 0) throw DataError("node '" + names[static_cast<std::size_t>(i)] + "' has no label");

    Matrix adjacency = Matrix::Zero(n, n);
    for (const auto& e : raw) {
        if (e.u == e.v) continue;  // self-loops are dropped
        adjacency(e.u, e.v) = adjacency(e.v, e.u) = e.w;
    }
    return {AttributedGraph(std::move(adjacency), std::move(labels)), std::move(names)};
}

LoadedGraph read_graph_files(const std::string& edges_path, const std::string& attributes_path) {
    std::ifstream edges(edges_path);
    if (!edges) throw DataError("cannot open edge list '" + edges_path + "'");
    std::ifstream attributes(attributes_path);
    if (!attributes) throw DataError("cannot open attribute file '" + attributes_path + "'");
    return read_graph(edges, attributes);
}

void write_edge_list(std::ostream& out, const AttributedGraph& g, const std::vector<std::string>& names) {
    const Matrix& a = g.adjacency();
    const bool weighted = !g.is_binary_weights();
    for (int i = 0; i < g.size(); ++i) {
        for (int j = i + 1; j < g.size(); ++j) {
            if (a(i, j) <= 0.0) continue;
            out << names[static_cast<std::size_t>(i)] << '\t' << names[static_cast<std::size_t>(j)];
            if (weighted) out << '\t' << format_weight(a(i, j));
            out << '\n';
        }
    }
}

void write_attributes(std::ostream& out, const AttributedGraph& g, const std::vector<std::string>& names) {
    for (int i = 0; i < g.size(); ++i) out << names[static_cast<std::size_t>(i)] << '\t' << g.label(i) << '\n';
}

void write_dense_csv(std::ostream& out, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_weight(m(i, j));
        }
        out << '\n';
    }
}

std::vector<std::string> index_names(int n) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return names;
}

}  // namespace fairgraph
