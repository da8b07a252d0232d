#include "fairgraph/repair.hpp"

#include <algorithm>
#include <random>

#include "fairgraph/error.hpp"

namespace fairgraph {

std::string to_string(RepairMethod method) {
    switch (method) {
        case RepairMethod::emd: return "emd";
        case RepairMethod::laplacian: return "laplacian";
        case RepairMethod::random: return "random";
    }
    return "emd";
}

RepairMethod parse_repair_method(const std::string& text) {
    if (text == "emd") return RepairMethod::emd;
    if (text == "laplacian") return RepairMethod::laplacian;
    if (text == "random") return RepairMethod::random;
    throw ConfigError("unknown repair method '" + text + "' (expected emd, laplacian or random)");
}

void RepairConfig::validate() const {
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    if (knn_k <= 0) throw ConfigError("knn_k must be positive");
    if (solver.max_iters <= 0 || max_outer <= 0) throw ConfigError("iteration limits must be positive");
    if (target_mass < 0.0) throw ConfigError("target mass must be >= 0");
}

namespace {

Matrix normalize_rows(const Matrix& m) {
    Matrix out = m;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double total = out.row(i).sum();
        if (total > 0.0) out.row(i) /= total;
    }
    return out;
}

AttributedGraph assemble(const AttributedGraph& g, const GroupPartition& part, const std::vector<Matrix>& repaired_blocks) {
    Matrix a(g.size(), g.size());
    for (int s = 0; s < part.num_groups(); ++s) {
        const auto& rows = part.indices[static_cast<std::size_t>(s)];
        for (std::size_t r = 0; r < rows.size(); ++r)
            a.row(rows[r]) = repaired_blocks[static_cast<std::size_t>(s)].row(static_cast<Eigen::Index>(r));
    }
    Matrix sym = 0.5 * (a + a.transpose());
    sym.diagonal().setZero();
    sym = sym.cwiseMax(0.0);
    return AttributedGraph(std::move(sym), g.labels());
}

Matrix group_laplacian(const Matrix& rows, int k) { return laplacian(knn_graph(rows, k)); }

}  // namespace

double added_cross_mass(const AttributedGraph& original, const Matrix& repaired) {
    double added = 0.0;
    for (int i = 0; i < original.size(); ++i)
        for (int j = i + 1; j < original.size(); ++j)
            if (original.label(i) != original.label(j))
                added += std::max(0.0, repaired(i, j) - original.adjacency()(i, j));
    return added;
}

RepairResult repair_binary(const AttributedGraph& g, const RepairConfig& cfg) {
    cfg.validate();
    if (g.num_groups() != 2)
        throw InvalidArgument("repair_binary needs exactly two groups; use repair_multiclass for " +
                              std::to_string(g.num_groups()));
    const GroupPartition part = partition_by_label(g);
    const Matrix& a0 = part.blocks[0];
    const Matrix& a1 = part.blocks[1];
    const auto n0 = static_cast<double>(a0.rows());
    const auto n1 = static_cast<double>(a1.rows());

    RegularizedProblem problem{cost_matrix(a0, a1, cfg.metric), cfg.effective_lambda(), {}};
    if (problem.lambda > 0.0) {
        // Images of group-0 nodes are n0 * plan * A1, images of group-1 nodes
        // are n1 * plan^T * A0.
        if (cfg.laplacian_side == LaplacianSide::projected_group) {
            problem.terms.push_back(source_image_smoothness(group_laplacian(a0, cfg.knn_k), a1, n0));
            problem.terms.push_back(target_image_smoothness(a0, group_laplacian(a1, cfg.knn_k), n1));
        } else {
            if (a0.rows() != a1.rows())
                throw InvalidArgument("data_group Laplacians need equally sized groups");
            problem.terms.push_back(source_image_smoothness(group_laplacian(a1, cfg.knn_k), a1, n0));
            problem.terms.push_back(target_image_smoothness(a0, group_laplacian(a0, cfg.knn_k), n1));
        }
    }
    RegularizedResult solved = solve_laplacian_ot(problem, uniform_weights(a0.rows()), uniform_weights(a1.rows()), cfg.solver);
    solved.coupling.check();
    const Matrix& plan = solved.coupling.plan;

    const double pi0 = part.ratios[0], pi1 = part.ratios[1];
    std::vector<Matrix> blocks;
    blocks.push_back(pi0 * a0 + pi1 * (normalize_rows(plan) * a1));
    blocks.push_back(pi1 * a1 + pi0 * (normalize_rows(plan.transpose()) * a0));
    AttributedGraph repaired = assemble(g, part, blocks);

    const double added = added_cross_mass(g, repaired.adjacency());
    return {std::move(repaired), {std::move(solved.coupling)}, cfg, added, std::move(solved.objective_trace)};
}

RepairResult repair_multiclass(const AttributedGraph& g, const RepairConfig& cfg) {
    cfg.validate();
    if (g.num_groups() < 2) throw InvalidArgument("repair needs at least two groups");
    if (cfg.metric != CostMetric::squared_euclidean)
        throw InvalidArgument("multi-class repair supports only the squared Euclidean cost");
    const GroupPartition part = partition_by_label(g);

    BarycenterOptions options;
    options.lambda = cfg.effective_lambda();
    options.support_size = g.size();
    options.max_outer = cfg.max_outer;
    options.tol = cfg.barycenter_tol;
    options.knn_k = cfg.knn_k;
    options.seed = cfg.seed;
    options.inner = cfg.solver;
    BarycenterResult bary = free_support_barycenter(part.blocks, options);

    std::vector<Matrix> blocks;
    for (int s = 0; s < part.num_groups(); ++s) {
        const Coupling& c = bary.couplings[static_cast<std::size_t>(s)];
        c.check();
        const auto ns = static_cast<double>(c.plan.cols());
        blocks.push_back(ns * c.plan.transpose() * bary.support);
    }
    AttributedGraph repaired = assemble(g, part, blocks);
    const double added = added_cross_mass(g, repaired.adjacency());
    return {std::move(repaired), std::move(bary.couplings), cfg, added, std::move(bary.outer_objective)};
}

RepairResult repair_random(const AttributedGraph& g, double target_mass, std::uint64_t seed) {
    if (target_mass < 0.0) throw InvalidArgument("repair_random: target mass must be >= 0");
    RepairConfig cfg;
    cfg.method = RepairMethod::random;
    cfg.seed = seed;
    cfg.target_mass = target_mass;

    std::vector<std::pair<int, int>> absent;
    for (int i = 0; i < g.size(); ++i)
        for (int j = i + 1; j < g.size(); ++j)
            if (g.label(i) != g.label(j) && g.adjacency()(i, j) == 0.0) absent.emplace_back(i, j);
    if (absent.empty() && target_mass > 0.0) throw InvalidArgument("repair_random: no absent cross-group pair");

    std::mt19937_64 rng(seed);
    std::shuffle(absent.begin(), absent.end(), rng);
    Matrix a = g.adjacency();
    double added = 0.0;
    for (const auto& [i, j] : absent) {
        if (added >= target_mass) break;
        a(i, j) = a(j, i) = 1.0;
        added += 1.0;
    }
    return {AttributedGraph(std::move(a), g.labels()), {}, cfg, added, {}};
}

RepairResult repair(const AttributedGraph& g, const RepairConfig& cfg) {
    if (cfg.method == RepairMethod::random) return repair_random(g, cfg.target_mass, cfg.seed);
    if (g.num_groups() < 2) throw InvalidArgument("repair needs at least two groups, graph has " + std::to_string(g.num_groups()));
    if (g.num_groups() == 2 && !cfg.force_barycenter) return repair_binary(g, cfg);
    return repair_multiclass(g, cfg);
}

}  // namespace fairgraph
