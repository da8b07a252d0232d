#include <random>

#include "fairgraph/error.hpp"
#include "fairgraph/ot.hpp"

namespace fairgraph {

BarycenterResult free_support_barycenter(const std::vector<Matrix>& groups, const BarycenterOptions& options) {
    if (groups.size() < 2) throw InvalidArgument("barycenter needs at least two groups");
    const Eigen::Index dim = groups.front().cols();
    Eigen::Index stacked_rows = 0;
    for (const auto& g : groups) {
        if (g.rows() == 0) throw InvalidArgument("barycenter group is empty");
        if (g.cols() != dim) throw InvalidArgument("barycenter groups have different column counts");
        stacked_rows += g.rows();
    }
    if (options.lambda < 0.0) throw InvalidArgument("regularisation strength must be >= 0");
    const Eigen::Index support_size = options.support_size > 0 ? options.support_size : dim;
    const double group_weight = 1.0 / static_cast<double>(groups.size());

    // Support rows sampled uniformly, with replacement, from all group rows.
    BarycenterResult result;
    result.support.resize(support_size, dim);
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, stacked_rows - 1);
    for (Eigen::Index k = 0; k < support_size; ++k) {
        Eigen::Index r = pick(rng);
        std::size_t g = 0;
        while (r >= groups[g].rows()) r -= groups[g++].rows();
        result.support.row(k) = groups[g].row(r);
    }

    const Vector support_weights = uniform_weights(support_size);
    std::vector<TransportSimplex> exact;
    std::vector<Matrix> laplacians;
    for (const auto& g : groups) {
        exact.emplace_back(support_weights, uniform_weights(g.rows()));
        if (options.lambda > 0.0) laplacians.push_back(laplacian(knn_graph(g, options.knn_k)));
    }

    auto solve_couplings = [&] {
        result.couplings.clear();
        double mean_cost = 0.0;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const Vector group_weights = uniform_weights(groups[i].rows());
            CostMatrix cost = cost_matrix(result.support, groups[i], CostMetric::squared_euclidean);
            Coupling coupling;
            if (options.lambda > 0.0) {
                RegularizedProblem problem{cost, options.lambda, {}};
                problem.terms.push_back(target_image_smoothness(result.support, laplacians[i],
                                                                static_cast<double>(groups[i].rows())));
                coupling = solve_laplacian_ot(problem, support_weights, group_weights, options.inner).coupling;
            } else {
                coupling = Coupling{exact[i].solve(cost.values), support_weights, group_weights};
            }
            mean_cost += group_weight * cost.values.cwiseProduct(coupling.plan).sum();
            result.couplings.push_back(std::move(coupling));
        }
        result.outer_objective.push_back(mean_cost);
    };

    for (int outer = 0; outer < options.max_outer; ++outer) {
        solve_couplings();
        // Each support row moves to the mean of its barycentric projections.
        Matrix next = Matrix::Zero(support_size, dim);
        for (std::size_t i = 0; i < groups.size(); ++i)
            next.noalias() += (group_weight * static_cast<double>(support_size)) * (result.couplings[i].plan * groups[i]);
        const double change = (next - result.support).norm() / std::max(result.support.norm(), 1e-300);
        result.support = std::move(next);
        result.iterations = outer + 1;
        if (change < options.tol) {
            result.converged = true;
            break;
        }
    }
    solve_couplings();
    return result;
}

}  // namespace fairgraph
