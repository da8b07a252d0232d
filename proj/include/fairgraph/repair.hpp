#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairgraph/graph.hpp"
#include "fairgraph/ot.hpp"

namespace fairgraph {

enum class RepairMethod { emd, laplacian, random };

std::string to_string(RepairMethod method);
RepairMethod parse_repair_method(const std::string& text);

/// Which KNN graph supplies the Laplacian of an individual-fairness term.
/// `projected_group`: the group whose nodes' images are being smoothed (the
/// only choice that is shape-compatible for unequal group sizes).
/// `data_group`: the group whose rows are transported; requires equal sizes.
enum class LaplacianSide { projected_group, data_group };

struct RepairConfig {
    RepairMethod method = RepairMethod::emd;
    double lambda = 0.0;
    CostMetric metric = CostMetric::squared_euclidean;
    int knn_k = 3;
    std::uint64_t seed = 0;
    LaplacianSide laplacian_side = LaplacianSide::projected_group;
    ConditionalGradientOptions solver;
    int max_outer = 10;
    double barycenter_tol = 1e-6;
    bool force_barycenter = false;  // use the multi-class scheme even for K == 2
    double target_mass = 0.0;       // random baseline only

    /// lambda, or 0 when the method is plain EMD.
    double effective_lambda() const { return method == RepairMethod::emd ? 0.0 : lambda; }
    void validate() const;
};

struct RepairResult {
    AttributedGraph repaired;
    std::vector<Coupling> couplings;
    RepairConfig config;
    double added_mass = 0.0;
    std::vector<double> objective_trace;
};

/// Two-group repair: both groups are moved to the midpoint of the geodesic
/// between their row distributions. Throws InvalidArgument unless K == 2.
RepairResult repair_binary(const AttributedGraph& g, const RepairConfig& cfg);

/// K-group repair: every group is projected on a free-support barycenter.
RepairResult repair_multiclass(const AttributedGraph& g, const RepairConfig& cfg);

/// Baseline adding unit-weight edges uniformly among absent cross-group pairs
/// until `target_mass` is reached or no absent pair is left.
RepairResult repair_random(const AttributedGraph& g, double target_mass, std::uint64_t seed);

/// Dispatches on the method and the number of groups.
RepairResult repair(const AttributedGraph& g, const RepairConfig& cfg);

/// Total weight increase over unordered cross-group pairs.
double added_cross_mass(const AttributedGraph& original, const Matrix& repaired);

}  // namespace fairgraph
