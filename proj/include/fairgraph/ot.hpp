#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairgraph/graph.hpp"

namespace fairgraph {

enum class CostMetric { squared_euclidean, hamming };

std::string to_string(CostMetric metric);
CostMetric parse_cost_metric(const std::string& text);

struct CostMatrix {
    Matrix values;
    CostMetric metric = CostMetric::squared_euclidean;
};

/// Transport plan with the marginals it was solved for.
struct Coupling {
    Matrix plan;
    Vector source;
    Vector target;

    /// Largest absolute deviation of the row/column sums from the marginals.
    double marginal_error() const;
    /// Throws NumericalError unless marginals hold within `tol` and entries are >= 0.
    void check(double tol = 1e-7) const;
};

/// Pairwise row costs between `rows_a` (N_a x N) and `rows_b` (N_b x N).
CostMatrix cost_matrix(const Matrix& rows_a, const Matrix& rows_b, CostMetric metric);

Vector uniform_weights(Eigen::Index n);

/// Exact solver for the transportation problem min <plan, C> over couplings
/// with fixed marginals, using the primal network simplex on the bipartite
/// transport graph.
///
/// The marginals are fixed at construction; successive `solve` calls with new
/// costs warm-start from the previous optimal basis, which is what makes the
/// conditional-gradient inner loop cheap.
class TransportSimplex {
public:
    TransportSimplex(Vector source, Vector target);

    /// Solves for `cost` and returns the optimal plan.
    const Matrix& solve(const Matrix& cost);

    const Matrix& plan() const { return plan_; }
    double objective() const { return objective_; }
    long last_pivot_count() const { return last_pivots_; }
    const Vector& source() const { return source_; }
    const Vector& target() const { return target_; }

private:
    struct BasicCell {
        int row;
        int col;
        double flow;
    };

    void build_initial_basis();
    void compute_potentials(const Matrix& cost);
    void pivot(int row, int col, bool bland);
    void add_to_tree(int slot);
    void remove_from_tree(int slot);

    Eigen::Index n_ = 0;
    Eigen::Index m_ = 0;
    Vector source_;
    Vector target_;
    std::vector<BasicCell> basis_;
    Eigen::MatrixXi slot_of_;                 // basis slot per cell, -1 if non-basic
    std::vector<std::vector<int>> incident_;  // tree node -> basis slots
    std::vector<double> potential_;           // sources then sinks
    std::vector<int> parent_slot_;
    std::vector<int> depth_;
    std::vector<int> queue_;
    double flow_eps_ = 0.0;
    Matrix plan_;
    double objective_ = 0.0;
    long last_pivots_ = 0;
};

struct EmdResult {
    Coupling coupling;
    double objective = 0.0;
};

/// Exact earth mover's problem. Throws InvalidArgument for negative marginals,
/// marginals that do not sum to one within 1e-9, shape mismatches, or
/// non-finite costs.
EmdResult solve_emd(const Matrix& cost, const Vector& source, const Vector& target);
EmdResult solve_emd(const CostMatrix& cost, const Vector& source, const Vector& target);

/// One quadratic penalty scale^2 * tr(plan^T * left * plan * right).
/// Both `left` (N_a x N_a) and `right` (N_b x N_b) are symmetric PSD.
struct QuadraticTerm {
    Matrix left;
    Matrix right;
    double scale = 1.0;
};

/// Laplacian smoothness of the barycentric images of the source points: the
/// images are scale * plan * target_rows and the Laplacian is over the sources.
QuadraticTerm source_image_smoothness(Matrix source_laplacian, const Matrix& target_rows, double scale);
/// Same for the target points: images are scale * plan^T * source_rows.
QuadraticTerm target_image_smoothness(const Matrix& source_rows, Matrix target_laplacian, double scale);

/// <plan, cost> + lambda * sum of quadratic terms.
struct RegularizedProblem {
    CostMatrix cost;
    double lambda = 0.0;
    std::vector<QuadraticTerm> terms;

    double regularizer(const Matrix& plan) const;
    double objective(const Matrix& plan) const;
    Matrix gradient(const Matrix& plan) const;
    /// Throws InvalidArgument on negative lambda, shape mismatches, or a
    /// factor that is not symmetric positive semi-definite.
    void validate() const;
};

struct ConditionalGradientOptions {
    int max_iters = 200;
    double tol = 1e-6;
};

struct RegularizedResult {
    Coupling coupling;
    double objective = 0.0;
    std::vector<double> objective_trace;  // entry 0 is the EMD initialisation
    int iterations = 0;
    bool converged = false;
};

/// Conditional gradient (Frank-Wolfe) with exact line search, initialised at
/// the unregularised EMD plan. With lambda == 0 or no terms it returns the EMD
/// solution unchanged.
RegularizedResult solve_laplacian_ot(const RegularizedProblem& problem, const Vector& source, const Vector& target,
                                     const ConditionalGradientOptions& options = {});

struct BarycenterOptions {
    double lambda = 0.0;
    int support_size = 0;  // 0 means the column count of the groups
    int max_outer = 10;
    double tol = 1e-6;
    int knn_k = 3;
    std::uint64_t seed = 0;
    ConditionalGradientOptions inner;
};

struct BarycenterResult {
    Matrix support;                       // support_size x N
    std::vector<Coupling> couplings;      // support x N_i, marginals (1/support, 1/N_i)
    std::vector<double> outer_objective;  // mean transport cost after each coupling solve
    int iterations = 0;
    bool converged = false;
};

/// Free-support Wasserstein barycenter of the empirical row distributions of
/// `groups` under squared Euclidean cost, with uniform group weights and an
/// optional Laplacian term on each group's projection onto the support.
BarycenterResult free_support_barycenter(const std::vector<Matrix>& groups, const BarycenterOptions& options);

}  // namespace fairgraph
