#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "fairgraph/error.hpp"
#include "fairgraph/ot.hpp"
#include "ot_detail.hpp"

namespace fairgraph {

namespace {

// scale^2 * tr(a^T * left * b * right) for symmetric left/right.
double bilinear(const QuadraticTerm& term, const Matrix& a, const Matrix& b) {
    return term.scale * term.scale * (a.cwiseProduct(term.left * b * term.right)).sum();
}

void require_symmetric_psd(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) throw InvalidArgument(std::string(what) + " must be square");
    const double norm = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * norm)
        throw InvalidArgument(std::string(what) + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    const double lowest = eig.eigenvalues().minCoeff();
    const double largest = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (lowest < -1e-9 * largest) throw InvalidArgument(std::string(what) + " is not positive semi-definite");
}

}  // namespace

QuadraticTerm source_image_smoothness(Matrix source_laplacian, const Matrix& target_rows, double scale) {
    return {std::move(source_laplacian), target_rows * target_rows.transpose(), scale};
}

QuadraticTerm target_image_smoothness(const Matrix& source_rows, Matrix target_laplacian, double scale) {
    return {source_rows * source_rows.transpose(), std::move(target_laplacian), scale};
}

double RegularizedProblem::regularizer(const Matrix& plan) const {
    double total = 0.0;
    for (const auto& term : terms) total += bilinear(term, plan, plan);
    return total;
}

double RegularizedProblem::objective(const Matrix& plan) const {
    double value = cost.values.cwiseProduct(plan).sum();
    if (lambda != 0.0) value += lambda * regularizer(plan);
    return value;
}

Matrix RegularizedProblem::gradient(const Matrix& plan) const {
    Matrix grad = cost.values;
    if (lambda == 0.0) return grad;
    for (const auto& term : terms) grad.noalias() += (2.0 * lambda * term.scale * term.scale) * (term.left * plan * term.right);
    return grad;
}

void RegularizedProblem::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("regularisation strength must be >= 0");
    if (!cost.values.allFinite()) throw InvalidArgument("cost must be finite");
    for (const auto& term : terms) {
        if (term.left.rows() != cost.values.rows() || term.right.rows() != cost.values.cols())
            throw InvalidArgument("quadratic term does not match the cost shape");
        require_symmetric_psd(term.left, "quadratic term left factor");
        require_symmetric_psd(term.right, "quadratic term right factor");
    }
}

RegularizedResult solve_laplacian_ot(const RegularizedProblem& problem, const Vector& source, const Vector& target,
                                     const ConditionalGradientOptions& options) {
    problem.validate();
    detail::check_transport_inputs(problem.cost.values, source, target);

    // The oracle keeps its basis between calls, so the first solve doubles as
    // the EMD initialisation and later ones warm-start from it.
    TransportSimplex oracle(source, target);
    RegularizedResult result;
    result.coupling = Coupling{oracle.solve(problem.cost.values), source, target};
    result.objective = problem.objective(result.coupling.plan);
    result.objective_trace.push_back(result.objective);
    if (problem.lambda == 0.0 || problem.terms.empty()) {
        result.converged = true;
        return result;
    }

    Matrix& plan = result.coupling.plan;
    double value = result.objective;
    for (int it = 1; it <= options.max_iters; ++it) {
        const Matrix grad = problem.gradient(plan);
        const Matrix direction = oracle.solve(grad) - plan;
        const double slope = grad.cwiseProduct(direction).sum();
        result.iterations = it;
        if (!(slope < 0.0)) {  // zero duality gap: plan is optimal
            result.converged = true;
            break;
        }
        double curvature = 0.0;
        for (const auto& term : problem.terms) curvature += bilinear(term, direction, direction);
        curvature *= problem.lambda;
        const double step = curvature > 0.0 ? std::min(1.0, -slope / (2.0 * curvature)) : 1.0;
        plan += step * direction;

        const double next = problem.objective(plan);
        if (!std::isfinite(next) || next > value + 1e-9 * std::max(1.0, std::abs(value)))
            throw NumericalError("conditional gradient objective increased");
        const double decrease = (value - next) / std::max(std::abs(value), std::numeric_limits<double>::min());
        value = next;
        result.objective_trace.push_back(value);
        if (decrease < options.tol) {
            result.converged = true;
            break;
        }
    }
    plan = plan.cwiseMax(0.0);
    result.objective = value;
    return result;
}

}  // namespace fairgraph
