#include <algorithm>
#include <cmath>
#include <limits>

#include "fairgraph/error.hpp"
#include "fairgraph/ot.hpp"
#include "ot_detail.hpp"

namespace fairgraph {

std::string to_string(CostMetric metric) {
    return metric == CostMetric::hamming ? "hamming" : "sqeuclidean";
}

CostMetric parse_cost_metric(const std::string& text) {
    if (text == "sqeuclidean" || text == "squared_euclidean") return CostMetric::squared_euclidean;
    if (text == "hamming") return CostMetric::hamming;
    throw ConfigError("unknown cost metric '" + text + "' (expected sqeuclidean or hamming)");
}

double Coupling::marginal_error() const {
    const double rows = (plan.rowwise().sum() - source).cwiseAbs().maxCoeff();
    const double cols = (plan.colwise().sum().transpose() - target).cwiseAbs().maxCoeff();
    return std::max(rows, cols);
}

void Coupling::check(double tol) const {
    if (plan.rows() != source.size() || plan.cols() != target.size())
        throw NumericalError("coupling shape does not match its marginals");
    if ((plan.array() < 0.0).any()) throw NumericalError("coupling has negative entries");
    if (marginal_error() > tol) throw NumericalError("coupling violates its marginals");
}

CostMatrix cost_matrix(const Matrix& rows_a, const Matrix& rows_b, CostMetric metric) {
    if (rows_a.cols() != rows_b.cols()) throw InvalidArgument("cost_matrix: row dimensions differ");
    CostMatrix out;
    out.metric = metric;
    out.values.resize(rows_a.rows(), rows_b.rows());
    for (Eigen::Index i = 0; i < rows_a.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows_b.rows(); ++j) {
            if (metric == CostMetric::squared_euclidean)
                out.values(i, j) = (rows_a.row(i) - rows_b.row(j)).squaredNorm();
            else
                out.values(i, j) = static_cast<double>((rows_a.row(i).array() != rows_b.row(j).array()).count());
        }
    }
    return out;
}

Vector uniform_weights(Eigen::Index n) { return Vector::Constant(n, 1.0 / static_cast<double>(n)); }

// ---------------------------------------------------------------------------
// Network simplex on the complete bipartite graph sources x sinks.
//
// The basis is a spanning tree with n + m - 1 cells over n + m nodes (sources
// are nodes 0..n-1, sinks n..n+m-1). Entering cells are priced with Dantzig's
// rule; after a run of degenerate pivots the solver switches to Bland's rule
// (lowest index entering and leaving) until the objective moves again, which
// rules out cycling.

TransportSimplex::TransportSimplex(Vector source, Vector target)
    : n_(source.size()), m_(target.size()), source_(std::move(source)), target_(std::move(target)) {
    if (n_ == 0 || m_ == 0) throw InvalidArgument("transport problem needs non-empty marginals");
    if ((source_.array() < 0.0).any() || (target_.array() < 0.0).any())
        throw InvalidArgument("transport marginals must be non-negative");
    const double total = source_.sum();
    if (!(total > 0.0)) throw InvalidArgument("transport marginals must have positive mass");
    flow_eps_ = 1e-14 * total;
    build_initial_basis();
}

void TransportSimplex::build_initial_basis() {
    // The last sink absorbs any rounding difference between the two totals.
    Vector demand = target_ * (source_.sum() / target_.sum());
    basis_.clear();
    basis_.reserve(static_cast<std::size_t>(n_ + m_ - 1));
    slot_of_ = Eigen::MatrixXi::Constant(n_, m_, -1);
    incident_.assign(static_cast<std::size_t>(n_ + m_), {});

    Eigen::Index i = 0, j = 0;
    double supply_left = source_(0), demand_left = demand(0);
    for (;;) {
        const double x = std::min(supply_left, demand_left);
        basis_.push_back({static_cast<int>(i), static_cast<int>(j), x});
        slot_of_(i, j) = static_cast<int>(basis_.size() - 1);
        add_to_tree(static_cast<int>(basis_.size() - 1));
        supply_left -= x;
        demand_left -= x;
        if (i == n_ - 1 && j == m_ - 1) break;
        if (j == m_ - 1 || (i < n_ - 1 && supply_left <= demand_left)) {
            supply_left = source_(++i);
        } else {
            demand_left = demand(++j);
        }
    }
}

void TransportSimplex::add_to_tree(int slot) {
    const auto& c = basis_[static_cast<std::size_t>(slot)];
    incident_[static_cast<std::size_t>(c.row)].push_back(slot);
    incident_[static_cast<std::size_t>(n_ + c.col)].push_back(slot);
}

void TransportSimplex::remove_from_tree(int slot) {
    const auto& c = basis_[static_cast<std::size_t>(slot)];
    for (auto node : {static_cast<Eigen::Index>(c.row), n_ + c.col}) {
        auto& list = incident_[static_cast<std::size_t>(node)];
        list.erase(std::find(list.begin(), list.end(), slot));
    }
}

void TransportSimplex::compute_potentials(const Matrix& cost) {
    const auto nodes = static_cast<std::size_t>(n_ + m_);
    potential_.assign(nodes, 0.0);
    parent_slot_.assign(nodes, -1);
    depth_.assign(nodes, -1);
    queue_.clear();
    queue_.push_back(0);
    depth_[0] = 0;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        const int node = queue_[head];
        for (int slot : incident_[static_cast<std::size_t>(node)]) {
            const auto& c = basis_[static_cast<std::size_t>(slot)];
            const int other = node < n_ ? static_cast<int>(n_) + c.col : c.row;
            if (depth_[static_cast<std::size_t>(other)] >= 0) continue;
            depth_[static_cast<std::size_t>(other)] = depth_[static_cast<std::size_t>(node)] + 1;
            parent_slot_[static_cast<std::size_t>(other)] = slot;
            // u_row + v_col = cost on every basic cell.
            potential_[static_cast<std::size_t>(other)] =
                cost(c.row, c.col) - potential_[static_cast<std::size_t>(node)];
            queue_.push_back(other);
        }
    }
    if (queue_.size() != nodes) throw NumericalError("transport basis is not a spanning tree");
}

void TransportSimplex::pivot(int row, int col, bool bland) {
    // Cycle: +(row, col), then the tree path from sink `col` back to source
    // `row` with alternating signs starting with minus.
    std::vector<int> from_sink, from_source;
    int a = static_cast<int>(n_) + col;
    int b = row;
    auto step_up = [&](int node, std::vector<int>& path) {
        const int slot = parent_slot_[static_cast<std::size_t>(node)];
        path.push_back(slot);
        const auto& c = basis_[static_cast<std::size_t>(slot)];
        return node < n_ ? static_cast<int>(n_) + c.col : c.row;
    };
    while (depth_[static_cast<std::size_t>(a)] > depth_[static_cast<std::size_t>(b)]) a = step_up(a, from_sink);
    while (depth_[static_cast<std::size_t>(b)] > depth_[static_cast<std::size_t>(a)]) b = step_up(b, from_source);
    while (a != b) {
        a = step_up(a, from_sink);
        b = step_up(b, from_source);
    }
    std::vector<int> cycle = std::move(from_sink);
    cycle.insert(cycle.end(), from_source.rbegin(), from_source.rend());

    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cycle.size(); k += 2)
        theta = std::min(theta, basis_[static_cast<std::size_t>(cycle[k])].flow);
    theta = std::max(theta, 0.0);

    int leaving = -1;
    long leaving_key = std::numeric_limits<long>::max();
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
        const auto& c = basis_[static_cast<std::size_t>(cycle[k])];
        if (c.flow > theta + flow_eps_) continue;
        const long key = bland ? static_cast<long>(c.row) * m_ + c.col : static_cast<long>(k);
        if (key < leaving_key) {
            leaving_key = key;
            leaving = cycle[k];
        }
    }

    for (std::size_t k = 0; k < cycle.size(); ++k) {
        auto& c = basis_[static_cast<std::size_t>(cycle[k])];
        c.flow += (k % 2 == 0) ? -theta : theta;
        if (c.flow < 0.0) c.flow = 0.0;
    }

    remove_from_tree(leaving);
    auto& slot = basis_[static_cast<std::size_t>(leaving)];
    slot_of_(slot.row, slot.col) = -1;
    slot = {row, col, theta};
    slot_of_(row, col) = leaving;
    add_to_tree(leaving);
}

const Matrix& TransportSimplex::solve(const Matrix& cost) {
    if (cost.rows() != n_ || cost.cols() != m_) throw InvalidArgument("transport cost has the wrong shape");
    if (!cost.allFinite()) throw InvalidArgument("transport cost must be finite");

    const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
    const double rc_eps = 1e-12 * scale;
    const long max_pivots = 200 * (n_ + m_) * (n_ + m_) + 10000;
    const long stall_limit = n_ + m_;

    long pivots = 0, degenerate_run = 0;
    for (;;) {
        compute_potentials(cost);
        const bool bland = degenerate_run > stall_limit;
        int best_row = -1, best_col = -1;
        auto reduced = [&](Eigen::Index i, Eigen::Index j) {
            return cost(i, j) - potential_[static_cast<std::size_t>(i)] - potential_[static_cast<std::size_t>(n_ + j)];
        };
        if (bland) {
            for (Eigen::Index i = 0; i < n_ && best_row < 0; ++i)
                for (Eigen::Index j = 0; j < m_; ++j)
                    if (slot_of_(i, j) < 0 && reduced(i, j) < -rc_eps) {
                        best_row = static_cast<int>(i);
                        best_col = static_cast<int>(j);
                        break;
                    }
        } else {
            double best = -rc_eps;
            for (Eigen::Index j = 0; j < m_; ++j)
                for (Eigen::Index i = 0; i < n_; ++i) {
                    const double rc = reduced(i, j);
                    if (rc < best && slot_of_(i, j) < 0) {
                        best = rc;
                        best_row = static_cast<int>(i);
                        best_col = static_cast<int>(j);
                    }
                }
        }
        if (best_row < 0) break;
        if (++pivots > max_pivots) throw NumericalError("network simplex exceeded its pivot budget");

        pivot(best_row, best_col, bland);
        const double entered = basis_[static_cast<std::size_t>(slot_of_(best_row, best_col))].flow;
        degenerate_run = entered <= flow_eps_ ? degenerate_run + 1 : 0;
    }
    last_pivots_ = pivots;

    plan_ = Matrix::Zero(n_, m_);
    objective_ = 0.0;
    for (const auto& c : basis_) {
        plan_(c.row, c.col) = c.flow;
        objective_ += c.flow * cost(c.row, c.col);
    }
    return plan_;
}

namespace detail {

void check_transport_inputs(const Matrix& cost, const Vector& source, const Vector& target) {
    if (cost.rows() != source.size() || cost.cols() != target.size())
        throw InvalidArgument("transport cost shape does not match the marginals");
    if ((source.array() < 0.0).any() || (target.array() < 0.0).any())
        throw InvalidArgument("transport marginals must be non-negative");
    if (std::abs(source.sum() - 1.0) > 1e-9 || std::abs(target.sum() - 1.0) > 1e-9)
        throw InvalidArgument("transport marginals must sum to one");
    if (!cost.allFinite()) throw InvalidArgument("transport cost must be finite");
}

}  // namespace detail

EmdResult solve_emd(const Matrix& cost, const Vector& source, const Vector& target) {
    detail::check_transport_inputs(cost, source, target);
    TransportSimplex simplex(source, target);
    simplex.solve(cost);
    return {Coupling{simplex.plan(), source, target}, simplex.objective()};
}

EmdResult solve_emd(const CostMatrix& cost, const Vector& source, const Vector& target) {
    return solve_emd(cost.values, source, target);
}

}  // namespace fairgraph
