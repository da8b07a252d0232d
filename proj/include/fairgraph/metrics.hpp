#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairgraph/graph.hpp"
#include "fairgraph/predict.hpp"

namespace fairgraph {

struct DiBer {
    std::optional<double> di_xor;  // p1 / p0, nullopt when p0 == 0
    std::optional<double> di_s;    // lowest / highest one-sided group rate
    double ber_xor = 0.5;
    double p1 = 0.0;  // positive rate among cross-group pairs
    double p0 = 0.0;  // positive rate among same-group pairs
    std::vector<double> group_rates;  // P(h = 1 | S = s), both orderings of every pair
};

/// Group fairness of binary pair predictions. Throws UndefinedMetric when
/// there is no cross-group or no same-group pair.
DiBer di_ber(const std::vector<int>& predictions, const std::vector<int>& s_u, const std::vector<int>& s_v);
DiBer di_ber(const std::vector<int>& predictions, const EdgeDataset& data);

/// Predictions thresholded at 0.5.
std::vector<int> threshold(const Vector& probabilities, double cut = 0.5);

struct RepresentationBias {
    double value = 0.5;
    int folds_used = 0;
    std::vector<std::string> warnings;
};

/// Mean AUC of stratified k-fold logistic regression predicting the label
/// from the rows of `z`; one-vs-rest mean for more than two labels. Folds with
/// a single class are skipped and reported in `warnings`.
RepresentationBias representation_bias(const Matrix& z, const std::vector<int>& labels, int folds = 10,
                                       std::uint64_t seed = 0, const LogRegOptions& options = {});

/// 1 - mean |score(e) - score(e')| over the k nearest pairs e' of each pair e
/// in feature space (Euclidean, ties to the lower index).
double consistency(const Vector& scores, const Matrix& features, int k = 10);

struct Theorem1Report {
    DiBer measures;
    bool a1_ok = false;       // balanced groups
    bool a2_ok = false;       // within-group rate >= cross-group rate for both groups
    bool inequality = false;  // di_xor <= di_s + 1e-9
    bool gated() const { return a1_ok && a2_ok; }
    /// The inequality is only claimed under the assumptions.
    bool holds() const { return !gated() || inequality; }
};

/// Checks both assumptions and the inequality on the given pairs. Requires a
/// binary label.
Theorem1Report check_theorem1(const AttributedGraph& g, const std::vector<NodePair>& pairs,
                              const std::vector<int>& predictions, double balance_tolerance = 0.05);

/// 1/2 - (p1 / 2)(1 / tau - 1).
double corollary1_bound(double p1, double tau);

/// ber_xor <= corollary1_bound(p1, tau) + 1e-9. Throws InvalidArgument when
/// tau is outside (0, 1] or below the measured di_s.
bool check_corollary1(const Theorem1Report& report, double tau);

struct FairnessReport {
    std::string graph;
    std::string method;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> di_xor;
    std::optional<double> di_s;
    double ber_xor = 0.5;
    double p1 = 0.0;
    double p0 = 0.0;
    double rb = 0.5;
    double consistency = 1.0;
    std::optional<double> assortativity;
    double link_auc = 0.5;
    double added_mass = 0.0;
};

void to_json(nlohmann::json& j, const FairnessReport& r);
void from_json(const nlohmann::json& j, FairnessReport& r);

std::string fairness_csv_header();
std::string fairness_csv_row(const FairnessReport& r);

}  // namespace fairgraph
