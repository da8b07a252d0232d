#include "fairgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "fairgraph/error.hpp"

namespace fairgraph {

DiBer di_ber(const std::vector<int>& predictions, const std::vector<int>& s_u, const std::vector<int>& s_v) {
    if (predictions.size() != s_u.size() || predictions.size() != s_v.size())
        throw InvalidArgument("di_ber: predictions and pair labels differ in length");
    int groups = 0;
    for (std::size_t i = 0; i < s_u.size(); ++i) groups = std::max({groups, s_u[i] + 1, s_v[i] + 1});

    double cross = 0.0, cross_pos = 0.0, same = 0.0, same_pos = 0.0;
    std::vector<double> seen(static_cast<std::size_t>(groups), 0.0), positive(static_cast<std::size_t>(groups), 0.0);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double h = predictions[i] ? 1.0 : 0.0;
        if (s_u[i] != s_v[i]) cross += 1.0, cross_pos += h;
        else same += 1.0, same_pos += h;
        for (int s : {s_u[i], s_v[i]}) {
            seen[static_cast<std::size_t>(s)] += 1.0;
            positive[static_cast<std::size_t>(s)] += h;
        }
    }
    if (cross == 0.0) throw UndefinedMetric("di_ber: no cross-group pair");
    if (same == 0.0) throw UndefinedMetric("di_ber: no same-group pair");

    DiBer out;
    out.p1 = cross_pos / cross;
    out.p0 = same_pos / same;
    out.ber_xor = (out.p1 - out.p0 + 1.0) / 2.0;
    if (out.p0 > 0.0) out.di_xor = out.p1 / out.p0;
    double low = 1.0, high = 0.0;
    for (std::size_t s = 0; s < seen.size(); ++s) {
        const double rate = seen[s] > 0.0 ? positive[s] / seen[s] : 0.0;
        out.group_rates.push_back(rate);
        if (seen[s] > 0.0) low = std::min(low, rate), high = std::max(high, rate);
    }
    if (high > 0.0) out.di_s = low / high;
    return out;
}

DiBer di_ber(const std::vector<int>& predictions, const EdgeDataset& data) { return di_ber(predictions, data.s_u, data.s_v); }

std::vector<int> threshold(const Vector& probabilities, double cut) {
    std::vector<int> out(static_cast<std::size_t>(probabilities.size()));
    for (Eigen::Index i = 0; i < probabilities.size(); ++i) out[static_cast<std::size_t>(i)] = probabilities(i) >= cut ? 1 : 0;
    return out;
}

RepresentationBias representation_bias(const Matrix& z, const std::vector<int>& labels, int folds, std::uint64_t seed,
                                       const LogRegOptions& options) {
    const auto n = labels.size();
    if (static_cast<std::size_t>(z.rows()) != n) throw InvalidArgument("representation_bias: row and label counts differ");
    if (folds < 2 || n < static_cast<std::size_t>(folds)) throw InvalidArgument("representation_bias: need N >= folds >= 2");
    const int classes = *std::max_element(labels.begin(), labels.end()) + 1;
    if (classes < 2) throw InvalidArgument("representation_bias: need at least two labels");

    // Stratified fold assignment.
    std::mt19937_64 rng(seed);
    std::vector<int> fold_of(n);
    for (int c = 0; c < classes; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (labels[i] == c) members.push_back(i);
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t k = 0; k < members.size(); ++k) fold_of[members[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }

    RepresentationBias out;
    const std::vector<int> targets = classes == 2 ? std::vector<int>{1} : [&] {
        std::vector<int> all(static_cast<std::size_t>(classes));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }();
    double class_total = 0.0;
    int class_count = 0;
    for (int target : targets) {
        double fold_total = 0.0;
        int used = 0;
        for (int f = 0; f < folds; ++f) {
            std::vector<Eigen::Index> train_rows, test_rows;
            std::vector<int> y_train, y_test;
            for (std::size_t i = 0; i < n; ++i) {
                const int y = labels[i] == target ? 1 : 0;
                if (fold_of[i] == f) test_rows.push_back(static_cast<Eigen::Index>(i)), y_test.push_back(y);
                else train_rows.push_back(static_cast<Eigen::Index>(i)), y_train.push_back(y);
            }
            const auto has_both = [](const std::vector<int>& y) {
                return std::find(y.begin(), y.end(), 0) != y.end() && std::find(y.begin(), y.end(), 1) != y.end();
            };
            if (!has_both(y_test) || !has_both(y_train)) {
                out.warnings.push_back("fold " + std::to_string(f) + " skipped for label " + std::to_string(target) +
                                       ": single class");
                continue;
            }
            const Classifier clf = train_logreg(z(train_rows, Eigen::all), y_train, options);
            fold_total += auc(clf.decision(z(test_rows, Eigen::all)), y_test);
            ++used;
        }
        if (used == 0) continue;
        class_total += fold_total / used;
        ++class_count;
        out.folds_used += used;
    }
    if (class_count == 0) throw UndefinedMetric("representation_bias: every fold had a single class");
    out.value = class_total / class_count;
    return out;
}

double consistency(const Vector& scores, const Matrix& features, int k) {
    const Eigen::Index t = scores.size();
    if (features.rows() != t) throw InvalidArgument("consistency: score and feature counts differ");
    if (k <= 0 || t < k + 1) throw InvalidArgument("consistency: need at least k + 1 pairs");
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(t - 1));
    double total = 0.0;
    for (Eigen::Index e = 0; e < t; ++e) {
        std::size_t m = 0;
        for (Eigen::Index o = 0; o < t; ++o)
            if (o != e) dist[m++] = {(features.row(o) - features.row(e)).squaredNorm(), o};
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        for (int j = 0; j < k; ++j) total += std::abs(scores(e) - scores(dist[static_cast<std::size_t>(j)].second));
    }
    return 1.0 - total / (static_cast<double>(t) * k);
}

Theorem1Report check_theorem1(const AttributedGraph& g, const std::vector<NodePair>& pairs,
                              const std::vector<int>& predictions, double balance_tolerance) {
    if (g.num_groups() != 2) throw InvalidArgument("check_theorem1 needs a binary sensitive attribute");
    if (pairs.size() != predictions.size()) throw InvalidArgument("check_theorem1: pairs and predictions differ in length");
    std::vector<int> s_u, s_v;
    double within[2] = {0, 0}, within_pos[2] = {0, 0}, cross = 0, cross_pos = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const int a = g.label(pairs[i].first), b = g.label(pairs[i].second);
        s_u.push_back(a);
        s_v.push_back(b);
        const double h = predictions[i] ? 1.0 : 0.0;
        if (a == b) within[a] += 1, within_pos[a] += h;
        else cross += 1, cross_pos += h;
    }

    Theorem1Report report;
    report.measures = di_ber(predictions, s_u, s_v);
    const auto sizes = g.group_sizes();
    report.a1_ok = std::abs(sizes[0] - sizes[1]) <= balance_tolerance * g.size();
    const double cross_rate = cross > 0 ? cross_pos / cross : 0.0;
    report.a2_ok = within[0] > 0 && within[1] > 0 && within_pos[0] / within[0] >= cross_rate &&
                   within_pos[1] / within[1] >= cross_rate;
    // Undefined ratios (no positive prediction at all) make the claim vacuous.
    const auto& m = report.measures;
    report.inequality = !m.di_xor || !m.di_s || *m.di_xor <= *m.di_s + 1e-9;
    return report;
}

double corollary1_bound(double p1, double tau) { return 0.5 - 0.5 * p1 * (1.0 / tau - 1.0); }

bool check_corollary1(const Theorem1Report& report, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("check_corollary1: tau must lie in (0, 1]");
    if (report.measures.di_s && *report.measures.di_s > tau + 1e-12)
        throw InvalidArgument("check_corollary1: measured di_s exceeds tau");
    return report.measures.ber_xor <= corollary1_bound(report.measures.p1, tau) + 1e-9;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }
std::optional<double> optional_value(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

std::string number(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.10g", v);
    return buffer;
}
std::string number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

}  // namespace

void to_json(nlohmann::json& j, const FairnessReport& r) {
    j = nlohmann::json{{"graph", r.graph},
                       {"method", r.method},
                       {"lambda", r.lambda},
                       {"seed", r.seed},
                       {"di_xor", optional_json(r.di_xor)},
                       {"di_s", optional_json(r.di_s)},
                       {"ber_xor", r.ber_xor},
                       {"p1", r.p1},
                       {"p0", r.p0},
                       {"rb", r.rb},
                       {"consistency", r.consistency},
                       {"assortativity", optional_json(r.assortativity)},
                       {"link_auc", r.link_auc},
                       {"added_mass", r.added_mass}};
}

void from_json(const nlohmann::json& j, FairnessReport& r) {
    r.graph = j.value("graph", "");
    r.method = j.value("method", "");
    r.lambda = j.value("lambda", 0.0);
    r.seed = j.value("seed", std::uint64_t{0});
    r.di_xor = optional_value(j, "di_xor");
    r.di_s = optional_value(j, "di_s");
    r.ber_xor = j.at("ber_xor").get<double>();
    r.p1 = j.at("p1").get<double>();
    r.p0 = j.at("p0").get<double>();
    r.rb = j.at("rb").get<double>();
    r.consistency = j.at("consistency").get<double>();
    r.assortativity = optional_value(j, "assortativity");
    r.link_auc = j.at("link_auc").get<double>();
    r.added_mass = j.value("added_mass", 0.0);
}

std::string fairness_csv_header() {
    return "graph,method,lambda,seed,di_xor,di_s,ber_xor,p1,p0,rb,consistency,assortativity,link_auc,added_mass";
}

std::string fairness_csv_row(const FairnessReport& r) {
    return r.graph + ',' + r.method + ',' + number(r.lambda) + ',' + std::to_string(r.seed) + ',' + number(r.di_xor) + ',' +
           number(r.di_s) + ',' + number(r.ber_xor) + ',' + number(r.p1) + ',' + number(r.p0) + ',' + number(r.rb) + ',' +
           number(r.consistency) + ',' + number(r.assortativity) + ',' + number(r.link_auc) + ',' + number(r.added_mass);
}

}  // namespace fairgraph
