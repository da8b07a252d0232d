// Acceptance suite: one PASS/FAIL line per criterion. The exit status is 0
// whenever the suite ran to completion, so failing criteria are reported
// without failing the build; a crash or exception exits non-zero.
//
// Usage: acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fairgraph/embedding.hpp"
#include "fairgraph/experiment.hpp"
#include "fairgraph/metrics.hpp"
#include "fairgraph/ot.hpp"
#include "fairgraph/repair.hpp"
#include "support/oracles.hpp"

using namespace fairgraph;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 3) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
    return buffer;
}

std::string sci(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3g", v);
    return buffer;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sd(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
}

std::string summary(const std::vector<double>& v) { return fmt(mean(v)) + "+/-" + fmt(sd(v)); }

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

// ---------------------------------------------------------------------------

Outcome emd_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> size(1, 5);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = size(rng), m = size(rng);
        const Vector a = t % 2 ? uniform_weights(n) : oracle::random_simplex(n, rng);
        const Vector b = t % 3 ? uniform_weights(m) : oracle::random_simplex(m, rng);
        Matrix c = oracle::random_matrix(n, m, rng, 0.0, 10.0);
        if (t % 4 == 0) c = c.array().floor();
        const double got = solve_emd(c, a, b).objective;
        worst = std::max(worst, std::abs(got - oracle::transport_minimum(c, a, b)));
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-8 && elapsed < 10.0, "max |emd - enumeration| " + sci(worst) + ", " + fmt(elapsed, 2) + " s"};
}

Outcome gradient_check() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> size(2, 6);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const int n = size(rng), m = size(rng), d = size(rng);
        const Matrix rows_a = oracle::random_matrix(n, d, rng), rows_b = oracle::random_matrix(m, d, rng);
        RegularizedProblem p{cost_matrix(rows_a, rows_b, CostMetric::squared_euclidean), 0.5 + t * 0.25, {}};
        p.terms.push_back(source_image_smoothness(laplacian(oracle::random_symmetric_nonneg(n, rng)), rows_b, n));
        p.terms.push_back(target_image_smoothness(rows_a, laplacian(oracle::random_symmetric_nonneg(m, rng)), m));
        const Matrix x = oracle::random_coupling(uniform_weights(n), uniform_weights(m), rng);
        const Matrix g = p.gradient(x);
        for (int k = 0; k < 5; ++k) {
            const Matrix dir = oracle::random_matrix(n, m, rng, -1.0, 1.0);
            const double fd = oracle::central_difference([&](const Matrix& y) { return p.objective(y); }, x, dir);
            const double analytic = g.cwiseProduct(dir).sum();
            worst = std::max(worst, std::abs(fd - analytic) / std::max(1.0, std::abs(analytic)));
        }
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-4 && elapsed < 30.0, "max relative error " + sci(worst) + ", " + fmt(elapsed, 2) + " s"};
}

struct BiasStats {
    std::vector<double> ass_before, ass_after, rb_before, rb_after;
    double seconds = 0.0;
};

// Graph-level repair of a builtin graph: assortativity and representation
// bias of the node embedding before and after an EMD repair.
BiasStats bias_removal(const std::string& graph, int seeds) {
    const auto start = std::chrono::steady_clock::now();
    BiasStats s;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto u = static_cast<std::uint64_t>(seed);
        const AttributedGraph g = generate_sbm(builtin_sbm(graph, u));
        RepairConfig rc;
        rc.seed = u;
        const AttributedGraph repaired = repair(g, rc).repaired;
        EmbeddingConfig ec;
        ec.seed = u;
        s.ass_before.push_back(assortativity(g).value_or(0.0));
        s.ass_after.push_back(assortativity(repaired).value_or(0.0));
        s.rb_before.push_back(representation_bias(embed_graph(g, ec).values, g.labels(), 10, u).value);
        s.rb_after.push_back(representation_bias(embed_graph(repaired, ec).values, g.labels(), 10, u).value);
    }
    s.seconds = seconds_since(start);
    return s;
}

std::string describe(const BiasStats& s) {
    return "ass " + summary(s.ass_before) + " -> " + summary(s.ass_after) + ", RB " + summary(s.rb_before) + " -> " +
           summary(s.rb_after) + ", " + fmt(s.seconds, 1) + " s";
}

Outcome g1_bias() {
    const BiasStats s = bias_removal("G1", 20);
    const bool ok = within(mean(s.ass_before), 0.60, 0.88) && std::abs(mean(s.ass_after)) <= 0.15 &&
                    mean(s.rb_before) >= 0.85 && within(mean(s.rb_after), 0.38, 0.60) && s.seconds < 900.0;
    return {ok, describe(s)};
}

Outcome g2_noop() {
    const BiasStats s = bias_removal("G2", 20);
    const bool ok = within(mean(s.ass_after), -0.1, 0.1) && within(mean(s.rb_after), 0.35, 0.60) && s.seconds < 900.0;
    return {ok, describe(s)};
}

Outcome g3_imbalanced() {
    const BiasStats s = bias_removal("G3", 20);
    return {within(mean(s.ass_after), -0.15, 0.15), describe(s)};
}

Outcome g5_multiclass() {
    const BiasStats s = bias_removal("G5", 20);
    return {within(mean(s.ass_after), 0.15, 0.50) && mean(s.rb_after) >= 0.80, describe(s)};
}

ExperimentConfig base_config(const std::string& method) {
    ExperimentConfig cfg;
    cfg.name = "acceptance";
    cfg.graph = "G1";
    cfg.method = method;
    return cfg;
}

// At most one decrease, and that one no larger than 0.02.
bool non_decreasing_with_slack(const std::vector<double>& v) {
    int inversions = 0;
    double largest = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1]) ++inversions, largest = std::max(largest, v[i - 1] - v[i]);
    return inversions == 0 || (inversions == 1 && largest <= 0.02);
}

std::string series(const std::vector<double>& v) {
    std::string out;
    for (double x : v) out += (out.empty() ? "" : " ") + fmt(x, 4);
    return out;
}

Outcome lambda_sweep() {
    const std::vector<double> lambdas{0.0, 0.005, 1.0, 5.0};
    ExperimentConfig cfg = base_config("laplacian");
    std::vector<double> ass(lambdas.size(), 0.0), cons(lambdas.size(), 0.0);
    const int seeds = 10;
    for (int seed = 0; seed < seeds; ++seed)
        for (std::size_t l = 0; l < lambdas.size(); ++l) {
            const FairnessReport r = run_single(cfg, static_cast<std::uint64_t>(seed), lambdas[l]);
            ass[l] += r.assortativity.value_or(0.0) / seeds;
            cons[l] += r.consistency / seeds;
        }
    return {non_decreasing_with_slack(ass) && non_decreasing_with_slack(cons),
            "assortativity [" + series(ass) + "], consistency [" + series(cons) + "]"};
}

// Pairwise heuristics scored on every node pair of a graph.
struct Predictor {
    std::string name;
    std::function<std::vector<int>(const AttributedGraph&, const std::vector<NodePair>&)> predict;
};

std::vector<Predictor> heuristics() {
    auto degree_of = [](const Matrix& a) { return Vector(a.rowwise().sum()); };
    return {
        {"adjacency",
         [](const AttributedGraph& g, const std::vector<NodePair>& pairs) {
             std::vector<int> h;
             for (auto [u, v] : pairs) h.push_back(g.adjacency()(u, v) > 0.0);
             return h;
         }},
        {"common-neighbours",
         [](const AttributedGraph& g, const std::vector<NodePair>& pairs) {
             const Matrix a2 = g.adjacency() * g.adjacency();
             std::vector<int> h;
             for (auto [u, v] : pairs) h.push_back(a2(u, v) >= 1.0);
             return h;
         }},
        {"jaccard",
         [degree_of](const AttributedGraph& g, const std::vector<NodePair>& pairs) {
             const Matrix a2 = g.adjacency() * g.adjacency();
             const Vector d = degree_of(g.adjacency());
             std::vector<int> h;
             for (auto [u, v] : pairs) {
                 const double uni = d(u) + d(v) - a2(u, v);
                 h.push_back(uni > 0.0 && a2(u, v) / uni >= 0.1);
             }
             return h;
         }},
        {"adamic-adar",
         [degree_of](const AttributedGraph& g, const std::vector<NodePair>& pairs) {
             const Matrix& a = g.adjacency();
             const Vector d = degree_of(a);
             Vector inv_log(d.size());
             for (Eigen::Index w = 0; w < d.size(); ++w) inv_log(w) = d(w) > 1.0 ? 1.0 / std::log(d(w)) : 0.0;
             const Matrix aa = a * inv_log.asDiagonal() * a;
             std::vector<int> h;
             for (auto [u, v] : pairs) h.push_back(aa(u, v) >= 0.5);
             return h;
         }},
        {"preferential-attachment",
         [degree_of](const AttributedGraph& g, const std::vector<NodePair>& pairs) {
             const Vector d = degree_of(g.adjacency());
             std::vector<double> prod;
             for (auto [u, v] : pairs) prod.push_back(d(u) * d(v));
             std::vector<double> sorted = prod;
             std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
             const double median = sorted[sorted.size() / 2];
             std::vector<int> h;
             for (double p : prod) h.push_back(p > median);
             return h;
         }},
    };
}

struct TheoremSuite {
    int cases = 0, gated = 0, theorem_fail = 0, corollary_fail = 0, vacuous = 0;
    double worst_gap = -1.0;  // max di_xor - di_s over gated cases
    double worst_slack = -1.0;  // max BER - bound over gated cases
};

// Balanced two-block SBM draws with random assortative probabilities.
const TheoremSuite& theorem_suite() {
    static TheoremSuite suite = [] {
        TheoremSuite s;
        std::mt19937_64 rng(1234);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const auto predictors = heuristics();
        for (int draw = 0; draw < 100; ++draw) {
            SbmSpec spec;
            const int half = 30 + draw % 21;
            spec.block_sizes = {half, half};
            const double p_in = 0.08 + 0.3 * unit(rng);
            const double p_out = p_in * (0.05 + 0.9 * unit(rng));
            spec.probabilities = Matrix::Constant(2, 2, p_out);
            spec.probabilities(0, 0) = spec.probabilities(1, 1) = p_in;
            spec.seed = rng();
            const AttributedGraph g = generate_sbm(spec);
            std::vector<NodePair> pairs;
            for (int i = 0; i < g.size(); ++i)
                for (int j = i + 1; j < g.size(); ++j) pairs.emplace_back(i, j);
            for (const Predictor& p : predictors) {
                ++s.cases;
                const Theorem1Report r = check_theorem1(g, pairs, p.predict(g, pairs));
                if (!r.gated()) continue;
                ++s.gated;
                if (!r.measures.di_xor || !r.measures.di_s) {
                    ++s.vacuous;
                    continue;
                }
                s.worst_gap = std::max(s.worst_gap, *r.measures.di_xor - *r.measures.di_s);
                if (!r.inequality) ++s.theorem_fail;
                const double tau = *r.measures.di_s;
                s.worst_slack = std::max(s.worst_slack, r.measures.ber_xor - corollary1_bound(r.measures.p1, tau));
                if (!check_corollary1(r, tau)) ++s.corollary_fail;
            }
        }
        return s;
    }();
    return suite;
}

Outcome theorem1() {
    const TheoremSuite& s = theorem_suite();
    return {s.gated > 0 && s.theorem_fail == 0,
            std::to_string(s.gated) + "/" + std::to_string(s.cases) + " gated (" + std::to_string(s.vacuous) +
                " with undefined ratios), violations " + std::to_string(s.theorem_fail) + ", max di_xor - di_s " +
                sci(s.worst_gap)};
}

Outcome corollary1() {
    const TheoremSuite& s = theorem_suite();
    return {s.gated > 0 && s.corollary_fail == 0,
            "violations " + std::to_string(s.corollary_fail) + ", max BER - bound " + sci(s.worst_slack)};
}

Outcome link_prediction() {
    std::vector<double> none, emd, rnd;
    for (int seed = 0; seed < 10; ++seed) {
        const auto u = static_cast<std::uint64_t>(seed);
        none.push_back(run_single(base_config("none"), u, 0.0).link_auc);
        emd.push_back(run_single(base_config("emd"), u, 0.0).link_auc);
        rnd.push_back(run_single(base_config("random"), u, 0.0).link_auc);
    }
    return {mean(none) >= 0.80 && mean(emd) >= mean(rnd) + 0.05,
            "AUC none " + summary(none) + ", emd " + summary(emd) + ", random " + summary(rnd)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / "fairgraph_acceptance";
    std::filesystem::remove_all(root);
    ExperimentConfig cfg = base_config("laplacian");
    cfg.lambdas = {0.0, 1.0};
    cfg.seeds = {1, 2};
    cfg.jobs = 2;
    cfg.out_dir = (root / "first").string();
    const PipelineSummary a = run_pipeline(cfg);
    cfg.out_dir = (root / "second").string();
    const PipelineSummary b = run_pipeline(cfg);
    const std::string x = slurp(a.directory / "aggregate.csv"), y = slurp(b.directory / "aggregate.csv");
    std::filesystem::remove_all(root);
    return {!x.empty() && x == y && a.failures() == 0,
            std::to_string(x.size()) + " bytes, " + (x == y ? "identical" : "different") + ", failures " +
                std::to_string(a.failures() + b.failures())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"OT oracle equivalence", emd_oracle},
        {"gradient correctness", gradient_check},
        {"G1 bias removal", g1_bias},
        {"G2 no-op on unbiased graph", g2_noop},
        {"G3 imbalanced groups", g3_imbalanced},
        {"G5 multi-class", g5_multiclass},
        {"lambda monotonicity", lambda_sweep},
        {"Theorem 1 property suite", theorem1},
        {"Corollary 1 bound", corollary1},
        {"edge-prediction sanity", link_prediction},
        {"pipeline determinism", determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

    int passed = 0, run = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!wanted.empty() && !wanted.count(id)) continue;
        const Outcome o = criteria[i].second();
        ++run;
        passed += o.pass;
        std::cout << "criterion " << id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    std::cout << passed << '/' << run << " criteria passed" << std::endl;
    return 0;
}
