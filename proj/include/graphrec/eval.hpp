#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "graphrec/cf.hpp"
#include "graphrec/graph.hpp"

namespace graphrec {

struct SplitConfig {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

struct TestPair {
    NodeId person;
    NodeId movie;
    double true_weight;
};

struct Split {
    Graph train;
    std::vector<TestPair> test;
};

inline bool is_rating_interaction(const Graph& g, const InteractionEdge& e) {
    return is_explicit(e.kind) && g.node(e.item).kind == NodeKind::Movie;
}

// Holds out a random share of the explicit person->movie interactions.
// Structural edges and all other interactions stay in the training graph.
// Train size = floor(train_fraction * n); remainder goes to test.
inline Split split(const Graph& graph, const SplitConfig& config) {
    if (config.train_fraction <= 0.0 || config.train_fraction >= 1.0)
        throw ValidationError("train_fraction must lie in (0, 1)");
    std::vector<std::size_t> rating_idx;
    for (std::size_t i = 0; i < graph.interactions().size(); ++i)
        if (is_rating_interaction(graph, graph.interactions()[i])) rating_idx.push_back(i);
    if (rating_idx.empty()) throw ValidationError("graph has no rating interactions to split");

    std::mt19937_64 rng(config.seed);
    std::shuffle(rating_idx.begin(), rating_idx.end(), rng);
    std::size_t n_train =
        static_cast<std::size_t>(std::floor(config.train_fraction * rating_idx.size()));
    std::vector<bool> held_out(graph.interactions().size(), false);
    for (std::size_t i = n_train; i < rating_idx.size(); ++i) held_out[rating_idx[i]] = true;

    Split out;
    out.train = graph.filtered_interactions([&](std::size_t i) { return !held_out[i]; });

    std::map<std::pair<NodeId, NodeId>, double> truth;
    for (std::size_t i = 0; i < graph.interactions().size(); ++i) {
        if (!held_out[i]) continue;
        const InteractionEdge& e = graph.interactions()[i];
        truth[{e.person, e.item}] +=
            interaction_contribution(e.kind, graph.node(e.item).kind, e.polarity);
    }
    for (const auto& [key, w] : truth) out.test.push_back({key.first, key.second, w});
    return out;
}

struct MetricsReport {
    double mae = 0.0;
    double rmse = 0.0;
    double mpe_percent = 0.0; // MAE as a percentage of the scale width 2
    std::size_t n_predictions = 0;
    std::size_t n_undefined = 0;
};

inline double mpe_from_mae(double mae) { return 100.0 * mae / 2.0; }

// Predictor returns nullopt when it has no basis for a prediction; the
// cold-start default is substituted so every algorithm is scored on the
// full test set.
using EvalPredictor = std::function<std::optional<double>(NodeId person, NodeId movie)>;
using ColdDefault = std::function<double(NodeId person)>;

inline MetricsReport evaluate(const EvalPredictor& predictor, const ColdDefault& cold_default,
                              const std::vector<TestPair>& test) {
    if (test.empty()) throw ValidationError("empty test set");
    MetricsReport r;
    double abs_sum = 0.0, sq_sum = 0.0;
    for (const TestPair& t : test) {
        auto p = predictor(t.person, t.movie);
        double value;
        if (p) {
            value = *p;
        } else {
            value = cold_default(t.person);
            ++r.n_undefined;
        }
        double err = value - t.true_weight;
        abs_sum += std::fabs(err);
        sq_sum += err * err;
    }
    r.n_predictions = test.size();
    r.mae = abs_sum / static_cast<double>(test.size());
    r.rmse = std::sqrt(sq_sum / static_cast<double>(test.size()));
    r.mpe_percent = mpe_from_mae(r.mae);
    return r;
}

struct AlgorithmReport {
    std::string algorithm;
    MetricsReport metrics;
};

struct CompareConfig {
    std::size_t knn_k = 20;
    CfOptions cf;
};

// knn, pearson and sam_hybrid over the identical split.
inline std::vector<AlgorithmReport> compare_algorithms(const Graph& train,
                                                       const std::vector<TestPair>& test,
                                                       const CompareConfig& config = {}) {
    RatingMatrixView view = RatingMatrixView::from_graph(train);
    ColdDefault cold = [&](NodeId a) { return cold_start_default(view, a); };

    EvalPredictor knn = [&](NodeId a, NodeId j) {
        return knn_predict(view, a, j, config.knn_k, config.cf);
    };
    EvalPredictor pearson = [&](NodeId a, NodeId j) { return predict_cf(view, a, j, config.cf); };
    EvalPredictor sam = [&](NodeId a, NodeId j) -> std::optional<double> {
        if (!train.has_consumed(a, j)) {
            if (auto ev = score_unconsumed_movie(train, a, j)) return ev->total;
        }
        return predict_cf(view, a, j, config.cf);
    };

    return {
        {"knn", evaluate(knn, cold, test)},
        {"pearson", evaluate(pearson, cold, test)},
        {"sam_hybrid", evaluate(sam, cold, test)},
    };
}

// TSV report, 4 decimal places.
inline std::string format_report(const std::vector<AlgorithmReport>& reports) {
    std::string out = "algorithm\tmae\trmse\tmpe_percent\tn_predictions\tn_undefined\n";
    char buf[160];
    for (const AlgorithmReport& r : reports) {
        std::snprintf(buf, sizeof buf, "%s\t%.4f\t%.4f\t%.4f\t%zu\t%zu\n", r.algorithm.c_str(),
                      r.metrics.mae, r.metrics.rmse, r.metrics.mpe_percent,
                      r.metrics.n_predictions, r.metrics.n_undefined);
        out += buf;
    }
    return out;
}

struct LatencyReport {
    std::size_t requests_completed = 0;
    double mean_ms = 0.0;
    double mean_node_visits = 0.0;
    bool aborted = false;
};

// Issues `requests` recommendation requests for uniformly sampled persons
// and reports mean wall-clock latency plus visit-count statistics.  On a
// predictor failure the partial stats collected so far are returned with
// aborted set.
template <typename RequestFn>
inline LatencyReport bench_latency(RequestFn&& request, const std::vector<NodeId>& persons,
                                   std::size_t requests, std::uint64_t seed = 0) {
    if (requests < 1) throw ValidationError("requests must be >= 1");
    if (persons.empty()) throw ValidationError("no persons to sample");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, persons.size() - 1);
    LatencyReport out;
    double total_ms = 0.0;
    double total_visits = 0.0;
    for (std::size_t i = 0; i < requests; ++i) {
        NodeId person = persons[pick(rng)];
        TraversalStats stats;
        auto t0 = std::chrono::steady_clock::now();
        try {
            request(person, stats);
        } catch (const std::exception& ex) {
            log::warn(std::string("bench request failed: ") + ex.what());
            out.aborted = true;
            break;
        }
        auto t1 = std::chrono::steady_clock::now();
        total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
        total_visits += static_cast<double>(stats.node_visits);
        ++out.requests_completed;
    }
    if (out.requests_completed > 0) {
        out.mean_ms = total_ms / static_cast<double>(out.requests_completed);
        out.mean_node_visits = total_visits / static_cast<double>(out.requests_completed);
    }
    return out;
}

} // namespace graphrec
