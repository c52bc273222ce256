#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "graphrec/graph.hpp"
#include "graphrec/recommender.hpp"

namespace graphrec {

struct CfOptions {
    // Neighbors with exactly zero correlation contribute nothing to the
    // numerator but would inflate the denominator; excluded by default.
    bool include_zero_correlation = false;
};

// Read-only user x item rating view built once per training run.  Items are
// assets (movies and widgets); keyword comments stay out of CF profiles.
class RatingMatrixView {
public:
    static RatingMatrixView from_graph(const Graph& graph) {
        RatingMatrixView view;
        for (NodeId person : graph.nodes_of_kind(NodeKind::Person)) {
            std::map<NodeId, double> row;
            for (std::size_t idx : graph.interactions_of(person)) {
                NodeId item = graph.interactions()[idx].item;
                NodeKind k = graph.node(item).kind;
                if (k != NodeKind::Movie && k != NodeKind::Widget) continue;
                if (!row.count(item)) {
                    if (auto w = aggregate_user_item_weight(graph, person, item))
                        row[item] = *w;
                }
            }
            if (row.empty()) continue;
            double sum = 0.0;
            for (const auto& [item, w] : row) {
                sum += w;
                view.raters_of_[item].push_back(person);
                view.global_sum_ += w;
                ++view.global_count_;
            }
            view.means_[person] = sum / static_cast<double>(row.size());
            view.ratings_.emplace(person, std::move(row));
        }
        return view;
    }

    const std::map<NodeId, double>* ratings_of(NodeId person) const {
        auto it = ratings_.find(person);
        return it == ratings_.end() ? nullptr : &it->second;
    }

    std::optional<double> rating(NodeId person, NodeId item) const {
        auto it = ratings_.find(person);
        if (it == ratings_.end()) return std::nullopt;
        auto jt = it->second.find(item);
        if (jt == it->second.end()) return std::nullopt;
        return jt->second;
    }

    // Mean over ALL the person's rated items; nullopt when unrated.
    std::optional<double> mean(NodeId person) const {
        auto it = means_.find(person);
        if (it == means_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<double> global_mean() const {
        if (global_count_ == 0) return std::nullopt;
        return global_sum_ / static_cast<double>(global_count_);
    }

    // Ascending person ids.
    const std::vector<NodeId>& raters_of(NodeId item) const {
        auto it = raters_of_.find(item);
        return it == raters_of_.end() ? empty_ : it->second;
    }

    std::size_t person_count() const { return ratings_.size(); }

private:
    std::map<NodeId, std::map<NodeId, double>> ratings_;
    std::map<NodeId, double> means_;
    std::map<NodeId, std::vector<NodeId>> raters_of_;
    double global_sum_ = 0.0;
    std::size_t global_count_ = 0;
    inline static const std::vector<NodeId> empty_{};
};

// Pearson correlation over the co-rated items, centered on each user's
// whole-profile mean.  Undefined when fewer than 2 co-rated items or either
// side has zero deviation.
inline std::optional<double> pearson_correlation(const RatingMatrixView& view, NodeId a,
                                                 NodeId u) {
    if (a == u) throw PreconditionError("pearson_correlation needs distinct persons");
    const auto* ra = view.ratings_of(a);
    const auto* ru = view.ratings_of(u);
    if (!ra || !ru) return std::nullopt;
    const double mean_a = *view.mean(a);
    const double mean_u = *view.mean(u);
    double num = 0.0, den_a = 0.0, den_u = 0.0;
    std::size_t h = 0;
    for (const auto& [item, wa] : *ra) {
        auto it = ru->find(item);
        if (it == ru->end()) continue;
        ++h;
        const double da = wa - mean_a;
        const double du = it->second - mean_u;
        num += da * du;
        den_a += da * da;
        den_u += du * du;
    }
    if (h < 2 || den_a == 0.0 || den_u == 0.0) return std::nullopt;
    return num / std::sqrt(den_a * den_u);
}

namespace detail {

struct Neighbor {
    NodeId person;
    double correlation;
    double deviation; // r_uj - mean_u
};

inline std::vector<Neighbor> cf_neighbors(const RatingMatrixView& view, NodeId a, NodeId j,
                                          const CfOptions& opts, TraversalStats* stats) {
    std::vector<Neighbor> out;
    for (NodeId u : view.raters_of(j)) {
        if (u == a) continue;
        note_visit(stats); // the candidate neighbor
        note_visit(stats, view.ratings_of(u)->size()); // their profile, scanned for co-rated items
        auto c = pearson_correlation(view, a, u);
        if (!c) continue;
        if (*c == 0.0 && !opts.include_zero_correlation) continue;
        out.push_back({u, *c, *view.rating(u, j) - *view.mean(u)});
    }
    return out;
}

inline std::optional<double> weighted_average(const RatingMatrixView& view, NodeId a,
                                              const std::vector<Neighbor>& neighbors) {
    auto mean_a = view.mean(a);
    if (!mean_a || neighbors.empty()) return std::nullopt;
    double num = 0.0, den = 0.0;
    for (const Neighbor& n : neighbors) {
        num += n.deviation * n.correlation;
        den += std::fabs(n.correlation);
    }
    if (den == 0.0) return std::nullopt;
    return *mean_a + num / den;
}

} // namespace detail

// p_aj = mean_a + sum_u (r_uj - mean_u) c_au / sum_u |c_au| over users who
// rated j with a defined, nonzero correlation to a.
inline std::optional<double> predict_cf(const RatingMatrixView& view, NodeId a, NodeId j,
                                        const CfOptions& opts = {},
                                        TraversalStats* stats = nullptr) {
    return detail::weighted_average(view, a, detail::cf_neighbors(view, a, j, opts, stats));
}

// predict_cf restricted to the k neighbors with the highest |c_au|.
inline std::optional<double> knn_predict(const RatingMatrixView& view, NodeId a, NodeId j,
                                         std::size_t k, const CfOptions& opts = {},
                                         TraversalStats* stats = nullptr) {
    if (k < 1) throw ValidationError("k must be >= 1");
    auto neighbors = detail::cf_neighbors(view, a, j, opts, stats);
    if (neighbors.size() > k) {
        std::sort(neighbors.begin(), neighbors.end(),
                  [](const detail::Neighbor& x, const detail::Neighbor& y) {
                      double ax = std::fabs(x.correlation), ay = std::fabs(y.correlation);
                      if (ax != ay) return ax > ay;
                      return x.person < y.person;
                  });
        neighbors.resize(k);
    }
    return detail::weighted_average(view, a, neighbors);
}

// Cold-start default: the person's own mean, else the global training mean,
// else 0 on an empty view.
inline double cold_start_default(const RatingMatrixView& view, NodeId a) {
    if (auto m = view.mean(a)) return *m;
    if (auto g = view.global_mean()) return *g;
    return 0.0;
}

// Graph evidence when any exists, Pearson CF otherwise, cold-start default
// when CF is undefined too.
inline Prediction hybrid_predict(const Graph& graph, const RatingMatrixView& view, NodeId a,
                                 NodeId j, const CfOptions& opts = {},
                                 TraversalStats* stats = nullptr) {
    if (auto ev = score_unconsumed_movie(graph, a, j, stats))
        return {a, j, ev->total, PredictionMethod::GraphEvidence};
    auto p = predict_cf(view, a, j, opts, stats);
    return {a, j, p ? *p : cold_start_default(view, a), PredictionMethod::PearsonCF};
}

} // namespace graphrec
