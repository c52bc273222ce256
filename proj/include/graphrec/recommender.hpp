#pragma once

#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "graphrec/graph.hpp"

namespace graphrec {

enum class PredictionMethod { GraphEvidence, PearsonCF };

struct Prediction {
    NodeId person = 0;
    NodeId item = 0;
    double score = 0.0;
    PredictionMethod method = PredictionMethod::GraphEvidence;
};

// One two-hop evidence term: rating of a neighboring node over its divisor.
struct EvidenceTerm {
    NodeId source;
    double rating;
    double divisor;
};

struct EvidenceBreakdown {
    std::vector<EvidenceTerm> case1_terms; // rated widget/keyword attached to the target
    std::vector<EvidenceTerm> case2_terms; // rated movie sharing a widget/keyword
    double total = 0.0;
};

struct ScorerOptions {
    // Divisor for indirect widget terms: a+1 (the per-item form) when true,
    // plain a otherwise.  The source material states both.
    bool widget_indirect_plus_one = true;
};

// Counts node visits made by a scorer; used for locality assertions and
// latency reporting.
struct TraversalStats {
    std::size_t node_visits = 0;
    void visit(std::size_t n = 1) { node_visits += n; }
};

namespace detail {
inline void note_visit(TraversalStats* stats, std::size_t n = 1) {
    if (stats) stats->visit(n);
}
} // namespace detail

// Two-hop evidence score for a movie the person has not consumed.
// Case 1: rated widgets/keywords attached to the movie, each r_x/(a+k+1).
// Case 2: rated movies sharing >=1 widget or keyword, each r_x/((a+k+1)*2),
// counted once per sharing movie.
inline std::optional<EvidenceBreakdown> score_unconsumed_movie(const Graph& graph, NodeId person,
                                                               NodeId movie,
                                                               TraversalStats* stats = nullptr) {
    if (graph.node(person).kind != NodeKind::Person)
        throw SchemaError("person id does not name a Person node");
    if (graph.node(movie).kind != NodeKind::Movie)
        throw SchemaError("movie id does not name a Movie node");
    if (graph.has_consumed(person, movie))
        throw PreconditionError("movie already consumed by person");

    const auto& widgets = graph.neighbors(movie, StructuralEdgeKind::BelongsTo);
    const auto& keywords = graph.neighbors(movie, StructuralEdgeKind::HasKeyword);
    const double divisor = static_cast<double>(widgets.size() + keywords.size() + 1);
    detail::note_visit(stats); // the movie itself

    EvidenceBreakdown out;
    std::set<NodeId> sharing; // distinct movies sharing a widget/keyword
    for (const auto* bucket : {&widgets, &keywords}) {
        StructuralEdgeKind hop =
            bucket == &widgets ? StructuralEdgeKind::BelongsTo : StructuralEdgeKind::HasKeyword;
        for (NodeId x : *bucket) {
            detail::note_visit(stats);
            if (auto r = aggregate_user_item_weight(graph, person, x))
                out.case1_terms.push_back({x, *r, divisor});
            for (NodeId other : graph.neighbors(x, hop)) {
                detail::note_visit(stats);
                if (other != movie) sharing.insert(other);
            }
        }
    }
    for (NodeId other : sharing) {
        if (auto r = aggregate_user_item_weight(graph, person, other))
            out.case2_terms.push_back({other, *r, divisor * 2.0});
    }
    if (out.case1_terms.empty() && out.case2_terms.empty()) return std::nullopt;
    for (const EvidenceTerm& t : out.case1_terms) out.total += t.rating / t.divisor;
    for (const EvidenceTerm& t : out.case2_terms) out.total += t.rating / t.divisor;
    return out;
}

// Widget score for ranking within a movie: a direct interaction is used as
// is (divisor 1); each rated movie the widget belongs to contributes
// r_x/(a+1), a = number of movies the widget belongs to.
inline EvidenceBreakdown score_widget_for_movie(const Graph& graph, NodeId person, NodeId widget,
                                                const ScorerOptions& opts = {},
                                                TraversalStats* stats = nullptr) {
    if (graph.node(person).kind != NodeKind::Person)
        throw SchemaError("person id does not name a Person node");
    if (graph.node(widget).kind != NodeKind::Widget)
        throw SchemaError("widget id does not name a Widget node");
    const auto& movies = graph.neighbors(widget, StructuralEdgeKind::BelongsTo);
    if (movies.empty()) throw PreconditionError("widget belongs to no movie");

    detail::note_visit(stats);
    EvidenceBreakdown out;
    if (auto r = aggregate_user_item_weight(graph, person, widget))
        out.case1_terms.push_back({widget, *r, 1.0});
    const double a = static_cast<double>(movies.size());
    const double divisor = opts.widget_indirect_plus_one ? a + 1.0 : a;
    for (NodeId m : movies) {
        detail::note_visit(stats);
        if (auto r = aggregate_user_item_weight(graph, person, m))
            out.case2_terms.push_back({m, *r, divisor});
    }
    for (const EvidenceTerm& t : out.case1_terms) out.total += t.rating / t.divisor;
    for (const EvidenceTerm& t : out.case2_terms) out.total += t.rating / t.divisor;
    return out;
}

// Fallback predictor: must return a final score for an evidence-free pair.
using FallbackPredictor = std::function<double(NodeId person, NodeId movie)>;

// Scores every unconsumed movie; graph evidence when present, CF fallback
// otherwise.  Sorted by score descending, ties by ascending movie id.
inline std::vector<Prediction> recommend_movies(const Graph& graph, NodeId person, std::size_t n,
                                                const FallbackPredictor& fallback,
                                                TraversalStats* stats = nullptr) {
    if (graph.node(person).kind != NodeKind::Person)
        throw NotFoundError("person id does not name a Person node");
    if (n < 1) throw ValidationError("n must be >= 1");
    std::vector<Prediction> preds;
    for (NodeId movie : graph.nodes_of_kind(NodeKind::Movie)) {
        if (graph.has_consumed(person, movie)) continue;
        if (auto ev = score_unconsumed_movie(graph, person, movie, stats))
            preds.push_back({person, movie, ev->total, PredictionMethod::GraphEvidence});
        else
            preds.push_back({person, movie, fallback(person, movie), PredictionMethod::PearsonCF});
    }
    std::sort(preds.begin(), preds.end(), [](const Prediction& x, const Prediction& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.item < y.item;
    });
    if (preds.size() > n) preds.resize(n);
    return preds;
}

// All widgets of the movie, best first; ties by ascending widget id.
inline std::vector<Prediction> rank_widgets(const Graph& graph, NodeId person, NodeId movie,
                                            const ScorerOptions& opts = {},
                                            TraversalStats* stats = nullptr) {
    if (graph.node(person).kind != NodeKind::Person)
        throw NotFoundError("person id does not name a Person node");
    if (graph.node(movie).kind != NodeKind::Movie)
        throw NotFoundError("movie id does not name a Movie node");
    std::vector<Prediction> preds;
    for (NodeId w : graph.neighbors(movie, StructuralEdgeKind::BelongsTo)) {
        EvidenceBreakdown ev = score_widget_for_movie(graph, person, w, opts, stats);
        preds.push_back({person, w, ev.total, PredictionMethod::GraphEvidence});
    }
    std::sort(preds.begin(), preds.end(), [](const Prediction& x, const Prediction& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.item < y.item;
    });
    return preds;
}

} // namespace graphrec
