#pragma once

#include <cstdint>
#include <string>

#include "graphrec/errors.hpp"

namespace graphrec {

using NodeId = std::uint32_t;

enum class NodeKind { Person, Movie, Widget, Keyword };

enum class StructuralEdgeKind { HasKeyword, BelongsTo };

enum class InteractionKind { Like, Dislike, Comment, Consume, FullScreen, Dismiss, ShowMore };

// person -> item event. polarity is meaningful only for Comment.
struct InteractionEdge {
    NodeId person = 0;
    NodeId item = 0;
    InteractionKind kind = InteractionKind::Like;
    double polarity = 0.0;
    std::int64_t timestamp = 0;
};

inline const char* to_string(NodeKind k) {
    switch (k) {
    case NodeKind::Person: return "PERSON";
    case NodeKind::Movie: return "MOVIE";
    case NodeKind::Widget: return "WIDGET";
    case NodeKind::Keyword: return "KEYWORD";
    }
    return "?";
}

inline const char* to_string(StructuralEdgeKind k) {
    return k == StructuralEdgeKind::HasKeyword ? "HAS_KEYWORD" : "BELONGS_TO";
}

inline const char* to_string(InteractionKind k) {
    switch (k) {
    case InteractionKind::Like: return "LIKE";
    case InteractionKind::Dislike: return "DISLIKE";
    case InteractionKind::Comment: return "COMMENT";
    case InteractionKind::Consume: return "CONSUME";
    case InteractionKind::FullScreen: return "FULLSCREEN";
    case InteractionKind::Dismiss: return "DISMISS";
    case InteractionKind::ShowMore: return "SHOWMORE";
    }
    return "?";
}

inline bool interaction_legal(InteractionKind kind, NodeKind target) {
    switch (target) {
    case NodeKind::Movie:
        return kind == InteractionKind::Like || kind == InteractionKind::Dislike ||
               kind == InteractionKind::Comment || kind == InteractionKind::Consume ||
               kind == InteractionKind::FullScreen;
    case NodeKind::Widget:
        return kind == InteractionKind::Like || kind == InteractionKind::Dislike ||
               kind == InteractionKind::Dismiss || kind == InteractionKind::ShowMore;
    case NodeKind::Keyword:
        return kind == InteractionKind::Comment;
    case NodeKind::Person:
        return false;
    }
    return false;
}

inline bool is_explicit(InteractionKind kind) {
    return kind == InteractionKind::Like || kind == InteractionKind::Dislike ||
           kind == InteractionKind::Comment;
}

// Signed weight of one interaction.  Explicit interactions carry their full
// polarity; implicit ones contribute p/(t-1) where t is the number of
// interaction types for the target kind (movies: 5, widgets: 4).
inline double interaction_contribution(InteractionKind kind, NodeKind target,
                                       double comment_polarity = 0.0) {
    if (!interaction_legal(kind, target)) {
        throw SchemaError(std::string("illegal interaction ") + to_string(kind) + " on " +
                          to_string(target));
    }
    switch (kind) {
    case InteractionKind::Like: return 1.0;
    case InteractionKind::Dislike: return -1.0;
    case InteractionKind::Comment:
        if (comment_polarity < -1.0 || comment_polarity > 1.0)
            throw ValidationError("comment polarity outside [-1, 1]");
        return comment_polarity;
    case InteractionKind::Consume: return 1.0 / 4.0;
    case InteractionKind::FullScreen: return 1.0 / 4.0;
    case InteractionKind::Dismiss: return -1.0 / 3.0;
    case InteractionKind::ShowMore: return 1.0 / 3.0;
    }
    throw SchemaError("unknown interaction kind");
}

} // namespace graphrec
