#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphrec/errors.hpp"
#include "graphrec/interactions.hpp"
#include "graphrec/log.hpp"

namespace graphrec {

// In-memory property graph: typed nodes, undirected structural edges
// (HasKeyword, BelongsTo) and a multiset of person->item interactions.
// Append-only; NodeIds are dense and stable.
class Graph {
public:
    struct NodeRecord {
        NodeKind kind;
        std::string label;
    };

    // Idempotent per (kind, label): re-adding returns the existing id.
    NodeId add_node(NodeKind kind, const std::string& label) {
        if (label.empty()) throw ValidationError("node label must be non-empty");
        if (label.find('\t') != std::string::npos || label.find('\n') != std::string::npos)
            throw ValidationError("node label must not contain tabs or newlines");
        auto key = std::make_pair(kind, label);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        NodeId id = static_cast<NodeId>(nodes_.size());
        nodes_.push_back({kind, label});
        for (auto& adj : adjacency_) adj.emplace_back();
        index_.emplace(std::move(key), id);
        return id;
    }

    const NodeRecord& node(NodeId id) const {
        if (id >= nodes_.size()) throw NotFoundError("unknown node id " + std::to_string(id));
        return nodes_[id];
    }

    std::optional<NodeId> find_node(NodeKind kind, const std::string& label) const {
        auto it = index_.find({kind, label});
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t node_count() const { return nodes_.size(); }

    std::vector<NodeId> nodes_of_kind(NodeKind kind) const {
        std::vector<NodeId> out;
        for (NodeId i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].kind == kind) out.push_back(i);
        return out;
    }

    // Duplicate insertion is a no-op.
    void add_structural_edge(StructuralEdgeKind kind, NodeId a, NodeId b) {
        const NodeRecord& na = node(a);
        const NodeRecord& nb = node(b);
        bool ok;
        if (kind == StructuralEdgeKind::HasKeyword) {
            ok = (na.kind == NodeKind::Movie && nb.kind == NodeKind::Keyword) ||
                 (na.kind == NodeKind::Keyword && nb.kind == NodeKind::Movie);
        } else {
            ok = (na.kind == NodeKind::Widget && nb.kind == NodeKind::Movie) ||
                 (na.kind == NodeKind::Movie && nb.kind == NodeKind::Widget);
        }
        if (!ok) {
            throw SchemaError(std::string(to_string(kind)) + " cannot connect " +
                              to_string(na.kind) + " and " + to_string(nb.kind));
        }
        if (insert_sorted(adjacency_[index_of(kind)][a], b)) {
            insert_sorted(adjacency_[index_of(kind)][b], a);
            ++edge_counts_[index_of(kind)];
        }
    }

    // Ascending NodeId order.
    const std::vector<NodeId>& neighbors(NodeId n, StructuralEdgeKind kind) const {
        node(n);
        return adjacency_[index_of(kind)][n];
    }

    std::size_t degree(NodeId n, StructuralEdgeKind kind) const {
        return neighbors(n, kind).size();
    }

    std::size_t structural_edge_count(StructuralEdgeKind kind) const {
        return edge_counts_[index_of(kind)];
    }

    void add_interaction(InteractionEdge e) {
        const NodeRecord& p = node(e.person);
        const NodeRecord& t = node(e.item);
        if (p.kind != NodeKind::Person)
            throw SchemaError("interaction source must be a Person node");
        if (!interaction_legal(e.kind, t.kind))
            throw SchemaError(std::string("illegal interaction ") + to_string(e.kind) + " on " +
                              to_string(t.kind));
        if (e.kind == InteractionKind::Comment) {
            if (e.polarity < -1.0 || e.polarity > 1.0)
                throw ValidationError("comment polarity outside [-1, 1]");
        } else {
            e.polarity = 0.0;
        }
        std::size_t idx = interactions_.size();
        interactions_.push_back(e);
        by_pair_[pair_key(e.person, e.item)].push_back(idx);
        by_person_[e.person].push_back(idx);
    }

    const std::vector<InteractionEdge>& interactions() const { return interactions_; }

    // Indices into interactions() for one (person, item) pair.
    const std::vector<std::size_t>& interactions_between(NodeId person, NodeId item) const {
        node(person);
        node(item);
        auto it = by_pair_.find(pair_key(person, item));
        if (it == by_pair_.end()) return empty_indices_;
        return it->second;
    }

    const std::vector<std::size_t>& interactions_of(NodeId person) const {
        node(person);
        auto it = by_person_.find(person);
        if (it == by_person_.end()) return empty_indices_;
        return it->second;
    }

    bool has_consumed(NodeId person, NodeId item) const {
        for (std::size_t idx : interactions_between(person, item))
            if (interactions_[idx].kind == InteractionKind::Consume) return true;
        return false;
    }

    // Same nodes and structural edges, interactions filtered by `keep(index)`.
    template <typename Pred>
    Graph filtered_interactions(Pred keep) const {
        Graph g;
        g.nodes_ = nodes_;
        g.index_ = index_;
        g.adjacency_ = adjacency_;
        g.edge_counts_ = edge_counts_;
        for (std::size_t i = 0; i < interactions_.size(); ++i)
            if (keep(i)) g.add_interaction(interactions_[i]);
        return g;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + path);
        out << "#NODES\n";
        for (NodeId i = 0; i < nodes_.size(); ++i)
            out << i << '\t' << to_string(nodes_[i].kind) << '\t' << nodes_[i].label << '\n';
        out << "#SEDGES\n";
        for (StructuralEdgeKind kind :
             {StructuralEdgeKind::HasKeyword, StructuralEdgeKind::BelongsTo}) {
            for (NodeId a = 0; a < nodes_.size(); ++a)
                for (NodeId b : adjacency_[index_of(kind)][a])
                    if (a < b) out << to_string(kind) << '\t' << a << '\t' << b << '\n';
        }
        out << "#INTERACTIONS\n";
        for (const InteractionEdge& e : interactions_) {
            out << e.person << '\t' << e.item << '\t' << to_string(e.kind) << '\t'
                << format_polarity(e.polarity) << '\t' << e.timestamp << '\n';
        }
        if (!out) throw IoError("write failed: " + path);
    }

    static Graph load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open: " + path);
        Graph g;
        std::string line;
        int lineno = 0;
        int section = -1; // 0 nodes, 1 sedges, 2 interactions
        auto fail = [&](const std::string& msg) -> ParseError {
            return ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
        };
        bool saw_nodes = false, saw_sedges = false, saw_interactions = false;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            if (line == "#NODES") {
                if (saw_nodes) throw fail("duplicate #NODES section");
                saw_nodes = true;
                section = 0;
                continue;
            }
            if (line == "#SEDGES") {
                if (!saw_nodes || saw_sedges) throw fail("unexpected #SEDGES");
                saw_sedges = true;
                section = 1;
                continue;
            }
            if (line == "#INTERACTIONS") {
                if (!saw_sedges || saw_interactions) throw fail("unexpected #INTERACTIONS");
                saw_interactions = true;
                section = 2;
                continue;
            }
            std::vector<std::string> f = split_tabs(line);
            try {
                if (section == 0) {
                    if (f.size() != 3) throw fail("node line needs 3 fields");
                    NodeId id = parse_id(f[0], fail);
                    if (id != g.nodes_.size()) throw fail("node ids must be dense and ordered");
                    g.add_node(parse_node_kind(f[1], fail), f[2]);
                } else if (section == 1) {
                    if (f.size() != 3) throw fail("edge line needs 3 fields");
                    g.add_structural_edge(parse_edge_kind(f[0], fail), parse_id(f[1], fail),
                                          parse_id(f[2], fail));
                } else if (section == 2) {
                    if (f.size() != 5) throw fail("interaction line needs 5 fields");
                    InteractionEdge e;
                    e.person = parse_id(f[0], fail);
                    e.item = parse_id(f[1], fail);
                    e.kind = parse_interaction_kind(f[2], fail);
                    e.polarity = std::stod(f[3]);
                    e.timestamp = std::stoll(f[4]);
                    g.add_interaction(e);
                } else {
                    throw fail("content before #NODES header");
                }
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception& ex) {
                throw fail(ex.what());
            }
        }
        if (!saw_nodes || !saw_sedges || !saw_interactions)
            throw ParseError(path + ": truncated file, missing section header");
        return g;
    }

    // Referential integrity: every edge endpoint names an existing node of a
    // legal kind.  Violations are unreachable through the public API; this
    // re-checks after bulk mutation in tests.
    bool check_integrity() const {
        for (std::size_t k = 0; k < 2; ++k)
            for (NodeId a = 0; a < nodes_.size(); ++a)
                for (NodeId b : adjacency_[k][a])
                    if (b >= nodes_.size()) return false;
        for (const InteractionEdge& e : interactions_) {
            if (e.person >= nodes_.size() || e.item >= nodes_.size()) return false;
            if (nodes_[e.person].kind != NodeKind::Person) return false;
            if (!interaction_legal(e.kind, nodes_[e.item].kind)) return false;
        }
        return true;
    }

private:
    static std::size_t index_of(StructuralEdgeKind kind) {
        return kind == StructuralEdgeKind::HasKeyword ? 0 : 1;
    }

    static std::uint64_t pair_key(NodeId person, NodeId item) {
        return (static_cast<std::uint64_t>(person) << 32) | item;
    }

    static bool insert_sorted(std::vector<NodeId>& v, NodeId x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it != v.end() && *it == x) return false;
        v.insert(it, x);
        return true;
    }

    static std::string format_polarity(double p) {
        char buf[32];
        if (p == 0.0) return "0";
        std::snprintf(buf, sizeof buf, "%.17g", p);
        return buf;
    }

    static std::vector<std::string> split_tabs(const std::string& line) {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                out.push_back(line.substr(start));
                break;
            }
            out.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        return out;
    }

    template <typename Fail>
    static NodeId parse_id(const std::string& s, Fail fail) {
        try {
            std::size_t pos = 0;
            unsigned long v = std::stoul(s, &pos);
            if (pos != s.size()) throw fail("bad id: " + s);
            return static_cast<NodeId>(v);
        } catch (const std::logic_error&) {
            throw fail("bad id: " + s);
        }
    }

    template <typename Fail>
    static NodeKind parse_node_kind(const std::string& s, Fail fail) {
        if (s == "PERSON") return NodeKind::Person;
        if (s == "MOVIE") return NodeKind::Movie;
        if (s == "WIDGET") return NodeKind::Widget;
        if (s == "KEYWORD") return NodeKind::Keyword;
        throw fail("unknown node kind: " + s);
    }

    template <typename Fail>
    static StructuralEdgeKind parse_edge_kind(const std::string& s, Fail fail) {
        if (s == "HAS_KEYWORD") return StructuralEdgeKind::HasKeyword;
        if (s == "BELONGS_TO") return StructuralEdgeKind::BelongsTo;
        throw fail("unknown edge kind: " + s);
    }

    template <typename Fail>
    static InteractionKind parse_interaction_kind(const std::string& s, Fail fail) {
        if (s == "LIKE") return InteractionKind::Like;
        if (s == "DISLIKE") return InteractionKind::Dislike;
        if (s == "COMMENT") return InteractionKind::Comment;
        if (s == "CONSUME") return InteractionKind::Consume;
        if (s == "FULLSCREEN") return InteractionKind::FullScreen;
        if (s == "DISMISS") return InteractionKind::Dismiss;
        if (s == "SHOWMORE") return InteractionKind::ShowMore;
        throw fail("unknown interaction kind: " + s);
    }

    std::vector<NodeRecord> nodes_;
    std::map<std::pair<NodeKind, std::string>, NodeId> index_;
    std::array<std::vector<std::vector<NodeId>>, 2> adjacency_;
    std::array<std::size_t, 2> edge_counts_{0, 0};
    std::vector<InteractionEdge> interactions_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_pair_;
    std::unordered_map<NodeId, std::vector<std::size_t>> by_person_;
    inline static const std::vector<std::size_t> empty_indices_{};
};

// Sum of interaction contributions for one (person, item) pair, or nullopt
// when no interactions exist.  Contradictory Like+Dislike pairs are summed
// (cancelling to 0) and flagged in the log.
inline std::optional<double> aggregate_user_item_weight(const Graph& graph, NodeId person,
                                                        NodeId item) {
    const auto& idxs = graph.interactions_between(person, item);
    if (idxs.empty()) return std::nullopt;
    NodeKind target = graph.node(item).kind;
    double sum = 0.0;
    bool liked = false, disliked = false;
    for (std::size_t i : idxs) {
        const InteractionEdge& e = graph.interactions()[i];
        sum += interaction_contribution(e.kind, target, e.polarity);
        liked = liked || e.kind == InteractionKind::Like;
        disliked = disliked || e.kind == InteractionKind::Dislike;
    }
    if (liked && disliked) {
        log::warn("person " + std::to_string(person) + " both liked and disliked item " +
                  std::to_string(item));
    }
    return sum;
}

} // namespace graphrec
