#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graphrec/graph.hpp"

namespace graphrec {

enum class RatingMode { Linear, Binary };

struct RatingRow {
    std::int64_t user_id;
    std::int64_t movie_id;
    double stars;
    std::int64_t timestamp;
};

struct MovieRow {
    std::int64_t movie_id;
    std::string title;
};

struct TagRow {
    std::int64_t user_id;
    std::int64_t movie_id;
    std::string tag;
    std::int64_t timestamp;
};

struct RawDataset {
    std::vector<RatingRow> ratings;
    std::vector<MovieRow> movies;
    std::vector<TagRow> tags;
};

struct SampleSpec {
    std::size_t n_movies = 1;
    std::uint64_t seed = 0;
    bool include_tags = true;
};

// [0.5, 5.0] stars onto [-1, +1]; midpoint 2.75 maps to 0.
inline double map_rating_to_weight(double stars, RatingMode mode = RatingMode::Linear) {
    if (stars < 0.5 || stars > 5.0)
        throw ValidationError("stars out of range [0.5, 5.0]: " + std::to_string(stars));
    if (mode == RatingMode::Binary) return stars >= 3.5 ? 1.0 : -1.0;
    return (stars - 2.75) / 2.25;
}

inline std::string normalize_tag(const std::string& raw) {
    std::string s;
    s.reserve(raw.size());
    for (char c : raw) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

namespace detail {

// RFC-4180 field splitting; handles quoted fields with embedded commas and
// doubled quotes.  MovieLens files never span lines, so no multiline fields.
inline std::vector<std::string> split_csv(const std::string& line, const std::string& where) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    if (quoted) throw ParseError(where + ": unterminated quoted field");
    out.push_back(std::move(field));
    return out;
}

inline std::int64_t parse_i64(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) throw ParseError(where + ": bad integer '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw ParseError(where + ": bad integer '" + s + "'");
    }
}

inline double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw ParseError(where + ": bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw ParseError(where + ": bad number '" + s + "'");
    }
}

template <typename RowFn>
inline void for_each_csv_row(const std::string& path, std::size_t n_fields, RowFn fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) continue; // header
        if (line.empty() || line == "\r") continue;
        std::string where = path + ":" + std::to_string(lineno);
        std::vector<std::string> f = split_csv(line, where);
        if (f.size() != n_fields)
            throw ParseError(where + ": expected " + std::to_string(n_fields) + " fields, got " +
                             std::to_string(f.size()));
        fn(f, where);
    }
}

} // namespace detail

// Reads ratings.csv, movies.csv and tags.csv from a MovieLens directory and
// checks referential integrity.
inline RawDataset load_movielens(const std::string& dir) {
    RawDataset ds;
    detail::for_each_csv_row(dir + "/movies.csv", 3,
                             [&](const std::vector<std::string>& f, const std::string& where) {
                                 ds.movies.push_back({detail::parse_i64(f[0], where), f[1]});
                             });
    std::unordered_set<std::int64_t> known;
    for (const MovieRow& m : ds.movies) known.insert(m.movie_id);

    detail::for_each_csv_row(
        dir + "/ratings.csv", 4,
        [&](const std::vector<std::string>& f, const std::string& where) {
            RatingRow r{detail::parse_i64(f[0], where), detail::parse_i64(f[1], where),
                        detail::parse_double(f[2], where), detail::parse_i64(f[3], where)};
            if (!known.count(r.movie_id))
                throw ParseError(where + ": rating references unknown movieId " +
                                 std::to_string(r.movie_id));
            if (r.stars < 0.5 || r.stars > 5.0)
                throw ParseError(where + ": rating value out of range");
            ds.ratings.push_back(r);
        });
    detail::for_each_csv_row(
        dir + "/tags.csv", 4,
        [&](const std::vector<std::string>& f, const std::string& where) {
            TagRow t{detail::parse_i64(f[0], where), detail::parse_i64(f[1], where), f[2],
                     detail::parse_i64(f[3], where)};
            if (!known.count(t.movie_id))
                throw ParseError(where + ": tag references unknown movieId " +
                                 std::to_string(t.movie_id));
            ds.tags.push_back(t);
        });
    return ds;
}

// Uniform sample of n_movies movie ids plus every rating and tag touching
// them.  Deterministic per seed.
inline RawDataset sample_dataset(const RawDataset& raw, const SampleSpec& spec) {
    if (spec.n_movies < 1) throw ValidationError("n_movies must be >= 1");
    if (spec.n_movies > raw.movies.size())
        throw ValidationError("n_movies exceeds available movies (" +
                              std::to_string(raw.movies.size()) + ")");
    std::vector<std::int64_t> ids;
    ids.reserve(raw.movies.size());
    for (const MovieRow& m : raw.movies) ids.push_back(m.movie_id);
    std::sort(ids.begin(), ids.end());
    std::mt19937_64 rng(spec.seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::unordered_set<std::int64_t> chosen(ids.begin(), ids.begin() + spec.n_movies);

    RawDataset out;
    for (const MovieRow& m : raw.movies)
        if (chosen.count(m.movie_id)) out.movies.push_back(m);
    for (const RatingRow& r : raw.ratings)
        if (chosen.count(r.movie_id)) out.ratings.push_back(r);
    if (spec.include_tags)
        for (const TagRow& t : raw.tags)
            if (chosen.count(t.movie_id)) out.tags.push_back(t);
    return out;
}

struct DatasetMetrics {
    std::size_t users = 0;
    std::size_t movies = 0;
    std::size_t ratings = 0;
    std::size_t keywords = 0;
};

inline DatasetMetrics dataset_metrics(const RawDataset& ds) {
    DatasetMetrics m;
    std::unordered_set<std::int64_t> users;
    std::set<std::string> keywords;
    for (const RatingRow& r : ds.ratings) users.insert(r.user_id);
    for (const TagRow& t : ds.tags) {
        std::string k = normalize_tag(t.tag);
        if (!k.empty()) keywords.insert(k);
    }
    m.users = users.size();
    m.movies = ds.movies.size();
    m.ratings = ds.ratings.size();
    m.keywords = keywords.size();
    return m;
}

// Persons from userIds, Movies from movieIds, Keywords from normalized tags.
// Each rating becomes one explicit interaction: a Comment with the mapped
// weight (Linear) or a Like/Dislike (Binary).  Duplicate (user, movie)
// ratings keep the latest by timestamp.
inline Graph build_graph(const RawDataset& raw, RatingMode mode = RatingMode::Linear) {
    Graph g;
    std::unordered_map<std::int64_t, NodeId> movie_node;
    for (const MovieRow& m : raw.movies)
        movie_node[m.movie_id] = g.add_node(NodeKind::Movie, std::to_string(m.movie_id));

    std::map<std::pair<std::int64_t, std::int64_t>, RatingRow> latest;
    for (const RatingRow& r : raw.ratings) {
        auto key = std::make_pair(r.user_id, r.movie_id);
        auto it = latest.find(key);
        if (it == latest.end() || r.timestamp > it->second.timestamp) latest[key] = r;
    }

    std::unordered_map<std::int64_t, NodeId> person_node;
    for (const auto& [key, r] : latest) {
        auto it = person_node.find(r.user_id);
        if (it == person_node.end()) {
            it = person_node.emplace(r.user_id, g.add_node(NodeKind::Person,
                                                           std::to_string(r.user_id)))
                     .first;
        }
        InteractionEdge e;
        e.person = it->second;
        e.item = movie_node.at(r.movie_id);
        e.timestamp = r.timestamp;
        if (mode == RatingMode::Linear) {
            e.kind = InteractionKind::Comment;
            e.polarity = map_rating_to_weight(r.stars, RatingMode::Linear);
        } else {
            e.kind = r.stars >= 3.5 ? InteractionKind::Like : InteractionKind::Dislike;
        }
        g.add_interaction(e);
    }

    for (const TagRow& t : raw.tags) {
        std::string label = normalize_tag(t.tag);
        if (label.empty()) continue;
        NodeId kw = g.add_node(NodeKind::Keyword, label);
        g.add_structural_edge(StructuralEdgeKind::HasKeyword, movie_node.at(t.movie_id), kw);
    }
    return g;
}

} // namespace graphrec
