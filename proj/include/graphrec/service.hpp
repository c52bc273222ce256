#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "graphrec/cf.hpp"
#include "graphrec/eval.hpp"
#include "graphrec/recommender.hpp"

namespace graphrec {

enum class PredictorChoice { Knn, Pearson, Sam };

inline std::optional<PredictorChoice> parse_predictor(const std::string& s) {
    if (s == "knn") return PredictorChoice::Knn;
    if (s == "pearson") return PredictorChoice::Pearson;
    if (s == "sam") return PredictorChoice::Sam;
    return std::nullopt;
}

struct ServiceConfig {
    std::string listen_address = "127.0.0.1";
    int port = 8080;
    PredictorChoice predictor = PredictorChoice::Sam;
    std::size_t knn_k = 20;
    CfOptions cf;
};

inline const char* to_string(PredictionMethod m) {
    return m == PredictionMethod::GraphEvidence ? "graph_evidence" : "pearson_cf";
}

// Wraps a graph plus a CF view behind reader/writer locking and serves the
// recommendation endpoints.  GETs share the lock; the interaction POST takes
// it exclusively and rebuilds the CF view before releasing, so no request
// ever sees a half-applied mutation.
class RecService {
public:
    RecService(Graph graph, ServiceConfig config)
        : graph_(std::move(graph)), config_(config),
          view_(RatingMatrixView::from_graph(graph_)) {}

    std::vector<Prediction> recommend_movies_for(NodeId person, std::size_t n,
                                                 TraversalStats* stats = nullptr) const {
        switch (config_.predictor) {
        case PredictorChoice::Sam: {
            FallbackPredictor fallback = [&](NodeId a, NodeId j) {
                auto p = predict_cf(view_, a, j, config_.cf, stats);
                return p ? *p : cold_start_default(view_, a);
            };
            return recommend_movies(graph_, person, n, fallback, stats);
        }
        case PredictorChoice::Pearson:
            return cf_only(person, n, [&](NodeId a, NodeId j) {
                return predict_cf(view_, a, j, config_.cf, stats);
            });
        case PredictorChoice::Knn:
            return cf_only(person, n, [&](NodeId a, NodeId j) {
                return knn_predict(view_, a, j, config_.knn_k, config_.cf, stats);
            });
        }
        throw ValidationError("unknown predictor");
    }

    const Graph& graph() const { return graph_; }

    void bind(httplib::Server& server) {
        server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("{\"status\":\"ok\"}", "application/json");
        });

        server.Get("/recommendations/movies",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       handle_movies(req, res);
                   });
        server.Get("/recommendations/widgets",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       handle_widgets(req, res);
                   });
        server.Post("/graph/interactions",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        handle_post_interaction(req, res);
                    });
    }

private:
    template <typename Predict>
    std::vector<Prediction> cf_only(NodeId person, std::size_t n, Predict predict) const {
        if (graph_.node(person).kind != NodeKind::Person)
            throw NotFoundError("person id does not name a Person node");
        if (n < 1) throw ValidationError("n must be >= 1");
        std::vector<Prediction> preds;
        for (NodeId movie : graph_.nodes_of_kind(NodeKind::Movie)) {
            if (graph_.has_consumed(person, movie)) continue;
            auto p = predict(person, movie);
            preds.push_back({person, movie, p ? *p : cold_start_default(view_, person),
                             PredictionMethod::PearsonCF});
        }
        std::sort(preds.begin(), preds.end(), [](const Prediction& x, const Prediction& y) {
            if (x.score != y.score) return x.score > y.score;
            return x.item < y.item;
        });
        if (preds.size() > n) preds.resize(n);
        return preds;
    }

    static void reply_error(httplib::Response& res, int status, const std::string& msg) {
        nlohmann::json body{{"error", msg}};
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    std::optional<NodeId> checked_id(const httplib::Request& req, const std::string& key,
                                     httplib::Response& res) const {
        if (!req.has_param(key)) {
            reply_error(res, 400, "missing parameter: " + key);
            return std::nullopt;
        }
        const std::string& raw = req.get_param_value(key);
        try {
            std::size_t pos = 0;
            unsigned long v = std::stoul(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return static_cast<NodeId>(v);
        } catch (const std::logic_error&) {
            reply_error(res, 400, "bad parameter " + key + ": " + raw);
            return std::nullopt;
        }
    }

    void handle_movies(const httplib::Request& req, httplib::Response& res) {
        std::shared_lock lock(mu_);
        auto person = checked_id(req, "person", res);
        if (!person) return;
        std::size_t n = 10;
        if (req.has_param("n")) {
            auto parsed = checked_id(req, "n", res);
            if (!parsed) return;
            n = *parsed;
        }
        if (n < 1) {
            reply_error(res, 400, "n must be >= 1");
            return;
        }
        if (*person >= graph_.node_count() ||
            graph_.node(*person).kind != NodeKind::Person) {
            reply_error(res, 404, "unknown person");
            return;
        }
        nlohmann::json body = nlohmann::json::array();
        for (const Prediction& p : recommend_movies_for(*person, n))
            body.push_back({{"movieId", p.item}, {"score", p.score}, {"method", to_string(p.method)}});
        res.set_content(body.dump(), "application/json");
    }

    void handle_widgets(const httplib::Request& req, httplib::Response& res) {
        std::shared_lock lock(mu_);
        auto person = checked_id(req, "person", res);
        if (!person) return;
        auto movie = checked_id(req, "movie", res);
        if (!movie) return;
        if (*person >= graph_.node_count() ||
            graph_.node(*person).kind != NodeKind::Person) {
            reply_error(res, 404, "unknown person");
            return;
        }
        if (*movie >= graph_.node_count() || graph_.node(*movie).kind != NodeKind::Movie) {
            reply_error(res, 404, "unknown movie");
            return;
        }
        nlohmann::json body = nlohmann::json::array();
        for (const Prediction& p : rank_widgets(graph_, *person, *movie))
            body.push_back(
                {{"widgetId", p.item}, {"score", p.score}, {"method", to_string(p.method)}});
        res.set_content(body.dump(), "application/json");
    }

    static std::optional<InteractionKind> parse_kind_token(const std::string& s) {
        if (s == "LIKE") return InteractionKind::Like;
        if (s == "DISLIKE") return InteractionKind::Dislike;
        if (s == "COMMENT") return InteractionKind::Comment;
        if (s == "CONSUME") return InteractionKind::Consume;
        if (s == "FULLSCREEN") return InteractionKind::FullScreen;
        if (s == "DISMISS") return InteractionKind::Dismiss;
        if (s == "SHOWMORE") return InteractionKind::ShowMore;
        return std::nullopt;
    }

    void handle_post_interaction(const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception&) {
            reply_error(res, 400, "body is not valid JSON");
            return;
        }
        if (!body.contains("person") || !body.contains("item") || !body.contains("kind") ||
            !body["person"].is_number_unsigned() || !body["item"].is_number_unsigned() ||
            !body["kind"].is_string()) {
            reply_error(res, 400, "body needs numeric person, item and string kind");
            return;
        }
        auto kind = parse_kind_token(body["kind"].get<std::string>());
        if (!kind) {
            reply_error(res, 400, "unknown interaction kind");
            return;
        }
        InteractionEdge e;
        e.person = body["person"].get<NodeId>();
        e.item = body["item"].get<NodeId>();
        e.kind = *kind;
        if (body.contains("polarity")) {
            if (!body["polarity"].is_number()) {
                reply_error(res, 400, "polarity must be a number");
                return;
            }
            e.polarity = body["polarity"].get<double>();
        }
        if (body.contains("timestamp") && body["timestamp"].is_number_integer())
            e.timestamp = body["timestamp"].get<std::int64_t>();

        std::unique_lock lock(mu_);
        try {
            graph_.add_interaction(e);
        } catch (const NotFoundError& ex) {
            reply_error(res, 404, ex.what());
            return;
        } catch (const SchemaError& ex) {
            reply_error(res, 422, ex.what());
            return;
        } catch (const ValidationError& ex) {
            reply_error(res, 422, ex.what());
            return;
        }
        view_ = RatingMatrixView::from_graph(graph_);
        res.status = 201;
        nlohmann::json ok{{"status", "created"}};
        res.set_content(ok.dump(), "application/json");
    }

    mutable std::shared_mutex mu_;
    Graph graph_;
    ServiceConfig config_;
    RatingMatrixView view_;
};

} // namespace graphrec
