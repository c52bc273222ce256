#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "graphrec/eval.hpp"
#include "graphrec/movielens.hpp"

using namespace graphrec;

namespace {

Graph ratings_graph(int n_users, int n_movies, double density, std::uint64_t seed) {
    Graph g;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> w(-1.0, 1.0);
    std::vector<NodeId> persons, movies;
    for (int i = 0; i < n_users; ++i)
        persons.push_back(g.add_node(NodeKind::Person, "p" + std::to_string(i)));
    for (int i = 0; i < n_movies; ++i)
        movies.push_back(g.add_node(NodeKind::Movie, "m" + std::to_string(i)));
    for (NodeId p : persons)
        for (NodeId m : movies)
            if (std::uniform_real_distribution<double>(0, 1)(rng) < density)
                g.add_interaction({p, m, InteractionKind::Comment, w(rng)});
    return g;
}

} // namespace

TEST_CASE("split partitions rating interactions with the floor rule") {
    Graph g = ratings_graph(2, 5, 1.0, 1); // exactly 10 ratings
    Split sp = split(g, {0.7, 42});
    CHECK(sp.train.interactions().size() == 7);
    CHECK(sp.test.size() == 3);

    // determinism
    Split sp2 = split(g, {0.7, 42});
    REQUIRE(sp2.test.size() == sp.test.size());
    for (std::size_t i = 0; i < sp.test.size(); ++i) {
        CHECK(sp.test[i].person == sp2.test[i].person);
        CHECK(sp.test[i].movie == sp2.test[i].movie);
        CHECK(sp.test[i].true_weight == sp2.test[i].true_weight);
    }

    // partition completeness: train + test pairs = all rating pairs, disjoint
    std::set<std::pair<NodeId, NodeId>> train_pairs, test_pairs;
    for (const InteractionEdge& e : sp.train.interactions())
        train_pairs.insert({e.person, e.item});
    for (const TestPair& t : sp.test) test_pairs.insert({t.person, t.movie});
    for (const auto& pr : test_pairs) CHECK(train_pairs.count(pr) == 0);
    CHECK(train_pairs.size() + test_pairs.size() == 10);

    CHECK_THROWS_AS(split(g, {0.0, 1}), ValidationError);
    CHECK_THROWS_AS(split(g, {1.0, 1}), ValidationError);
    Graph empty;
    CHECK_THROWS_AS(split(empty, {0.7, 1}), ValidationError);
}

TEST_CASE("split keeps structural edges and non-rating interactions in training") {
    Graph g;
    NodeId p = g.add_node(NodeKind::Person, "p");
    NodeId m1 = g.add_node(NodeKind::Movie, "m1");
    NodeId m2 = g.add_node(NodeKind::Movie, "m2");
    NodeId kw = g.add_node(NodeKind::Keyword, "k");
    g.add_structural_edge(StructuralEdgeKind::HasKeyword, m1, kw);
    g.add_structural_edge(StructuralEdgeKind::HasKeyword, m2, kw);
    for (int i = 0; i < 10; ++i) {
        NodeId m = g.add_node(NodeKind::Movie, "extra" + std::to_string(i));
        g.add_interaction({p, m, InteractionKind::Comment, 0.5});
    }
    g.add_interaction({p, m1, InteractionKind::Consume}); // implicit, never held out
    Split sp = split(g, {0.7, 3});
    CHECK(sp.train.structural_edge_count(StructuralEdgeKind::HasKeyword) == 2);
    bool consume_present = false;
    for (const InteractionEdge& e : sp.train.interactions())
        consume_present = consume_present || e.kind == InteractionKind::Consume;
    CHECK(consume_present);
}

TEST_CASE("split of 9902 ratings lands at 6931/2971") {
    Graph g = ratings_graph(100, 100, 0.9902, 5);
    std::size_t n = 0;
    for (const InteractionEdge& e : g.interactions())
        n += is_rating_interaction(g, e) ? 1 : 0;
    Split sp = split(g, {0.7, 0});
    CHECK(sp.train.interactions().size() ==
          static_cast<std::size_t>(std::floor(0.7 * static_cast<double>(n))));
}

TEST_CASE("evaluate computes MAE, RMSE and MPE") {
    std::vector<TestPair> test = {{0, 1, 0.5}, {0, 2, -0.5}, {1, 1, 1.0}};
    auto cold = [](NodeId) { return 0.0; };

    SECTION("perfect predictor") {
        auto perfect = [&](NodeId p, NodeId m) -> std::optional<double> {
            for (const TestPair& t : test)
                if (t.person == p && t.movie == m) return t.true_weight;
            return std::nullopt;
        };
        MetricsReport r = evaluate(perfect, cold, test);
        CHECK(r.mae == 0.0);
        CHECK(r.rmse == 0.0);
        CHECK(r.mpe_percent == 0.0);
        CHECK(r.n_undefined == 0);
    }
    SECTION("constant error of 0.5") {
        auto off = [&](NodeId p, NodeId m) -> std::optional<double> {
            for (const TestPair& t : test)
                if (t.person == p && t.movie == m) return t.true_weight + 0.5;
            return std::nullopt;
        };
        MetricsReport r = evaluate(off, cold, test);
        CHECK(r.mae == Catch::Approx(0.5).margin(1e-12));
        CHECK(r.rmse == Catch::Approx(0.5).margin(1e-12));
        CHECK(r.mpe_percent == Catch::Approx(25.0).margin(1e-12));
    }
    SECTION("undefined predictions fall back to the default and are counted") {
        auto never = [](NodeId, NodeId) -> std::optional<double> { return std::nullopt; };
        MetricsReport r = evaluate(never, cold, test);
        CHECK(r.n_undefined == 3);
        CHECK(r.n_predictions == 3);
        // errors are |0 - t|
        CHECK(r.mae == Catch::Approx((0.5 + 0.5 + 1.0) / 3.0).margin(1e-12));
    }
    SECTION("empty test set is rejected") {
        auto never = [](NodeId, NodeId) -> std::optional<double> { return std::nullopt; };
        CHECK_THROWS_AS(evaluate(never, cold, {}), ValidationError);
    }
}

TEST_CASE("MPE identity holds for the published error triples") {
    CHECK(mpe_from_mae(0.3415) == Catch::Approx(17.08).margin(0.005));
    CHECK(mpe_from_mae(0.2809) == Catch::Approx(14.04).margin(0.005));
    CHECK(mpe_from_mae(0.2584) == Catch::Approx(12.92).margin(0.005));
}

TEST_CASE("property: evaluate agrees with a direct recomputation and rmse >= mae") {
    std::mt19937_64 rng(88);
    for (int iter = 0; iter < 50; ++iter) {
        int n = 1 + static_cast<int>(rng() % 40);
        std::vector<TestPair> test;
        std::vector<double> preds;
        std::uniform_real_distribution<double> w(-1.5, 1.5);
        for (int i = 0; i < n; ++i) {
            test.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 100), w(rng)});
            preds.push_back(w(rng));
        }
        auto predictor = [&](NodeId p, NodeId) -> std::optional<double> { return preds[p]; };
        MetricsReport r = evaluate(predictor, [](NodeId) { return 0.0; }, test);

        double abs_sum = 0, sq_sum = 0;
        for (int i = 0; i < n; ++i) {
            abs_sum += std::fabs(preds[i] - test[i].true_weight);
            sq_sum += (preds[i] - test[i].true_weight) * (preds[i] - test[i].true_weight);
        }
        REQUIRE(r.mae == Catch::Approx(abs_sum / n).margin(1e-12));
        REQUIRE(r.rmse == Catch::Approx(std::sqrt(sq_sum / n)).margin(1e-12));
        REQUIRE(r.rmse >= r.mae - 1e-12);
        REQUIRE(r.mpe_percent == Catch::Approx(100.0 * r.mae / 2.0).margin(1e-12));
    }
}

TEST_CASE("compare_algorithms emits three rows over the identical split") {
    Graph g = ratings_graph(8, 12, 0.8, 17);
    Split sp = split(g, {0.7, 17});
    auto reports = compare_algorithms(sp.train, sp.test);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].algorithm == "knn");
    CHECK(reports[1].algorithm == "pearson");
    CHECK(reports[2].algorithm == "sam_hybrid");
    for (const auto& r : reports) {
        CHECK(r.metrics.n_predictions == sp.test.size());
        CHECK(r.metrics.rmse >= r.metrics.mae - 1e-12);
    }
    // with k at least the user pool, knn is exactly pearson
    CompareConfig big_k;
    big_k.knn_k = 1000;
    auto reports2 = compare_algorithms(sp.train, sp.test, big_k);
    CHECK(reports2[0].metrics.mae == reports2[1].metrics.mae);
    CHECK(reports2[0].metrics.rmse == reports2[1].metrics.rmse);

    std::string tsv = format_report(reports);
    CHECK(tsv.find("algorithm\tmae\trmse\tmpe_percent\tn_predictions\tn_undefined\n") == 0);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 4);
}

TEST_CASE("no-keyword graph: sam_hybrid degenerates to pearson") {
    // Without structural edges there is never graph evidence.
    Graph g = ratings_graph(6, 10, 0.9, 23);
    Split sp = split(g, {0.7, 23});
    auto reports = compare_algorithms(sp.train, sp.test);
    CHECK(reports[1].metrics.mae == reports[2].metrics.mae);
}

TEST_CASE("bench_latency reports mean latency and visit counts") {
    std::size_t calls = 0;
    auto request = [&](NodeId, TraversalStats& stats) {
        stats.visit(3);
        ++calls;
    };
    std::vector<NodeId> persons = {0, 1, 2};
    LatencyReport r = bench_latency(request, persons, 10, 1);
    CHECK(r.requests_completed == 10);
    CHECK(calls == 10);
    CHECK(r.mean_node_visits == 3.0);
    CHECK(!r.aborted);
    CHECK(r.mean_ms >= 0.0);

    SECTION("single request") {
        LatencyReport one = bench_latency(request, persons, 1, 2);
        CHECK(one.requests_completed == 1);
    }
    SECTION("failure aborts with partial stats") {
        std::size_t n = 0;
        auto flaky = [&](NodeId, TraversalStats&) {
            if (++n == 4) throw Error("boom");
        };
        LatencyReport partial = bench_latency(flaky, persons, 10, 3);
        CHECK(partial.aborted);
        CHECK(partial.requests_completed == 3);
    }
    SECTION("bad arguments") {
        CHECK_THROWS_AS(bench_latency(request, persons, 0, 1), ValidationError);
        CHECK_THROWS_AS(bench_latency(request, std::vector<NodeId>{}, 5, 1), ValidationError);
    }
}
