#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "graphrec/eval.hpp"
#include "graphrec/movielens.hpp"
#include "graphrec/service.hpp"

namespace {

using namespace graphrec;

RatingMode parse_mode(const std::string& s) {
    if (s == "linear") return RatingMode::Linear;
    if (s == "binary") return RatingMode::Binary;
    throw ValidationError("mode must be linear or binary");
}

RawDataset load_and_sample(const std::string& data_dir, std::size_t n_movies,
                           std::uint64_t seed) {
    RawDataset raw = load_movielens(data_dir);
    if (n_movies == 0 || n_movies >= raw.movies.size()) return raw;
    return sample_dataset(raw, SampleSpec{n_movies, seed, true});
}

void write_csv_escaped(std::ofstream& out, const std::string& s) {
    if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << "\"\"";
        out << c;
    }
    out << '"';
}

void write_sampled_csvs(const RawDataset& ds, const std::string& out_dir) {
    {
        std::ofstream out(out_dir + "/movies.csv", std::ios::binary);
        if (!out) throw IoError("cannot write " + out_dir + "/movies.csv");
        out << "movieId,title,genres\n";
        for (const MovieRow& m : ds.movies) {
            out << m.movie_id << ',';
            write_csv_escaped(out, m.title);
            out << ",(no genres listed)\n";
        }
    }
    {
        std::ofstream out(out_dir + "/ratings.csv", std::ios::binary);
        if (!out) throw IoError("cannot write " + out_dir + "/ratings.csv");
        out << "userId,movieId,rating,timestamp\n";
        for (const RatingRow& r : ds.ratings)
            out << r.user_id << ',' << r.movie_id << ',' << r.stars << ',' << r.timestamp << '\n';
    }
    {
        std::ofstream out(out_dir + "/tags.csv", std::ios::binary);
        if (!out) throw IoError("cannot write " + out_dir + "/tags.csv");
        out << "userId,movieId,tag,timestamp\n";
        for (const TagRow& t : ds.tags) {
            out << t.user_id << ',' << t.movie_id << ',';
            write_csv_escaped(out, t.tag);
            out << ',' << t.timestamp << '\n';
        }
    }
}

int run(int argc, char** argv) {
    CLI::App app{"graphrec: graph-based media recommender"};
    app.require_subcommand(1);

    std::string data_dir, graph_path, out_path, mode_str = "linear", predictor_str = "sam";
    std::string listen = "127.0.0.1:8080";
    std::string train_out, test_out;
    std::uint64_t seed = 0;
    std::size_t n_movies = 0, k = 20, requests = 1000, top_n = 10;

    auto* ingest = app.add_subcommand("ingest", "Build a graph from a MovieLens directory");
    ingest->add_option("--data", data_dir, "MovieLens directory")->required();
    ingest->add_option("--mode", mode_str, "Rating mapping: linear|binary");
    ingest->add_option("--n-movies", n_movies, "Sample this many movies first (0 = all)");
    ingest->add_option("--seed", seed, "Sampling seed");
    ingest->add_option("--out", out_path, "Output graph TSV")->required();

    auto* sample = app.add_subcommand("sample", "Write a sampled MovieLens directory");
    sample->add_option("--data", data_dir, "MovieLens directory")->required();
    sample->add_option("--n-movies", n_movies, "Movies to keep")->required();
    sample->add_option("--seed", seed, "Sampling seed");
    sample->add_option("--out", out_path, "Output directory (must exist)")->required();

    auto* split_cmd = app.add_subcommand("split", "70/30 split of a graph's ratings");
    split_cmd->add_option("--graph", graph_path, "Graph TSV")->required();
    split_cmd->add_option("--seed", seed, "Split seed");
    split_cmd->add_option("--train", train_out, "Training graph TSV out")->required();
    split_cmd->add_option("--test", test_out, "Held-out ratings TSV out")->required();

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare knn/pearson/sam_hybrid errors");
    evaluate_cmd->add_option("--data", data_dir, "MovieLens directory")->required();
    evaluate_cmd->add_option("--seed", seed, "Sampling and split seed");
    evaluate_cmd->add_option("--mode", mode_str, "Rating mapping: linear|binary");
    evaluate_cmd->add_option("--n-movies", n_movies, "Sample size (0 = all)");
    evaluate_cmd->add_option("--k", k, "k for the k-NN baseline");
    evaluate_cmd->add_option("--out", out_path, "Also write the report here");

    auto* bench = app.add_subcommand("bench", "Mean recommendation latency");
    bench->add_option("--graph", graph_path, "Graph TSV")->required();
    bench->add_option("--predictor", predictor_str, "knn|pearson|sam");
    bench->add_option("--requests", requests, "Number of requests");
    bench->add_option("--k", k, "k for the k-NN baseline");
    bench->add_option("--seed", seed, "Person sampling seed");
    bench->add_option("--n", top_n, "Recommendations per request");

    auto* serve = app.add_subcommand("serve", "Serve recommendations over HTTP");
    serve->add_option("--graph", graph_path, "Graph TSV")->required();
    serve->add_option("--predictor", predictor_str, "knn|pearson|sam");
    serve->add_option("--k", k, "k for the k-NN baseline");
    serve->add_option("--listen", listen, "host:port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (ingest->parsed()) {
        RawDataset ds = load_and_sample(data_dir, n_movies, seed);
        Graph g = build_graph(ds, parse_mode(mode_str));
        g.save(out_path);
        DatasetMetrics m = dataset_metrics(ds);
        std::printf("ingested users=%zu movies=%zu ratings=%zu keywords=%zu -> %s\n", m.users,
                    m.movies, m.ratings, m.keywords, out_path.c_str());
        return 0;
    }
    if (sample->parsed()) {
        RawDataset raw = load_movielens(data_dir);
        RawDataset ds = sample_dataset(raw, SampleSpec{n_movies, seed, true});
        write_sampled_csvs(ds, out_path);
        DatasetMetrics m = dataset_metrics(ds);
        std::printf("sampled users=%zu movies=%zu ratings=%zu keywords=%zu -> %s\n", m.users,
                    m.movies, m.ratings, m.keywords, out_path.c_str());
        return 0;
    }
    if (split_cmd->parsed()) {
        Graph g = Graph::load(graph_path);
        Split sp = split(g, SplitConfig{0.7, seed});
        sp.train.save(train_out);
        std::ofstream out(test_out, std::ios::binary);
        if (!out) throw IoError("cannot write " + test_out);
        out << "person\tmovie\ttrue_weight\n";
        char buf[64];
        for (const TestPair& t : sp.test) {
            std::snprintf(buf, sizeof buf, "%.17g", t.true_weight);
            out << t.person << '\t' << t.movie << '\t' << buf << '\n';
        }
        std::printf("split train=%zu interactions, test=%zu pairs\n",
                    sp.train.interactions().size(), sp.test.size());
        return 0;
    }
    if (evaluate_cmd->parsed()) {
        RawDataset ds = load_and_sample(data_dir, n_movies, seed);
        Graph g = build_graph(ds, parse_mode(mode_str));
        Split sp = split(g, SplitConfig{0.7, seed});
        CompareConfig cc;
        cc.knn_k = k;
        std::string report = format_report(compare_algorithms(sp.train, sp.test, cc));
        std::fputs(report.c_str(), stdout);
        if (!out_path.empty()) {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw IoError("cannot write " + out_path);
            out << report;
        }
        return 0;
    }
    if (bench->parsed()) {
        auto choice = parse_predictor(predictor_str);
        if (!choice) throw ValidationError("predictor must be knn, pearson or sam");
        Graph g = Graph::load(graph_path);
        ServiceConfig cfg;
        cfg.predictor = *choice;
        cfg.knn_k = k;
        RecService service(std::move(g), cfg);
        std::vector<NodeId> persons = service.graph().nodes_of_kind(NodeKind::Person);
        LatencyReport r = bench_latency(
            [&](NodeId person, TraversalStats& stats) {
                service.recommend_movies_for(person, top_n, &stats);
            },
            persons, requests, seed);
        std::printf("predictor=%s requests=%zu mean_ms=%.3f mean_node_visits=%.1f%s\n",
                    predictor_str.c_str(), r.requests_completed, r.mean_ms, r.mean_node_visits,
                    r.aborted ? " (aborted)" : "");
        return r.aborted ? 1 : 0;
    }
    if (serve->parsed()) {
        auto choice = parse_predictor(predictor_str);
        if (!choice) throw ValidationError("predictor must be knn, pearson or sam");
        std::size_t colon = listen.rfind(':');
        if (colon == std::string::npos) throw ValidationError("--listen must be host:port");
        ServiceConfig cfg;
        cfg.listen_address = listen.substr(0, colon);
        cfg.port = std::stoi(listen.substr(colon + 1));
        cfg.predictor = *choice;
        cfg.knn_k = k;
        RecService service(Graph::load(graph_path), cfg);
        httplib::Server server;
        service.bind(server);
        std::printf("listening on %s\n", listen.c_str());
        std::fflush(stdout);
        if (!server.listen(cfg.listen_address, cfg.port))
            throw IoError("cannot listen on " + listen);
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
}
