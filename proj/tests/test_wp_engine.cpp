#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "wp/instances.hpp"
#include "wp/wp_engine.hpp"

using namespace wp;

namespace {

TypedGraph path3() {
    TypedGraph g(1, {0, 0, 0});
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.finalize();
    return g;
}

TypedGraph triangle() {
    TypedGraph g(1, {0, 0, 0});
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    g.finalize();
    return g;
}

}  // namespace

TEST_CASE("initialize") {
    auto kcore = kcore_instance(2, DegreeModel({TypeDegreeDistribution::poisson({2.0})}));
    Rng rng(1);
    MessagedGraph mg = initialize(path3(), kcore.q0, rng);
    CHECK(mg.round() == 0);
    for (std::size_t p = 0; p < mg.num_directed_edges(); ++p)
        CHECK(kcore.alphabet.label(mg.message(p)) == "1");

    TypedGraph empty(1, {});
    empty.finalize();
    MessagedGraph none = initialize(std::move(empty), kcore.q0, rng);
    CHECK(none.num_directed_edges() == 0);

    // Missing Q0 entry for an occurring edge type.
    ProbDistMatrix partial(1, kcore.alphabet.size());
    CHECK_THROWS_AS(initialize(path3(), partial, rng), domain_error);

    // Bernoulli(0.3) mass of ones concentrates.
    auto constant = constant_instance(DegreeModel({TypeDegreeDistribution::poisson({3.0})}), 0.3);
    Rng rng2(2);
    TypedGraph big = sample_binomial_multitype({100000}, {{3.0}}, rng2);
    MessagedGraph bmg = initialize(std::move(big), constant.q0, rng2);
    std::uint64_t a_count = 0;
    Symbol a = constant.alphabet.symbol("a", {0, 0});
    for (std::size_t p = 0; p < bmg.num_directed_edges(); ++p)
        if (bmg.message(p) == a) ++a_count;
    double frac = static_cast<double>(a_count) / bmg.num_directed_edges();
    double se = std::sqrt(0.3 * 0.7 / static_cast<double>(bmg.num_directed_edges()));
    CHECK(std::abs(frac - 0.3) <= 4.0 * se);
}

TEST_CASE("wp_step on the path matches the hand trace") {
    auto kcore = kcore_instance(2, DegreeModel({TypeDegreeDistribution::poisson({2.0})}));
    Rng rng(1);
    MessagedGraph mg = initialize(path3(), kcore.q0, rng, true);
    mg.step(kcore.alphabet, *kcore.rule);
    auto label = [&](Vertex u, Vertex v) {
        return kcore.alphabet.label(mg.message(mg.position(u, v)));
    };
    CHECK(label(0, 1) == "0");
    CHECK(label(2, 1) == "0");
    CHECK(label(1, 0) == "1");
    CHECK(label(1, 2) == "1");
    mg.step(kcore.alphabet, *kcore.rule);
    CHECK(label(0, 1) == "0");
    CHECK(label(2, 1) == "0");
    CHECK(label(1, 0) == "0");
    CHECK(label(1, 2) == "0");
}

TEST_CASE("wp_step agrees with the brute-force oracle on random graphs") {
    auto kcore = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({3.0})}));
    for (int trial = 0; trial < 30; ++trial) {
        Rng rng(500 + trial);
        TypedGraph g = sample_binomial_multitype({60}, {{3.0}}, rng);
        MessagedGraph mg = initialize(g, kcore.q0, rng);
        // Brute side starts from the same all-1 state.
        oracle::BruteMessages brute =
            oracle::brute_init(g, kcore.alphabet.symbol("1", {0, 0}));
        auto order = oracle::directed_edge_order(g);
        std::shuffle(order.begin(), order.end(), rng.engine());
        for (int round = 1; round <= 4; ++round) {
            mg.step(kcore.alphabet, *kcore.rule);
            brute = oracle::brute_step(g, kcore.alphabet, *kcore.rule, brute, order);
            for (Vertex v = 0; v < g.num_vertices(); ++v)
                for (int idx = 0; idx < g.degree(v); ++idx) {
                    Vertex u = g.neighbours(v)[idx];
                    CHECK(mg.message(mg.position(v, u)) == brute.msg[v][idx]);
                }
        }
    }
}

TEST_CASE("triangle is a fixed point under all-1 init") {
    auto kcore = kcore_instance(2, DegreeModel({TypeDegreeDistribution::poisson({2.0})}));
    Rng rng(1);
    auto result = run(initialize(triangle(), kcore.q0, rng), kcore.alphabet, *kcore.rule, 50);
    CHECK(result.trace.reached_fixpoint);
    CHECK(result.trace.rounds_run == 1);
    CHECK(result.trace.changes == std::vector<std::uint64_t>{0});
    auto core = extract_core(kcore.alphabet, result.state, 2);
    CHECK(core == std::vector<Vertex>{0, 1, 2});
}

TEST_CASE("run on the path stops after three rounds") {
    auto kcore = kcore_instance(2, DegreeModel({TypeDegreeDistribution::poisson({2.0})}));
    Rng rng(1);
    auto result =
        run(initialize(path3(), kcore.q0, rng, true), kcore.alphabet, *kcore.rule, 50);
    CHECK(result.trace.rounds_run == 3);
    CHECK(result.trace.changes == std::vector<std::uint64_t>{2, 2, 0});
    auto core = extract_core(kcore.alphabet, result.state, 2);
    CHECK(core.empty());
    CHECK(changes_since(result.state, result.state.round()) == 0);
    CHECK(changes_since(result.state, 0) == 4);
    CHECK(changes_since(result.state, 1) == 2);
}

TEST_CASE("constant rule fixes in one step") {
    auto constant = constant_instance(DegreeModel({TypeDegreeDistribution::poisson({2.0})}), 0.5);
    Rng rng(3);
    TypedGraph g = sample_binomial_multitype({500}, {{2.0}}, rng);
    auto result = run(initialize(std::move(g), constant.q0, rng, true), constant.alphabet,
                      *constant.rule, 50);
    CHECK(result.trace.reached_fixpoint);
    CHECK(result.trace.rounds_run <= 2);
    CHECK(changes_since(result.state, 1) == 0);
    // One more step after the fixed point changes nothing.
    MessagedGraph again = result.state;
    CHECK(again.step(constant.alphabet, *constant.rule) == 0);
}

TEST_CASE("history growth: earlier rounds are frozen prefixes") {
    auto kcore = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({3.5})}));
    Rng rng(7);
    TypedGraph g = sample_binomial_multitype({300}, {{3.5}}, rng);
    MessagedGraph mg = initialize(std::move(g), kcore.q0, rng, true);
    std::vector<std::vector<Symbol>> snapshots;
    snapshots.push_back({});
    for (std::size_t p = 0; p < mg.num_directed_edges(); ++p)
        snapshots.back().push_back(mg.message(p));
    for (int t = 1; t <= 5; ++t) {
        mg.step(kcore.alphabet, *kcore.rule);
        snapshots.push_back({});
        for (std::size_t p = 0; p < mg.num_directed_edges(); ++p)
            snapshots.back().push_back(mg.message(p));
    }
    for (int t = 0; t <= 5; ++t)
        for (std::size_t p = 0; p < mg.num_directed_edges(); ++p)
            CHECK(mg.message_at(p, t) == snapshots[t][p]);
    for (std::size_t p = 0; p < mg.num_directed_edges(); ++p) {
        HistoryVector h = mg.history(p);
        REQUIRE(h.size() == 6);
        for (int t = 0; t <= 5; ++t) CHECK(h[t] == snapshots[t][p]);
    }
}

TEST_CASE("project truncates histories to the last entry") {
    auto kcore = kcore_instance(2, DegreeModel({TypeDegreeDistribution::poisson({2.0})}));
    Rng rng(1);
    MessagedGraph mg = initialize(path3(), kcore.q0, rng, true);
    mg.step(kcore.alphabet, *kcore.rule);
    mg.step(kcore.alphabet, *kcore.rule);
    std::vector<Symbol> before;
    for (std::size_t p = 0; p < mg.num_directed_edges(); ++p)
        before.push_back(mg.message(p));
    mg.project();
    CHECK(mg.round() == 0);
    for (std::size_t p = 0; p < mg.num_directed_edges(); ++p) {
        CHECK(mg.history(p).size() == 1);
        CHECK(mg.message(p) == before[p]);
    }
    MessagedGraph twice = mg;
    twice.project();
    CHECK(twice.round() == 0);
}

TEST_CASE("WP core equals the peeling core on random graphs") {
    for (double c : {2.0, 3.0, 4.0}) {
        for (int k_core : {2, 3}) {
            auto bundle = kcore_instance(k_core, DegreeModel({TypeDegreeDistribution::poisson({c})}));
            for (int trial = 0; trial < 4; ++trial) {
                Rng rng(1000 + static_cast<int>(c * 10) + k_core * 100 + trial);
                TypedGraph g = sample_binomial_multitype({1000}, {{c}}, rng);
                auto result =
                    run(initialize(g, bundle.q0, rng), bundle.alphabet, *bundle.rule, 2000);
                REQUIRE(result.trace.reached_fixpoint);
                auto wp_core = extract_core(bundle.alphabet, result.state, k_core);
                auto peel = oracle::peeling_core(g, k_core);
                CHECK(wp_core == peel);
            }
        }
    }
}

TEST_CASE("changes_since refuses runs without retained history") {
    auto kcore = kcore_instance(2, DegreeModel({TypeDegreeDistribution::poisson({2.0})}));
    Rng rng(1);
    auto res = run(initialize(path3(), kcore.q0, rng, false), kcore.alphabet, *kcore.rule, 50);
    CHECK_THROWS_AS(changes_since(res.state, 0), domain_error);
}

TEST_CASE("change trace CSV") {
    ChangeTrace trace;
    trace.changes = {4, 2, 0};
    CHECK(trace.to_csv() == "round,changes\n1,4\n2,2\n3,0\n");
}

TEST_CASE("messaged graph dump includes both directions") {
    auto kcore = kcore_instance(2, DegreeModel({TypeDegreeDistribution::poisson({2.0})}));
    Rng rng(1);
    MessagedGraph mg = initialize(path3(), kcore.q0, rng, true);
    mg.step(kcore.alphabet, *kcore.rule);
    std::string text = messaged_graph_to_text(kcore.alphabet, mg);
    CHECK(text.find("0 1 1:0 1:1") != std::string::npos);
}
