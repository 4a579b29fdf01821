#include <algorithm>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

#include "wp/instances.hpp"
#include "wp/wp_engine.hpp"

using namespace wp;

namespace {

// Explicit d-SAT factor graph builder for hand-crafted formulas: clauses are
// lists of signed variable indices (+v / -v encoded as pair).
struct Lit {
    Vertex var;
    bool positive;
};

TypedGraph formula_graph(std::uint64_t n_vars, const std::vector<std::vector<Lit>>& clauses) {
    std::vector<int> types;
    for (std::uint64_t v = 0; v < n_vars; ++v) types.push_back(0);
    for (std::size_t c = 0; c < clauses.size(); ++c) types.push_back(1);
    std::size_t occ_total = 0;
    for (auto& cl : clauses) occ_total += cl.size();
    std::vector<std::pair<Vertex, Vertex>> occ_edges;
    for (std::size_t c = 0; c < clauses.size(); ++c)
        for (auto& lit : clauses[c]) {
            types.push_back(lit.positive ? 2 : 3);
            occ_edges.push_back({lit.var, static_cast<Vertex>(n_vars + c)});
        }
    TypedGraph g(4, std::move(types));
    Vertex occ = static_cast<Vertex>(n_vars + clauses.size());
    for (auto& [var, clause] : occ_edges) {
        g.add_edge(var, occ);
        g.add_edge(occ, clause);
        ++occ;
    }
    g.finalize();
    return g;
}

// Recursive pure-literal elimination; returns the purifiable variable set.
std::set<Vertex> pure_literal_oracle(std::uint64_t n_vars,
                                     const std::vector<std::vector<Lit>>& clauses) {
    std::vector<bool> clause_active(clauses.size(), true);
    std::set<Vertex> pure;
    bool progress = true;
    while (progress) {
        progress = false;
        for (Vertex v = 0; v < n_vars; ++v) {
            if (pure.count(v)) continue;
            bool pos = false, neg = false;
            for (std::size_t c = 0; c < clauses.size(); ++c) {
                if (!clause_active[c]) continue;
                for (auto& lit : clauses[c])
                    if (lit.var == v) (lit.positive ? pos : neg) = true;
            }
            if (pos && neg) continue;
            pure.insert(v);
            progress = true;
            // Setting v to its pure polarity satisfies its active clauses.
            for (std::size_t c = 0; c < clauses.size(); ++c) {
                if (!clause_active[c]) continue;
                for (auto& lit : clauses[c])
                    if (lit.var == v && lit.positive == pos) clause_active[c] = false;
            }
        }
    }
    return pure;
}

std::vector<std::vector<Lit>> random_formula(std::uint64_t n_vars, std::uint64_t m, int d,
                                             Rng& rng) {
    std::vector<std::vector<Lit>> clauses(m);
    for (auto& cl : clauses)
        for (int pick = 0; pick < d; ++pick)
            cl.push_back({static_cast<Vertex>(rng.uniform_below(n_vars)), rng.bernoulli(0.5)});
    return clauses;
}

}  // namespace

TEST_CASE("kcore bundle: WP core equals peeling on small graphs") {
    auto bundle = kcore_instance(2, DegreeModel({TypeDegreeDistribution::poisson({2.0})}));
    TypedGraph tri(1, {0, 0, 0});
    tri.add_edge(0, 1);
    tri.add_edge(1, 2);
    tri.add_edge(0, 2);
    tri.finalize();
    Rng rng(1);
    auto res = run(initialize(tri, bundle.q0, rng), bundle.alphabet, *bundle.rule, 50);
    CHECK(extract_core(bundle.alphabet, res.state, 2) == oracle::peeling_core(tri, 2));

    TypedGraph path(1, {0, 0, 0});
    path.add_edge(0, 1);
    path.add_edge(1, 2);
    path.finalize();
    auto res2 = run(initialize(path, bundle.q0, rng), bundle.alphabet, *bundle.rule, 50);
    CHECK(extract_core(bundle.alphabet, res2.state, 2).empty());
    CHECK(oracle::peeling_core(path, 2).empty());
}

TEST_CASE("kcore bundle fixed point is update-order independent (monotone start)") {
    auto bundle = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({3.0})}));
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(100 + trial);
        TypedGraph g = sample_binomial_multitype({200}, {{3.0}}, rng);
        auto synchronous =
            run(initialize(g, bundle.q0, rng), bundle.alphabet, *bundle.rule, 500);
        // Brute-force with a shuffled evaluation order reaches the same
        // fixed point.
        oracle::BruteMessages brute =
            oracle::brute_init(g, bundle.alphabet.symbol("1", {0, 0}));
        auto order = oracle::directed_edge_order(g);
        std::shuffle(order.begin(), order.end(), rng.engine());
        for (int round = 0; round < 500; ++round) {
            auto next = oracle::brute_step(g, bundle.alphabet, *bundle.rule, brute, order);
            bool same = next.msg == brute.msg;
            brute = next;
            if (same) break;
        }
        for (Vertex v = 0; v < g.num_vertices(); ++v)
            for (int idx = 0; idx < g.degree(v); ++idx) {
                Vertex u = g.neighbours(v)[idx];
                CHECK(brute.msg[v][idx] ==
                      synchronous.state.message(synchronous.state.position(v, u)));
            }
    }
}

TEST_CASE("unit clause: a preset unit forces its variable within three rounds") {
    // Formula: (x0) as a degree-1 clause, plus (x0 or x1) padding.
    auto bundle = unit_clause_instance(2, 0.5);
    std::vector<std::vector<Lit>> clauses = {{{0, true}}, {{0, true}, {1, false}}};
    TypedGraph g = formula_graph(2, clauses);
    Rng rng(5);
    MessagedGraph mg = initialize(std::move(g), bundle.q0, rng, true);
    CHECK_FALSE(ucp_variable_forced(bundle, mg, 0));
    for (int t = 1; t <= 3; ++t) mg.step(bundle.alphabet, *bundle.rule);
    CHECK(ucp_variable_forced(bundle, mg, 0));
    CHECK_FALSE(ucp_variable_forced(bundle, mg, 1));
}

TEST_CASE("unit clause: empty formula fixes immediately") {
    auto bundle = unit_clause_instance(3, 0.5);
    TypedGraph g = formula_graph(20, {});
    Rng rng(6);
    auto res = run(initialize(std::move(g), bundle.q0, rng), bundle.alphabet, *bundle.rule, 10);
    CHECK(res.trace.rounds_run == 1);
    CHECK(res.trace.changes == std::vector<std::uint64_t>{0});
}

TEST_CASE("unit clause: implication chain forces every variable") {
    // x0 unit; clauses (not x_i or x_{i+1}).
    const int L = 6;
    std::vector<std::vector<Lit>> clauses = {{{0, true}}};
    for (Vertex v = 0; v + 1 < L; ++v)
        clauses.push_back({{v, false}, {static_cast<Vertex>(v + 1), true}});
    auto bundle = unit_clause_instance(2, 0.5);
    TypedGraph g = formula_graph(L, clauses);
    Rng rng(7);
    auto res = run(initialize(std::move(g), bundle.q0, rng, true), bundle.alphabet,
                   *bundle.rule, 200);
    REQUIRE(res.trace.reached_fixpoint);
    int forced = 0;
    for (Vertex v = 0; v < L; ++v)
        if (ucp_variable_forced(bundle, res.state, v)) ++forced;
    CHECK(forced == L);
    // Forcing arrives roughly four rounds per hop.
    CHECK(res.trace.rounds_run >= 4 * (L - 1));
}

TEST_CASE("pure literal: isolated and two-sign variables at round 1") {
    auto bundle = pure_literal_instance(2, 0.5);
    // x0 isolated; x1 appears with both signs; x2 only positively.
    std::vector<std::vector<Lit>> clauses = {{{1, true}, {2, true}}, {{1, false}, {2, true}}};
    TypedGraph g = formula_graph(3, clauses);
    Rng rng(8);
    MessagedGraph mg = initialize(std::move(g), bundle.q0, rng, true);
    mg.step(bundle.alphabet, *bundle.rule);
    CHECK(pure_literal_purifiable(bundle, mg, 0));
    CHECK_FALSE(pure_literal_purifiable(bundle, mg, 1));
    CHECK(pure_literal_purifiable(bundle, mg, 2));
}

TEST_CASE("pure literal WP fixed point matches the elimination oracle") {
    const std::uint64_t n = 1000;
    auto bundle = pure_literal_instance(3, 0.2);
    for (int trial = 0; trial < 5; ++trial) {
        Rng rng(900 + trial);
        auto clauses = random_formula(n, 200, 3, rng);
        TypedGraph g = formula_graph(n, clauses);
        auto res = run(initialize(std::move(g), bundle.q0, rng), bundle.alphabet,
                       *bundle.rule, 2000);
        REQUIRE(res.trace.reached_fixpoint);
        auto expected = pure_literal_oracle(n, clauses);
        std::set<Vertex> got;
        for (Vertex v = 0; v < n; ++v)
            if (pure_literal_purifiable(bundle, res.state, v)) got.insert(v);
        CHECK(got == expected);
    }
}

TEST_CASE("bundle description embeds a bit-exact alphabet") {
    auto bundle = unit_clause_instance(3, 0.8);
    std::string text = bundle_description_json(bundle);
    auto j = nlohmann::json::parse(text);
    MessageAlphabet back = alphabet_from_json(j.at("alphabet").dump());
    CHECK(back == bundle.alphabet);
    CHECK(alphabet_to_json(back) == alphabet_to_json(bundle.alphabet));
    CHECK(j.at("rule").get<std::string>() == "unit_clause");
}

TEST_CASE("bundle alphabets pass the typing fuzz") {
    for (auto bundle : {unit_clause_instance(3, 0.7), pure_literal_instance(3, 0.7)}) {
        bundle.q0.validate(bundle.alphabet);
        Rng rng(19);
        auto pairs = bundle.degrees.admissible_pairs();
        for (int trial = 0; trial < 300; ++trial) {
            for (auto& [i, j] : pairs.pairs) {
                MessageMultiset m(bundle.alphabet.size());
                for (int h = 0; h < bundle.degrees.num_types(); ++h) {
                    if (!bundle.degrees.admissible(h, i)) continue;
                    auto syms = bundle.alphabet.symbols_with_typing({h, i});
                    int cnt = static_cast<int>(rng.uniform_below(3));
                    for (int c = 0; c < cnt; ++c) m.add(syms[rng.uniform_below(syms.size())]);
                }
                Symbol out = apply_rule(*bundle.rule, bundle.alphabet, m, {i, j});
                CHECK(bundle.alphabet.source_target(out) == TypePair{i, j});
            }
        }
    }
}
