#include "doctest.h"

#include "wp/alphabet.hpp"
#include "wp/instances.hpp"
#include "wp/rng.hpp"

using namespace wp;

namespace {

MessageAlphabet kcore_alphabet_k1() {
    MessageAlphabet a("kcore", 1);
    a.add_symbol("0", {0, 0});
    a.add_symbol("1", {0, 0});
    return a;
}

}  // namespace

TEST_CASE("source_target returns the typing") {
    MessageAlphabet a = kcore_alphabet_k1();
    CHECK(a.source_target(a.symbol("0", {0, 0})) == TypePair{0, 0});

    // d-SAT encoding: a variable -> positive-occurrence symbol is typed
    // (variable class, positive occurrence class).
    auto ucp = unit_clause_instance(3, 1.0);
    Symbol mu = ucp.alphabet.symbol("free", {0, 2});
    CHECK(ucp.alphabet.source_target(mu) == TypePair{0, 2});

    // Swapped query.
    MessageAlphabet b("two", 3);
    Symbol s = b.add_symbol("x", {1, 2});
    CHECK(b.swapped(s) == TypePair{2, 1});

    CHECK_THROWS_AS(a.source_target(Symbol{17}), domain_error);
}

TEST_CASE("history consistency and compatibility") {
    MessageAlphabet a = kcore_alphabet_k1();
    Symbol zero = a.symbol("0", {0, 0});
    CHECK(is_consistent(a, {zero, zero, zero}));
    CHECK_THROWS_AS(is_consistent(a, {}), domain_error);

    MessageAlphabet b("two", 2);
    Symbol s12 = b.add_symbol("m", {0, 1});
    Symbol s21 = b.add_symbol("m", {1, 0});
    CHECK_FALSE(is_consistent(b, {s12, s21}));
    CHECK(is_compatible(b, {s12, s12}, {s21, s21}));
    CHECK_FALSE(is_compatible(b, {s12}, {s12}));
    CHECK(is_compatible(a, {zero}, {zero}));  // one-type model
    CHECK_THROWS_AS(is_compatible(b, {s12, s21}, {s21}), domain_error);
}

TEST_CASE("k-core rule counts ones against the threshold") {
    MessageAlphabet a = kcore_alphabet_k1();
    KCoreRule rule(3);
    Symbol one = a.symbol("1", {0, 0});
    Symbol zero = a.symbol("0", {0, 0});

    MessageMultiset m(a.size());
    m.add(one, 2);
    m.add(zero, 1);
    CHECK(apply_rule(rule, a, m, {0, 0}) == one);  // two ones >= k-1 = 2

    MessageMultiset empty(a.size());
    CHECK(apply_rule(rule, a, empty, {0, 0}) == zero);

    ConstantRule constant("0");
    CHECK(apply_rule(constant, a, m, {0, 0}) == zero);
}

TEST_CASE("apply_rule validates multiset typing") {
    MessageAlphabet b("two", 2);
    b.add_symbol("0", {0, 1});
    b.add_symbol("1", {0, 1});
    b.add_symbol("0", {1, 0});
    b.add_symbol("1", {1, 0});
    KCoreRule rule(2);
    MessageMultiset m(b.size());
    m.add(b.symbol("1", {1, 0}));  // arrives at a type-0 vertex
    CHECK(apply_rule(rule, b, m, {0, 1}) == b.symbol("1", {0, 1}));
    // Same multiset offered at a type-1 source is a typing violation.
    CHECK_THROWS_AS(apply_rule(rule, b, m, {1, 0}), domain_error);
    // Mixing target types is caught.
    MessageMultiset mixed(b.size());
    mixed.add(b.symbol("1", {1, 0}));
    mixed.add(b.symbol("1", {0, 1}));
    CHECK_THROWS_AS(apply_rule(rule, b, mixed, {0, 1}), domain_error);
}

TEST_CASE("rule output typing fuzz") {
    auto ucp = unit_clause_instance(3, 1.0);
    Rng rng(7);
    auto pairs = ucp.degrees.admissible_pairs();
    for (int trial = 0; trial < 2000; ++trial) {
        for (auto& [i, j] : pairs.pairs) {
            // Random well-typed multiset: incoming messages target i.
            MessageMultiset m(ucp.alphabet.size());
            for (int h = 0; h < ucp.degrees.num_types(); ++h) {
                if (!ucp.degrees.admissible(h, i)) continue;
                auto syms = ucp.alphabet.symbols_with_typing({h, i});
                int cnt = static_cast<int>(rng.uniform_below(4));
                for (int c = 0; c < cnt; ++c)
                    m.add(syms[rng.uniform_below(syms.size())]);
            }
            Symbol out = apply_rule(*ucp.rule, ucp.alphabet, m, {i, j});
            CHECK(ucp.alphabet.source_target(out) == TypePair{i, j});
        }
    }
}

TEST_CASE("multiset canonicalization is insertion-order independent") {
    MessageAlphabet a = kcore_alphabet_k1();
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Symbol> items;
        int n = 1 + static_cast<int>(rng.uniform_below(8));
        for (int c = 0; c < n; ++c)
            items.push_back(static_cast<Symbol>(rng.uniform_below(2)));
        MessageMultiset m1(a.size()), m2(a.size());
        for (Symbol s : items) m1.add(s);
        std::shuffle(items.begin(), items.end(), rng.engine());
        for (Symbol s : items) m2.add(s);
        CHECK(m1 == m2);
    }
}

TEST_CASE("k-core rule is monotone in added ones") {
    MessageAlphabet a = kcore_alphabet_k1();
    Symbol one = a.symbol("1", {0, 0});
    for (int threshold = 2; threshold <= 4; ++threshold) {
        KCoreRule rule(threshold);
        for (int ones = 0; ones <= 8; ++ones) {
            for (int zeros = 0; ones + zeros <= 8; ++zeros) {
                MessageMultiset m(a.size());
                m.add(a.symbol("0", {0, 0}), zeros);
                m.add(one, ones);
                Symbol before = apply_rule(rule, a, m, {0, 0});
                m.add(one);
                Symbol after = apply_rule(rule, a, m, {0, 0});
                if (a.label(before) == "1") CHECK(a.label(after) == "1");
            }
        }
    }
}

TEST_CASE("alphabet serialization round-trips exactly") {
    auto ucp = unit_clause_instance(4, 0.7);
    std::string text = alphabet_to_json(ucp.alphabet);
    MessageAlphabet back = alphabet_from_json(text);
    CHECK(back == ucp.alphabet);
    CHECK(alphabet_to_json(back) == text);
}

TEST_CASE("rule registry") {
    auto rule = RuleRegistry::instance().make("kcore", R"({"threshold": 3})");
    CHECK(rule->name() == "kcore:3");
    CHECK_THROWS_AS(RuleRegistry::instance().make("nope", "{}"), domain_error);
}
