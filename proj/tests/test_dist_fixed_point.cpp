#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "wp/dist_fixed_point.hpp"
#include "wp/gw_tree.hpp"
#include "wp/instances.hpp"

using namespace wp;

namespace {

// Single-type k-core matrix with Q(1) = q in the only entry.
ProbDistMatrix bernoulli_q(const InstanceBundle& bundle, double q) {
    ProbDistMatrix m(1, bundle.alphabet.size());
    std::vector<double> p(bundle.alphabet.size(), 0.0);
    p[bundle.alphabet.symbol("1", {0, 0})] = q;
    p[bundle.alphabet.symbol("0", {0, 0})] = 1.0 - q;
    m.set_entry(0, 0, std::move(p));
    return m;
}

}  // namespace

TEST_CASE("phi_step_exact: constant rule gives point masses") {
    auto constant = constant_instance(DegreeModel({TypeDegreeDistribution::poisson({2.5})}), 0.4);
    OffspringTable table(constant.degrees, OffspringMode::SizeBiased);
    auto result = phi_step_exact(constant.degrees, table, constant.alphabet, *constant.rule,
                                 constant.q0);
    CHECK(result.matrix.prob(0, 0, constant.alphabet.symbol("a", {0, 0})) ==
          doctest::Approx(1.0));
    result.matrix.validate(constant.alphabet);
}

TEST_CASE("phi_step_exact: 3-regular closed form") {
    // Zhat == 2, k_core = 2: R(1) = 1 - (1-q)^2.
    auto bundle = kcore_instance(2, DegreeModel({TypeDegreeDistribution::deterministic({3})}));
    OffspringTable table(bundle.degrees, OffspringMode::Conditioned);
    for (double q : {0.0, 0.25, 0.7, 1.0}) {
        auto r = phi_step_exact(bundle.degrees, table, bundle.alphabet, *bundle.rule,
                                bernoulli_q(bundle, q));
        double expect = 1.0 - (1.0 - q) * (1.0 - q);
        CHECK(r.matrix.prob(0, 0, bundle.alphabet.symbol("1", {0, 0})) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("phi_step_exact: childless offspring ignores Q") {
    auto bundle = kcore_instance(2, DegreeModel({TypeDegreeDistribution::deterministic({1})}));
    OffspringTable table(bundle.degrees, OffspringMode::Conditioned);
    for (double q : {0.1, 0.9}) {
        auto r = phi_step_exact(bundle.degrees, table, bundle.alphabet, *bundle.rule,
                                bernoulli_q(bundle, q));
        // Zhat == 0: phi(empty) = 0 always.
        CHECK(r.matrix.prob(0, 0, bundle.alphabet.symbol("0", {0, 0})) == doctest::Approx(1.0));
    }
}

TEST_CASE("phi_step preserves normalization and typing on a multi-type model") {
    auto ucp = unit_clause_instance(3, 0.9);
    OffspringTable table(ucp.degrees, OffspringMode::SizeBiased);
    ProbDistMatrix q = ucp.q0;
    for (int t = 0; t < 3; ++t) {
        auto r = phi_step_exact(ucp.degrees, table, ucp.alphabet, *ucp.rule, q);
        r.matrix.validate(ucp.alphabet);
        q = r.matrix;
    }
}

TEST_CASE("phi_step_mc agrees with phi_step_exact within 4 sigma") {
    auto bundle = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({3.5})}));
    OffspringTable table(bundle.degrees, OffspringMode::SizeBiased);
    ProbDistMatrix q = bernoulli_q(bundle, 0.8);
    auto exact = phi_step_exact(bundle.degrees, table, bundle.alphabet, *bundle.rule, q);
    const std::uint64_t samples = 200000;
    Rng rng(17);
    auto mc = phi_step_mc(bundle.degrees, table, bundle.alphabet, *bundle.rule, q, samples, rng);
    for (int mu = 0; mu < bundle.alphabet.size(); ++mu) {
        double pe = exact.matrix.prob(0, 0, static_cast<Symbol>(mu));
        double pm = mc.prob(0, 0, static_cast<Symbol>(mu));
        double se = std::sqrt(pe * (1.0 - pe) / static_cast<double>(samples));
        CHECK(std::abs(pm - pe) <= 4.0 * se + 1e-9);
    }
}

TEST_CASE("tv metric") {
    auto bundle = kcore_instance(2, DegreeModel({TypeDegreeDistribution::poisson({2.0})}));
    auto q1 = bernoulli_q(bundle, 0.3);
    CHECK(tv_distance(q1, q1) == 0.0);

    auto point1 = bernoulli_q(bundle, 1.0);
    auto point0 = bernoulli_q(bundle, 0.0);
    CHECK(tv_distance(point1, point0) == doctest::Approx(1.0));

    // Absent vs present contributes 1.
    ProbDistMatrix absent(1, bundle.alphabet.size());
    CHECK(tv_distance(absent, point1) == doctest::Approx(1.0));

    // Metric axioms on random matrices.
    Rng rng(23);
    for (int trial = 0; trial < 500; ++trial) {
        auto a = bernoulli_q(bundle, rng.uniform01());
        auto b = bernoulli_q(bundle, rng.uniform01());
        auto c = bernoulli_q(bundle, rng.uniform01());
        double ab = tv_distance(a, b), ba = tv_distance(b, a);
        CHECK(ab == doctest::Approx(ba));
        CHECK(ab >= 0.0);
        CHECK(tv_distance(a, c) <= ab + tv_distance(b, c) + 1e-12);
    }
}

TEST_CASE("iterate_to_limit: constant rule converges immediately") {
    auto constant = constant_instance(DegreeModel({TypeDegreeDistribution::poisson({2.0})}), 0.5);
    auto result = iterate_to_limit(constant.degrees, constant.alphabet, *constant.rule,
                                   constant.q0, OffspringMode::SizeBiased);
    CHECK(result.converged);
    CHECK(result.iters <= 2);
    CHECK(result.limit.prob(0, 0, constant.alphabet.symbol("a", {0, 0})) ==
          doctest::Approx(1.0));
}

TEST_CASE("iterate_to_limit: k-core limits match the scalar recursion") {
    for (double c : {2.5, 3.5, 4.0}) {
        for (auto mode : {OffspringMode::SizeBiased, OffspringMode::Conditioned}) {
            auto bundle = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({c})}));
            auto result = iterate_to_limit(bundle.degrees, bundle.alphabet, *bundle.rule,
                                           bundle.q0, mode);
            REQUIRE(result.converged);
            double mass = result.limit.prob(0, 0, bundle.alphabet.symbol("1", {0, 0}));
            double expect =
                oracle::kcore_scalar_limit(c, 3, mode == OffspringMode::SizeBiased);
            CHECK(mass == doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("iterate_to_limit: restarting from a fixed point stays put") {
    auto bundle = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({3.5})}));
    auto first = iterate_to_limit(bundle.degrees, bundle.alphabet, *bundle.rule, bundle.q0,
                                  OffspringMode::SizeBiased);
    REQUIRE(first.converged);
    auto again = iterate_to_limit(bundle.degrees, bundle.alphabet, *bundle.rule, first.limit,
                                  OffspringMode::SizeBiased);
    CHECK(again.iters == 1);
    CHECK(again.converged);
}

TEST_CASE("stability probe") {
    auto constant = constant_instance(DegreeModel({TypeDegreeDistribution::poisson({2.0})}), 0.5);
    auto climit = iterate_to_limit(constant.degrees, constant.alphabet, *constant.rule,
                                   constant.q0, OffspringMode::SizeBiased);
    Rng rng(31);
    auto creport = stability_check(constant.degrees, constant.alphabet, *constant.rule,
                                   climit.limit, OffspringMode::SizeBiased, rng);
    CHECK(creport.lipschitz_estimate == doctest::Approx(0.0));
    CHECK(creport.stable);

    auto bundle = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({3.5})}));
    auto limit = iterate_to_limit(bundle.degrees, bundle.alphabet, *bundle.rule, bundle.q0,
                                  OffspringMode::SizeBiased);
    Rng rng2(32);
    auto report = stability_check(bundle.degrees, bundle.alphabet, *bundle.rule, limit.limit,
                                  OffspringMode::SizeBiased, rng2);
    CHECK(report.lipschitz_estimate < 1.0);
    CHECK(report.directions_used > 0);

    // Approaching the threshold from above, the estimate grows.
    double thr = oracle::kcore_scalar_threshold(3, true, 3.0, 4.0, 1e-4);
    std::vector<double> estimates;
    for (double dc : {0.08, 0.4, 1.0}) {
        auto b = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({thr + dc})}));
        auto l = iterate_to_limit(b.degrees, b.alphabet, *b.rule, b.q0,
                                  OffspringMode::SizeBiased);
        Rng r(100 + static_cast<int>(dc * 100));
        estimates.push_back(stability_check(b.degrees, b.alphabet, *b.rule, l.limit,
                                            OffspringMode::SizeBiased, r)
                                .lipschitz_estimate);
    }
    CHECK(estimates[0] > estimates[1]);
    CHECK(estimates[1] > estimates[2]);
    CHECK(estimates[0] < 1.0);
}

TEST_CASE("marginals of sampled histories match iterated phi (local history bridge)") {
    auto bundle = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({3.5})}));
    OffspringTable table(bundle.degrees, OffspringMode::SizeBiased);
    const int t = 4;
    const std::uint64_t samples = 50000;
    Rng rng(41);
    auto hist = history_distribution(bundle.degrees, bundle.alphabet, *bundle.rule, t,
                                     bundle.q0, OffspringMode::SizeBiased, samples, rng);
    ProbDistMatrix q = bundle.q0;
    for (int tp = 0; tp <= t; ++tp) {
        auto marginal = hist.marginal(0, 0, tp, bundle.alphabet.size());
        for (int mu = 0; mu < bundle.alphabet.size(); ++mu) {
            double pe = q.prob(0, 0, static_cast<Symbol>(mu));
            double se = std::sqrt(pe * (1.0 - pe) / static_cast<double>(samples));
            CHECK(std::abs(marginal[mu] - pe) <= 4.0 * se + 1e-9);
        }
        if (tp < t)
            q = phi_step_exact(bundle.degrees, table, bundle.alphabet, *bundle.rule, q).matrix;
    }
}

TEST_CASE("distribution matrix serialization round-trips") {
    auto bundle = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({3.5})}));
    auto q = bernoulli_q(bundle, 0.3125);
    std::string text = q.to_json(bundle.alphabet);
    auto back = ProbDistMatrix::from_json(bundle.alphabet, text);
    CHECK(back == q);
    CHECK(back.to_json(bundle.alphabet) == text);
}

TEST_CASE("potential change probability") {
    auto constant = constant_instance(DegreeModel({TypeDegreeDistribution::poisson({2.0})}), 0.5);
    Rng rng(51);
    auto hist = history_distribution(constant.degrees, constant.alphabet, *constant.rule, 3,
                                     constant.q0, OffspringMode::SizeBiased, 20000, rng);
    Symbol a = constant.alphabet.symbol("a", {0, 0});
    Symbol b = constant.alphabet.symbol("b", {0, 0});
    // Only the first step can change anything, and it always lands on a.
    CHECK(potential_change_probability(constant.alphabet, hist, a, b) == 0.0);
    CHECK(potential_change_probability(constant.alphabet, hist, b, a) ==
          doctest::Approx(0.5).epsilon(0.05));
    // (a, a) occurs in every history beyond the first step.
    CHECK(potential_change_probability(constant.alphabet, hist, a, a) ==
          doctest::Approx(1.0));

    auto kcore = kcore_instance(3, DegreeModel({TypeDegreeDistribution::poisson({3.5})}));
    Rng rng2(52);
    auto khist = history_distribution(kcore.degrees, kcore.alphabet, *kcore.rule, 5, kcore.q0,
                                      OffspringMode::SizeBiased, 50000, rng2);
    Symbol one = kcore.alphabet.symbol("1", {0, 0});
    Symbol zero = kcore.alphabet.symbol("0", {0, 0});
    CHECK(potential_change_probability(kcore.alphabet, khist, one, zero) > 0.1);
    CHECK(potential_change_probability(kcore.alphabet, khist, zero, one) == 0.0);
}
