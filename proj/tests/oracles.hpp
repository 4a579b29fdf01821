#pragma once

// Independent reference implementations used to check the library. These stay
// deliberately naive: direct definitions, no shared code with src/.

#include <cstdint>
#include <vector>

#include "wp/alphabet.hpp"
#include "wp/graph_model.hpp"
#include "wp/wp_engine.hpp"

namespace oracle {

// Recursively delete vertices of degree < k; returns the sorted k-core.
std::vector<wp::Vertex> peeling_core(const wp::TypedGraph& graph, int k);

// One synchronous WP round computed straight from the definition, processing
// directed edges in the given (arbitrary) order. messages maps (u,v) pairs.
struct BruteMessages {
    std::vector<std::vector<wp::Symbol>> msg;  // msg[u][idx within neighbours(u)]
};

BruteMessages brute_init(const wp::TypedGraph& graph, wp::Symbol fill);
BruteMessages brute_step(const wp::TypedGraph& graph, const wp::MessageAlphabet& alphabet,
                         const wp::UpdateRule& rule, const BruteMessages& cur,
                         const std::vector<std::pair<wp::Vertex, int>>& order);
std::vector<std::pair<wp::Vertex, int>> directed_edge_order(const wp::TypedGraph& graph);

// Scalar one-type k-core recursion x' = Pr(#ones among offspring >= k-1).
// size_biased: offspring ~ Po(c) so x' = Pr(Po(c x) >= k-1).
// conditioned: offspring ~ (Po(c) given >= 1) - 1.
double kcore_scalar_step(double c, double x, int k_core, bool size_biased);
double kcore_scalar_limit(double c, int k_core, bool size_biased, int iters = 20000,
                          double tol = 1e-12);
// Smallest c in [lo, hi] whose limit from x=1 stays above `mass`.
double kcore_scalar_threshold(int k_core, bool size_biased, double lo, double hi, double tol,
                              double mass = 0.01);

// Series oracles.
double poisson_tail_series(double lambda, int x);        // Pr(Po > x), direct sum
double poisson_conditioned_mean(double lambda);          // E[Po | Po >= 1]
double poisson_pmf_ref(int a, double lambda);

// Spectral radius via characteristic polynomial (Faddeev-LeVerrier) and
// Durand-Kerner root finding with Newton polish; dense matrices of dim <= 16.
double spectral_radius_charpoly(const std::vector<double>& m, std::size_t dim);

}  // namespace oracle
