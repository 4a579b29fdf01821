#pragma once

#include <cstdint>
#include <vector>

#include "wp/alphabet.hpp"
#include "wp/degree_model.hpp"
#include "wp/dist_matrix.hpp"
#include "wp/rng.hpp"

namespace wp {

struct PhiStepOptions {
    // Offspring vectors beyond the cap are dropped and the residual mass is
    // reported; -1 picks the smallest cap with tail mass below cap_mass_tol.
    int degree_cap = -1;
    double cap_mass_tol = 1e-9;
    double max_residual = 1e-6;  // numeric error beyond this
};

struct PhiStepResult {
    ProbDistMatrix matrix;
    double truncated_mass = 0.0;  // max residual over entries before renormalization
};

// One exact application of the distributional operator: entry (i,j) becomes
// the law of the rule applied to a multiset of messages from Zhat_{j->i}
// offspring, where a child of type h contributes a draw from Q[h,i].
PhiStepResult phi_step_exact(const DegreeModel& model, const OffspringTable& offspring,
                             const MessageAlphabet& alphabet, const UpdateRule& rule,
                             const ProbDistMatrix& q, const PhiStepOptions& options = {});

ProbDistMatrix phi_step_mc(const DegreeModel& model, const OffspringTable& offspring,
                           const MessageAlphabet& alphabet, const UpdateRule& rule,
                           const ProbDistMatrix& q, std::uint64_t samples, Rng& rng);

struct IterateOptions {
    double tol = 1e-10;
    int max_iters = 10'000;
    PhiStepOptions phi;
};

struct IterateResult {
    ProbDistMatrix limit;
    int iters = 0;
    bool converged = false;
    std::vector<double> tv_log;        // tv(Q_{t+1}, Q_t) per iteration
    std::vector<double> contraction;   // successive TV ratios
};

// Iterates phi_step_exact from Q0 until tv < tol or the cap.
IterateResult iterate_to_limit(const DegreeModel& model, const MessageAlphabet& alphabet,
                               const UpdateRule& rule, const ProbDistMatrix& q0,
                               OffspringMode mode, const IterateOptions& options = {});

struct StabilityOptions {
    double eps = 1e-3;     // perturbation radius in TV
    int directions = 64;
    double margin = 0.05;  // stable iff estimate < 1 - margin
};

struct StabilityReport {
    double lipschitz_estimate = 0.0;
    bool stable = false;
    int directions_used = 0;
};

// Finite-difference contraction probe around a near-fixed point P: perturbs P
// in random signed directions supported on its admissible entries and takes
// the worst TV expansion ratio through one phi step.
StabilityReport stability_check(const DegreeModel& model, const MessageAlphabet& alphabet,
                                const UpdateRule& rule, const ProbDistMatrix& p,
                                OffspringMode mode, Rng& rng,
                                const StabilityOptions& options = {});

// Empirical probability that a history drawn from the entry g(sigma) of qhist
// contains (sigma, sigma_next) as consecutive entries.
double potential_change_probability(const MessageAlphabet& alphabet,
                                    const HistoryDistMatrix& qhist, Symbol sigma,
                                    Symbol sigma_next);

}  // namespace wp
