#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wp/alphabet.hpp"
#include "wp/degree_model.hpp"
#include "wp/dist_fixed_point.hpp"
#include "wp/dist_matrix.hpp"
#include "wp/gw_tree.hpp"
#include "wp/rng.hpp"

namespace wp {

// An old/new message pair (sigma, sigma') with shared typing.
struct ChangePair {
    Symbol old_symbol = 0;
    Symbol new_symbol = 0;

    bool operator<(const ChangePair& o) const {
        return std::pair{old_symbol, new_symbol} < std::pair{o.old_symbol, o.new_symbol};
    }
    bool operator==(const ChangePair&) const = default;
};

struct PotentialChange {
    ChangePair pair;
    double frequency = 0.0;  // empirical frequency over sampled histories
    bool rare_unconfirmed = false;
};

struct PotentialChangeOptions {
    int t_max = 20;
    std::uint64_t samples = 100'000;
    // Total expected sampled tree nodes per edge type; supercritical offspring
    // laws blow up exponentially in depth, so the effective probing depth is
    // the largest t <= t_max that fits this budget.
    std::uint64_t node_budget = 40'000'000;
};

struct PotentialChangeReport {
    std::vector<PotentialChange> pairs;
    int t_effective = 0;  // minimum over edge types of the probed depth
};

// Pairs observed as consecutive entries of sampled histories up to the probed
// depth per admissible edge type. Pairs with sigma == sigma' are excluded.
PotentialChangeReport potential_changes(const DegreeModel& model,
                                        const MessageAlphabet& alphabet,
                                        const UpdateRule& rule, const ProbDistMatrix& q0,
                                        OffspringMode mode,
                                        const PotentialChangeOptions& options, Rng& rng);

// One sampled change cascade. Nodes are the surviving changed edges.
struct ChangeTree {
    struct Node {
        ChangePair pair;
        std::int32_t parent;  // -1 for the root change
        int depth;
    };
    std::vector<Node> nodes;  // nodes[0] = injected root change
    bool truncated = false;
};

struct ChangeTreeConfig {
    int depth_cap = 40;
    std::size_t node_cap = 1'000'000;
};

// Samples the idealised change cascade seeded by `pair` at matrix Q: the
// changed message enters the root-edge child of a T_{gbar(sigma)} tree;
// offspring and their upward messages are drawn lazily (children i.i.d. per
// Q), both downward scenarios are propagated, and only edges whose two
// scenario messages differ survive.
ChangeTree sample_change_tree(const DegreeModel& model, const OffspringTable& offspring,
                              const MessageAlphabet& alphabet, const UpdateRule& rule,
                              ChangePair pair, const ProbDistMatrix& q, Rng& rng,
                              const ChangeTreeConfig& config = {});

// |Sigma|^2 x |Sigma|^2 expected one-generation change counts. Entry
// (tau1, tau2) = expected number of tau1 changes produced by one tau2 change.
struct TransitionMatrix {
    int sigma = 0;  // alphabet size
    std::vector<double> entries;  // row-major, (sigma^2)^2
    std::vector<double> stderrs;
    std::vector<std::uint64_t> column_samples;  // per column

    std::size_t dim() const { return static_cast<std::size_t>(sigma) * sigma; }
    static std::size_t pair_index(int sigma, ChangePair p) {
        return static_cast<std::size_t>(p.old_symbol) * sigma + p.new_symbol;
    }
    double at(std::size_t row, std::size_t col) const { return entries[row * dim() + col]; }
    double stderr_at(std::size_t row, std::size_t col) const {
        return stderrs[row * dim() + col];
    }

    std::string to_csv(const MessageAlphabet& alphabet) const;
};

// One-generation Monte Carlo estimate: fresh trees per column, counting the
// changes produced directly below the root change.
TransitionMatrix estimate_transition_matrix(const DegreeModel& model,
                                            const OffspringTable& offspring,
                                            const MessageAlphabet& alphabet,
                                            const UpdateRule& rule, const ProbDistMatrix& q,
                                            const std::vector<ChangePair>& pairs,
                                            std::uint64_t samples, Rng& rng,
                                            int num_threads = 1);

struct PerronData {
    double rho = 0.0;    // spectral radius of the padded matrix T'
    double gamma = 0.0;  // 1 - rho(T')
    std::vector<double> alpha;  // positive, ||alpha||_1 = 1
    bool pointwise_certificate = false;  // T alpha <= (1-gamma) alpha entrywise
    int iterations = 0;
};

// Power iteration on T' = T + pad (every entry) until the eigenvalue residual
// is below 1e-10; verifies the pointwise certificate on the unpadded matrix.
PerronData perron(const TransitionMatrix& t, double pad_eps = 1e-6);
// Same on a raw square matrix (used by tests and the grid scans).
PerronData perron_dense(const std::vector<double>& matrix, std::size_t dim, double pad_eps);

enum class Verdict { Subcritical, Supercritical, Inconclusive };
std::string to_string(Verdict v);

struct SubcriticalityConfig {
    OffspringMode mode = OffspringMode::SizeBiased;
    PotentialChangeOptions potential;
    std::uint64_t tm_samples = 20'000;  // per transition-matrix column
    double pad_eps = 1e-6;
    int t0 = 0;                  // if > 0, also estimate at P' = phi^{t0-1}(Q0)
    IterateOptions iterate;
    int num_threads = 1;
};

struct SubcriticalityReport {
    Verdict verdict = Verdict::Inconclusive;
    double rho = 0.0;
    double rho_upper = 0.0;  // spectral radius with entries padded by 2 stderr
    double gamma = 0.0;
    PerronData perron_data;
    TransitionMatrix transition;
    std::vector<PotentialChange> pairs;
    int potential_t_effective = 0;
    bool fixed_point_converged = false;
    int fixed_point_iters = 0;
    // Estimate at P' = phi^{t0-1}(Q0) when requested.
    bool has_perturbed = false;
    double rho_perturbed = 0.0;
};

SubcriticalityReport subcriticality_verdict(const DegreeModel& model,
                                            const MessageAlphabet& alphabet,
                                            const UpdateRule& rule, const ProbDistMatrix& q0,
                                            const SubcriticalityConfig& config, Rng& rng);

}  // namespace wp
