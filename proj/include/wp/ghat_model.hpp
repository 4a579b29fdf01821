#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wp/alphabet.hpp"
#include "wp/degree_model.hpp"
#include "wp/dist_matrix.hpp"
#include "wp/wp_engine.hpp"

namespace wp {

// Half-edge with its story: in-story (messages towards the owner) and
// out-story (messages from the owner, computed deterministically from the
// owner's other in-messages).
struct HalfEdge {
    Vertex owner = 0;
    TypePair typing;        // (owner type i, neighbour type j)
    HistoryKey in_story;    // typed (j, i)
    HistoryKey out_story;   // typed (i, j)
};

// Census key: (in-story, out-story).
using StoryCensus = std::map<std::pair<HistoryKey, HistoryKey>, std::uint64_t>;

struct GhatDeletionReport {
    std::uint64_t total = 0;       // |E_0|
    std::uint64_t imbalance = 0;   // dual story class size mismatches
    std::uint64_t parity = 0;      // odd self-dual classes
    std::uint64_t simplicity = 0;  // unresolved loop/multi-edge conflicts
};

struct GhatResult {
    MessagedGraph graph;          // messaged with full histories 0..t0
    StoryCensus census;           // before deletion
    GhatDeletionReport deleted;
    std::vector<HalfEdge> half_edges;  // step-3 state, before matching
};

struct GhatConfig {
    int repair_passes = 50;  // bounded local re-pairing on simplicity conflicts
};

// Builds the half-edge model: class sizes, per-vertex half-edges with
// in-stories from the estimated history law and 0-out-messages from Q0,
// deterministic out-stories, then the consistent simple matching.
GhatResult build_ghat(const DegreeModel& model, const MessageAlphabet& alphabet,
                      const UpdateRule& rule, const std::vector<std::uint64_t>& class_sizes,
                      const ProbDistMatrix& q0, const HistoryDistMatrix& history_law, int t0,
                      Rng& rng, const GhatConfig& config = {});

// Exact story census of a half-edge collection.
StoryCensus story_census(const std::vector<HalfEdge>& half_edges);

// q_{mu1,mu2} = Phat(mu1) * Phat(mu2) for compatible pairs, 0 otherwise.
std::map<std::pair<HistoryKey, HistoryKey>, double> q_table(
    const MessageAlphabet& alphabet, const HistoryDistMatrix& history_law);

struct ClosenessReport {
    std::uint64_t edge_symmetric_difference = 0;
    std::uint64_t message_disagreements = 0;  // on common edges
    double delta = 0.0;                       // max(counts) / n
    bool strict = false;                      // identical edge sets
};

// Compares two messaged graphs over the same vertex labeling.
ClosenessReport closeness(const MessagedGraph& g1, const MessagedGraph& g2,
                          bool compare_histories);

struct OutStoryLawReport {
    double tv = 0.0;
    double sampling_bound = 0.0;
    std::uint64_t half_edges = 0;
};

// Empirical out-story law at type-(i,j) half-edges before deletion vs the
// history law entry (i,j).
OutStoryLawReport out_story_law_check(const std::vector<HalfEdge>& half_edges,
                                      const HistoryDistMatrix& history_law, int i, int j);

// In-compilation at a vertex: canonically encoded multiset of
// (in-story, 0-out-message) pairs over its incident edges.
std::string in_compilation(const MessagedGraph& mg, Vertex v);
std::map<std::string, std::uint64_t> in_compilation_census(const MessagedGraph& mg);

// Same census on the step-3 half-edge state, before any deletion (the
// product-law side of the concentration statements).
std::map<std::string, std::uint64_t> in_compilation_census_pre_deletion(
    const std::vector<HalfEdge>& half_edges, std::size_t num_vertices);

// Post-build invariant: every surviving edge pairs dual stories exactly.
bool matching_consistent(const MessageAlphabet& alphabet, const MessagedGraph& mg);

}  // namespace wp
