#pragma once

#include <cstdint>
#include <vector>

#include "wp/alphabet.hpp"
#include "wp/degree_model.hpp"
#include "wp/dist_matrix.hpp"
#include "wp/rng.hpp"

namespace wp {

// Multi-type Galton-Watson tree, materialized level by level. Vertex-rooted
// trees start from a lone root of given type; edge-rooted trees model T_ij:
// node 0 is the root-edge child u (type i) whose parent v (type j) is kept
// implicit and childless.
struct GWTree {
    struct Node {
        int type;
        std::int32_t parent;  // -1 for node 0
        std::int32_t first_child = -1;
        std::int32_t next_sibling = -1;
    };

    bool edge_rooted = false;
    int root_parent_type = -1;  // type j of the implicit parent for edge-rooted trees
    std::vector<Node> nodes;
    std::vector<std::size_t> level_offsets;

    std::size_t size() const { return nodes.size(); }
};

struct GWTreeConfig {
    std::size_t vertex_cap = 10'000'000;  // explosion guard
};

// Vertex-rooted tree T_i^r: root offspring from Z_i, deeper vertices from the
// conditioned offspring laws.
GWTree sample_tree_i(const DegreeModel& model, const OffspringTable& offspring, int i, int r,
                     Rng& rng, const GWTreeConfig& config = {});
GWTree sample_tree_i(const DegreeModel& model, int i, int r, OffspringMode mode, Rng& rng,
                     const GWTreeConfig& config = {});

// Edge-rooted tree T_ij^r ((i, j) admissible); node 0 = u of type i, parent of
// type j with no further children. r counts generations below u.
GWTree sample_tree_ij(const DegreeModel& model, const OffspringTable& offspring, int i, int j,
                      int r, Rng& rng, const GWTreeConfig& config = {});
GWTree sample_tree_ij(const DegreeModel& model, int i, int j, int r, OffspringMode mode,
                      Rng& rng, const GWTreeConfig& config = {});

// Messages from u to its parent over t rounds of WP on a fresh T_ij sample:
// (X^(0), ..., X^(t)). All child-to-parent messages are initialized from Q0.
// Truncation at depth t is exact: messages travel one level per round.
HistoryVector root_history(const DegreeModel& model, const OffspringTable& offspring,
                           const MessageAlphabet& alphabet, const UpdateRule& rule, int i,
                           int j, int t, const ProbDistMatrix& q0, Rng& rng,
                           const GWTreeConfig& config = {});

// Same, on an already sampled tree (used to test depth sufficiency).
HistoryVector root_history_on_tree(const GWTree& tree, const MessageAlphabet& alphabet,
                                   const UpdateRule& rule, int t, const ProbDistMatrix& q0,
                                   Rng& rng);

// Empirical law of root_history per admissible (i, j) over `samples` draws.
// Replica merge is associative and order-independent, so the result does not
// depend on the worker count.
HistoryDistMatrix history_distribution(const DegreeModel& model,
                                       const MessageAlphabet& alphabet, const UpdateRule& rule,
                                       int t, const ProbDistMatrix& q0, OffspringMode mode,
                                       std::uint64_t samples, Rng& rng, int num_threads = 1);

}  // namespace wp
