#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wp/degree_model.hpp"
#include "wp/gw_tree.hpp"
#include "wp/rng.hpp"

namespace wp {

using Vertex = std::uint32_t;

// Simple multi-type graph: per-vertex types plus sorted neighbour lists.
class TypedGraph {
public:
    TypedGraph() = default;
    TypedGraph(int k, std::vector<int> types);

    int num_types() const { return k_; }
    std::size_t num_vertices() const { return types_.size(); }
    std::size_t num_edges() const { return num_edges_; }
    int type(Vertex v) const { return types_.at(v); }

    const std::vector<Vertex>& neighbours(Vertex v) const { return adj_.at(v); }
    int degree(Vertex v) const { return static_cast<int>(adj_.at(v).size()); }

    // Adds an undirected edge; loops and duplicates are domain errors.
    void add_edge(Vertex u, Vertex v);
    bool has_edge(Vertex u, Vertex v) const;
    // Call once after the last add_edge; sorts neighbour lists.
    void finalize();

    std::vector<std::uint64_t> class_sizes() const;  // n_1..n_k
    int max_degree() const;

    // Type-degree sequence entry for v: (type, d_1..d_k).
    DegreeVector type_degree(Vertex v) const;
    // e[i][j] = number of (i,j) directed class adjacencies; e[i][j] == e[j][i].
    std::vector<std::vector<std::uint64_t>> class_edge_counts() const;

    std::string to_file_text() const;
    static TypedGraph from_file_text(const std::string& text);

private:
    int k_ = 0;
    std::vector<int> types_;
    std::vector<std::vector<Vertex>> adj_;
    std::size_t num_edges_ = 0;
    bool finalized_ = false;
};

// Per-vertex (type, d_1..d_k) rows; the input contract of the configuration
// generator.
struct TypeDegreeSequence {
    int k = 0;
    std::vector<int> vertex_type;
    std::vector<DegreeVector> degrees;

    // Sum over type-i vertices of d_j equals the (j,i) counterpart.
    bool edge_balanced() const;
    static TypeDegreeSequence sample(const DegreeModel& model,
                                     const std::vector<std::uint64_t>& class_counts, Rng& rng);
};

// G(n, kernel/n)-style multi-type binomial graph. kernel must be symmetric.
TypedGraph sample_binomial_multitype(const std::vector<std::uint64_t>& n_vec,
                                     const std::vector<std::vector<double>>& kernel, Rng& rng);

struct ConfigurationResult {
    TypedGraph graph;
    bool erased_fallback = false;  // simplicity enforced by erasing edges
    std::size_t erased_edges = 0;
    int restarts = 0;
};

// Uniform simple typed configuration matching: random pairing with whole
// restarts on simplicity violations, then an erased-edges fallback with a
// reported deviation flag.
ConfigurationResult sample_configuration(const TypeDegreeSequence& typedeg, Rng& rng,
                                         int max_restarts = 100);

// d-SAT factor graph: types 0 = variables, 1 = clauses, 2/3 = positive and
// negative occurrence vertices. Each clause picks d variables uniformly with
// independent random signs.
TypedGraph build_dsat_factor_graph(std::uint64_t n_vars, std::uint64_t m_clauses, int d,
                                   Rng& rng);

// Canonical certificate of a rooted k-type ball: exact on trees (canonical
// rooted-tree encoding), colour refinement otherwise.
std::string ball_certificate(const TypedGraph& graph, Vertex root, int radius);
std::string tree_certificate(const GWTree& tree);

// Empirical distribution of depth-r neighbourhood certificates over type-i
// roots.
struct NeighbourhoodStats {
    int root_type = 0;
    int radius = 0;
    std::uint64_t roots = 0;
    std::map<std::string, double> freq;
};

NeighbourhoodStats empirical_neighbourhoods(const TypedGraph& graph, int i, int r);

struct TvToTreeReport {
    double tv = 0.0;
    double sampling_bound = 0.0;  // rough Monte Carlo error scale
    std::uint64_t tree_samples = 0;
};

// TV distance between the empirical ball certificates and the law of T_i^r
// certificates estimated from tree_samples draws.
TvToTreeReport tv_to_tree(const NeighbourhoodStats& stats, const DegreeModel& model, int i,
                          int r, OffspringMode mode, std::uint64_t tree_samples, Rng& rng);

// |W_{t0}| where W_0 = vertices on a cycle of length <= t0 and W_t grows by
// one neighbourhood per step.
std::uint64_t count_near_short_cycle(const TypedGraph& graph, int t0);

}  // namespace wp
