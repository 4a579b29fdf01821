#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wp/alphabet.hpp"
#include "wp/dist_matrix.hpp"
#include "wp/graph_model.hpp"
#include "wp/rng.hpp"

namespace wp {

// Typed graph with per-directed-edge messages. Directed edges are CSR
// positions: position p corresponds to the p-th (source, neighbour) slot;
// mirror(p) is the opposite direction of the same undirected edge.
class MessagedGraph {
public:
    MessagedGraph() = default;
    MessagedGraph(TypedGraph graph, bool keep_history);

    const TypedGraph& graph() const { return graph_; }
    std::size_t num_directed_edges() const { return edge_target_.size(); }
    int round() const { return round_; }
    bool keeps_history() const { return keep_history_; }

    Vertex edge_source(std::size_t p) const { return edge_source_[p]; }
    Vertex edge_target(std::size_t p) const { return edge_target_[p]; }
    std::size_t mirror(std::size_t p) const { return mirror_[p]; }
    // Directed-edge positions with source v: [begin(v), end(v)).
    std::size_t begin(Vertex v) const { return offsets_[v]; }
    std::size_t end(Vertex v) const { return offsets_[v + 1]; }
    // Position of the directed edge (u, v); domain error if absent.
    std::size_t position(Vertex u, Vertex v) const;

    Symbol message(std::size_t p) const { return current_[p]; }
    Symbol message_at(std::size_t p, int t) const;  // needs history retention for t < round
    HistoryVector history(std::size_t p) const;

    void set_message(std::size_t p, Symbol mu) { current_[p] = mu; }  // diagnostics only

    // Round-0 initialization: every directed edge independently from Q0.
    void initialize(const ProbDistMatrix& q0, Rng& rng);

    // Installs externally computed histories (one per directed-edge position,
    // equal lengths); the state lands at round length-1 with full retention.
    void load_all_histories(const std::vector<HistoryVector>& per_position);

    // One synchronous round; returns the number of directed messages changed.
    std::uint64_t step(const MessageAlphabet& alphabet, const UpdateRule& rule);

    // Keep only the latest message of each history.
    void project();

    // Incoming count vector at v for the current round.
    MessageMultiset incoming(const MessageAlphabet& alphabet, Vertex v) const;

private:
    TypedGraph graph_;
    std::vector<std::size_t> offsets_;
    std::vector<Vertex> edge_source_, edge_target_;
    std::vector<std::size_t> mirror_;
    std::vector<Symbol> current_, previous_;
    std::vector<std::vector<Symbol>> rounds_;  // per-round snapshots when retained
    bool keep_history_ = false;
    bool initialized_ = false;
    int round_ = 0;
};

// Per-round change counts of a WP run.
struct ChangeTrace {
    std::vector<std::uint64_t> changes;  // changes[t-1] = messages changed in round t
    bool reached_fixpoint = false;
    int rounds_run = 0;

    std::string to_csv() const;
};

struct RunResult {
    MessagedGraph state;
    ChangeTrace trace;
};

MessagedGraph initialize(TypedGraph graph, const ProbDistMatrix& q0, Rng& rng,
                         bool keep_history = false);

// MessagedGraph wp_step as a value transformation (round t -> t+1).
MessagedGraph wp_step(MessagedGraph mg, const MessageAlphabet& alphabet,
                      const UpdateRule& rule);

RunResult run(MessagedGraph mg, const MessageAlphabet& alphabet, const UpdateRule& rule,
              int max_rounds, bool stop_on_fixpoint = true);

// Number of directed edges whose final message differs from their round-t0
// message; requires history retention.
std::uint64_t changes_since(const MessagedGraph& mg, int t0);

// Vertices receiving at least `core_threshold` incoming "1" messages.
std::vector<Vertex> extract_core(const MessageAlphabet& alphabet, const MessagedGraph& mg,
                                 int core_threshold);

// Messaged-graph dump: the graph_model edge-list format with per-direction
// history strings appended to each edge line.
std::string messaged_graph_to_text(const MessageAlphabet& alphabet, const MessagedGraph& mg);

}  // namespace wp
