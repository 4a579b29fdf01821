#include "wp/wp_engine.hpp"

#include <algorithm>
#include <sstream>

namespace wp {

MessagedGraph::MessagedGraph(TypedGraph graph, bool keep_history)
    : graph_(std::move(graph)), keep_history_(keep_history) {
    const std::size_t n = graph_.num_vertices();
    offsets_.assign(n + 1, 0);
    for (Vertex v = 0; v < n; ++v)
        offsets_[v + 1] = offsets_[v] + graph_.neighbours(v).size();
    const std::size_t m2 = offsets_[n];
    edge_source_.resize(m2);
    edge_target_.resize(m2);
    mirror_.resize(m2);
    for (Vertex v = 0; v < n; ++v) {
        std::size_t p = offsets_[v];
        for (Vertex u : graph_.neighbours(v)) {
            edge_source_[p] = v;
            edge_target_[p] = u;
            ++p;
        }
    }
    for (std::size_t p = 0; p < m2; ++p) {
        Vertex v = edge_source_[p], u = edge_target_[p];
        // Position of v within u's sorted neighbour list.
        const auto& nu = graph_.neighbours(u);
        auto it = std::lower_bound(nu.begin(), nu.end(), v);
        mirror_[p] = offsets_[u] + static_cast<std::size_t>(it - nu.begin());
    }
    current_.assign(m2, 0);
    previous_.assign(m2, 0);
}

std::size_t MessagedGraph::position(Vertex u, Vertex v) const {
    const auto& nu = graph_.neighbours(u);
    auto it = std::lower_bound(nu.begin(), nu.end(), v);
    if (it == nu.end() || *it != v) throw domain_error("no such directed edge");
    return offsets_[u] + static_cast<std::size_t>(it - nu.begin());
}

Symbol MessagedGraph::message_at(std::size_t p, int t) const {
    if (t == round_) return current_[p];
    if (!keep_history_) throw domain_error("history not retained");
    return rounds_.at(t).at(p);
}

HistoryVector MessagedGraph::history(std::size_t p) const {
    HistoryVector h;
    if (keep_history_) {
        h.reserve(round_ + 1);
        for (int t = 0; t < round_; ++t) h.push_back(rounds_[t][p]);
        h.push_back(current_[p]);
    } else {
        h.push_back(current_[p]);
    }
    return h;
}

void MessagedGraph::initialize(const ProbDistMatrix& q0, Rng& rng) {
    for (std::size_t p = 0; p < current_.size(); ++p) {
        int i = graph_.type(edge_source_[p]);
        int j = graph_.type(edge_target_[p]);
        if (!q0.present(i, j))
            throw domain_error("Q0 has no entry for occurring edge type (" + std::to_string(i) +
                               "," + std::to_string(j) + ")");
        current_[p] = q0.sample(i, j, rng);
    }
    round_ = 0;
    rounds_.clear();
    initialized_ = true;
}

void MessagedGraph::load_all_histories(const std::vector<HistoryVector>& per_position) {
    if (per_position.size() != current_.size())
        throw domain_error("history count does not match directed edge count");
    if (per_position.empty()) {
        round_ = 0;
        initialized_ = true;
        keep_history_ = true;
        return;
    }
    const std::size_t len = per_position.front().size();
    if (len == 0) throw domain_error("empty history");
    for (const auto& h : per_position)
        if (h.size() != len) throw domain_error("history lengths differ");
    keep_history_ = true;
    rounds_.assign(len - 1, std::vector<Symbol>(current_.size()));
    for (std::size_t p = 0; p < per_position.size(); ++p) {
        for (std::size_t t = 0; t + 1 < len; ++t) rounds_[t][p] = per_position[p][t];
        current_[p] = per_position[p][len - 1];
    }
    round_ = static_cast<int>(len) - 1;
    initialized_ = true;
}

std::uint64_t MessagedGraph::step(const MessageAlphabet& alphabet, const UpdateRule& rule) {
    if (!initialized_) throw domain_error("messaged graph not initialized");
    if (keep_history_) rounds_.push_back(current_);
    previous_.swap(current_);
    const std::size_t n = graph_.num_vertices();
    std::uint64_t changed = 0;
    std::vector<std::uint32_t> counts(alphabet.size(), 0);
    for (Vertex v = 0; v < n; ++v) {
        std::size_t b = offsets_[v], e = offsets_[v + 1];
        if (b == e) continue;
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t p = b; p < e; ++p) ++counts[previous_[mirror_[p]]];
        int tv = graph_.type(v);
        for (std::size_t p = b; p < e; ++p) {
            // All-but-one multiset: total incoming minus the message from the target.
            Symbol back = previous_[mirror_[p]];
            --counts[back];
            Symbol out;
            try {
                out = rule.evaluate(alphabet, counts, {tv, graph_.type(edge_target_[p])});
            } catch (const std::exception& err) {
                throw domain_error("rule failed on edge (" + std::to_string(v) + "," +
                                   std::to_string(edge_target_[p]) + "): " + err.what());
            }
            ++counts[back];
            current_[p] = out;
            if (out != previous_[p]) ++changed;
        }
    }
    ++round_;
    return changed;
}

void MessagedGraph::project() {
    rounds_.clear();
    round_ = 0;
}

MessageMultiset MessagedGraph::incoming(const MessageAlphabet& alphabet, Vertex v) const {
    MessageMultiset m(alphabet.size());
    for (std::size_t p = begin(v); p < end(v); ++p) m.add(current_[mirror_[p]]);
    return m;
}

MessagedGraph initialize(TypedGraph graph, const ProbDistMatrix& q0, Rng& rng,
                         bool keep_history) {
    MessagedGraph mg(std::move(graph), keep_history);
    mg.initialize(q0, rng);
    return mg;
}

MessagedGraph wp_step(MessagedGraph mg, const MessageAlphabet& alphabet,
                      const UpdateRule& rule) {
    mg.step(alphabet, rule);
    return mg;
}

RunResult run(MessagedGraph mg, const MessageAlphabet& alphabet, const UpdateRule& rule,
              int max_rounds, bool stop_on_fixpoint) {
    if (max_rounds < 1) throw domain_error("max_rounds must be >= 1");
    RunResult result;
    result.trace.reached_fixpoint = false;
    for (int t = 1; t <= max_rounds; ++t) {
        std::uint64_t changed = mg.step(alphabet, rule);
        result.trace.changes.push_back(changed);
        result.trace.rounds_run = t;
        if (changed == 0 && stop_on_fixpoint) {
            result.trace.reached_fixpoint = true;
            break;
        }
    }
    if (!result.trace.changes.empty() && result.trace.changes.back() == 0)
        result.trace.reached_fixpoint = true;
    result.state = std::move(mg);
    return result;
}

std::uint64_t changes_since(const MessagedGraph& mg, int t0) {
    if (t0 > mg.round()) throw domain_error("t0 beyond final round");
    std::uint64_t count = 0;
    for (std::size_t p = 0; p < mg.num_directed_edges(); ++p)
        if (mg.message_at(p, t0) != mg.message(p)) ++count;
    return count;
}

std::vector<Vertex> extract_core(const MessageAlphabet& alphabet, const MessagedGraph& mg,
                                 int core_threshold) {
    std::vector<Vertex> core;
    for (Vertex v = 0; v < mg.graph().num_vertices(); ++v) {
        int ones = 0;
        for (std::size_t p = mg.begin(v); p < mg.end(v); ++p)
            if (alphabet.label(mg.message(mg.mirror(p))) == "1") ++ones;
        if (ones >= core_threshold) core.push_back(v);
    }
    return core;
}

std::string ChangeTrace::to_csv() const {
    std::ostringstream out;
    out << "round,changes\n";
    for (std::size_t t = 0; t < changes.size(); ++t)
        out << (t + 1) << ',' << changes[t] << '\n';
    return out.str();
}

std::string messaged_graph_to_text(const MessageAlphabet& alphabet, const MessagedGraph& mg) {
    std::ostringstream out;
    const TypedGraph& g = mg.graph();
    auto n = g.class_sizes();
    out << g.num_types();
    for (auto c : n) out << ' ' << c;
    out << '\n';
    for (Vertex v = 0; v < g.num_vertices(); ++v) out << v << ' ' << g.type(v) << '\n';
    for (Vertex v = 0; v < g.num_vertices(); ++v)
        for (std::size_t p = mg.begin(v); p < mg.end(v); ++p) {
            Vertex u = mg.edge_target(p);
            if (v >= u) continue;
            out << v << ' ' << u << ' '
                << history_label(alphabet, encode_history(mg.history(p))) << ' '
                << history_label(alphabet, encode_history(mg.history(mg.mirror(p)))) << '\n';
        }
    return out.str();
}

}  // namespace wp
