#include "wp/ghat_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace wp {

namespace {

struct ProposedPair {
    std::size_t a, b;  // half-edge indices
};

}  // namespace

GhatResult build_ghat(const DegreeModel& model, const MessageAlphabet& alphabet,
                      const UpdateRule& rule, const std::vector<std::uint64_t>& class_sizes,
                      const ProbDistMatrix& q0, const HistoryDistMatrix& history_law, int t0,
                      Rng& rng, const GhatConfig& config) {
    if (t0 < 0) throw domain_error("t0 must be >= 0");
    if (history_law.history_length() != t0 + 1)
        throw domain_error("history law length does not match t0");
    const int k = model.num_types();
    if (static_cast<int>(class_sizes.size()) != k) throw domain_error("class size arity");

    // Step 1: vertices per class.
    std::vector<int> types;
    for (int i = 0; i < k; ++i)
        for (std::uint64_t c = 0; c < class_sizes[i]; ++c) types.push_back(i);
    const std::size_t n = types.size();

    // Step 2: half-edges with in-stories and 0-out-messages.
    GhatResult result;
    std::vector<std::vector<std::size_t>> at_vertex(n);
    Rng step2 = rng.fork(2);
    for (Vertex v = 0; v < n; ++v) {
        int i = types[v];
        Rng vr = step2.fork(v);
        DegreeVector deg = model.z(i).sample(vr);
        for (int j = 0; j < k; ++j) {
            for (int c = 0; c < deg[j]; ++c) {
                HalfEdge he;
                he.owner = v;
                he.typing = {i, j};
                he.in_story = history_law.entry(j, i).sample(vr);
                he.out_story.push_back(static_cast<char>(q0.sample(i, j, vr)));
                at_vertex[v].push_back(result.half_edges.size());
                result.half_edges.push_back(std::move(he));
            }
        }
    }

    // Step 3: deterministic out-stories via the rules of WP on the in-stories.
    std::vector<std::uint32_t> counts(alphabet.size(), 0);
    for (Vertex v = 0; v < n; ++v) {
        int i = types[v];
        const auto& hes = at_vertex[v];
        for (int t = 1; t <= t0; ++t) {
            std::fill(counts.begin(), counts.end(), 0);
            for (std::size_t idx : hes)
                ++counts[static_cast<Symbol>(result.half_edges[idx].in_story[t - 1])];
            for (std::size_t idx : hes) {
                Symbol back = static_cast<Symbol>(result.half_edges[idx].in_story[t - 1]);
                --counts[back];
                Symbol out = rule.evaluate(alphabet, counts,
                                           {i, result.half_edges[idx].typing.target});
                ++counts[back];
                result.half_edges[idx].out_story.push_back(static_cast<char>(out));
            }
        }
    }

    result.census = story_census(result.half_edges);

    // Step 4: consistent simple matching, greedy with bounded repair.
    std::map<std::pair<HistoryKey, HistoryKey>, std::vector<std::size_t>> classes;
    for (std::size_t idx = 0; idx < result.half_edges.size(); ++idx)
        classes[{result.half_edges[idx].in_story, result.half_edges[idx].out_story}]
            .push_back(idx);

    Rng step4 = rng.fork(4);
    std::uint64_t class_salt = 0;
    std::vector<ProposedPair> proposals;
    for (auto& [key, members] : classes) {
        const auto& [in_story, out_story] = key;
        Rng cr = step4.fork(class_salt++);
        if (in_story == out_story) {
            // Self-dual class: pair within.
            std::vector<std::size_t> pool = members;
            std::shuffle(pool.begin(), pool.end(), cr.engine());
            for (std::size_t e = 0; e + 1 < pool.size(); e += 2)
                proposals.push_back({pool[e], pool[e + 1]});
            if (pool.size() % 2 != 0) result.deleted.parity += 1;
        } else if (in_story < out_story) {
            // Handle each dual class pair once.
            auto partner = classes.find({out_story, in_story});
            if (partner == classes.end()) {
                result.deleted.imbalance += members.size();
                continue;
            }
            std::vector<std::size_t> pa = members, pb = partner->second;
            std::shuffle(pa.begin(), pa.end(), cr.engine());
            std::shuffle(pb.begin(), pb.end(), cr.engine());
            std::size_t m = std::min(pa.size(), pb.size());
            for (std::size_t e = 0; e < m; ++e) proposals.push_back({pa[e], pb[e]});
            result.deleted.imbalance += std::max(pa.size(), pb.size()) - m;
        } else {
            if (!classes.count({out_story, in_story}))
                result.deleted.imbalance += members.size();
        }
    }

    // Simplicity: greedy accept, re-pair rejected pairs per class for a
    // bounded number of passes, then delete residual conflicts.
    std::set<std::pair<Vertex, Vertex>> seen;
    std::vector<ProposedPair> accepted;
    std::vector<ProposedPair> pending = std::move(proposals);
    Rng repair = rng.fork(5);
    for (int pass = 0; pass <= config.repair_passes && !pending.empty(); ++pass) {
        std::vector<ProposedPair> rejected;
        for (const auto& pr : pending) {
            Vertex u = result.half_edges[pr.a].owner;
            Vertex w = result.half_edges[pr.b].owner;
            auto key = std::minmax(u, w);
            if (u == w || !seen.insert({key.first, key.second}).second) {
                rejected.push_back(pr);
                continue;
            }
            accepted.push_back(pr);
        }
        if (rejected.empty()) {
            pending.clear();
            break;
        }
        if (pass == config.repair_passes) {
            pending = std::move(rejected);
            break;
        }
        // Re-pair the rejected half-edges within their dual classes.
        std::map<std::pair<HistoryKey, HistoryKey>, std::pair<std::vector<std::size_t>,
                                                              std::vector<std::size_t>>>
            pools;
        for (const auto& pr : rejected) {
            const auto& hea = result.half_edges[pr.a];
            auto key = std::make_pair(std::min(hea.in_story, hea.out_story),
                                      std::max(hea.in_story, hea.out_story));
            pools[key].first.push_back(pr.a);
            pools[key].second.push_back(pr.b);
        }
        pending.clear();
        std::uint64_t pool_salt = 0;
        for (auto& [key, pool] : pools) {
            Rng pr_rng = repair.fork((static_cast<std::uint64_t>(pass) << 32) ^ pool_salt++);
            std::shuffle(pool.first.begin(), pool.first.end(), pr_rng.engine());
            std::shuffle(pool.second.begin(), pool.second.end(), pr_rng.engine());
            for (std::size_t e = 0; e < pool.first.size(); ++e)
                pending.push_back({pool.first[e], pool.second[e]});
        }
    }
    result.deleted.simplicity += 2 * pending.size();
    result.deleted.total =
        result.deleted.imbalance + result.deleted.parity + result.deleted.simplicity;

    // Build the messaged graph from accepted pairs.
    TypedGraph graph(k, types);
    for (const auto& pr : accepted) {
        const HalfEdge& ha = result.half_edges[pr.a];
        const HalfEdge& hb = result.half_edges[pr.b];
        if (ha.in_story != hb.out_story || ha.out_story != hb.in_story)
            throw domain_error("matched half-edges are not dual");
        graph.add_edge(ha.owner, hb.owner);
    }
    graph.finalize();
    MessagedGraph mg(std::move(graph), true);
    std::vector<HistoryVector> per_position(mg.num_directed_edges());
    for (const auto& pr : accepted) {
        const HalfEdge& ha = result.half_edges[pr.a];
        const HalfEdge& hb = result.half_edges[pr.b];
        per_position[mg.position(ha.owner, hb.owner)] = decode_history(ha.out_story);
        per_position[mg.position(hb.owner, ha.owner)] = decode_history(hb.out_story);
    }
    // Isolated vertices may exist; all positions belong to accepted edges.
    mg.load_all_histories(per_position);
    result.graph = std::move(mg);
    return result;
}

StoryCensus story_census(const std::vector<HalfEdge>& half_edges) {
    StoryCensus census;
    for (const auto& he : half_edges) census[{he.in_story, he.out_story}] += 1;
    return census;
}

std::map<std::pair<HistoryKey, HistoryKey>, double> q_table(
    const MessageAlphabet& alphabet, const HistoryDistMatrix& history_law) {
    std::map<std::pair<HistoryKey, HistoryKey>, double> q;
    const int k = history_law.num_types();
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (!history_law.present(j, i) || !history_law.present(i, j)) continue;
            // In-story typed (j,i), out-story typed (i,j): compatible by
            // construction; incompatible pairs never enter the table.
            for (auto& [mu1, p1] : history_law.entry(j, i).prob)
                for (auto& [mu2, p2] : history_law.entry(i, j).prob)
                    q[{mu1, mu2}] = p1 * p2;
        }
    (void)alphabet;
    return q;
}

ClosenessReport closeness(const MessagedGraph& g1, const MessagedGraph& g2,
                          bool compare_histories) {
    if (g1.graph().num_vertices() != g2.graph().num_vertices())
        throw domain_error("closeness needs a shared vertex labeling");
    const std::size_t n = g1.graph().num_vertices();
    ClosenessReport report;
    for (Vertex v = 0; v < n; ++v) {
        // Symmetric difference over undirected edges, counted once per edge.
        const auto& a1 = g1.graph().neighbours(v);
        const auto& a2 = g2.graph().neighbours(v);
        std::size_t p1 = 0, p2 = 0;
        while (p1 < a1.size() || p2 < a2.size()) {
            Vertex u1 = p1 < a1.size() ? a1[p1] : static_cast<Vertex>(-1);
            Vertex u2 = p2 < a2.size() ? a2[p2] : static_cast<Vertex>(-1);
            if (p2 >= a2.size() || (p1 < a1.size() && u1 < u2)) {
                if (v < u1) ++report.edge_symmetric_difference;
                ++p1;
            } else if (p1 >= a1.size() || u2 < u1) {
                if (v < u2) ++report.edge_symmetric_difference;
                ++p2;
            } else {
                // Common edge: compare both directed messages from v's side.
                if (v < u1) {
                    std::size_t q1 = g1.position(v, u1), q2 = g2.position(v, u1);
                    std::size_t r1 = g1.position(u1, v), r2 = g2.position(u1, v);
                    bool diff_out, diff_in;
                    if (compare_histories) {
                        diff_out = g1.history(q1) != g2.history(q2);
                        diff_in = g1.history(r1) != g2.history(r2);
                    } else {
                        diff_out = g1.message(q1) != g2.message(q2);
                        diff_in = g1.message(r1) != g2.message(r2);
                    }
                    if (diff_out) ++report.message_disagreements;
                    if (diff_in) ++report.message_disagreements;
                }
                ++p1;
                ++p2;
            }
        }
    }
    report.strict = report.edge_symmetric_difference == 0;
    report.delta = n == 0 ? 0.0
                          : static_cast<double>(std::max(report.edge_symmetric_difference,
                                                         report.message_disagreements)) /
                                static_cast<double>(n);
    return report;
}

OutStoryLawReport out_story_law_check(const std::vector<HalfEdge>& half_edges,
                                      const HistoryDistMatrix& history_law, int i, int j) {
    std::map<HistoryKey, std::uint64_t> counts;
    std::uint64_t total = 0;
    for (const auto& he : half_edges) {
        if (he.typing.source != i || he.typing.target != j) continue;
        counts[he.out_story] += 1;
        ++total;
    }
    OutStoryLawReport report;
    report.half_edges = total;
    if (total == 0) return report;
    const auto& law = history_law.entry(i, j).prob;
    std::set<HistoryKey> keys;
    for (auto& [key, c] : counts) keys.insert(key);
    for (auto& [key, p] : law) keys.insert(key);
    double l1 = 0.0;
    for (auto& key : keys) {
        double pe = 0.0, pl = 0.0;
        auto ic = counts.find(key);
        if (ic != counts.end()) pe = static_cast<double>(ic->second) / total;
        auto il = law.find(key);
        if (il != law.end()) pl = il->second;
        l1 += std::abs(pe - pl);
    }
    report.tv = 0.5 * l1;
    report.sampling_bound =
        0.5 * std::sqrt(static_cast<double>(keys.size()) / static_cast<double>(total));
    return report;
}

std::string in_compilation(const MessagedGraph& mg, Vertex v) {
    std::vector<std::string> inputs;
    for (std::size_t p = mg.begin(v); p < mg.end(v); ++p) {
        // Input = in-story plus the 0-out-message of the same half-edge.
        HistoryVector in = mg.history(mg.mirror(p));
        std::string enc = encode_history(in);
        enc += '\x01';
        enc += static_cast<char>(mg.message_at(p, 0));
        inputs.push_back(std::move(enc));
    }
    std::sort(inputs.begin(), inputs.end());
    std::string out;
    for (auto& s : inputs) {
        out += s;
        out += '\x02';
    }
    return out;
}

std::map<std::string, std::uint64_t> in_compilation_census(const MessagedGraph& mg) {
    std::map<std::string, std::uint64_t> census;
    for (Vertex v = 0; v < mg.graph().num_vertices(); ++v)
        census[in_compilation(mg, v)] += 1;
    return census;
}

std::map<std::string, std::uint64_t> in_compilation_census_pre_deletion(
    const std::vector<HalfEdge>& half_edges, std::size_t num_vertices) {
    std::vector<std::vector<std::string>> inputs(num_vertices);
    for (const auto& he : half_edges) {
        std::string enc = he.in_story;
        enc += '\x01';
        enc += he.out_story.empty() ? '\x00' : he.out_story[0];
        inputs[he.owner].push_back(std::move(enc));
    }
    std::map<std::string, std::uint64_t> census;
    for (auto& list : inputs) {
        std::sort(list.begin(), list.end());
        std::string key;
        for (auto& s : list) {
            key += s;
            key += '\x02';
        }
        census[key] += 1;
    }
    return census;
}

bool matching_consistent(const MessageAlphabet& alphabet, const MessagedGraph& mg) {
    // Histories must be consistent vectors typed by their edge endpoints, and
    // the two directions of every edge must have equal length.
    for (Vertex v = 0; v < mg.graph().num_vertices(); ++v) {
        int tv = mg.graph().type(v);
        for (std::size_t p = mg.begin(v); p < mg.end(v); ++p) {
            HistoryVector h = mg.history(p);
            HistoryVector back = mg.history(mg.mirror(p));
            if (h.size() != back.size()) return false;
            if (!is_consistent(alphabet, h)) return false;
            TypePair g = history_typing(alphabet, h);
            if (g.source != tv || g.target != mg.graph().type(mg.edge_target(p))) return false;
        }
    }
    return true;
}

}  // namespace wp
