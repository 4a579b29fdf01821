#include "wp/gw_tree.hpp"

#include <thread>

namespace wp {

namespace {

void grow_levels(GWTree& tree, const DegreeModel& model, const OffspringTable& offspring,
                 int r, Rng& rng, const GWTreeConfig& config) {
    for (int level = static_cast<int>(tree.level_offsets.size()) - 1; level < r; ++level) {
        std::size_t begin = tree.level_offsets.back();
        std::size_t end = tree.nodes.size();
        tree.level_offsets.push_back(end);
        if (begin == end) break;  // extinct
        for (std::size_t w = begin; w < end; ++w) {
            int h = tree.nodes[w].type;
            int parent_type = tree.nodes[w].parent >= 0
                                  ? tree.nodes[tree.nodes[w].parent].type
                                  : tree.root_parent_type;
            DegreeVector kids = parent_type < 0 ? model.z(h).sample(rng)
                                                : offspring.law(h, parent_type).sample(rng);
            for (int j = 0; j < model.num_types(); ++j) {
                for (int c = 0; c < kids[j]; ++c) {
                    if (tree.nodes.size() >= config.vertex_cap)
                        throw resource_error("GW tree exceeded the vertex cap");
                    GWTree::Node node{j, static_cast<std::int32_t>(w)};
                    node.next_sibling = tree.nodes[w].first_child;
                    tree.nodes[w].first_child = static_cast<std::int32_t>(tree.nodes.size());
                    tree.nodes.push_back(node);
                }
            }
        }
    }
    if (tree.level_offsets.back() != tree.nodes.size())
        tree.level_offsets.push_back(tree.nodes.size());
}

}  // namespace

GWTree sample_tree_i(const DegreeModel& model, const OffspringTable& offspring, int i, int r,
                     Rng& rng, const GWTreeConfig& config) {
    if (i < 0 || i >= model.num_types()) throw domain_error("root type out of range");
    if (r < 0) throw domain_error("negative truncation depth");
    GWTree tree;
    tree.edge_rooted = false;
    tree.nodes.push_back({i, -1});
    tree.level_offsets = {0};
    grow_levels(tree, model, offspring, r, rng, config);
    return tree;
}

GWTree sample_tree_i(const DegreeModel& model, int i, int r, OffspringMode mode, Rng& rng,
                     const GWTreeConfig& config) {
    OffspringTable offspring(model, mode);
    return sample_tree_i(model, offspring, i, r, rng, config);
}

GWTree sample_tree_ij(const DegreeModel& model, const OffspringTable& offspring, int i, int j,
                      int r, Rng& rng, const GWTreeConfig& config) {
    if (!model.admissible(i, j)) throw domain_error("sample_tree_ij: inadmissible pair");
    if (r < 0) throw domain_error("negative truncation depth");
    GWTree tree;
    tree.edge_rooted = true;
    tree.root_parent_type = j;
    tree.nodes.push_back({i, -1});
    tree.level_offsets = {0};
    grow_levels(tree, model, offspring, r, rng, config);
    return tree;
}

GWTree sample_tree_ij(const DegreeModel& model, int i, int j, int r, OffspringMode mode,
                      Rng& rng, const GWTreeConfig& config) {
    OffspringTable offspring(model, mode);
    return sample_tree_ij(model, offspring, i, j, r, rng, config);
}

HistoryVector root_history_on_tree(const GWTree& tree, const MessageAlphabet& alphabet,
                                   const UpdateRule& rule, int t, const ProbDistMatrix& q0,
                                   Rng& rng) {
    if (!tree.edge_rooted) throw domain_error("root_history needs an edge-rooted tree");
    const std::size_t n = tree.nodes.size();
    // cur[w] = message from node w to its parent at the current round.
    std::vector<Symbol> cur(n), next(n);
    for (std::size_t w = 0; w < n; ++w) {
        int h = tree.nodes[w].type;
        int p = tree.nodes[w].parent >= 0 ? tree.nodes[tree.nodes[w].parent].type
                                          : tree.root_parent_type;
        cur[w] = q0.sample(h, p, rng);
    }
    HistoryVector out;
    out.reserve(t + 1);
    out.push_back(cur[0]);
    std::vector<std::uint32_t> counts(alphabet.size());
    for (int round = 1; round <= t; ++round) {
        for (std::size_t w = 0; w < n; ++w) {
            int h = tree.nodes[w].type;
            int p = tree.nodes[w].parent >= 0 ? tree.nodes[tree.nodes[w].parent].type
                                              : tree.root_parent_type;
            std::fill(counts.begin(), counts.end(), 0);
            for (std::int32_t c = tree.nodes[w].first_child; c >= 0;
                 c = tree.nodes[c].next_sibling)
                ++counts[cur[c]];
            next[w] = rule.evaluate(alphabet, counts, {h, p});
        }
        cur.swap(next);
        out.push_back(cur[0]);
    }
    return out;
}

HistoryVector root_history(const DegreeModel& model, const OffspringTable& offspring,
                           const MessageAlphabet& alphabet, const UpdateRule& rule, int i,
                           int j, int t, const ProbDistMatrix& q0, Rng& rng,
                           const GWTreeConfig& config) {
    if (t < 0) throw domain_error("negative round count");
    GWTree tree = sample_tree_ij(model, offspring, i, j, t, rng, config);
    return root_history_on_tree(tree, alphabet, rule, t, q0, rng);
}

HistoryDistMatrix history_distribution(const DegreeModel& model,
                                       const MessageAlphabet& alphabet, const UpdateRule& rule,
                                       int t, const ProbDistMatrix& q0, OffspringMode mode,
                                       std::uint64_t samples, Rng& rng, int num_threads) {
    if (samples < 1) throw domain_error("history_distribution needs samples >= 1");
    const int k = model.num_types();
    OffspringTable offspring(model, mode);
    HistoryDistMatrix out(k, t + 1);
    std::uint64_t pair_index = 0;
    for (auto& [i, j] : model.admissible_pairs().pairs) {
        auto& entry = out.mutable_entry(i, j);
        Rng local = rng.fork(0x68690000ULL + pair_index);
        if (num_threads <= 1) {
            for (std::uint64_t s = 0; s < samples; ++s) {
                Rng draw = local.fork(s);
                HistoryVector h =
                    root_history(model, offspring, alphabet, rule, i, j, t, q0, draw);
                entry.counts[encode_history(h)] += 1;
            }
        } else {
            std::vector<std::map<HistoryKey, std::uint64_t>> partial(num_threads);
            std::vector<std::thread> workers;
            for (int w = 0; w < num_threads; ++w) {
                workers.emplace_back([&, w]() {
                    for (std::uint64_t s = w; s < samples; s += num_threads) {
                        Rng draw = local.fork(s);
                        HistoryVector h =
                            root_history(model, offspring, alphabet, rule, i, j, t, q0, draw);
                        partial[w][encode_history(h)] += 1;
                    }
                });
            }
            for (auto& th : workers) th.join();
            for (auto& part : partial)
                for (auto& [key, c] : part) entry.counts[key] += c;
        }
        entry.samples = samples;
        for (auto& [key, c] : entry.counts)
            entry.prob[key] = static_cast<double>(c) / static_cast<double>(samples);
        ++pair_index;
    }
    return out;
}

}  // namespace wp
