#include "wp/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace wp {

TypedGraph::TypedGraph(int k, std::vector<int> types) : k_(k), types_(std::move(types)) {
    for (int t : types_)
        if (t < 0 || t >= k_) throw domain_error("vertex type out of range");
    adj_.resize(types_.size());
}

void TypedGraph::add_edge(Vertex u, Vertex v) {
    if (u == v) throw domain_error("loop edge");
    if (u >= types_.size() || v >= types_.size()) throw domain_error("vertex out of range");
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    ++num_edges_;
    finalized_ = false;
}

bool TypedGraph::has_edge(Vertex u, Vertex v) const {
    const auto& a = adj_.at(u);
    if (finalized_) return std::binary_search(a.begin(), a.end(), v);
    return std::find(a.begin(), a.end(), v) != a.end();
}

void TypedGraph::finalize() {
    for (auto& a : adj_) {
        std::sort(a.begin(), a.end());
        if (std::adjacent_find(a.begin(), a.end()) != a.end())
            throw domain_error("multi-edge detected");
    }
    finalized_ = true;
}

std::vector<std::uint64_t> TypedGraph::class_sizes() const {
    std::vector<std::uint64_t> n(k_, 0);
    for (int t : types_) ++n[t];
    return n;
}

int TypedGraph::max_degree() const {
    int d = 0;
    for (const auto& a : adj_) d = std::max(d, static_cast<int>(a.size()));
    return d;
}

DegreeVector TypedGraph::type_degree(Vertex v) const {
    DegreeVector d(k_, 0);
    for (Vertex u : adj_.at(v)) ++d[types_[u]];
    return d;
}

std::vector<std::vector<std::uint64_t>> TypedGraph::class_edge_counts() const {
    std::vector<std::vector<std::uint64_t>> e(k_, std::vector<std::uint64_t>(k_, 0));
    for (Vertex v = 0; v < types_.size(); ++v)
        for (Vertex u : adj_[v]) ++e[types_[v]][types_[u]];
    return e;
}

std::string TypedGraph::to_file_text() const {
    std::ostringstream out;
    auto n = class_sizes();
    out << k_;
    for (auto c : n) out << ' ' << c;
    out << '\n';
    for (Vertex v = 0; v < types_.size(); ++v) out << v << ' ' << types_[v] << '\n';
    for (Vertex v = 0; v < types_.size(); ++v)
        for (Vertex u : adj_[v])
            if (v < u) out << v << ' ' << u << '\n';
    return out.str();
}

TypedGraph TypedGraph::from_file_text(const std::string& text) {
    std::istringstream in(text);
    int k;
    if (!(in >> k)) throw domain_error("bad graph header");
    std::uint64_t total = 0;
    for (int i = 0; i < k; ++i) {
        std::uint64_t c;
        if (!(in >> c)) throw domain_error("bad graph header");
        total += c;
    }
    std::vector<int> types(total, 0);
    for (std::uint64_t r = 0; r < total; ++r) {
        Vertex v;
        int t;
        if (!(in >> v >> t)) throw domain_error("bad vertex line");
        types.at(v) = t;
    }
    TypedGraph g(k, std::move(types));
    Vertex u, v;
    while (in >> u >> v) g.add_edge(u, v);
    g.finalize();
    return g;
}

bool TypeDegreeSequence::edge_balanced() const {
    std::vector<std::vector<std::uint64_t>> sums(k, std::vector<std::uint64_t>(k, 0));
    for (std::size_t v = 0; v < degrees.size(); ++v)
        for (int j = 0; j < k; ++j) sums[vertex_type[v]][j] += degrees[v][j];
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (sums[i][j] != sums[j][i]) return false;
    return true;
}

TypeDegreeSequence TypeDegreeSequence::sample(const DegreeModel& model,
                                              const std::vector<std::uint64_t>& class_counts,
                                              Rng& rng) {
    TypeDegreeSequence seq;
    seq.k = model.num_types();
    for (int i = 0; i < seq.k; ++i)
        for (std::uint64_t c = 0; c < class_counts.at(i); ++c) {
            seq.vertex_type.push_back(i);
            seq.degrees.push_back(model.z(i).sample(rng));
        }
    return seq;
}

TypedGraph sample_binomial_multitype(const std::vector<std::uint64_t>& n_vec,
                                     const std::vector<std::vector<double>>& kernel, Rng& rng) {
    const int k = static_cast<int>(n_vec.size());
    std::uint64_t n_total = 0;
    for (auto c : n_vec) n_total += c;
    if (static_cast<int>(kernel.size()) != k) throw domain_error("kernel shape mismatch");
    for (int i = 0; i < k; ++i) {
        if (static_cast<int>(kernel[i].size()) != k) throw domain_error("kernel shape mismatch");
        for (int j = 0; j < k; ++j) {
            if (kernel[i][j] < 0.0) throw domain_error("negative kernel entry");
            if (std::abs(kernel[i][j] - kernel[j][i]) > 1e-12)
                throw domain_error("kernel must be symmetric");
        }
    }

    std::vector<int> types;
    types.reserve(n_total);
    std::vector<std::uint64_t> class_begin(k + 1, 0);
    for (int i = 0; i < k; ++i) {
        class_begin[i + 1] = class_begin[i] + n_vec[i];
        for (std::uint64_t c = 0; c < n_vec[i]; ++c) types.push_back(i);
    }
    TypedGraph g(k, std::move(types));

    for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
            double p = n_total == 0 ? 0.0
                                    : std::min(1.0, kernel[i][j] / static_cast<double>(n_total));
            if (p <= 0.0) continue;
            std::uint64_t num_pairs =
                i == j ? n_vec[i] * (n_vec[i] - 1) / 2 : n_vec[i] * n_vec[j];
            if (num_pairs == 0) continue;
            // Geometric skip sampling over the lexicographic pair index space.
            double log1mp = std::log1p(-p);
            std::uint64_t idx = 0;
            bool first = true;
            while (true) {
                std::uint64_t gap;
                if (p >= 1.0) {
                    gap = 1;
                } else {
                    double u = rng.uniform01();
                    gap = static_cast<std::uint64_t>(std::floor(std::log1p(-u) / log1mp)) + 1;
                }
                idx = first ? gap - 1 : idx + gap;
                first = false;
                if (idx >= num_pairs) break;
                Vertex a, b;
                if (i == j) {
                    // Unrank idx into the pair 0 <= r < s < n_i.
                    std::uint64_t n_i = n_vec[i];
                    auto row_start = [&](std::uint64_t row) {
                        return row * n_i - row * (row + 1) / 2;
                    };
                    double disc = (n_i - 0.5) * (n_i - 0.5) - 2.0 * static_cast<double>(idx);
                    std::uint64_t r = static_cast<std::uint64_t>(
                        std::max(0.0, std::floor(n_i - 0.5 - std::sqrt(std::max(0.0, disc)))));
                    while (r > 0 && row_start(r) > idx) --r;
                    while (r + 1 < n_i && row_start(r + 1) <= idx) ++r;
                    std::uint64_t s = r + 1 + (idx - row_start(r));
                    a = static_cast<Vertex>(class_begin[i] + r);
                    b = static_cast<Vertex>(class_begin[i] + s);
                } else {
                    a = static_cast<Vertex>(class_begin[i] + idx / n_vec[j]);
                    b = static_cast<Vertex>(class_begin[j] + idx % n_vec[j]);
                }
                g.add_edge(a, b);
            }
        }
    }
    g.finalize();
    return g;
}

ConfigurationResult sample_configuration(const TypeDegreeSequence& typedeg, Rng& rng,
                                         int max_restarts) {
    if (!typedeg.edge_balanced())
        throw domain_error("type-degree sequence is not edge-balanced");
    const int k = typedeg.k;
    const std::size_t n = typedeg.vertex_type.size();

    std::vector<std::vector<Vertex>> stubs(static_cast<std::size_t>(k) * k);
    for (std::size_t v = 0; v < n; ++v) {
        int i = typedeg.vertex_type[v];
        for (int j = 0; j < k; ++j)
            for (int c = 0; c < typedeg.degrees[v][j]; ++c)
                stubs[static_cast<std::size_t>(i) * k + j].push_back(static_cast<Vertex>(v));
    }
    for (int i = 0; i < k; ++i)
        if (stubs[static_cast<std::size_t>(i) * k + i].size() % 2 != 0)
            throw domain_error("odd within-class stub count");

    auto try_match = [&](Rng& attempt_rng, bool erase,
                         std::size_t& erased) -> std::optional<TypedGraph> {
        TypedGraph g(k, typedeg.vertex_type);
        std::set<std::pair<Vertex, Vertex>> seen;
        erased = 0;
        auto push_edge = [&](Vertex a, Vertex b) -> bool {
            if (a == b) return false;
            auto key = std::minmax(a, b);
            return seen.insert({key.first, key.second}).second;
        };
        for (int i = 0; i < k; ++i) {
            for (int j = i; j < k; ++j) {
                if (i == j) {
                    std::vector<Vertex> s = stubs[static_cast<std::size_t>(i) * k + j];
                    std::shuffle(s.begin(), s.end(), attempt_rng.engine());
                    for (std::size_t e = 0; e + 1 < s.size(); e += 2) {
                        if (push_edge(s[e], s[e + 1]))
                            g.add_edge(s[e], s[e + 1]);
                        else if (erase)
                            ++erased;
                        else
                            return std::nullopt;
                    }
                } else {
                    std::vector<Vertex> sa = stubs[static_cast<std::size_t>(i) * k + j];
                    std::vector<Vertex> sb = stubs[static_cast<std::size_t>(j) * k + i];
                    if (sa.size() != sb.size())
                        throw domain_error("cross-class stub counts differ");
                    std::shuffle(sa.begin(), sa.end(), attempt_rng.engine());
                    std::shuffle(sb.begin(), sb.end(), attempt_rng.engine());
                    for (std::size_t e = 0; e < sa.size(); ++e) {
                        if (push_edge(sa[e], sb[e]))
                            g.add_edge(sa[e], sb[e]);
                        else if (erase)
                            ++erased;
                        else
                            return std::nullopt;
                    }
                }
            }
        }
        g.finalize();
        return g;
    };

    ConfigurationResult result;
    for (int attempt = 0; attempt <= max_restarts; ++attempt) {
        Rng attempt_rng = rng.fork(0xc0f1ULL + attempt);
        std::size_t erased = 0;
        auto g = try_match(attempt_rng, false, erased);
        result.restarts = attempt;
        if (g) {
            result.graph = std::move(*g);
            return result;
        }
    }
    Rng attempt_rng = rng.fork(0xe7a5edULL);
    std::size_t erased = 0;
    auto g = try_match(attempt_rng, true, erased);
    result.graph = std::move(*g);
    result.erased_fallback = true;
    result.erased_edges = erased;
    result.restarts = max_restarts + 1;
    return result;
}

TypedGraph build_dsat_factor_graph(std::uint64_t n_vars, std::uint64_t m_clauses, int d,
                                   Rng& rng) {
    if (d < 1) throw domain_error("clause size must be >= 1");
    if (n_vars == 0 && m_clauses > 0) throw domain_error("clauses need variables");
    // Types: 0 variables, 1 clauses, 2 positive occurrences, 3 negative.
    std::vector<int> types;
    std::uint64_t occ_total = m_clauses * static_cast<std::uint64_t>(d);
    types.reserve(n_vars + m_clauses + occ_total);
    for (std::uint64_t v = 0; v < n_vars; ++v) types.push_back(0);
    for (std::uint64_t c = 0; c < m_clauses; ++c) types.push_back(1);

    struct Occ {
        Vertex var, clause;
        bool positive;
    };
    std::vector<Occ> occs;
    occs.reserve(occ_total);
    for (std::uint64_t c = 0; c < m_clauses; ++c) {
        for (int pick = 0; pick < d; ++pick) {
            Vertex var = static_cast<Vertex>(rng.uniform_below(n_vars));
            bool positive = rng.bernoulli(0.5);
            occs.push_back({var, static_cast<Vertex>(n_vars + c), positive});
        }
    }
    for (auto& o : occs) types.push_back(o.positive ? 2 : 3);
    TypedGraph g(4, std::move(types));
    Vertex occ_base = static_cast<Vertex>(n_vars + m_clauses);
    for (std::size_t idx = 0; idx < occs.size(); ++idx) {
        Vertex s = occ_base + static_cast<Vertex>(idx);
        g.add_edge(occs[idx].var, s);
        g.add_edge(s, occs[idx].clause);
    }
    g.finalize();
    return g;
}

namespace {

// Canonical encoding of a rooted tree with vertex type colours (AHU-style).
std::string canonical_tree_encoding(const std::vector<int>& types,
                                    const std::vector<std::vector<int>>& children, int root) {
    std::string enc = "(" + std::to_string(types[root]);
    std::vector<std::string> kids;
    kids.reserve(children[root].size());
    for (int c : children[root]) kids.push_back(canonical_tree_encoding(types, children, c));
    std::sort(kids.begin(), kids.end());
    for (auto& s : kids) enc += s;
    enc += ")";
    return enc;
}

// Colour refinement certificate for the rare cyclic balls; collisions only
// merge refinement-equivalent balls (documented limitation).
std::string refinement_certificate(const std::vector<int>& types,
                                   const std::vector<std::vector<int>>& adj, int root) {
    const int n = static_cast<int>(types.size());
    std::vector<int> colour(n);
    for (int v = 0; v < n; ++v) colour[v] = types[v];
    for (int round = 0; round < n; ++round) {
        std::vector<std::pair<std::string, int>> sig(n);
        for (int v = 0; v < n; ++v) {
            std::vector<int> neigh;
            neigh.reserve(adj[v].size());
            for (int u : adj[v]) neigh.push_back(colour[u]);
            std::sort(neigh.begin(), neigh.end());
            std::string s = std::to_string(colour[v]) + "|";
            for (int c : neigh) s += std::to_string(c) + ",";
            sig[v] = {std::move(s), v};
        }
        std::vector<std::pair<std::string, int>> sorted = sig;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> next(n);
        int next_colour = 0;
        for (int r = 0; r < n; ++r) {
            if (r > 0 && sorted[r].first != sorted[r - 1].first) ++next_colour;
            next[sorted[r].second] = next_colour;
        }
        if (next == colour) break;
        colour = next;
    }
    std::vector<int> hist(colour);
    std::sort(hist.begin(), hist.end());
    std::vector<std::pair<int, int>> edge_cols;
    for (int v = 0; v < n; ++v)
        for (int u : adj[v])
            if (v < u) edge_cols.push_back(std::minmax(colour[v], colour[u]));
    std::sort(edge_cols.begin(), edge_cols.end());
    std::string cert = "C" + std::to_string(colour[root]) + "#";
    for (int h : hist) cert += std::to_string(h) + ",";
    cert += "#";
    for (auto& [a, b] : edge_cols) cert += std::to_string(a) + "-" + std::to_string(b) + ",";
    return cert;
}

}  // namespace

std::string ball_certificate(const TypedGraph& graph, Vertex root, int radius) {
    std::unordered_map<Vertex, int> local;
    std::vector<Vertex> order;
    std::vector<int> depth;
    local[root] = 0;
    order.push_back(root);
    depth.push_back(0);
    std::size_t head = 0;
    while (head < order.size()) {
        Vertex v = order[head];
        int dv = depth[head];
        ++head;
        if (dv == radius) continue;
        for (Vertex u : graph.neighbours(v)) {
            if (local.count(u)) continue;
            local[u] = static_cast<int>(order.size());
            order.push_back(u);
            depth.push_back(dv + 1);
        }
    }
    const int n = static_cast<int>(order.size());
    std::vector<int> types(n);
    std::vector<std::vector<int>> adj(n);
    std::size_t induced_edges = 0;
    for (int v = 0; v < n; ++v) {
        types[v] = graph.type(order[v]);
        for (Vertex u : graph.neighbours(order[v])) {
            auto it = local.find(u);
            if (it == local.end()) continue;
            adj[v].push_back(it->second);
            if (v < it->second) ++induced_edges;
        }
    }
    if (induced_edges == static_cast<std::size_t>(n) - 1) {
        std::vector<std::vector<int>> children(n);
        std::vector<bool> visited(n, false);
        std::deque<int> q{0};
        visited[0] = true;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int u : adj[v])
                if (!visited[u]) {
                    visited[u] = true;
                    children[v].push_back(u);
                    q.push_back(u);
                }
        }
        return "T" + canonical_tree_encoding(types, children, 0);
    }
    return refinement_certificate(types, adj, 0);
}

std::string tree_certificate(const GWTree& tree) {
    const int n = static_cast<int>(tree.nodes.size());
    std::vector<int> types(n);
    std::vector<std::vector<int>> children(n);
    for (int v = 0; v < n; ++v) {
        types[v] = tree.nodes[v].type;
        if (tree.nodes[v].parent >= 0) children[tree.nodes[v].parent].push_back(v);
    }
    return "T" + canonical_tree_encoding(types, children, 0);
}

NeighbourhoodStats empirical_neighbourhoods(const TypedGraph& graph, int i, int r) {
    if (r > 5) throw domain_error("certificate radius capped at 5");
    NeighbourhoodStats stats;
    stats.root_type = i;
    stats.radius = r;
    std::map<std::string, std::uint64_t> counts;
    for (Vertex v = 0; v < graph.num_vertices(); ++v) {
        if (graph.type(v) != i) continue;
        ++stats.roots;
        counts[ball_certificate(graph, v, r)] += 1;
    }
    for (auto& [cert, c] : counts)
        stats.freq[cert] = static_cast<double>(c) / static_cast<double>(stats.roots);
    return stats;
}

TvToTreeReport tv_to_tree(const NeighbourhoodStats& stats, const DegreeModel& model, int i,
                          int r, OffspringMode mode, std::uint64_t tree_samples, Rng& rng) {
    if (tree_samples < 1) throw domain_error("tv_to_tree needs tree samples");
    OffspringTable offspring(model, mode);
    std::map<std::string, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < tree_samples; ++s) {
        Rng draw = rng.fork(s);
        GWTree tree = sample_tree_i(model, offspring, i, r, draw);
        counts[tree_certificate(tree)] += 1;
    }
    std::set<std::string> keys;
    for (auto& [c, f] : stats.freq) keys.insert(c);
    for (auto& [c, f] : counts) keys.insert(c);
    double l1 = 0.0;
    for (auto& c : keys) {
        double pg = 0.0, pt = 0.0;
        auto ig = stats.freq.find(c);
        if (ig != stats.freq.end()) pg = ig->second;
        auto it = counts.find(c);
        if (it != counts.end()) pt = static_cast<double>(it->second) / tree_samples;
        l1 += std::abs(pg - pt);
    }
    TvToTreeReport report;
    report.tv = 0.5 * l1;
    report.tree_samples = tree_samples;
    report.sampling_bound =
        0.5 * std::sqrt(static_cast<double>(keys.size()) / static_cast<double>(tree_samples));
    return report;
}

std::uint64_t count_near_short_cycle(const TypedGraph& graph, int t0) {
    if (t0 > 10) throw domain_error("near-short-cycle horizon capped at 10");
    const std::size_t n = graph.num_vertices();
    std::vector<bool> in_w(n, false);
    // A vertex lies on a <= t0 cycle iff some incident edge closes a path of
    // length <= t0-1 between its endpoints that avoids the edge itself.
    std::vector<int> dist(n, -1);
    std::vector<Vertex> touched;
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v : graph.neighbours(u)) {
            if (v < u) continue;
            touched.clear();
            std::deque<Vertex> q{u};
            dist[u] = 0;
            touched.push_back(u);
            bool found = false;
            while (!q.empty() && !found) {
                Vertex x = q.front();
                q.pop_front();
                if (dist[x] >= t0 - 1) continue;
                for (Vertex y : graph.neighbours(x)) {
                    if (x == u && y == v) continue;
                    if (y == v) {
                        found = true;
                        break;
                    }
                    if (dist[y] != -1) continue;
                    dist[y] = dist[x] + 1;
                    touched.push_back(y);
                    q.push_back(y);
                }
            }
            for (Vertex t : touched) dist[t] = -1;
            if (found) {
                in_w[u] = true;
                in_w[v] = true;
            }
        }
    }
    std::vector<Vertex> frontier;
    for (Vertex v = 0; v < n; ++v)
        if (in_w[v]) frontier.push_back(v);
    for (int step = 0; step < t0; ++step) {
        std::vector<Vertex> next;
        for (Vertex v : frontier)
            for (Vertex u : graph.neighbours(v))
                if (!in_w[u]) {
                    in_w[u] = true;
                    next.push_back(u);
                }
        frontier = std::move(next);
    }
    std::uint64_t count = 0;
    for (Vertex v = 0; v < n; ++v)
        if (in_w[v]) ++count;
    return count;
}

}  // namespace wp
