#include "wp/change_process.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <thread>

namespace wp {

PotentialChangeReport potential_changes(const DegreeModel& model,
                                        const MessageAlphabet& alphabet,
                                        const UpdateRule& rule, const ProbDistMatrix& q0,
                                        OffspringMode mode,
                                        const PotentialChangeOptions& options, Rng& rng) {
    if (options.t_max < 1) throw domain_error("potential_changes needs t_max >= 1");
    OffspringTable offspring(model, mode);

    // Worst-case mean offspring over admissible pairs bounds the expected
    // tree size per generation.
    double mean_offspring = 0.0;
    for (auto& [i, j] : model.admissible_pairs().pairs)
        mean_offspring = std::max(mean_offspring, offspring.law(i, j).mean_total());

    auto depth_for_budget = [&](std::uint64_t samples) {
        double size = 1.0;
        double level = 1.0;
        int t = 0;
        while (t < options.t_max) {
            level *= std::max(1.0, mean_offspring);
            double next = size + level;
            if (next * static_cast<double>(samples) >
                static_cast<double>(options.node_budget))
                break;
            size = next;
            ++t;
        }
        return std::max(1, t);
    };
    const int t_eff = depth_for_budget(options.samples);

    PotentialChangeReport report;
    report.t_effective = t_eff;
    std::map<ChangePair, std::uint64_t> hits;
    std::uint64_t pair_index = 0;
    for (auto& [i, j] : model.admissible_pairs().pairs) {
        Rng local = rng.fork(0x9c7000ULL + pair_index++);
        for (std::uint64_t s = 0; s < options.samples; ++s) {
            Rng draw = local.fork(s);
            HistoryVector h =
                root_history(model, offspring, alphabet, rule, i, j, t_eff, q0, draw);
            std::set<ChangePair> seen;
            for (std::size_t t = 0; t + 1 < h.size(); ++t)
                if (h[t] != h[t + 1]) seen.insert({h[t], h[t + 1]});
            for (auto& p : seen) hits[p] += 1;
        }
    }
    for (auto& [pair, c] : hits) {
        PotentialChange pc;
        pc.pair = pair;
        pc.frequency = static_cast<double>(c) / static_cast<double>(options.samples);
        pc.rare_unconfirmed = pc.frequency < 1e-5;
        report.pairs.push_back(pc);
    }
    return report;
}

namespace {

// State of one cascade vertex: the changed pair arriving from its parent.
struct CascadeItem {
    std::int32_t node;  // index into ChangeTree::nodes
    int vertex_type;
    int parent_type;
};

}  // namespace

ChangeTree sample_change_tree(const DegreeModel& model, const OffspringTable& offspring,
                              const MessageAlphabet& alphabet, const UpdateRule& rule,
                              ChangePair pair, const ProbDistMatrix& q, Rng& rng,
                              const ChangeTreeConfig& config) {
    TypePair g = alphabet.source_target(pair.old_symbol);
    if (!(alphabet.source_target(pair.new_symbol) == g))
        throw domain_error("change pair must share a typing");
    ChangeTree tree;
    // The changed message flows from the parent (type g.source) into the
    // root-edge child v of type g.target.
    tree.nodes.push_back({pair, -1, 0});
    std::deque<CascadeItem> queue;
    queue.push_back({0, g.target, g.source});

    std::vector<std::uint32_t> counts(alphabet.size(), 0);
    while (!queue.empty()) {
        CascadeItem item = queue.front();
        queue.pop_front();
        const ChangePair arriving = tree.nodes[item.node].pair;
        int depth = tree.nodes[item.node].depth;
        if (depth >= config.depth_cap) {
            tree.truncated = true;
            continue;
        }
        if (arriving.old_symbol == arriving.new_symbol) continue;  // dead edge
        // Children of this vertex: Zhat_{parent -> vertex}; upward messages
        // are drawn i.i.d. per Q (the unconditioned idealised construction).
        DegreeVector kids = offspring.law(item.vertex_type, item.parent_type).sample(rng);
        std::vector<int> child_types;
        std::vector<Symbol> child_up;
        for (int h = 0; h < model.num_types(); ++h)
            for (int c = 0; c < kids[h]; ++c) {
                child_types.push_back(h);
                child_up.push_back(q.sample(h, item.vertex_type, rng));
            }
        if (child_types.empty()) continue;
        // Incoming counts at the vertex from all children.
        std::fill(counts.begin(), counts.end(), 0);
        for (Symbol mu : child_up) ++counts[mu];
        for (std::size_t c = 0; c < child_types.size(); ++c) {
            // Message to child c uses the other children plus the parent
            // message, under each scenario.
            --counts[child_up[c]];
            ++counts[arriving.old_symbol];
            Symbol down_old =
                rule.evaluate(alphabet, counts, {item.vertex_type, child_types[c]});
            --counts[arriving.old_symbol];
            ++counts[arriving.new_symbol];
            Symbol down_new =
                rule.evaluate(alphabet, counts, {item.vertex_type, child_types[c]});
            --counts[arriving.new_symbol];
            ++counts[child_up[c]];
            if (down_old == down_new) continue;
            if (tree.nodes.size() >= config.node_cap) {
                tree.truncated = true;
                break;
            }
            tree.nodes.push_back({{down_old, down_new}, item.node, depth + 1});
            queue.push_back({static_cast<std::int32_t>(tree.nodes.size() - 1),
                             child_types[c], item.vertex_type});
        }
        if (tree.truncated) break;
    }
    return tree;
}

TransitionMatrix estimate_transition_matrix(const DegreeModel& model,
                                            const OffspringTable& offspring,
                                            const MessageAlphabet& alphabet,
                                            const UpdateRule& rule, const ProbDistMatrix& q,
                                            const std::vector<ChangePair>& pairs,
                                            std::uint64_t samples, Rng& rng,
                                            int num_threads) {
    TransitionMatrix tm;
    tm.sigma = alphabet.size();
    const std::size_t dim = tm.dim();
    tm.entries.assign(dim * dim, 0.0);
    tm.stderrs.assign(dim * dim, 0.0);
    tm.column_samples.assign(dim, 0);

    ChangeTreeConfig one_gen;
    one_gen.depth_cap = 1;  // only the first generation matters for T

    auto estimate_column = [&](const ChangePair& seed, Rng col_rng,
                               std::vector<double>& mean, std::vector<double>& se) {
        std::vector<double> sum(dim, 0.0), sumsq(dim, 0.0);
        auto worker = [&](std::uint64_t lo, std::uint64_t hi, std::vector<double>& s,
                          std::vector<double>& s2) {
            std::vector<double> local(dim, 0.0);
            for (std::uint64_t rep = lo; rep < hi; ++rep) {
                Rng draw = col_rng.fork(rep);
                ChangeTree t =
                    sample_change_tree(model, offspring, alphabet, rule, seed, q, draw, one_gen);
                std::fill(local.begin(), local.end(), 0.0);
                for (std::size_t node = 1; node < t.nodes.size(); ++node)
                    if (t.nodes[node].depth == 1)
                        local[TransitionMatrix::pair_index(tm.sigma, t.nodes[node].pair)] += 1.0;
                for (std::size_t r = 0; r < dim; ++r) {
                    s[r] += local[r];
                    s2[r] += local[r] * local[r];
                }
            }
        };
        if (num_threads <= 1) {
            worker(0, samples, sum, sumsq);
        } else {
            std::vector<std::vector<double>> psum(num_threads, std::vector<double>(dim, 0.0));
            std::vector<std::vector<double>> psumsq(num_threads, std::vector<double>(dim, 0.0));
            std::vector<std::thread> threads;
            std::uint64_t chunk = (samples + num_threads - 1) / num_threads;
            for (int w = 0; w < num_threads; ++w) {
                std::uint64_t lo = w * chunk, hi = std::min<std::uint64_t>(samples, lo + chunk);
                if (lo >= hi) break;
                threads.emplace_back(
                    [&, lo, hi, w]() { worker(lo, hi, psum[w], psumsq[w]); });
            }
            for (auto& th : threads) th.join();
            for (int w = 0; w < num_threads; ++w)
                for (std::size_t r = 0; r < dim; ++r) {
                    sum[r] += psum[w][r];
                    sumsq[r] += psumsq[w][r];
                }
        }
        for (std::size_t r = 0; r < dim; ++r) {
            double m = sum[r] / static_cast<double>(samples);
            double var = std::max(0.0, sumsq[r] / static_cast<double>(samples) - m * m);
            mean[r] = m;
            se[r] = std::sqrt(var / static_cast<double>(samples));
        }
    };

    std::uint64_t col_index = 0;
    for (const auto& seed : pairs) {
        std::size_t col = TransitionMatrix::pair_index(tm.sigma, seed);
        std::vector<double> mean(dim, 0.0), se(dim, 0.0);
        estimate_column(seed, rng.fork(0x7a5d00ULL + col_index++), mean, se);
        for (std::size_t r = 0; r < dim; ++r) {
            tm.entries[r * dim + col] = mean[r];
            tm.stderrs[r * dim + col] = se[r];
        }
        tm.column_samples[col] = samples;
    }
    return tm;
}

std::string TransitionMatrix::to_csv(const MessageAlphabet& alphabet) const {
    std::ostringstream out;
    out << "row_old,row_new,col_old,col_new,entry,stderr\n";
    const std::size_t d = dim();
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            if (entries[r * d + c] == 0.0 && stderrs[r * d + c] == 0.0 &&
                column_samples[c] == 0)
                continue;
            Symbol ro = static_cast<Symbol>(r / sigma), rn = static_cast<Symbol>(r % sigma);
            Symbol co = static_cast<Symbol>(c / sigma), cn = static_cast<Symbol>(c % sigma);
            char e[32], s[32];
            std::snprintf(e, sizeof e, "%.17g", entries[r * d + c]);
            std::snprintf(s, sizeof s, "%.17g", stderrs[r * d + c]);
            out << alphabet.label(ro) << ',' << alphabet.label(rn) << ',' << alphabet.label(co)
                << ',' << alphabet.label(cn) << ',' << e << ',' << s << '\n';
        }
    return out.str();
}

PerronData perron_dense(const std::vector<double>& matrix, std::size_t dim, double pad_eps) {
    for (double x : matrix)
        if (x < 0.0) throw domain_error("perron expects a nonnegative matrix");
    PerronData data;
    if (dim == 0) return data;
    std::vector<double> v(dim, 1.0 / static_cast<double>(dim)), w(dim, 0.0);
    double rho = 0.0;
    const int max_iters = 200'000;
    int it = 0;
    for (; it < max_iters; ++it) {
        double sum = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
            double acc = 0.0;
            const double* row = matrix.data() + r * dim;
            for (std::size_t c = 0; c < dim; ++c) acc += (row[c] + pad_eps) * v[c];
            w[r] = acc;
            sum += acc;
        }
        if (sum <= 0.0) {
            rho = 0.0;
            break;
        }
        double next_rho = sum;  // since ||v||_1 = 1, sum = ||T'v||_1
        for (std::size_t r = 0; r < dim; ++r) w[r] /= sum;
        double residual = 0.0;
        for (std::size_t r = 0; r < dim; ++r) residual += std::abs(w[r] - v[r]);
        v.swap(w);
        bool rho_settled = std::abs(next_rho - rho) <= 1e-10 * std::max(1.0, next_rho);
        rho = next_rho;
        if (residual < 1e-12 && rho_settled && it > 2) break;
    }
    if (it >= max_iters) throw numeric_error("power iteration did not converge");
    data.rho = rho;
    data.gamma = 1.0 - rho;
    data.alpha = v;
    data.iterations = it + 1;
    // Pointwise certificate on the unpadded matrix: T alpha <= (1-gamma) alpha.
    // With zero padding the bound holds with equality, so allow rounding slack.
    data.pointwise_certificate = true;
    for (std::size_t r = 0; r < dim; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < dim; ++c) acc += matrix[r * dim + c] * v[c];
        double bound = (1.0 - data.gamma) * v[r];
        if (acc > bound * (1.0 + 1e-9) + 1e-15) data.pointwise_certificate = false;
        if (v[r] <= 0.0) data.pointwise_certificate = false;
    }
    return data;
}

PerronData perron(const TransitionMatrix& t, double pad_eps) {
    return perron_dense(t.entries, t.dim(), pad_eps);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Subcritical: return "subcritical";
        case Verdict::Supercritical: return "supercritical";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

SubcriticalityReport subcriticality_verdict(const DegreeModel& model,
                                            const MessageAlphabet& alphabet,
                                            const UpdateRule& rule, const ProbDistMatrix& q0,
                                            const SubcriticalityConfig& config, Rng& rng) {
    SubcriticalityReport report;
    // Fixed point.
    IterateResult fp = iterate_to_limit(model, alphabet, rule, q0, config.mode, config.iterate);
    report.fixed_point_converged = fp.converged;
    report.fixed_point_iters = fp.iters;
    const ProbDistMatrix& p = fp.limit;

    Rng pc_rng = rng.fork(1);
    PotentialChangeReport pc_report =
        potential_changes(model, alphabet, rule, p, config.mode, config.potential, pc_rng);
    report.pairs = pc_report.pairs;
    report.potential_t_effective = pc_report.t_effective;
    std::vector<ChangePair> pairs;
    for (auto& pc : report.pairs) pairs.push_back(pc.pair);

    OffspringTable offspring(model, config.mode);
    Rng tm_rng = rng.fork(2);
    report.transition = estimate_transition_matrix(model, offspring, alphabet, rule, p, pairs,
                                                   config.tm_samples, tm_rng,
                                                   config.num_threads);
    report.perron_data = perron(report.transition, config.pad_eps);
    report.rho = report.perron_data.rho;
    report.gamma = report.perron_data.gamma;

    // Spectral radius with every estimated entry padded up by two standard
    // errors; the verdict threshold.
    const std::size_t dim = report.transition.dim();
    std::vector<double> upper(dim * dim);
    std::vector<double> lower(dim * dim);
    for (std::size_t x = 0; x < dim * dim; ++x) {
        upper[x] = report.transition.entries[x] + 2.0 * report.transition.stderrs[x];
        lower[x] = std::max(0.0, report.transition.entries[x] -
                                     2.0 * report.transition.stderrs[x]);
    }
    report.rho_upper = perron_dense(upper, dim, config.pad_eps).rho;
    double rho_lower = perron_dense(lower, dim, config.pad_eps).rho;

    if (report.rho_upper < 1.0)
        report.verdict = Verdict::Subcritical;
    else if (rho_lower > 1.0)
        report.verdict = Verdict::Supercritical;
    else
        report.verdict = Verdict::Inconclusive;

    // Optional estimate at P' = phi^{t0-1}(Q0).
    if (config.t0 > 0) {
        ProbDistMatrix pprime = q0;
        for (int t = 0; t < config.t0 - 1; ++t)
            pprime = phi_step_exact(model, offspring, alphabet, rule, pprime,
                                    config.iterate.phi)
                         .matrix;
        Rng tm2_rng = rng.fork(3);
        TransitionMatrix t1 = estimate_transition_matrix(model, offspring, alphabet, rule,
                                                         pprime, pairs, config.tm_samples,
                                                         tm2_rng, config.num_threads);
        report.has_perturbed = true;
        report.rho_perturbed = perron(t1, config.pad_eps).rho;
    }
    return report;
}

}  // namespace wp
