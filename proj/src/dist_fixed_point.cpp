#include "wp/dist_fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace wp {

namespace {

// Law of the rule image over multisets drawn as: for each type h, a_h i.i.d.
// messages from q_cols[h]; enumerated by multinomial composition per type.
void accumulate_multiset_law(const MessageAlphabet& alphabet, const UpdateRule& rule,
                             const DegreeVector& a,
                             const std::vector<std::vector<std::pair<Symbol, double>>>& q_cols,
                             double weight, TypePair edge_type, std::vector<double>& out) {
    const int k = static_cast<int>(a.size());
    std::vector<std::uint32_t> counts(alphabet.size(), 0);

    // Recurse over types, and within a type over its support symbols,
    // distributing a_h draws multinomially.
    std::function<void(int, double)> per_type = [&](int h, double p_acc) {
        if (p_acc == 0.0) return;
        if (h == k) {
            Symbol out_sym = rule.evaluate(alphabet, counts, edge_type);
            out[out_sym] += weight * p_acc;
            return;
        }
        if (a[h] == 0) {
            per_type(h + 1, p_acc);
            return;
        }
        const auto& support = q_cols[h];
        if (support.empty()) throw domain_error("empty message distribution for child type");
        // Compositions of a[h] over the support symbols with multinomial weight.
        std::function<void(std::size_t, int, double)> comp = [&](std::size_t s, int rest,
                                                                 double w) {
            if (s + 1 == support.size()) {
                counts[support[s].first] += rest;
                per_type(h + 1, p_acc * w * std::pow(support[s].second, rest));
                counts[support[s].first] -= rest;
                return;
            }
            for (int c = 0; c <= rest; ++c) {
                double binom = std::exp(std::lgamma(rest + 1.0) - std::lgamma(c + 1.0) -
                                        std::lgamma(rest - c + 1.0));
                counts[support[s].first] += c;
                comp(s + 1, rest - c, w * binom * std::pow(support[s].second, c));
                counts[support[s].first] -= c;
            }
        };
        comp(0, a[h], 1.0);
    };
    per_type(0, 1.0);
}

std::vector<std::vector<std::pair<Symbol, double>>> column_supports(
    const ProbDistMatrix& q, int target_type) {
    // q_cols[h] = support of the (h, target) entry: messages a type-h child
    // sends to a type-target vertex.
    const int k = q.num_types();
    std::vector<std::vector<std::pair<Symbol, double>>> cols(k);
    for (int h = 0; h < k; ++h) {
        if (!q.present(h, target_type)) continue;
        const auto& probs = q.entry(h, target_type);
        for (std::size_t mu = 0; mu < probs.size(); ++mu)
            if (probs[mu] > 0.0) cols[h].push_back({static_cast<Symbol>(mu), probs[mu]});
    }
    return cols;
}

}  // namespace

PhiStepResult phi_step_exact(const DegreeModel& model, const OffspringTable& offspring,
                             const MessageAlphabet& alphabet, const UpdateRule& rule,
                             const ProbDistMatrix& q, const PhiStepOptions& options) {
    const int k = model.num_types();
    PhiStepResult result;
    result.matrix = ProbDistMatrix(k, alphabet.size());
    for (int i = 0; i < k; ++i) {
        auto q_cols = column_supports(q, i);
        for (int j = 0; j < k; ++j) {
            if (!model.admissible(i, j)) continue;
            const OffspringLaw& law = offspring.law(i, j);
            int cap = options.degree_cap > 0 ? options.degree_cap
                                             : law.enumeration_cap(options.cap_mass_tol);
            std::vector<double> out(alphabet.size(), 0.0);
            double covered = 0.0;
            law.enumerate(cap, [&](const DegreeVector& a, double p) {
                covered += p;
                accumulate_multiset_law(alphabet, rule, a, q_cols, p, {i, j}, out);
            });
            double residual = std::max(0.0, 1.0 - covered);
            result.truncated_mass = std::max(result.truncated_mass, residual);
            if (residual > options.max_residual)
                throw numeric_error("phi_step truncation residual above bound");
            double total = 0.0;
            for (double x : out) total += x;
            if (total <= 0.0) throw numeric_error("phi_step produced zero mass");
            for (double& x : out) x /= total;
            result.matrix.set_entry(i, j, std::move(out));
        }
    }
    return result;
}

ProbDistMatrix phi_step_mc(const DegreeModel& model, const OffspringTable& offspring,
                           const MessageAlphabet& alphabet, const UpdateRule& rule,
                           const ProbDistMatrix& q, std::uint64_t samples, Rng& rng) {
    if (samples < 1000) throw domain_error("phi_step_mc needs at least 10^3 samples");
    const int k = model.num_types();
    ProbDistMatrix out(k, alphabet.size());
    std::vector<std::uint32_t> counts(alphabet.size(), 0);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (!model.admissible(i, j)) continue;
            const OffspringLaw& law = offspring.law(i, j);
            std::vector<double> freq(alphabet.size(), 0.0);
            for (std::uint64_t s = 0; s < samples; ++s) {
                DegreeVector a = law.sample(rng);
                std::fill(counts.begin(), counts.end(), 0);
                for (int h = 0; h < k; ++h)
                    for (int c = 0; c < a[h]; ++c) ++counts[q.sample(h, i, rng)];
                Symbol mu = rule.evaluate(alphabet, counts, {i, j});
                freq[mu] += 1.0;
            }
            for (double& f : freq) f /= static_cast<double>(samples);
            out.set_entry(i, j, std::move(freq));
        }
    }
    return out;
}

IterateResult iterate_to_limit(const DegreeModel& model, const MessageAlphabet& alphabet,
                               const UpdateRule& rule, const ProbDistMatrix& q0,
                               OffspringMode mode, const IterateOptions& options) {
    if (options.tol <= 0.0) throw domain_error("tolerance must be positive");
    OffspringTable offspring(model, mode);
    IterateResult result;
    ProbDistMatrix q = q0;
    for (int it = 1; it <= options.max_iters; ++it) {
        ProbDistMatrix next = phi_step_exact(model, offspring, alphabet, rule, q, options.phi).matrix;
        double d = tv_distance(next, q);
        result.tv_log.push_back(d);
        if (result.tv_log.size() >= 2) {
            double prev = result.tv_log[result.tv_log.size() - 2];
            result.contraction.push_back(prev > 0.0 ? d / prev : 0.0);
        }
        q = std::move(next);
        result.iters = it;
        if (d < options.tol) {
            result.converged = true;
            break;
        }
    }
    result.limit = std::move(q);
    return result;
}

StabilityReport stability_check(const DegreeModel& model, const MessageAlphabet& alphabet,
                                const UpdateRule& rule, const ProbDistMatrix& p,
                                OffspringMode mode, Rng& rng,
                                const StabilityOptions& options) {
    OffspringTable offspring(model, mode);
    ProbDistMatrix image_p = phi_step_exact(model, offspring, alphabet, rule, p).matrix;
    StabilityReport report;
    const int k = p.num_types();
    for (int dir = 0; dir < options.directions; ++dir) {
        Rng local = rng.fork(dir);
        ProbDistMatrix q = p;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                if (!p.present(i, j)) continue;
                auto probs = p.entry(i, j);
                auto syms = alphabet.symbols_with_typing({i, j});
                if (syms.size() < 2) continue;
                // Signed zero-sum noise, clipped to keep a distribution,
                // then renormalized.
                std::vector<double> delta(syms.size());
                double mean = 0.0;
                for (auto& d : delta) {
                    d = local.uniform01() - 0.5;
                    mean += d;
                }
                mean /= static_cast<double>(delta.size());
                double total = 0.0;
                for (std::size_t s = 0; s < syms.size(); ++s) {
                    probs[syms[s]] =
                        std::max(0.0, probs[syms[s]] + options.eps * (delta[s] - mean));
                    total += probs[syms[s]];
                }
                if (total <= 0.0) continue;
                for (Symbol mu : syms) probs[mu] /= total;
                q.set_entry(i, j, std::move(probs));
            }
        double denom = tv_distance(q, p);
        if (denom <= 0.0) continue;  // degenerate perturbation
        ProbDistMatrix image_q = phi_step_exact(model, offspring, alphabet, rule, q).matrix;
        double ratio = tv_distance(image_q, image_p) / denom;
        report.lipschitz_estimate = std::max(report.lipschitz_estimate, ratio);
        ++report.directions_used;
    }
    report.stable = report.directions_used > 0 &&
                    report.lipschitz_estimate < 1.0 - options.margin;
    return report;
}

double potential_change_probability(const MessageAlphabet& alphabet,
                                    const HistoryDistMatrix& qhist, Symbol sigma,
                                    Symbol sigma_next) {
    TypePair g = alphabet.source_target(sigma);
    if (!(alphabet.source_target(sigma_next) == g))
        throw domain_error("potential change pair must share a typing");
    if (!qhist.present(g.source, g.target)) return 0.0;
    double p = 0.0;
    for (auto& [key, mass] : qhist.entry(g.source, g.target).prob) {
        for (std::size_t s = 0; s + 1 < key.size(); ++s) {
            if (static_cast<Symbol>(key[s]) == sigma &&
                static_cast<Symbol>(key[s + 1]) == sigma_next) {
                p += mass;
                break;
            }
        }
    }
    return p;
}

}  // namespace wp
