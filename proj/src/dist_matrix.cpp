#include "wp/dist_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace wp {

const std::vector<double>& ProbDistMatrix::entry(int i, int j) const {
    const auto& e = entry_opt(i, j);
    if (!e)
        throw domain_error("absent distribution entry (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
    return *e;
}

void ProbDistMatrix::set_entry(int i, int j, std::vector<double> probs) {
    if (static_cast<int>(probs.size()) != sigma_)
        throw domain_error("distribution entry has wrong alphabet size");
    entry_opt(i, j) = std::move(probs);
}

void ProbDistMatrix::clear_entry(int i, int j) { entry_opt(i, j).reset(); }

double ProbDistMatrix::prob_of(const MessageAlphabet& alphabet, Symbol mu) const {
    TypePair g = alphabet.source_target(mu);
    if (!present(g.source, g.target)) return 0.0;
    return prob(g.source, g.target, mu);
}

Symbol ProbDistMatrix::sample(int i, int j, Rng& rng) const {
    const auto& p = entry(i, j);
    double u = rng.uniform01();
    double acc = 0.0;
    Symbol last = 0;
    for (std::size_t mu = 0; mu < p.size(); ++mu) {
        if (p[mu] <= 0.0) continue;
        acc += p[mu];
        last = static_cast<Symbol>(mu);
        if (u < acc) return last;
    }
    return last;
}

void ProbDistMatrix::validate(const MessageAlphabet& alphabet) const {
    for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j) {
            if (!present(i, j)) continue;
            const auto& p = entry(i, j);
            double s = 0.0;
            for (std::size_t mu = 0; mu < p.size(); ++mu) {
                if (p[mu] < 0.0) throw domain_error("negative probability");
                if (p[mu] > 0.0 && !(alphabet.source_target(static_cast<Symbol>(mu)) ==
                                     TypePair{i, j}))
                    throw domain_error("distribution support violates typing at (" +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
                s += p[mu];
            }
            if (std::abs(s - 1.0) > 1e-12)
                throw domain_error("distribution entry not normalized");
        }
}

ProbDistMatrix ProbDistMatrix::point_mass(const MessageAlphabet& alphabet,
                                          const std::vector<std::pair<int, int>>& pairs,
                                          const std::string& label) {
    ProbDistMatrix q(alphabet.num_types(), alphabet.size());
    for (auto& [i, j] : pairs) {
        std::vector<double> p(alphabet.size(), 0.0);
        p[alphabet.symbol(label, {i, j})] = 1.0;
        q.set_entry(i, j, std::move(p));
    }
    return q;
}

ProbDistMatrix ProbDistMatrix::uniform(const MessageAlphabet& alphabet,
                                       const std::vector<std::pair<int, int>>& pairs) {
    ProbDistMatrix q(alphabet.num_types(), alphabet.size());
    for (auto& [i, j] : pairs) {
        auto syms = alphabet.symbols_with_typing({i, j});
        if (syms.empty()) throw domain_error("no symbols typed for admissible pair");
        std::vector<double> p(alphabet.size(), 0.0);
        for (Symbol mu : syms) p[mu] = 1.0 / syms.size();
        q.set_entry(i, j, std::move(p));
    }
    return q;
}

std::string ProbDistMatrix::to_json(const MessageAlphabet& alphabet) const {
    nlohmann::json j;
    j["k"] = k_;
    auto& entries = j["entries"] = nlohmann::json::array();
    for (int i = 0; i < k_; ++i)
        for (int jj = 0; jj < k_; ++jj) {
            if (!present(i, jj)) continue;
            nlohmann::json e;
            e["i"] = i;
            e["j"] = jj;
            auto& rows = e["probs"] = nlohmann::json::object();
            const auto& p = entry(i, jj);
            for (std::size_t mu = 0; mu < p.size(); ++mu)
                if (p[mu] > 0.0) rows[alphabet.label(static_cast<Symbol>(mu))] = p[mu];
            entries.push_back(std::move(e));
        }
    return j.dump(2);
}

ProbDistMatrix ProbDistMatrix::from_json(const MessageAlphabet& alphabet,
                                         const std::string& text) {
    auto j = nlohmann::json::parse(text);
    ProbDistMatrix q(j.at("k").get<int>(), alphabet.size());
    for (auto& e : j.at("entries")) {
        int i = e.at("i").get<int>(), jj = e.at("j").get<int>();
        std::vector<double> p(alphabet.size(), 0.0);
        for (auto& [label, mass] : e.at("probs").items())
            p[alphabet.symbol(label, {i, jj})] = mass.get<double>();
        q.set_entry(i, jj, std::move(p));
    }
    return q;
}

double tv_distance(const ProbDistMatrix& a, const ProbDistMatrix& b) {
    if (a.num_types() != b.num_types() || a.alphabet_size() != b.alphabet_size())
        throw domain_error("tv_distance: shape mismatch");
    double total = 0.0;
    for (int i = 0; i < a.num_types(); ++i)
        for (int j = 0; j < a.num_types(); ++j) {
            bool pa = a.present(i, j), pb = b.present(i, j);
            if (!pa && !pb) continue;
            if (pa != pb) {
                total += 1.0;
                continue;
            }
            const auto& x = a.entry(i, j);
            const auto& y = b.entry(i, j);
            double l1 = 0.0;
            for (std::size_t mu = 0; mu < x.size(); ++mu) l1 += std::abs(x[mu] - y[mu]);
            total += 0.5 * l1;
        }
    return total;
}

HistoryKey encode_history(const HistoryVector& h) {
    return HistoryKey(reinterpret_cast<const char*>(h.data()), h.size());
}

HistoryVector decode_history(const HistoryKey& key) {
    HistoryVector h(key.size());
    for (std::size_t s = 0; s < key.size(); ++s) h[s] = static_cast<Symbol>(key[s]);
    return h;
}

std::string history_label(const MessageAlphabet& alphabet, const HistoryKey& key) {
    std::string out;
    for (std::size_t s = 0; s < key.size(); ++s) {
        if (s) out += ':';
        out += alphabet.label(static_cast<Symbol>(key[s]));
    }
    return out;
}

HistoryKey history_from_label(const MessageAlphabet& alphabet, TypePair typing,
                              const std::string& label) {
    HistoryVector h;
    std::stringstream ss(label);
    std::string piece;
    while (std::getline(ss, piece, ':')) h.push_back(alphabet.symbol(piece, typing));
    return encode_history(h);
}

HistoryKey HistoryDist::sample(Rng& rng) const {
    if (cum_.empty()) {
        double acc = 0.0;
        for (auto& [key, p] : prob) {  // std::map: deterministic order
            acc += p;
            cum_.push_back(acc);
            cum_keys_.push_back(key);
        }
        if (cum_.empty()) throw domain_error("sampling from empty history distribution");
    }
    return cum_keys_[rng.pick_cumulative(cum_)];
}

HistoryDist& HistoryDistMatrix::mutable_entry(int i, int j) {
    auto& e = entries_.at(idx(i, j));
    if (!e) e.emplace();
    return *e;
}

const HistoryDist& HistoryDistMatrix::entry(int i, int j) const {
    const auto& e = entries_.at(idx(i, j));
    if (!e)
        throw domain_error("absent history entry (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
    return *e;
}

std::vector<double> HistoryDistMatrix::marginal(int i, int j, int t, int alphabet_size) const {
    std::vector<double> m(alphabet_size, 0.0);
    for (auto& [key, p] : entry(i, j).prob) {
        if (t >= static_cast<int>(key.size())) throw domain_error("marginal index out of range");
        m[static_cast<Symbol>(key[t])] += p;
    }
    return m;
}

std::string HistoryDistMatrix::to_csv(const MessageAlphabet& alphabet) const {
    std::ostringstream out;
    out << "i,j,history,count,probability\n";
    for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j) {
            if (!present(i, j)) continue;
            const auto& e = entry(i, j);
            for (auto& [key, p] : e.prob) {
                std::uint64_t c = 0;
                auto it = e.counts.find(key);
                if (it != e.counts.end()) c = it->second;
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", p);
                out << i << ',' << j << ',' << history_label(alphabet, key) << ',' << c << ','
                    << buf << '\n';
            }
        }
    return out.str();
}

}  // namespace wp
