#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wp/alphabet.hpp"
#include "wp/rng.hpp"

namespace wp {

// k x k matrix whose (i,j) entry is a probability distribution over symbols
// typed (i,j). Entries at inadmissible pairs are absent. Distributions are
// stored dense over the full alphabet; support outside the typing is zero.
class ProbDistMatrix {
public:
    ProbDistMatrix() = default;
    ProbDistMatrix(int k, int alphabet_size)
        : k_(k), sigma_(alphabet_size), entries_(static_cast<std::size_t>(k) * k) {}

    int num_types() const { return k_; }
    int alphabet_size() const { return sigma_; }

    bool present(int i, int j) const { return entry_opt(i, j).has_value(); }
    const std::vector<double>& entry(int i, int j) const;
    void set_entry(int i, int j, std::vector<double> probs);
    void clear_entry(int i, int j);

    double prob(int i, int j, Symbol mu) const { return entry(i, j).at(mu); }
    // Probability of mu in the entry g(mu); the only entry that can hold it.
    double prob_of(const MessageAlphabet& alphabet, Symbol mu) const;

    Symbol sample(int i, int j, Rng& rng) const;

    // Validates normalization (1e-12) and that support respects typing.
    void validate(const MessageAlphabet& alphabet) const;

    // Point mass at the symbol with `label` in every admissible entry given by
    // the admissible pair list.
    static ProbDistMatrix point_mass(const MessageAlphabet& alphabet,
                                     const std::vector<std::pair<int, int>>& pairs,
                                     const std::string& label);
    static ProbDistMatrix uniform(const MessageAlphabet& alphabet,
                                  const std::vector<std::pair<int, int>>& pairs);

    std::string to_json(const MessageAlphabet& alphabet) const;
    static ProbDistMatrix from_json(const MessageAlphabet& alphabet, const std::string& text);

    bool operator==(const ProbDistMatrix&) const = default;

private:
    const std::optional<std::vector<double>>& entry_opt(int i, int j) const {
        return entries_.at(static_cast<std::size_t>(i) * k_ + j);
    }
    std::optional<std::vector<double>>& entry_opt(int i, int j) {
        return entries_.at(static_cast<std::size_t>(i) * k_ + j);
    }

    int k_ = 0;
    int sigma_ = 0;
    std::vector<std::optional<std::vector<double>>> entries_;
};

// d_TV on matrices: sum over entries of the entrywise total variation
// distance; an absent-vs-present entry contributes 1.
double tv_distance(const ProbDistMatrix& a, const ProbDistMatrix& b);

// Histories encoded as byte strings of symbol ids.
using HistoryKey = std::string;

HistoryKey encode_history(const HistoryVector& h);
HistoryVector decode_history(const HistoryKey& key);
std::string history_label(const MessageAlphabet& alphabet, const HistoryKey& key);
HistoryKey history_from_label(const MessageAlphabet& alphabet, TypePair typing,
                              const std::string& label);

// One empirical distribution over histories (fixed length).
struct HistoryDist {
    std::map<HistoryKey, double> prob;
    std::map<HistoryKey, std::uint64_t> counts;
    std::uint64_t samples = 0;

    double prob_of(const HistoryKey& key) const {
        auto it = prob.find(key);
        return it == prob.end() ? 0.0 : it->second;
    }
    // The first call warms a cumulative table; concurrent first calls on a
    // shared instance need external synchronization.
    HistoryKey sample(Rng& rng) const;

    mutable std::vector<double> cum_;
    mutable std::vector<HistoryKey> cum_keys_;
};

// k x k matrix of history distributions (entries over Sigma^{t+1}).
class HistoryDistMatrix {
public:
    HistoryDistMatrix() = default;
    HistoryDistMatrix(int k, int history_length)
        : k_(k), len_(history_length), entries_(static_cast<std::size_t>(k) * k) {}

    int num_types() const { return k_; }
    int history_length() const { return len_; }

    bool present(int i, int j) const { return entries_.at(idx(i, j)).has_value(); }
    HistoryDist& mutable_entry(int i, int j);
    const HistoryDist& entry(int i, int j) const;

    // Marginal law of the t-th entry, as a ProbDistMatrix-style dense vector.
    std::vector<double> marginal(int i, int j, int t, int alphabet_size) const;

    std::string to_csv(const MessageAlphabet& alphabet) const;

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * k_ + j; }

    int k_ = 0;
    int len_ = 0;
    std::vector<std::optional<HistoryDist>> entries_;
};

}  // namespace wp
