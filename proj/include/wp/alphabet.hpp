#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wp/errors.hpp"

namespace wp {

using Symbol = std::uint8_t;

// Ordered (source, target) vertex-type pair of a directed edge.
struct TypePair {
    int source = 0;
    int target = 0;

    TypePair() = default;
    TypePair(int s, int t) : source(s), target(t) {}

    TypePair swapped() const { return {target, source}; }
    bool operator==(const TypePair&) const = default;
};

// Finite typed message alphabet. Symbols are dense integers 0..size-1 with a
// side table carrying a human-readable label and the (source, target) types.
class MessageAlphabet {
public:
    struct SymbolInfo {
        std::string label;
        TypePair typing;
    };

    MessageAlphabet() = default;
    MessageAlphabet(std::string name, int num_types) : name_(std::move(name)), k_(num_types) {}

    Symbol add_symbol(const std::string& label, TypePair typing);

    const std::string& name() const { return name_; }
    int num_types() const { return k_; }
    int size() const { return static_cast<int>(symbols_.size()); }

    // g(mu): the (source, target) typing of a symbol.
    TypePair source_target(Symbol mu) const;
    // gbar(mu): swapped typing.
    TypePair swapped(Symbol mu) const { return source_target(mu).swapped(); }
    int source_type(Symbol mu) const { return source_target(mu).source; }
    int target_type(Symbol mu) const { return source_target(mu).target; }

    const std::string& label(Symbol mu) const;
    // Lookup by label within one typed entry; throws domain_error if missing.
    Symbol symbol(const std::string& label, TypePair typing) const;
    bool has_symbol(const std::string& label, TypePair typing) const;

    // All symbols with typing (i, j), in id order.
    std::vector<Symbol> symbols_with_typing(TypePair typing) const;

    bool operator==(const MessageAlphabet& other) const;

private:
    std::string name_;
    int k_ = 0;
    std::vector<SymbolInfo> symbols_;
    std::map<std::pair<std::string, std::pair<int, int>>, Symbol> lookup_;
};

// Multiset of incoming messages, encoded as a count vector over the alphabet.
// Canonical by construction: iteration order is symbol id order.
class MessageMultiset {
public:
    MessageMultiset() = default;
    explicit MessageMultiset(int alphabet_size) : counts_(alphabet_size, 0) {}

    void add(Symbol mu, std::uint32_t multiplicity = 1) {
        counts_.at(mu) += multiplicity;
        total_ += multiplicity;
    }
    void remove_one(Symbol mu) {
        if (counts_.at(mu) == 0) throw domain_error("multiset underflow");
        --counts_[mu];
        --total_;
    }

    std::uint32_t count(Symbol mu) const { return counts_.at(mu); }
    std::uint64_t total() const { return total_; }
    std::span<const std::uint32_t> counts() const { return counts_; }

    // All present symbols must share one target type; returns it (or -1 if empty).
    int common_target_type(const MessageAlphabet& alphabet) const;

    bool operator==(const MessageMultiset&) const = default;

private:
    std::vector<std::uint32_t> counts_;
    std::uint64_t total_ = 0;
};

// Message history (mu_0, ..., mu_t) along one directed edge.
using HistoryVector = std::vector<Symbol>;

// True iff all entries carry the same g value. Empty history is a domain error.
bool is_consistent(const MessageAlphabet& alphabet, const HistoryVector& history);

// True iff g(h1) == gbar(h2); both inputs must be consistent.
bool is_compatible(const MessageAlphabet& alphabet, const HistoryVector& h1,
                   const HistoryVector& h2);

TypePair history_typing(const MessageAlphabet& alphabet, const HistoryVector& history);

// Deterministic update rule: multiset of incoming messages plus the edge type
// of the outgoing message -> outgoing symbol. The edge type is redundant with
// the alphabet typing but lets the engine validate mis-typed alphabets early.
class UpdateRule {
public:
    virtual ~UpdateRule() = default;

    virtual const std::string& name() const = 0;

    // counts is indexed by symbol id over the full alphabet.
    virtual Symbol evaluate(const MessageAlphabet& alphabet,
                            std::span<const std::uint32_t> counts,
                            TypePair edge_type) const = 0;
};

// Validating wrapper used outside hot loops: checks multiset typing and that
// the output respects the requested edge type.
Symbol apply_rule(const UpdateRule& rule, const MessageAlphabet& alphabet,
                  const MessageMultiset& incoming, TypePair edge_type);

// phi(A) = 1{ #ones in A >= threshold - 1 }. Symbols must be labeled "0"/"1"
// for each admissible type pair.
class KCoreRule final : public UpdateRule {
public:
    explicit KCoreRule(int threshold);
    const std::string& name() const override { return name_; }
    int threshold() const { return threshold_; }
    Symbol evaluate(const MessageAlphabet& alphabet, std::span<const std::uint32_t> counts,
                    TypePair edge_type) const override;

private:
    int threshold_;
    std::string name_;
};

// phi == point mass at the per-entry symbol with a fixed label.
class ConstantRule final : public UpdateRule {
public:
    explicit ConstantRule(std::string label);
    const std::string& name() const override { return name_; }
    Symbol evaluate(const MessageAlphabet& alphabet, std::span<const std::uint32_t> counts,
                    TypePair edge_type) const override;

private:
    std::string label_;
    std::string name_;
};

// Registry so experiment configs can reference rules by name + parameters.
class RuleRegistry {
public:
    using Factory = std::function<std::shared_ptr<const UpdateRule>(const std::string& params_json)>;

    static RuleRegistry& instance();
    void register_rule(const std::string& name, Factory factory);
    std::shared_ptr<const UpdateRule> make(const std::string& name,
                                           const std::string& params_json) const;

private:
    std::map<std::string, Factory> factories_;
};

// Structured-text (JSON) serialization of alphabet descriptions; bit-exact
// round trip.
std::string alphabet_to_json(const MessageAlphabet& alphabet);
MessageAlphabet alphabet_from_json(const std::string& text);

}  // namespace wp
