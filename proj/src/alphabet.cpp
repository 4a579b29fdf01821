#include "wp/alphabet.hpp"

#include <algorithm>

#include "json.hpp"

namespace wp {

Symbol MessageAlphabet::add_symbol(const std::string& label, TypePair typing) {
    if (typing.source < 0 || typing.source >= k_ || typing.target < 0 || typing.target >= k_)
        throw domain_error("symbol typing out of range for alphabet '" + name_ + "'");
    if (symbols_.size() >= 255) throw domain_error("alphabet too large");
    auto key = std::make_pair(label, std::make_pair(typing.source, typing.target));
    if (lookup_.count(key)) throw domain_error("duplicate symbol '" + label + "'");
    Symbol id = static_cast<Symbol>(symbols_.size());
    symbols_.push_back({label, typing});
    lookup_[key] = id;
    return id;
}

TypePair MessageAlphabet::source_target(Symbol mu) const {
    if (mu >= symbols_.size()) throw domain_error("unknown symbol id");
    return symbols_[mu].typing;
}

const std::string& MessageAlphabet::label(Symbol mu) const {
    if (mu >= symbols_.size()) throw domain_error("unknown symbol id");
    return symbols_[mu].label;
}

Symbol MessageAlphabet::symbol(const std::string& label, TypePair typing) const {
    auto it = lookup_.find({label, {typing.source, typing.target}});
    if (it == lookup_.end())
        throw domain_error("no symbol '" + label + "' typed (" + std::to_string(typing.source) +
                           "," + std::to_string(typing.target) + ")");
    return it->second;
}

bool MessageAlphabet::has_symbol(const std::string& label, TypePair typing) const {
    return lookup_.count({label, {typing.source, typing.target}}) > 0;
}

std::vector<Symbol> MessageAlphabet::symbols_with_typing(TypePair typing) const {
    std::vector<Symbol> out;
    for (Symbol mu = 0; mu < symbols_.size(); ++mu)
        if (symbols_[mu].typing == typing) out.push_back(mu);
    return out;
}

bool MessageAlphabet::operator==(const MessageAlphabet& other) const {
    if (name_ != other.name_ || k_ != other.k_ || symbols_.size() != other.symbols_.size())
        return false;
    for (std::size_t s = 0; s < symbols_.size(); ++s)
        if (symbols_[s].label != other.symbols_[s].label ||
            !(symbols_[s].typing == other.symbols_[s].typing))
            return false;
    return true;
}

int MessageMultiset::common_target_type(const MessageAlphabet& alphabet) const {
    int target = -1;
    for (std::size_t mu = 0; mu < counts_.size(); ++mu) {
        if (counts_[mu] == 0) continue;
        int t = alphabet.target_type(static_cast<Symbol>(mu));
        if (target == -1)
            target = t;
        else if (target != t)
            throw domain_error("multiset mixes target types");
    }
    return target;
}

bool is_consistent(const MessageAlphabet& alphabet, const HistoryVector& history) {
    if (history.empty()) throw domain_error("empty history");
    TypePair g = alphabet.source_target(history.front());
    for (Symbol mu : history)
        if (!(alphabet.source_target(mu) == g)) return false;
    return true;
}

TypePair history_typing(const MessageAlphabet& alphabet, const HistoryVector& history) {
    if (!is_consistent(alphabet, history)) throw domain_error("inconsistent history");
    return alphabet.source_target(history.front());
}

bool is_compatible(const MessageAlphabet& alphabet, const HistoryVector& h1,
                   const HistoryVector& h2) {
    TypePair g1 = history_typing(alphabet, h1);
    TypePair g2 = history_typing(alphabet, h2);
    return g1 == g2.swapped();
}

Symbol apply_rule(const UpdateRule& rule, const MessageAlphabet& alphabet,
                  const MessageMultiset& incoming, TypePair edge_type) {
    int target = incoming.common_target_type(alphabet);
    if (target != -1 && target != edge_type.source)
        throw domain_error("multiset target type " + std::to_string(target) +
                           " does not match edge source type " +
                           std::to_string(edge_type.source));
    Symbol out = rule.evaluate(alphabet, incoming.counts(), edge_type);
    if (!(alphabet.source_target(out) == edge_type))
        throw domain_error("rule '" + rule.name() + "' produced a mis-typed symbol");
    return out;
}

KCoreRule::KCoreRule(int threshold)
    : threshold_(threshold), name_("kcore:" + std::to_string(threshold)) {
    if (threshold < 2) throw domain_error("k-core threshold must be >= 2");
}

Symbol KCoreRule::evaluate(const MessageAlphabet& alphabet, std::span<const std::uint32_t> counts,
                           TypePair edge_type) const {
    std::uint64_t ones = 0;
    for (std::size_t mu = 0; mu < counts.size(); ++mu)
        if (counts[mu] && alphabet.label(static_cast<Symbol>(mu)) == "1") ones += counts[mu];
    const char* out = (ones >= static_cast<std::uint64_t>(threshold_ - 1)) ? "1" : "0";
    return alphabet.symbol(out, edge_type);
}

ConstantRule::ConstantRule(std::string label)
    : label_(std::move(label)), name_("constant:" + label_) {}

Symbol ConstantRule::evaluate(const MessageAlphabet& alphabet,
                              std::span<const std::uint32_t> /*counts*/,
                              TypePair edge_type) const {
    return alphabet.symbol(label_, edge_type);
}

RuleRegistry& RuleRegistry::instance() {
    static RuleRegistry reg;
    static bool seeded = false;
    if (!seeded) {
        seeded = true;
        reg.register_rule("kcore", [](const std::string& params) {
            auto j = nlohmann::json::parse(params.empty() ? "{}" : params);
            return std::make_shared<KCoreRule>(j.value("threshold", 2));
        });
        reg.register_rule("constant", [](const std::string& params) {
            auto j = nlohmann::json::parse(params.empty() ? "{}" : params);
            return std::make_shared<ConstantRule>(j.value("label", std::string("0")));
        });
    }
    return reg;
}

void RuleRegistry::register_rule(const std::string& name, Factory factory) {
    factories_[name] = std::move(factory);
}

std::shared_ptr<const UpdateRule> RuleRegistry::make(const std::string& name,
                                                     const std::string& params_json) const {
    auto it = factories_.find(name);
    if (it == factories_.end()) throw domain_error("unknown rule '" + name + "'");
    return it->second(params_json);
}

std::string alphabet_to_json(const MessageAlphabet& alphabet) {
    nlohmann::json j;
    j["name"] = alphabet.name();
    j["k"] = alphabet.num_types();
    auto& syms = j["symbols"] = nlohmann::json::array();
    for (Symbol mu = 0; mu < alphabet.size(); ++mu) {
        TypePair g = alphabet.source_target(mu);
        syms.push_back({{"id", mu},
                        {"label", alphabet.label(mu)},
                        {"source", g.source},
                        {"target", g.target}});
    }
    return j.dump(2);
}

MessageAlphabet alphabet_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    MessageAlphabet alphabet(j.at("name").get<std::string>(), j.at("k").get<int>());
    for (const auto& s : j.at("symbols")) {
        Symbol id = alphabet.add_symbol(s.at("label").get<std::string>(),
                                        {s.at("source").get<int>(), s.at("target").get<int>()});
        if (id != s.at("id").get<Symbol>()) throw domain_error("non-contiguous symbol ids");
    }
    return alphabet;
}

}  // namespace wp
