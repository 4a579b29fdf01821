#include "wp/instances.hpp"

#include "json.hpp"

namespace wp {

namespace {

// Types of the d-SAT factor graph encoding.
constexpr int kVar = 0, kClause = 1, kPos = 2, kNeg = 3;

DegreeModel dsat_degree_model(int d, double clause_density) {
    double lambda = d * clause_density / 2.0;
    std::vector<TypeDegreeDistribution> z;
    z.push_back(TypeDegreeDistribution::poisson({0.0, 0.0, lambda, lambda}));
    z.push_back(TypeDegreeDistribution::binomial_split(4, d, 0.5, kPos, kNeg));
    z.push_back(TypeDegreeDistribution::deterministic({1, 1, 0, 0}));
    z.push_back(TypeDegreeDistribution::deterministic({1, 1, 0, 0}));
    return DegreeModel(std::move(z));
}

// Unit clause implication flow through the sign vertices: a clause whose
// other literal edges all report lit_false sends unit; a sign vertex relays
// unit as a polarity demand; a demanded variable reports its forced polarity
// through its other occurrences.
class UnitClauseRule final : public UpdateRule {
public:
    explicit UnitClauseRule(const MessageAlphabet& alphabet) {
        free_[0] = alphabet.symbol("free", {kVar, kPos});
        free_[1] = alphabet.symbol("free", {kVar, kNeg});
        ftrue_[0] = alphabet.symbol("forced_true", {kVar, kPos});
        ftrue_[1] = alphabet.symbol("forced_true", {kVar, kNeg});
        ffalse_[0] = alphabet.symbol("forced_false", {kVar, kPos});
        ffalse_[1] = alphabet.symbol("forced_false", {kVar, kNeg});
        demand_pos_ = alphabet.symbol("demand", {kPos, kVar});
        demand_neg_ = alphabet.symbol("demand", {kNeg, kVar});
        none_pos_ = alphabet.symbol("none", {kPos, kVar});
        none_neg_ = alphabet.symbol("none", {kNeg, kVar});
        for (int s : {kPos, kNeg}) {
            lit_true_[s] = alphabet.symbol("lit_true", {s, kClause});
            lit_false_[s] = alphabet.symbol("lit_false", {s, kClause});
            lit_unknown_[s] = alphabet.symbol("lit_unknown", {s, kClause});
            sat_[s] = alphabet.symbol("sat", {kClause, s});
            pending_[s] = alphabet.symbol("pending", {kClause, s});
            unit_[s] = alphabet.symbol("unit", {kClause, s});
        }
    }

    const std::string& name() const override { return name_; }

    Symbol evaluate(const MessageAlphabet& alphabet, std::span<const std::uint32_t> counts,
                    TypePair e) const override {
        (void)alphabet;
        if (e.source == kVar) {
            // Forced polarity from any demand among the other occurrences;
            // contradictions resolve to forced_true deterministically.
            bool dt = counts[demand_pos_] > 0;
            bool df = counts[demand_neg_] > 0;
            int side = e.target == kPos ? 0 : 1;
            if (dt) return ftrue_[side];
            if (df) return ffalse_[side];
            return free_[side];
        }
        if (e.source == kClause) {
            int s = e.target;
            std::uint32_t known_true = counts[lit_true_[kPos]] + counts[lit_true_[kNeg]];
            std::uint32_t unknown = counts[lit_unknown_[kPos]] + counts[lit_unknown_[kNeg]];
            if (known_true > 0) return sat_[s];
            if (unknown == 0) return unit_[s];  // all other literals cannot satisfy
            return pending_[s];
        }
        if (e.target == kVar) {
            // Sign vertex relays the clause's unit demand with its polarity.
            bool unit = e.source == kPos ? counts[unit_[kPos]] > 0 : counts[unit_[kNeg]] > 0;
            if (e.source == kPos) return unit ? demand_pos_ : none_pos_;
            return unit ? demand_neg_ : none_neg_;
        }
        // Sign vertex to clause: translate the variable's forced state.
        int side = e.source == kPos ? 0 : 1;
        bool vt = counts[ftrue_[side]] > 0;
        bool vf = counts[ffalse_[side]] > 0;
        if (e.source == kPos) {
            if (vt) return lit_true_[kPos];
            if (vf) return lit_false_[kPos];
            return lit_unknown_[kPos];
        }
        if (vt) return lit_false_[kNeg];
        if (vf) return lit_true_[kNeg];
        return lit_unknown_[kNeg];
    }

private:
    std::string name_ = "unit_clause";
    Symbol free_[2], ftrue_[2], ffalse_[2];
    Symbol demand_pos_, demand_neg_, none_pos_, none_neg_;
    Symbol lit_true_[4], lit_false_[4], lit_unknown_[4];
    Symbol sat_[4], pending_[4], unit_[4];
};

// Pure literal flow: a variable with no active opposite-sign occurrence can be
// purified; its clauses become gone; gone clauses release their other
// occurrences.
class PureLiteralRule final : public UpdateRule {
public:
    explicit PureLiteralRule(const MessageAlphabet& alphabet) {
        for (int s : {kPos, kNeg}) {
            opp_active_[s] = alphabet.symbol("opp_active", {kVar, s});
            opp_clear_[s] = alphabet.symbol("opp_clear", {kVar, s});
            occ_active_[s] = alphabet.symbol("active", {s, kVar});
            occ_gone_[s] = alphabet.symbol("gone", {s, kVar});
            sat_[s] = alphabet.symbol("sat", {s, kClause});
            nosat_[s] = alphabet.symbol("nosat", {s, kClause});
            cl_active_[s] = alphabet.symbol("active", {kClause, s});
            cl_gone_[s] = alphabet.symbol("gone", {kClause, s});
        }
    }

    const std::string& name() const override { return name_; }

    Symbol evaluate(const MessageAlphabet& alphabet, std::span<const std::uint32_t> counts,
                    TypePair e) const override {
        (void)alphabet;
        if (e.source == kVar) {
            int opposite = e.target == kPos ? kNeg : kPos;
            bool opp = counts[occ_active_[opposite]] > 0;
            return opp ? opp_active_[e.target] : opp_clear_[e.target];
        }
        if (e.source == kClause) {
            bool satisfied = counts[sat_[kPos]] > 0 || counts[sat_[kNeg]] > 0;
            return satisfied ? cl_gone_[e.target] : cl_active_[e.target];
        }
        if (e.target == kVar) {
            bool gone = counts[cl_gone_[e.source]] > 0;
            return gone ? occ_gone_[e.source] : occ_active_[e.source];
        }
        bool clear = counts[opp_clear_[e.source]] > 0;
        return clear ? sat_[e.source] : nosat_[e.source];
    }

private:
    std::string name_ = "pure_literal";
    Symbol opp_active_[4], opp_clear_[4];
    Symbol occ_active_[4], occ_gone_[4];
    Symbol sat_[4], nosat_[4];
    Symbol cl_active_[4], cl_gone_[4];
};

MessageAlphabet dsat_alphabet(const std::string& name,
                              const std::vector<std::vector<std::string>>& var_occ_labels,
                              const std::vector<std::string>& occ_var_labels,
                              const std::vector<std::string>& occ_clause_labels,
                              const std::vector<std::string>& clause_occ_labels) {
    MessageAlphabet alphabet(name, 4);
    for (int s : {kPos, kNeg})
        for (auto& l : var_occ_labels[s == kPos ? 0 : 1]) alphabet.add_symbol(l, {kVar, s});
    for (int s : {kPos, kNeg})
        for (auto& l : occ_var_labels) alphabet.add_symbol(l, {s, kVar});
    for (int s : {kPos, kNeg})
        for (auto& l : occ_clause_labels) alphabet.add_symbol(l, {s, kClause});
    for (int s : {kPos, kNeg})
        for (auto& l : clause_occ_labels) alphabet.add_symbol(l, {kClause, s});
    return alphabet;
}

}  // namespace

InstanceBundle kcore_instance(int k_core, DegreeModel degrees) {
    if (k_core < 2) throw domain_error("k_core must be >= 2");
    InstanceBundle bundle;
    bundle.name = "kcore";
    MessageAlphabet alphabet("kcore", degrees.num_types());
    auto pairs = degrees.admissible_pairs();
    std::vector<std::pair<int, int>> pair_list(pairs.pairs.begin(), pairs.pairs.end());
    for (auto& [i, j] : pair_list) {
        alphabet.add_symbol("0", {i, j});
        alphabet.add_symbol("1", {i, j});
    }
    bundle.alphabet = std::move(alphabet);
    bundle.rule = std::make_shared<KCoreRule>(k_core);
    bundle.q0 = ProbDistMatrix::point_mass(bundle.alphabet, pair_list, "1");
    bundle.degrees = std::move(degrees);
    bundle.default_mode = OffspringMode::SizeBiased;
    nlohmann::json meta;
    meta["k_core"] = k_core;
    meta["rule"] = "phi(A) = 1{#ones >= k_core - 1}";
    meta["q0"] = "point mass on 1";
    bundle.metadata_json = meta.dump();
    return bundle;
}

InstanceBundle constant_instance(DegreeModel degrees, double q0_mass_on_a) {
    InstanceBundle bundle;
    bundle.name = "constant";
    MessageAlphabet alphabet("constant", degrees.num_types());
    auto pairs = degrees.admissible_pairs();
    std::vector<std::pair<int, int>> pair_list(pairs.pairs.begin(), pairs.pairs.end());
    for (auto& [i, j] : pair_list) {
        alphabet.add_symbol("a", {i, j});
        alphabet.add_symbol("b", {i, j});
    }
    bundle.alphabet = std::move(alphabet);
    bundle.rule = std::make_shared<ConstantRule>("a");
    ProbDistMatrix q0(bundle.alphabet.num_types(), bundle.alphabet.size());
    for (auto& [i, j] : pair_list) {
        std::vector<double> p(bundle.alphabet.size(), 0.0);
        p[bundle.alphabet.symbol("a", {i, j})] = q0_mass_on_a;
        p[bundle.alphabet.symbol("b", {i, j})] = 1.0 - q0_mass_on_a;
        q0.set_entry(i, j, std::move(p));
    }
    bundle.q0 = std::move(q0);
    bundle.degrees = std::move(degrees);
    bundle.default_mode = OffspringMode::SizeBiased;
    nlohmann::json meta;
    meta["rule"] = "phi == a";
    meta["q0_mass_on_a"] = q0_mass_on_a;
    bundle.metadata_json = meta.dump();
    return bundle;
}

InstanceBundle unit_clause_instance(int d, double clause_density) {
    if (d < 2) throw domain_error("clause size must be >= 2");
    InstanceBundle bundle;
    bundle.name = "unit_clause";
    bundle.alphabet = dsat_alphabet("unit_clause",
                                    {{"free", "forced_true", "forced_false"},
                                     {"free", "forced_true", "forced_false"}},
                                    {"demand", "none"},
                                    {"lit_true", "lit_false", "lit_unknown"},
                                    {"sat", "pending", "unit"});
    bundle.rule = std::make_shared<UnitClauseRule>(bundle.alphabet);
    bundle.degrees = dsat_degree_model(d, clause_density);
    ProbDistMatrix q0(4, bundle.alphabet.size());
    auto set_point = [&](int i, int j, const std::string& label) {
        std::vector<double> p(bundle.alphabet.size(), 0.0);
        p[bundle.alphabet.symbol(label, {i, j})] = 1.0;
        q0.set_entry(i, j, std::move(p));
    };
    for (int s : {kPos, kNeg}) {
        set_point(kVar, s, "free");
        set_point(s, kVar, "none");
        set_point(s, kClause, "lit_unknown");
        set_point(kClause, s, "pending");
    }
    bundle.q0 = std::move(q0);
    bundle.default_mode = OffspringMode::SizeBiased;
    nlohmann::json meta;
    meta["d"] = d;
    meta["clause_density"] = clause_density;
    meta["rule_table"] = {
        {"var->occ", "forced_true if any demand from a positive occurrence among the others, "
                     "else forced_false if any negative demand, else free"},
        {"occ->clause", "positive: forced_true -> lit_true, forced_false -> lit_false, else "
                        "lit_unknown; negative side swaps true/false"},
        {"clause->occ", "sat if any other literal is lit_true; unit if all others are "
                        "lit_false; else pending"},
        {"occ->var", "demand iff the clause sent unit"}};
    bundle.metadata_json = meta.dump();
    return bundle;
}

InstanceBundle pure_literal_instance(int d, double clause_density) {
    if (d < 1) throw domain_error("clause size must be >= 1");
    InstanceBundle bundle;
    bundle.name = "pure_literal";
    bundle.alphabet = dsat_alphabet("pure_literal",
                                    {{"opp_active", "opp_clear"}, {"opp_active", "opp_clear"}},
                                    {"active", "gone"},
                                    {"sat", "nosat"},
                                    {"active", "gone"});
    bundle.rule = std::make_shared<PureLiteralRule>(bundle.alphabet);
    bundle.degrees = dsat_degree_model(d, clause_density);
    ProbDistMatrix q0(4, bundle.alphabet.size());
    auto set_point = [&](int i, int j, const std::string& label) {
        std::vector<double> p(bundle.alphabet.size(), 0.0);
        p[bundle.alphabet.symbol(label, {i, j})] = 1.0;
        q0.set_entry(i, j, std::move(p));
    };
    for (int s : {kPos, kNeg}) {
        set_point(kVar, s, "opp_active");
        set_point(s, kVar, "active");
        set_point(s, kClause, "nosat");
        set_point(kClause, s, "active");
    }
    bundle.q0 = std::move(q0);
    bundle.default_mode = OffspringMode::SizeBiased;
    nlohmann::json meta;
    meta["d"] = d;
    meta["clause_density"] = clause_density;
    meta["rule_table"] = {
        {"var->occ", "opp_active iff some other occurrence of the opposite sign is active"},
        {"occ->clause", "sat iff the variable reports opp_clear"},
        {"clause->occ", "gone iff some other occurrence reports sat"},
        {"occ->var", "relays the clause state"}};
    bundle.metadata_json = meta.dump();
    return bundle;
}

bool ucp_variable_forced(const InstanceBundle& bundle, const MessagedGraph& mg, Vertex v) {
    if (mg.graph().type(v) != kVar) throw domain_error("not a variable vertex");
    Symbol dp = bundle.alphabet.symbol("demand", {kPos, kVar});
    Symbol dn = bundle.alphabet.symbol("demand", {kNeg, kVar});
    for (std::size_t p = mg.begin(v); p < mg.end(v); ++p) {
        Symbol in = mg.message(mg.mirror(p));
        if (in == dp || in == dn) return true;
    }
    return false;
}

std::string bundle_description_json(const InstanceBundle& bundle) {
    nlohmann::json j;
    j["name"] = bundle.name;
    j["alphabet"] = nlohmann::json::parse(alphabet_to_json(bundle.alphabet));
    j["rule"] = bundle.rule->name();
    j["parameters"] = nlohmann::json::parse(bundle.metadata_json);
    j["offspring_mode"] = to_string(bundle.default_mode);
    j["degrees"] = nlohmann::json::parse(bundle.degrees.to_json());
    return j.dump(2);
}

bool pure_literal_purifiable(const InstanceBundle& bundle, const MessagedGraph& mg, Vertex v) {
    if (mg.graph().type(v) != kVar) throw domain_error("not a variable vertex");
    Symbol ap = bundle.alphabet.symbol("active", {kPos, kVar});
    Symbol an = bundle.alphabet.symbol("active", {kNeg, kVar});
    bool pos = false, neg = false;
    for (std::size_t p = mg.begin(v); p < mg.end(v); ++p) {
        Symbol in = mg.message(mg.mirror(p));
        if (in == ap) pos = true;
        if (in == an) neg = true;
    }
    return !(pos && neg);
}

}  // namespace wp
