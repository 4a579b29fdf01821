#include "wp/degree_model.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace wp {

double poisson_pmf(int a, double lambda) {
    if (a < 0) return 0.0;
    if (lambda <= 0.0) return a == 0 ? 1.0 : 0.0;
    return std::exp(-lambda + a * std::log(lambda) - std::lgamma(a + 1.0));
}

double poisson_tail_above(int x, double lambda) {
    if (x < 0) return 1.0;
    double cdf = 0.0;
    for (int a = 0; a <= x; ++a) cdf += poisson_pmf(a, lambda);
    return std::max(0.0, 1.0 - cdf);
}

static double binomial_pmf(int a, int n, double p) {
    if (a < 0 || a > n) return 0.0;
    if (p <= 0.0) return a == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return a == n ? 1.0 : 0.0;
    double logc = std::lgamma(n + 1.0) - std::lgamma(a + 1.0) - std::lgamma(n - a + 1.0);
    return std::exp(logc + a * std::log(p) + (n - a) * std::log1p(-p));
}

double MarginalLaw::pmf(int a) const {
    switch (kind) {
        case Kind::Point: return a == point_value ? 1.0 : 0.0;
        case Kind::Poisson: return poisson_pmf(a, poisson_rate);
        case Kind::Binomial: return binomial_pmf(a, binomial_n, binomial_p);
        case Kind::Table: {
            auto it = table.find(a);
            return it == table.end() ? 0.0 : it->second;
        }
    }
    return 0.0;
}

double MarginalLaw::mean() const {
    switch (kind) {
        case Kind::Point: return point_value;
        case Kind::Poisson: return poisson_rate;
        case Kind::Binomial: return binomial_n * binomial_p;
        case Kind::Table: {
            double m = 0.0;
            for (auto& [a, p] : table) m += a * p;
            return m;
        }
    }
    return 0.0;
}

bool MarginalLaw::positive_mass_above_zero() const { return pr_at_least_one() > 0.0; }

double MarginalLaw::pr_at_least_one() const {
    switch (kind) {
        case Kind::Point: return point_value >= 1 ? 1.0 : 0.0;
        case Kind::Poisson: return poisson_rate > 0.0 ? -std::expm1(-poisson_rate) : 0.0;
        case Kind::Binomial:
            return (binomial_n >= 1 && binomial_p > 0.0)
                       ? 1.0 - binomial_pmf(0, binomial_n, binomial_p)
                       : 0.0;
        case Kind::Table: {
            double s = 0.0;
            for (auto& [a, p] : table)
                if (a >= 1) s += p;
            return s;
        }
    }
    return 0.0;
}

std::string to_string(OffspringMode mode) {
    return mode == OffspringMode::Conditioned ? "conditioned" : "size_biased";
}

OffspringMode offspring_mode_from_string(const std::string& s) {
    if (s == "conditioned") return OffspringMode::Conditioned;
    if (s == "size_biased") return OffspringMode::SizeBiased;
    throw domain_error("unknown offspring mode '" + s + "'");
}

TypeDegreeDistribution TypeDegreeDistribution::deterministic(DegreeVector v) {
    TypeDegreeDistribution d;
    d.family_ = Family::Deterministic;
    d.k_ = static_cast<int>(v.size());
    d.det_ = std::move(v);
    return d;
}

TypeDegreeDistribution TypeDegreeDistribution::poisson(std::vector<double> rates) {
    TypeDegreeDistribution d;
    d.family_ = Family::PoissonVec;
    d.k_ = static_cast<int>(rates.size());
    for (double r : rates)
        if (r < 0.0) throw domain_error("negative Poisson rate");
    d.rates_ = std::move(rates);
    return d;
}

TypeDegreeDistribution TypeDegreeDistribution::multinomial(int total, std::vector<double> probs) {
    TypeDegreeDistribution d;
    d.family_ = Family::Multinomial;
    d.k_ = static_cast<int>(probs.size());
    d.total_ = total;
    double s = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw domain_error("negative multinomial probability");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) throw domain_error("multinomial probabilities must sum to 1");
    d.probs_ = std::move(probs);
    return d;
}

TypeDegreeDistribution TypeDegreeDistribution::binomial_split(int k, int total, double p,
                                                              int type_a, int type_b) {
    TypeDegreeDistribution d;
    d.family_ = Family::BinomialSplit;
    d.k_ = k;
    d.total_ = total;
    d.split_p_ = p;
    d.type_a_ = type_a;
    d.type_b_ = type_b;
    if (type_a == type_b || type_a < 0 || type_b < 0 || type_a >= k || type_b >= k)
        throw domain_error("binomial_split types out of range");
    return d;
}

TypeDegreeDistribution TypeDegreeDistribution::table(
    int k, std::vector<std::pair<DegreeVector, double>> rows) {
    TypeDegreeDistribution d;
    d.family_ = Family::Table;
    d.k_ = k;
    double s = 0.0;
    for (auto& [v, p] : rows) {
        if (static_cast<int>(v.size()) != k) throw domain_error("table row arity mismatch");
        if (p < 0.0) throw domain_error("negative table mass");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) throw domain_error("table masses must sum to 1");
    std::sort(rows.begin(), rows.end());
    d.rows_ = std::move(rows);
    return d;
}

double TypeDegreeDistribution::pmf(const DegreeVector& a) const {
    if (static_cast<int>(a.size()) != k_) throw domain_error("degree vector arity mismatch");
    for (int x : a)
        if (x < 0) return 0.0;
    switch (family_) {
        case Family::Deterministic: return a == det_ ? 1.0 : 0.0;
        case Family::PoissonVec: {
            double p = 1.0;
            for (int j = 0; j < k_; ++j) p *= poisson_pmf(a[j], rates_[j]);
            return p;
        }
        case Family::Multinomial: {
            if (degree_total(a) != total_) return 0.0;
            double logp = std::lgamma(total_ + 1.0);
            for (int j = 0; j < k_; ++j) {
                if (a[j] > 0 && probs_[j] <= 0.0) return 0.0;
                logp -= std::lgamma(a[j] + 1.0);
                if (a[j] > 0) logp += a[j] * std::log(probs_[j]);
            }
            return std::exp(logp);
        }
        case Family::BinomialSplit: {
            for (int j = 0; j < k_; ++j)
                if (j != type_a_ && j != type_b_ && a[j] != 0) return 0.0;
            if (a[type_a_] + a[type_b_] != total_) return 0.0;
            return binomial_pmf(a[type_a_], total_, split_p_);
        }
        case Family::Table: {
            auto it = std::lower_bound(rows_.begin(), rows_.end(),
                                       std::make_pair(a, 0.0));
            if (it != rows_.end() && it->first == a) return it->second;
            return 0.0;
        }
    }
    return 0.0;
}

DegreeVector TypeDegreeDistribution::sample(Rng& rng) const {
    DegreeVector a(k_, 0);
    switch (family_) {
        case Family::Deterministic: return det_;
        case Family::PoissonVec:
            for (int j = 0; j < k_; ++j) a[j] = rng.poisson(rates_[j]);
            return a;
        case Family::Multinomial: {
            int remaining = total_;
            double mass = 1.0;
            for (int j = 0; j < k_ && remaining > 0; ++j) {
                if (j == k_ - 1) {
                    a[j] = remaining;
                    break;
                }
                double p = mass > 0.0 ? std::min(1.0, probs_[j] / mass) : 0.0;
                a[j] = rng.binomial(remaining, p);
                remaining -= a[j];
                mass -= probs_[j];
            }
            return a;
        }
        case Family::BinomialSplit: {
            int x = rng.binomial(total_, split_p_);
            a[type_a_] = x;
            a[type_b_] = total_ - x;
            return a;
        }
        case Family::Table: {
            double u = rng.uniform01();
            double acc = 0.0;
            for (auto& [v, p] : rows_) {
                acc += p;
                if (u < acc) return v;
            }
            return rows_.back().first;
        }
    }
    return a;
}

MarginalLaw TypeDegreeDistribution::marginal(int j) const {
    if (j < 0 || j >= k_) throw domain_error("marginal index out of range");
    MarginalLaw m;
    switch (family_) {
        case Family::Deterministic:
            m.kind = MarginalLaw::Kind::Point;
            m.point_value = det_[j];
            return m;
        case Family::PoissonVec:
            m.kind = MarginalLaw::Kind::Poisson;
            m.poisson_rate = rates_[j];
            return m;
        case Family::Multinomial:
            m.kind = MarginalLaw::Kind::Binomial;
            m.binomial_n = total_;
            m.binomial_p = probs_[j];
            return m;
        case Family::BinomialSplit:
            if (j == type_a_) {
                m.kind = MarginalLaw::Kind::Binomial;
                m.binomial_n = total_;
                m.binomial_p = split_p_;
            } else if (j == type_b_) {
                m.kind = MarginalLaw::Kind::Binomial;
                m.binomial_n = total_;
                m.binomial_p = 1.0 - split_p_;
            } else {
                m.kind = MarginalLaw::Kind::Point;
                m.point_value = 0;
            }
            return m;
        case Family::Table: {
            m.kind = MarginalLaw::Kind::Table;
            for (auto& [v, p] : rows_) m.table[v[j]] += p;
            return m;
        }
    }
    return m;
}

double TypeDegreeDistribution::mean_coordinate(int j) const { return marginal(j).mean(); }

double TypeDegreeDistribution::pr_coordinate_positive(int j) const {
    return marginal(j).pr_at_least_one();
}

double TypeDegreeDistribution::moment_total(int s) const {
    if (s < 1 || s > 3) throw domain_error("moment order must be 1, 2 or 3");
    auto fixed_total_moment = [&](double d) {
        return std::pow(d, s);
    };
    switch (family_) {
        case Family::Deterministic: return fixed_total_moment(degree_total(det_));
        case Family::PoissonVec: {
            double lam = 0.0;
            for (double r : rates_) lam += r;
            // Raw moments of Po(lam).
            if (s == 1) return lam;
            if (s == 2) return lam + lam * lam;
            return lam + 3 * lam * lam + lam * lam * lam;
        }
        case Family::Multinomial:
        case Family::BinomialSplit: return fixed_total_moment(total_);
        case Family::Table: {
            double m = 0.0;
            for (auto& [v, p] : rows_) m += std::pow(static_cast<double>(degree_total(v)), s) * p;
            return m;
        }
    }
    return 0.0;
}

double TypeDegreeDistribution::tail_probability(double x) const {
    switch (family_) {
        case Family::Deterministic: return degree_total(det_) > x ? 1.0 : 0.0;
        case Family::PoissonVec: {
            double lam = 0.0;
            for (double r : rates_) lam += r;
            return poisson_tail_above(static_cast<int>(std::floor(x)), lam);
        }
        case Family::Multinomial:
        case Family::BinomialSplit: return total_ > x ? 1.0 : 0.0;
        case Family::Table: {
            double s = 0.0;
            for (auto& [v, p] : rows_)
                if (degree_total(v) > x) s += p;
            return s;
        }
    }
    return 0.0;
}

double TypeDegreeDistribution::enumerate(
    int cap, const std::function<void(const DegreeVector&, double)>& sink) const {
    double covered = 0.0;
    switch (family_) {
        case Family::Deterministic:
            if (degree_total(det_) <= cap) {
                sink(det_, 1.0);
                covered = 1.0;
            }
            break;
        case Family::PoissonVec: {
            DegreeVector a(k_, 0);
            // Depth-first over coordinates with the remaining-budget cap.
            std::function<void(int, int, double)> rec = [&](int j, int budget, double p) {
                if (j == k_) {
                    sink(a, p);
                    covered += p;
                    return;
                }
                for (int v = 0; v <= budget; ++v) {
                    double pj = poisson_pmf(v, rates_[j]);
                    if (pj == 0.0 && v > 0 && rates_[j] == 0.0) break;
                    a[j] = v;
                    rec(j + 1, budget - v, p * pj);
                }
                a[j] = 0;
            };
            rec(0, cap, 1.0);
            break;
        }
        case Family::Multinomial: {
            if (total_ > cap) break;
            DegreeVector a(k_, 0);
            std::function<void(int, int)> rec = [&](int j, int rest) {
                if (j == k_ - 1) {
                    a[j] = rest;
                    double p = pmf(a);
                    if (p > 0.0) {
                        sink(a, p);
                        covered += p;
                    }
                    return;
                }
                for (int v = 0; v <= rest; ++v) {
                    a[j] = v;
                    rec(j + 1, rest - v);
                }
                a[j] = 0;
            };
            rec(0, total_);
            break;
        }
        case Family::BinomialSplit: {
            if (total_ > cap) break;
            DegreeVector a(k_, 0);
            for (int x = 0; x <= total_; ++x) {
                a[type_a_] = x;
                a[type_b_] = total_ - x;
                double p = binomial_pmf(x, total_, split_p_);
                if (p > 0.0) {
                    sink(a, p);
                    covered += p;
                }
            }
            break;
        }
        case Family::Table:
            for (auto& [v, p] : rows_) {
                if (degree_total(v) <= cap) {
                    sink(v, p);
                    covered += p;
                }
            }
            break;
    }
    return std::max(0.0, 1.0 - covered);
}

OffspringLaw::OffspringLaw(TypeDegreeDistribution base, int parent_type, OffspringMode mode)
    : base_(std::move(base)), parent_type_(parent_type), mode_(mode) {
    pr_cond_ = base_.pr_coordinate_positive(parent_type_);
    mean_coord_ = base_.mean_coordinate(parent_type_);
    if (pr_cond_ <= 0.0) throw domain_error("offspring law for an inadmissible pair");
    if (mode_ == OffspringMode::SizeBiased && base_.family() == TypeDegreeDistribution::Family::Table) {
        // Reweighted table: Pr(a) proportional to (a_j + 1) Pr(Z = a + e_j).
        double norm = 0.0;
        base_.enumerate(std::numeric_limits<int>::max() / 2,
                        [&](const DegreeVector& v, double p) {
                            if (v[parent_type_] >= 1) {
                                DegreeVector a = v;
                                a[parent_type_] -= 1;
                                double w = static_cast<double>(v[parent_type_]) * p;
                                sb_table_.emplace_back(std::move(a), w);
                                norm += w;
                            }
                        });
        if (norm <= 0.0) throw domain_error("size-biased table law has no mass");
        double acc = 0.0;
        for (auto& [v, w] : sb_table_) {
            w /= norm;
            acc += w;
            sb_cum_.push_back(acc);
        }
    }
}

double OffspringLaw::pmf(const DegreeVector& a) const {
    DegreeVector up = a;
    up.at(parent_type_) += 1;
    if (mode_ == OffspringMode::Conditioned) return base_.pmf(up) / pr_cond_;
    // Size biased.
    using Fam = TypeDegreeDistribution::Family;
    switch (base_.family()) {
        case Fam::Table: {
            for (std::size_t r = 0; r < sb_table_.size(); ++r)
                if (sb_table_[r].first == a) return sb_table_[r].second;
            return 0.0;
        }
        default:
            return static_cast<double>(up[parent_type_]) * base_.pmf(up) / mean_coord_;
    }
}

DegreeVector OffspringLaw::sample(Rng& rng) const {
    using Fam = TypeDegreeDistribution::Family;
    if (mode_ == OffspringMode::Conditioned) {
        // Exact rejection: draw Z, accept when the parent coordinate is >= 1.
        for (int tries = 0; tries < 100000000; ++tries) {
            DegreeVector v = base_.sample(rng);
            if (v[parent_type_] >= 1) {
                v[parent_type_] -= 1;
                return v;
            }
        }
        throw resource_error("offspring rejection sampler exceeded its try cap");
    }
    switch (base_.family()) {
        case Fam::Deterministic:
        case Fam::PoissonVec: {
            // Size-biasing leaves independent Poisson coordinates unchanged; for a
            // deterministic vector it just removes the used edge.
            DegreeVector v = base_.sample(rng);
            if (base_.family() == Fam::Deterministic) {
                v[parent_type_] -= 1;
                if (v[parent_type_] < 0) throw domain_error("deterministic law lacks the parent edge");
            }
            return v;
        }
        case Fam::Multinomial: {
            // One trial is consumed by the parent edge.
            auto reduced = TypeDegreeDistribution::multinomial(
                std::max(0, static_cast<int>(base_.marginal(parent_type_).binomial_n) - 1), probs_of_base());
            return reduced.sample(rng);
        }
        case Fam::BinomialSplit: {
            // Remaining trials keep their original split probability.
            auto ma = base_.marginal(parent_type_);
            int n = ma.binomial_n - 1;
            DegreeVector v(base_.num_types(), 0);
            int b_type = -1;
            for (int j = 0; j < base_.num_types(); ++j) {
                if (j == parent_type_) continue;
                if (base_.marginal(j).kind == MarginalLaw::Kind::Binomial) b_type = j;
            }
            if (b_type < 0) throw domain_error("binomial_split structure not recognised");
            int x = rng.binomial(n, ma.binomial_p);
            v[parent_type_] = x;
            v[b_type] = n - x;
            return v;
        }
        case Fam::Table: {
            std::size_t r = rng.pick_cumulative(sb_cum_);
            return sb_table_[r].first;
        }
    }
    throw domain_error("unreachable offspring family");
}

std::vector<double> OffspringLaw::probs_of_base() const {
    std::vector<double> probs(base_.num_types());
    for (int j = 0; j < base_.num_types(); ++j) {
        auto m = base_.marginal(j);
        probs[j] = m.kind == MarginalLaw::Kind::Binomial ? m.binomial_p : 0.0;
    }
    return probs;
}

double OffspringLaw::enumerate(
    int cap, const std::function<void(const DegreeVector&, double)>& sink) const {
    double covered = 0.0;
    base_.enumerate(cap + 1, [&](const DegreeVector& v, double p) {
        if (v[parent_type_] < 1) return;
        DegreeVector a = v;
        a[parent_type_] -= 1;
        if (degree_total(a) > cap) return;
        double q = mode_ == OffspringMode::Conditioned
                       ? p / pr_cond_
                       : static_cast<double>(v[parent_type_]) * p / mean_coord_;
        if (mode_ == OffspringMode::SizeBiased &&
            base_.family() == TypeDegreeDistribution::Family::Table) {
            q = pmf(a);
        }
        sink(a, q);
        covered += q;
    });
    return std::max(0.0, 1.0 - covered);
}

double OffspringLaw::mean_total() const { return moment_total(1); }

double OffspringLaw::moment_total(int s) const {
    if (s < 1 || s > 3) throw domain_error("moment order must be 1, 2 or 3");
    int cap = enumeration_cap(1e-13);
    double m = 0.0;
    double residual = enumerate(cap, [&](const DegreeVector& a, double p) {
        m += std::pow(static_cast<double>(degree_total(a)), s) * p;
    });
    if (residual > 1e-6) throw numeric_error("offspring moment series did not converge");
    return m;
}

double OffspringLaw::tail_probability(double x) const {
    int cap = enumeration_cap(1e-13);
    if (x >= cap) return 0.0;
    double below = 0.0;
    enumerate(cap, [&](const DegreeVector& a, double p) {
        if (degree_total(a) <= x) below += p;
    });
    return std::max(0.0, 1.0 - below);
}

int OffspringLaw::enumeration_cap(double mass_tol) const {
    for (int cap = 4; cap <= 4096; cap *= 2) {
        double covered = 0.0;
        enumerate(cap, [&](const DegreeVector&, double p) { covered += p; });
        if (1.0 - covered < mass_tol) {
            // Shrink back down to the smallest sufficient cap.
            int lo = cap / 2, hi = cap;
            while (lo < hi) {
                int mid = (lo + hi) / 2;
                double c = 0.0;
                enumerate(mid, [&](const DegreeVector&, double p) { c += p; });
                if (1.0 - c < mass_tol)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            return hi;
        }
    }
    throw numeric_error("offspring enumeration cap search exceeded 4096");
}

DegreeModel::DegreeModel(std::vector<TypeDegreeDistribution> per_type)
    : per_type_(std::move(per_type)) {
    for (const auto& z : per_type_)
        if (z.num_types() != num_types())
            throw domain_error("degree model arity mismatch");
}

AdmissiblePairSet DegreeModel::admissible_pairs() const {
    AdmissiblePairSet s;
    s.k = num_types();
    for (int i = 0; i < num_types(); ++i)
        for (int j = 0; j < num_types(); ++j)
            if (per_type_[i].pr_coordinate_positive(j) > 0.0) s.pairs.insert({i, j});
    return s;
}

bool DegreeModel::admissible(int i, int j) const {
    return per_type_.at(i).pr_coordinate_positive(j) > 0.0;
}

OffspringLaw DegreeModel::offspring(int child_type_i, int parent_type_j,
                                    OffspringMode mode) const {
    if (!admissible(child_type_i, parent_type_j))
        throw domain_error("offspring law requested for inadmissible pair (" +
                           std::to_string(child_type_i) + "," + std::to_string(parent_type_j) +
                           ")");
    return OffspringLaw(per_type_.at(child_type_i), parent_type_j, mode);
}

OffspringTable::OffspringTable(const DegreeModel& model, OffspringMode mode)
    : k_(model.num_types()), mode_(mode), laws_(static_cast<std::size_t>(k_) * k_) {
    for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j)
            if (model.admissible(i, j))
                laws_[static_cast<std::size_t>(i) * k_ + j].emplace(model.offspring(i, j, mode));
}

const OffspringLaw& OffspringTable::law(int child_type_i, int parent_type_j) const {
    const auto& l = laws_.at(static_cast<std::size_t>(child_type_i) * k_ + parent_type_j);
    if (!l)
        throw domain_error("offspring law requested for inadmissible pair (" +
                           std::to_string(child_type_i) + "," + std::to_string(parent_type_j) +
                           ")");
    return *l;
}

std::vector<std::pair<int, int>> AdmissiblePairSet::asymmetric() const {
    std::vector<std::pair<int, int>> out;
    for (auto& [i, j] : pairs)
        if (!pairs.count({j, i})) out.emplace_back(i, j);
    return out;
}

std::string TypeDegreeDistribution::to_json() const {
    nlohmann::json j;
    j["k"] = k_;
    switch (family_) {
        case Family::Deterministic:
            j["family"] = "deterministic";
            j["vector"] = det_;
            break;
        case Family::PoissonVec:
            j["family"] = "poisson";
            j["rates"] = rates_;
            break;
        case Family::Multinomial:
            j["family"] = "multinomial";
            j["total"] = total_;
            j["probs"] = probs_;
            break;
        case Family::BinomialSplit:
            j["family"] = "binomial_split";
            j["total"] = total_;
            j["p"] = split_p_;
            j["type_a"] = type_a_;
            j["type_b"] = type_b_;
            break;
        case Family::Table: {
            j["family"] = "table";
            auto& rows = j["rows"] = nlohmann::json::array();
            for (auto& [v, p] : rows_) rows.push_back({{"vector", v}, {"mass", p}});
            break;
        }
    }
    return j.dump();
}

TypeDegreeDistribution TypeDegreeDistribution::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    std::string family = j.at("family").get<std::string>();
    int k = j.at("k").get<int>();
    if (family == "deterministic") return deterministic(j.at("vector").get<DegreeVector>());
    if (family == "poisson") return poisson(j.at("rates").get<std::vector<double>>());
    if (family == "multinomial")
        return multinomial(j.at("total").get<int>(), j.at("probs").get<std::vector<double>>());
    if (family == "binomial_split")
        return binomial_split(k, j.at("total").get<int>(), j.at("p").get<double>(),
                              j.at("type_a").get<int>(), j.at("type_b").get<int>());
    if (family == "table") {
        std::vector<std::pair<DegreeVector, double>> rows;
        for (auto& r : j.at("rows"))
            rows.emplace_back(r.at("vector").get<DegreeVector>(), r.at("mass").get<double>());
        return table(k, std::move(rows));
    }
    throw config_error("unknown degree family '" + family + "'");
}

std::string DegreeModel::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& z : per_type_) j.push_back(nlohmann::json::parse(z.to_json()));
    return j.dump();
}

DegreeModel DegreeModel::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    std::vector<TypeDegreeDistribution> per_type;
    for (auto& z : j) per_type.push_back(TypeDegreeDistribution::from_json(z.dump()));
    return DegreeModel(std::move(per_type));
}

}  // namespace wp
