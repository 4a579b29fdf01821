#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wp/errors.hpp"
#include "wp/rng.hpp"

namespace wp {

// Number of neighbours per type at one vertex.
using DegreeVector = std::vector<int>;

inline int degree_total(const DegreeVector& v) {
    int s = 0;
    for (int x : v) s += x;
    return s;
}

// Scalar law of one coordinate (a marginal), kept symbolic where possible.
struct MarginalLaw {
    enum class Kind { Point, Poisson, Binomial, Table };
    Kind kind = Kind::Point;
    int point_value = 0;
    double poisson_rate = 0.0;
    int binomial_n = 0;
    double binomial_p = 0.0;
    std::map<int, double> table;

    double pmf(int a) const;
    double mean() const;
    bool positive_mass_above_zero() const;  // Pr(X >= 1) > 0
    double pr_at_least_one() const;
};

enum class OffspringMode {
    Conditioned,  // Pr(Zhat=a) = Pr(Z = a+e_j) / Pr(Z_j >= 1)
    SizeBiased,     // Pr(Zhat=a) proportional to (a_j+1) Pr(Z = a+e_j)
};

std::string to_string(OffspringMode mode);
OffspringMode offspring_mode_from_string(const std::string& s);

// One per-type law Z_i on N_0^k. Named families cover the shipped models;
// arbitrary finitely supported laws go through the table family.
class TypeDegreeDistribution {
public:
    enum class Family { Deterministic, PoissonVec, Multinomial, BinomialSplit, Table };

    static TypeDegreeDistribution deterministic(DegreeVector v);
    // Independent Poisson coordinates with the given rates (one per type).
    static TypeDegreeDistribution poisson(std::vector<double> rates);
    // Total trials split over types with the given probabilities.
    static TypeDegreeDistribution multinomial(int total, std::vector<double> probs);
    // X ~ Bin(total, p) neighbours of type_a, total-X of type_b (d-SAT clause).
    static TypeDegreeDistribution binomial_split(int k, int total, double p, int type_a,
                                                 int type_b);
    static TypeDegreeDistribution table(int k, std::vector<std::pair<DegreeVector, double>> rows);

    Family family() const { return family_; }
    int num_types() const { return k_; }

    double pmf(const DegreeVector& a) const;
    DegreeVector sample(Rng& rng) const;

    MarginalLaw marginal(int j) const;
    double mean_coordinate(int j) const;  // E[Z_ij]
    double pr_coordinate_positive(int j) const;

    // E[ ||Z||_1^s ] for s in {1,2,3}.
    double moment_total(int s) const;
    // Pr( ||Z||_1 > x ).
    double tail_probability(double x) const;

    // Enumerate support vectors with ||a||_1 <= cap; returns residual mass not
    // enumerated. The callback receives (vector, probability).
    double enumerate(int cap,
                     const std::function<void(const DegreeVector&, double)>& sink) const;

    // Serialization for experiment configs.
    std::string to_json() const;
    static TypeDegreeDistribution from_json(const std::string& text);

private:
    TypeDegreeDistribution() = default;

    Family family_ = Family::Deterministic;
    int k_ = 0;
    DegreeVector det_;
    std::vector<double> rates_;
    int total_ = 0;
    std::vector<double> probs_;
    double split_p_ = 0.5;
    int type_a_ = 0, type_b_ = 0;
    std::vector<std::pair<DegreeVector, double>> rows_;
};

// Zhat_{j->i}: offspring of a type-i vertex whose parent has type j.
class OffspringLaw {
public:
    OffspringLaw(TypeDegreeDistribution base, int parent_type, OffspringMode mode);

    int parent_type() const { return parent_type_; }
    OffspringMode mode() const { return mode_; }
    int num_types() const { return base_.num_types(); }

    double pmf(const DegreeVector& a) const;
    DegreeVector sample(Rng& rng) const;
    double enumerate(int cap,
                     const std::function<void(const DegreeVector&, double)>& sink) const;

    double mean_total() const;           // E[ ||Zhat||_1 ]
    double moment_total(int s) const;    // E[ ||Zhat||_1^s ], s in {1,2,3}
    double tail_probability(double x) const;

    // Smallest cap whose enumeration residual is below mass_tol (bounded search).
    int enumeration_cap(double mass_tol) const;

private:
    std::vector<double> probs_of_base() const;

    TypeDegreeDistribution base_;
    int parent_type_;
    OffspringMode mode_;
    double pr_cond_;  // Pr(Z_{i,parent} >= 1)
    double mean_coord_;
    // Size-biased laws reduce to closed forms per family; the table family
    // falls back to a reweighted table.
    std::vector<std::pair<DegreeVector, double>> sb_table_;
    std::vector<double> sb_cum_;
};

struct AdmissiblePairSet {
    int k = 0;
    std::set<std::pair<int, int>> pairs;

    bool contains(int i, int j) const { return pairs.count({i, j}) > 0; }
    // Pairs (i,j) admissible without (j,i); empty when the laws are mutually
    // consistent (the diagnostic reports rather than asserts symmetry).
    std::vector<std::pair<int, int>> asymmetric() const;
};

// The full vector (Z_1, ..., Z_k) plus derived laws.
class DegreeModel {
public:
    DegreeModel() = default;
    explicit DegreeModel(std::vector<TypeDegreeDistribution> per_type);

    int num_types() const { return static_cast<int>(per_type_.size()); }
    const TypeDegreeDistribution& z(int i) const { return per_type_.at(i); }

    AdmissiblePairSet admissible_pairs() const;
    bool admissible(int i, int j) const;

    // Zhat_{j->i}; (i, j) must be admissible.
    OffspringLaw offspring(int child_type_i, int parent_type_j, OffspringMode mode) const;

    std::string to_json() const;
    static DegreeModel from_json(const std::string& text);

private:
    std::vector<TypeDegreeDistribution> per_type_;
};

// Precomputed offspring laws for every admissible pair; immutable and shared
// across workers. Samplers in hot loops go through this.
class OffspringTable {
public:
    OffspringTable(const DegreeModel& model, OffspringMode mode);

    int num_types() const { return k_; }
    OffspringMode mode() const { return mode_; }
    bool present(int child_type_i, int parent_type_j) const {
        return laws_[static_cast<std::size_t>(child_type_i) * k_ + parent_type_j].has_value();
    }
    // Zhat_{j->i}; throws for inadmissible pairs.
    const OffspringLaw& law(int child_type_i, int parent_type_j) const;

private:
    int k_ = 0;
    OffspringMode mode_;
    std::vector<std::optional<OffspringLaw>> laws_;
};

// Poisson helpers shared by tests and implementation.
double poisson_pmf(int a, double lambda);
double poisson_tail_above(int x, double lambda);  // Pr(Po > x)

}  // namespace wp
