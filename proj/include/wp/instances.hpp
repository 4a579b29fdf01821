#pragma once

#include <memory>
#include <string>

#include "wp/alphabet.hpp"
#include "wp/degree_model.hpp"
#include "wp/dist_matrix.hpp"
#include "wp/wp_engine.hpp"

namespace wp {

// Ready-made (alphabet, rule, degree model, Q0) bundle.
struct InstanceBundle {
    std::string name;
    MessageAlphabet alphabet;
    std::shared_ptr<const UpdateRule> rule;
    DegreeModel degrees;
    ProbDistMatrix q0;
    OffspringMode default_mode = OffspringMode::SizeBiased;
    std::string metadata_json;  // rule tables and parameters, for reproducibility
};

// k-core warnings: Sigma = {0,1} per admissible pair, phi(A) = 1{#ones >= k_core-1},
// Q0 = all-1 point mass.
InstanceBundle kcore_instance(int k_core, DegreeModel degrees);

// Single-type constant rule over Sigma = {a, b}, phi == a, Q0 uniform.
InstanceBundle constant_instance(DegreeModel degrees, double q0_mass_on_a = 0.5);

// Unit Clause Propagation on the 4-type d-SAT factor graph encoding
// (variables, clauses, positive/negative occurrence vertices).
InstanceBundle unit_clause_instance(int d, double clause_density);

// Pure Literal elimination on the same 4-type encoding.
InstanceBundle pure_literal_instance(int d, double clause_density);

// Vertex-level predicates at (or on the way to) the WP fixed point.
bool ucp_variable_forced(const InstanceBundle& bundle, const MessagedGraph& mg, Vertex v);
bool pure_literal_purifiable(const InstanceBundle& bundle, const MessagedGraph& mg, Vertex v);

// Full bundle description: name, alphabet with typing, rule name and
// parameter block. The embedded alphabet round-trips bit-exactly.
std::string bundle_description_json(const InstanceBundle& bundle);

}  // namespace wp
