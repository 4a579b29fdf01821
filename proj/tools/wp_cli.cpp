// Experiment harness: converge | threshold | contiguity | subcritical | assumptions.
// Each verb reads a JSON config, runs the pipelines and writes CSV artifacts
// stamped with the config digest and seed. Identical config + seed produces
// byte-identical output.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wp/change_process.hpp"
#include "wp/dist_fixed_point.hpp"
#include "wp/ghat_model.hpp"
#include "wp/graph_model.hpp"
#include "wp/instances.hpp"
#include "wp/wp_engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// FNV-1a over the canonical (sorted-key) JSON dump.
std::string config_digest(const json& config) {
    std::string dump = config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

struct CsvFile {
    std::ofstream out;
    explicit CsvFile(const fs::path& path, const std::string& header) {
        out.open(path, std::ios::binary | std::ios::trunc);
        if (!out) throw wp::config_error("cannot open output file " + path.string());
        out << header << '\n';
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) out << ',';
            out << cells[c];
        }
        out << '\n';
    }
};

struct Experiment {
    json config;
    std::string digest;
    fs::path out_dir;
    std::uint64_t seed_offset = 0;
    int threads = 1;

    wp::InstanceBundle bundle;
    wp::OffspringMode mode = wp::OffspringMode::SizeBiased;
};

wp::DegreeModel degree_model_from_config(const json& j) {
    if (!j.contains("degree")) throw wp::config_error("instance.degree missing");
    const json& deg = j.at("degree");
    if (deg.is_array()) {
        std::vector<wp::TypeDegreeDistribution> per_type;
        for (auto& z : deg) per_type.push_back(wp::TypeDegreeDistribution::from_json(z.dump()));
        return wp::DegreeModel(std::move(per_type));
    }
    // Single-type shorthand: one family spec with k = 1.
    return wp::DegreeModel({wp::TypeDegreeDistribution::from_json(deg.dump())});
}

wp::InstanceBundle bundle_from_config(const json& config) {
    if (!config.contains("instance")) throw wp::config_error("config.instance missing");
    const json& inst = config.at("instance");
    std::string name = inst.value("name", std::string());
    wp::InstanceBundle bundle;
    if (name == "kcore")
        bundle = wp::kcore_instance(inst.value("k_core", 3), degree_model_from_config(inst));
    else if (name == "constant")
        bundle = wp::constant_instance(degree_model_from_config(inst),
                                       inst.value("q0_mass_on_a", 0.5));
    else if (name == "unit_clause")
        bundle =
            wp::unit_clause_instance(inst.value("d", 3), inst.value("clause_density", 1.0));
    else if (name == "pure_literal")
        bundle =
            wp::pure_literal_instance(inst.value("d", 3), inst.value("clause_density", 1.0));
    else
        throw wp::config_error("unknown instance '" + name + "'");
    if (inst.contains("q0") && inst.at("q0").is_object()) {
        try {
            bundle.q0 = wp::ProbDistMatrix::from_json(bundle.alphabet, inst.at("q0").dump());
            bundle.q0.validate(bundle.alphabet);
        } catch (const std::exception& err) {
            throw wp::config_error(std::string("bad q0 override: ") + err.what());
        }
    }
    return bundle;
}

Experiment load_experiment(const std::string& config_path, const std::string& out_dir,
                           std::uint64_t seed, int threads) {
    Experiment e;
    std::ifstream in(config_path);
    if (!in) throw wp::config_error("cannot read config " + config_path);
    try {
        in >> e.config;
    } catch (const json::parse_error& err) {
        throw wp::config_error(std::string("config parse error: ") + err.what());
    }
    e.digest = config_digest(e.config);
    e.out_dir = out_dir;
    fs::create_directories(e.out_dir);
    e.seed_offset = seed;
    e.threads = threads;
    e.bundle = bundle_from_config(e.config);
    std::string mode = e.config.at("instance").value(
        "offspring_mode", wp::to_string(e.bundle.default_mode));
    e.mode = wp::offspring_mode_from_string(mode);
    return e;
}

std::vector<std::uint64_t> seeds_of(const Experiment& e) {
    std::vector<std::uint64_t> seeds;
    if (e.config.contains("seeds"))
        for (auto& s : e.config.at("seeds")) seeds.push_back(s.get<std::uint64_t>());
    if (seeds.empty()) seeds.push_back(1);
    return seeds;
}

std::vector<std::uint64_t> sizes_of(const Experiment& e) {
    std::vector<std::uint64_t> ns;
    if (e.config.contains("n")) {
        if (e.config.at("n").is_array())
            for (auto& v : e.config.at("n")) ns.push_back(v.get<std::uint64_t>());
        else
            ns.push_back(e.config.at("n").get<std::uint64_t>());
    }
    if (ns.empty()) throw wp::config_error("config.n missing");
    return ns;
}

wp::Rng cell_rng(const Experiment& e, std::uint64_t seed, std::uint64_t n) {
    return wp::Rng(seed + e.seed_offset).fork(n);
}

wp::TypedGraph sample_graph(const Experiment& e, std::uint64_t n, wp::Rng& rng) {
    const json& g = e.config.value("graph", json::object());
    std::string model = g.value("model", std::string("binomial"));
    if (model == "binomial") {
        std::vector<std::vector<double>> kernel;
        if (g.contains("kernel"))
            kernel = g.at("kernel").get<std::vector<std::vector<double>>>();
        else
            throw wp::config_error("graph.kernel missing for the binomial model");
        const int k = static_cast<int>(kernel.size());
        std::vector<std::uint64_t> n_vec(k, 0);
        if (g.contains("class_fractions")) {
            auto fr = g.at("class_fractions").get<std::vector<double>>();
            for (int i = 0; i < k; ++i)
                n_vec[i] = static_cast<std::uint64_t>(fr.at(i) * static_cast<double>(n));
        } else {
            for (int i = 0; i < k; ++i) n_vec[i] = n / k;
        }
        return wp::sample_binomial_multitype(n_vec, kernel, rng);
    }
    if (model == "configuration") {
        const int k = e.bundle.degrees.num_types();
        std::vector<std::uint64_t> n_vec(k, n / k);
        for (int attempt = 0; attempt < 100; ++attempt) {
            wp::Rng attempt_rng = rng.fork(attempt);
            auto seq = wp::TypeDegreeSequence::sample(e.bundle.degrees, n_vec, attempt_rng);
            if (!seq.edge_balanced()) continue;
            bool odd = false;
            for (int i = 0; i < k; ++i) {
                std::uint64_t within = 0;
                for (std::size_t v = 0; v < seq.degrees.size(); ++v)
                    if (seq.vertex_type[v] == i) within += seq.degrees[v][i];
                if (within % 2 != 0) odd = true;
            }
            if (odd) continue;
            return wp::sample_configuration(seq, attempt_rng).graph;
        }
        throw wp::numeric_error("no balanced degree sequence found in 100 attempts");
    }
    if (model == "dsat") {
        int d = g.value("d", 3);
        double density = g.value("clause_density", 1.0);
        std::uint64_t m = static_cast<std::uint64_t>(density * static_cast<double>(n));
        return wp::build_dsat_factor_graph(n, m, d, rng);
    }
    throw wp::config_error("unknown graph model '" + model + "'");
}

// ---------------------------------------------------------------- converge

int run_converge(const Experiment& e) {
    CsvFile trace(e.out_dir / "converge_trace.csv",
                  "digest,n,seed,round,changes,changes_since_round");
    CsvFile summary(e.out_dir / "converge_summary.csv",
                    "digest,n,seed,delta,t0_min,threshold,final_round,directed_edges");
    std::vector<double> deltas;
    if (e.config.contains("deltas"))
        for (auto& d : e.config.at("deltas")) deltas.push_back(d.get<double>());
    if (deltas.empty()) deltas.push_back(0.01);
    int max_rounds = e.config.value("max_rounds", 200);

    for (std::uint64_t n : sizes_of(e)) {
        for (std::uint64_t seed : seeds_of(e)) {
            wp::Rng rng = cell_rng(e, seed, n);
            wp::TypedGraph graph = sample_graph(e, n, rng);
            wp::Rng init_rng = rng.fork(1);
            wp::MessagedGraph mg =
                wp::initialize(std::move(graph), e.bundle.q0, init_rng, true);
            wp::RunResult result =
                wp::run(std::move(mg), e.bundle.alphabet, *e.bundle.rule, max_rounds);
            const int final_round = result.state.round();
            std::vector<std::uint64_t> since(final_round + 1, 0);
            for (int t = 0; t <= final_round; ++t)
                since[t] = wp::changes_since(result.state, t);
            for (int t = 1; t <= final_round; ++t)
                trace.row({e.digest, std::to_string(n), std::to_string(seed),
                           std::to_string(t), std::to_string(result.trace.changes[t - 1]),
                           std::to_string(since[t])});
            for (double delta : deltas) {
                double threshold = delta * static_cast<double>(n);
                int t0 = final_round;
                for (int t = 0; t <= final_round; ++t)
                    if (static_cast<double>(since[t]) < threshold) {
                        t0 = t;
                        break;
                    }
                summary.row({e.digest, std::to_string(n), std::to_string(seed),
                             format_double(delta), std::to_string(t0),
                             format_double(threshold), std::to_string(final_round),
                             std::to_string(result.state.num_directed_edges())});
            }
        }
    }
    return 0;
}

// ---------------------------------------------------------------- threshold

double fixpoint_one_mass(const wp::InstanceBundle& bundle, const wp::ProbDistMatrix& p) {
    // Mass of "1" in the (0,0) entry; single-type k-core scans only.
    return p.prob(0, 0, bundle.alphabet.symbol("1", {0, 0}));
}

// Pr(#ones among Z incoming >= k_core) with per-neighbour one-probability x.
double predicted_core_fraction(const wp::TypeDegreeDistribution& z, double x, int k_core) {
    double total = 0.0;
    z.enumerate(512, [&](const wp::DegreeVector& a, double pz) {
        int d = wp::degree_total(a);
        // Pr(Bin(d, x) >= k_core)
        double tail = 0.0;
        for (int o = k_core; o <= d; ++o) {
            double logc = std::lgamma(d + 1.0) - std::lgamma(o + 1.0) - std::lgamma(d - o + 1.0);
            tail += std::exp(logc + o * std::log(x) + (d - o) * std::log1p(-x));
        }
        total += pz * (x > 0.0 ? tail : 0.0);
    });
    return total;
}

int run_threshold(const Experiment& e) {
    if (e.bundle.name != "kcore") throw wp::config_error("threshold scan needs a kcore instance");
    int k_core = e.config.at("instance").value("k_core", 3);
    const json& scan = e.config.value("scan", json::object());
    double c_min = scan.value("c_min", 3.0);
    double c_max = scan.value("c_max", 4.5);
    int steps = scan.value("steps", 16);
    double bisect_tol = scan.value("bisect_tol", 1e-4);
    double nontrivial_mass = scan.value("nontrivial_mass", 0.01);
    std::uint64_t n_emp = scan.value("n_empirical", 0);
    int max_rounds = e.config.value("max_rounds", 400);

    auto limit_at = [&](double c) {
        wp::InstanceBundle b =
            wp::kcore_instance(k_core, wp::DegreeModel({wp::TypeDegreeDistribution::poisson({c})}));
        wp::IterateOptions opt;
        opt.max_iters = 5000;
        return wp::iterate_to_limit(b.degrees, b.alphabet, *b.rule, b.q0, e.mode, opt);
    };

    CsvFile out(e.out_dir / "threshold_scan.csv",
                "digest,c,fixpoint_mass,core_fraction_predicted,core_fraction_empirical,seed");
    auto seeds = seeds_of(e);
    for (int s = 0; s <= steps; ++s) {
        double c = c_min + (c_max - c_min) * s / std::max(1, steps);
        auto it = limit_at(c);
        double mass = fixpoint_one_mass(e.bundle, it.limit);
        auto z = wp::TypeDegreeDistribution::poisson({c});
        double predicted = predicted_core_fraction(z, mass, k_core);
        double empirical = -1.0;
        std::uint64_t used_seed = 0;
        if (n_emp > 0) {
            used_seed = seeds[0];
            wp::Rng rng = wp::Rng(used_seed + e.seed_offset).fork(n_emp).fork(s);
            wp::TypedGraph g = wp::sample_binomial_multitype({n_emp}, {{c}}, rng);
            wp::Rng init_rng = rng.fork(1);
            std::uint64_t n_vertices = g.num_vertices();
            wp::MessagedGraph mg = wp::initialize(std::move(g), e.bundle.q0, init_rng, false);
            auto res = wp::run(std::move(mg), e.bundle.alphabet, *e.bundle.rule, max_rounds);
            auto core = wp::extract_core(e.bundle.alphabet, res.state, k_core);
            empirical = static_cast<double>(core.size()) / static_cast<double>(n_vertices);
        }
        out.row({e.digest, format_double(c), format_double(mass), format_double(predicted),
                 format_double(empirical), std::to_string(used_seed)});
    }

    // Bisection for the smallest c with a nontrivial limit.
    double lo = c_min, hi = c_max;
    if (fixpoint_one_mass(e.bundle, limit_at(hi).limit) > nontrivial_mass &&
        fixpoint_one_mass(e.bundle, limit_at(lo).limit) <= nontrivial_mass) {
        while (hi - lo > bisect_tol) {
            double mid = 0.5 * (lo + hi);
            if (fixpoint_one_mass(e.bundle, limit_at(mid).limit) > nontrivial_mass)
                hi = mid;
            else
                lo = mid;
        }
        CsvFile bis(e.out_dir / "threshold_bisection.csv", "digest,c_threshold,tolerance");
        bis.row({e.digest, format_double(0.5 * (lo + hi)), format_double(bisect_tol)});

        // Iteration trace above the threshold.
        auto it = limit_at(hi + 0.15);
        CsvFile trace(e.out_dir / "iteration_trace.csv", "digest,c,iter,tv,ratio");
        for (std::size_t s = 0; s < it.tv_log.size(); ++s)
            trace.row({e.digest, format_double(hi + 0.15), std::to_string(s + 1),
                       format_double(it.tv_log[s]),
                       format_double(s > 0 ? it.contraction[s - 1] : 0.0)});
    }
    return 0;
}

// ---------------------------------------------------------------- contiguity

int run_contiguity(const Experiment& e) {
    int t0 = e.config.value("t0", 3);
    std::uint64_t history_samples = e.config.value("history_samples", 1000000ULL);
    auto ns = sizes_of(e);
    auto seeds = seeds_of(e);

    // History law shared across seeds (cached once per config).
    wp::Rng law_rng = wp::Rng(0xca11ab1eULL + e.seed_offset);
    wp::HistoryDistMatrix law =
        wp::history_distribution(e.bundle.degrees, e.bundle.alphabet, *e.bundle.rule, t0,
                                 e.bundle.q0, e.mode, history_samples, law_rng, e.threads);
    {
        std::ofstream law_csv(e.out_dir / "history_law.csv", std::ios::binary);
        law_csv << law.to_csv(e.bundle.alphabet);
    }

    CsvFile census_csv(e.out_dir / "contiguity_census.csv",
                       "digest,n,seed,in_story,out_story,count,q,m_bar");
    CsvFile summary(e.out_dir / "contiguity_summary.csv",
                    "digest,n,seed,metric,value");
    CsvFile comp_csv(e.out_dir / "contiguity_compilations.csv",
                     "digest,n,compilation_id,freq_graph,freq_ghat,rel_gap");

    auto q = wp::q_table(e.bundle.alphabet, law);

    for (std::uint64_t n : ns) {
        std::map<std::string, std::uint64_t> comp_graph, comp_ghat;
        std::uint64_t vertices_graph = 0, vertices_ghat = 0;
        for (std::uint64_t seed : seeds) {
            wp::Rng rng = cell_rng(e, seed, n);
            // G side: sample, initialize, run t0 rounds with history.
            wp::TypedGraph graph = sample_graph(e, n, rng);
            wp::Rng init_rng = rng.fork(1);
            wp::MessagedGraph g_mg =
                wp::initialize(std::move(graph), e.bundle.q0, init_rng, true);
            for (int t = 0; t < t0; ++t) g_mg.step(e.bundle.alphabet, *e.bundle.rule);
            for (auto& [key, c] : wp::in_compilation_census(g_mg)) comp_graph[key] += c;
            vertices_graph += g_mg.graph().num_vertices();

            // Ghat side; the compilation census is taken before deletion (the
            // x_A quantity the concentration statements control).
            const int k = e.bundle.degrees.num_types();
            std::vector<std::uint64_t> n_vec(k, n / k);
            wp::Rng ghat_rng = rng.fork(2);
            wp::GhatResult ghat =
                wp::build_ghat(e.bundle.degrees, e.bundle.alphabet, *e.bundle.rule, n_vec,
                               e.bundle.q0, law, t0, ghat_rng);
            for (auto& [key, c] : wp::in_compilation_census_pre_deletion(
                     ghat.half_edges, ghat.graph.graph().num_vertices()))
                comp_ghat[key] += c;
            vertices_ghat += ghat.graph.graph().num_vertices();

            for (auto& [story, count] : ghat.census) {
                double qv = 0.0;
                auto iq = q.find(story);
                if (iq != q.end()) qv = iq->second;
                auto typing = wp::history_typing(e.bundle.alphabet,
                                                 wp::decode_history(story.first));
                // In-story typed (j,i): the half-edge owner has type i.
                double mean_deg =
                    e.bundle.degrees.z(typing.target).mean_coordinate(typing.source);
                double m_bar = mean_deg * static_cast<double>(n_vec[typing.target]) * qv;
                census_csv.row({e.digest, std::to_string(n), std::to_string(seed),
                                wp::history_label(e.bundle.alphabet, story.first),
                                wp::history_label(e.bundle.alphabet, story.second),
                                std::to_string(count), format_double(qv),
                                format_double(m_bar)});
            }
            summary.row({e.digest, std::to_string(n), std::to_string(seed), "deleted_total",
                         std::to_string(ghat.deleted.total)});
            summary.row({e.digest, std::to_string(n), std::to_string(seed),
                         "deleted_imbalance", std::to_string(ghat.deleted.imbalance)});
            summary.row({e.digest, std::to_string(n), std::to_string(seed), "deleted_parity",
                         std::to_string(ghat.deleted.parity)});
            summary.row({e.digest, std::to_string(n), std::to_string(seed),
                         "deleted_simplicity", std::to_string(ghat.deleted.simplicity)});
            for (auto& [i, j] : e.bundle.degrees.admissible_pairs().pairs) {
                auto out_report = wp::out_story_law_check(ghat.half_edges, law, i, j);
                summary.row({e.digest, std::to_string(n), std::to_string(seed),
                             "out_story_tv_" + std::to_string(i) + "_" + std::to_string(j),
                             format_double(out_report.tv)});
            }
            if (e.config.value("dump_ghat", false)) {
                std::ofstream dump(e.out_dir / ("ghat_n" + std::to_string(n) + "_seed" +
                                                std::to_string(seed) + ".txt"),
                                   std::ios::binary);
                dump << wp::messaged_graph_to_text(e.bundle.alphabet, ghat.graph);
            }
        }
        // Pooled in-compilation frequency comparison; stable ids by sorted key.
        std::map<std::string, std::pair<double, double>> freqs;
        for (auto& [key, c] : comp_graph)
            freqs[key].first = static_cast<double>(c) / static_cast<double>(vertices_graph);
        for (auto& [key, c] : comp_ghat)
            freqs[key].second = static_cast<double>(c) / static_cast<double>(vertices_ghat);
        std::uint64_t comp_id = 0;
        for (auto& [key, fr] : freqs) {
            double hi = std::max(fr.first, fr.second);
            double gap = hi > 0.0 ? std::abs(fr.first - fr.second) / hi : 0.0;
            comp_csv.row({e.digest, std::to_string(n), std::to_string(comp_id++),
                          format_double(fr.first), format_double(fr.second),
                          format_double(gap)});
        }
    }
    return 0;
}

// ---------------------------------------------------------------- subcritical

int run_subcritical(const Experiment& e) {
    const json& sc = e.config.value("subcritical", json::object());
    wp::SubcriticalityConfig cfg;
    cfg.mode = e.mode;
    cfg.potential.t_max = sc.value("t_max", 20);
    cfg.potential.samples = sc.value("potential_samples", 100000ULL);
    cfg.potential.node_budget = sc.value("potential_node_budget", 40000000ULL);
    cfg.tm_samples = sc.value("tm_samples", 20000ULL);
    cfg.pad_eps = sc.value("pad_eps", 1e-6);
    cfg.t0 = e.config.value("t0", 0);
    cfg.num_threads = e.threads;

    CsvFile verdicts(e.out_dir / "subcritical_verdicts.csv",
                     "digest,label,rho,rho_upper,gamma,verdict,fixed_point_iters,pairs");
    bool any_inconclusive = false;

    auto run_one = [&](const std::string& label, const wp::InstanceBundle& bundle) {
        wp::Rng rng(seeds_of(e)[0] + e.seed_offset);
        auto report = wp::subcriticality_verdict(bundle.degrees, bundle.alphabet, *bundle.rule,
                                                 bundle.q0, cfg, rng);
        verdicts.row({e.digest, label, format_double(report.rho),
                      format_double(report.rho_upper), format_double(report.gamma),
                      wp::to_string(report.verdict),
                      std::to_string(report.fixed_point_iters),
                      std::to_string(report.pairs.size())});
        std::ofstream tm(e.out_dir / ("transition_" + label + ".csv"), std::ios::binary);
        tm << report.transition.to_csv(bundle.alphabet);
        if (report.verdict == wp::Verdict::Inconclusive) any_inconclusive = true;
    };

    if (sc.contains("grid") && e.bundle.name == "kcore") {
        int k_core = e.config.at("instance").value("k_core", 3);
        for (auto& cj : sc.at("grid")) {
            double c = cj.get<double>();
            auto bundle = wp::kcore_instance(
                k_core, wp::DegreeModel({wp::TypeDegreeDistribution::poisson({c})}));
            char label[32];
            std::snprintf(label, sizeof label, "c%.4f", c);
            run_one(label, bundle);
        }
    } else {
        run_one("base", e.bundle);
    }
    return any_inconclusive ? 4 : 0;
}

// ---------------------------------------------------------------- assumptions

int run_assumptions(const Experiment& e) {
    const json& as = e.config.value("assumptions", json::object());
    std::vector<int> radii = as.value("radii", std::vector<int>{1, 2});
    std::uint64_t tree_samples = as.value("tree_samples", 100000ULL);
    int cycle_t0 = as.value("cycle_t0", 3);

    CsvFile out(e.out_dir / "assumptions.csv", "digest,n,seed,metric,i,r,value,extra");
    for (std::uint64_t n : sizes_of(e)) {
        for (std::uint64_t seed : seeds_of(e)) {
            wp::Rng rng = cell_rng(e, seed, n);
            wp::TypedGraph graph = sample_graph(e, n, rng);
            auto sizes = graph.class_sizes();
            for (int i = 0; i < graph.num_types(); ++i)
                out.row({e.digest, std::to_string(n), std::to_string(seed), "class_size",
                         std::to_string(i), "", std::to_string(sizes[i]), ""});
            out.row({e.digest, std::to_string(n), std::to_string(seed), "max_degree", "", "",
                     std::to_string(graph.max_degree()), ""});
            for (int i = 0; i < graph.num_types(); ++i) {
                for (int r : radii) {
                    auto stats = wp::empirical_neighbourhoods(graph, i, r);
                    wp::Rng tv_rng = rng.fork(0x7e0 + i * 16 + r);
                    auto report = wp::tv_to_tree(stats, e.bundle.degrees, i, r, e.mode,
                                                 tree_samples, tv_rng);
                    out.row({e.digest, std::to_string(n), std::to_string(seed), "tv_to_tree",
                             std::to_string(i), std::to_string(r), format_double(report.tv),
                             format_double(report.sampling_bound)});
                }
            }
            out.row({e.digest, std::to_string(n), std::to_string(seed), "near_short_cycle",
                     "", std::to_string(cycle_t0),
                     std::to_string(wp::count_near_short_cycle(graph, cycle_t0)), ""});
            // Tail decay diagnostic zeta(x) = -ln Pr(||Z||_1 > x) / x.
            for (int i = 0; i < e.bundle.degrees.num_types(); ++i) {
                for (int x : {8, 16, 24}) {
                    double tail = e.bundle.degrees.z(i).tail_probability(x);
                    double zeta = tail > 0.0 ? -std::log(tail) / x
                                             : std::numeric_limits<double>::infinity();
                    out.row({e.digest, std::to_string(n), std::to_string(seed), "zeta",
                             std::to_string(i), std::to_string(x), format_double(zeta),
                             format_double(tail)});
                }
            }
            auto asym = e.bundle.degrees.admissible_pairs().asymmetric();
            out.row({e.digest, std::to_string(n), std::to_string(seed), "asymmetric_pairs",
                     "", "", std::to_string(asym.size()), ""});
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Warning Propagation toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::uint64_t seed = 0;
    int threads = 1;
    for (auto* verb : {app.add_subcommand("converge", "per-round change traces"),
                       app.add_subcommand("threshold", "k-core threshold scan"),
                       app.add_subcommand("contiguity", "Ghat vs graph statistics"),
                       app.add_subcommand("subcritical", "change process verdicts"),
                       app.add_subcommand("assumptions", "model assumption diagnostics")}) {
        verb->add_option("--config", config_path, "experiment config (JSON)")->required();
        verb->add_option("--out", out_dir, "output directory");
        verb->add_option("--seed", seed, "seed offset added to config seeds");
        verb->add_option("--threads", threads, "worker threads");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? 0 : 2;
    }

    try {
        Experiment e = load_experiment(config_path, out_dir, seed, threads);
        if (app.got_subcommand("converge")) return run_converge(e);
        if (app.got_subcommand("threshold")) return run_threshold(e);
        if (app.got_subcommand("contiguity")) return run_contiguity(e);
        if (app.got_subcommand("subcritical")) return run_subcritical(e);
        if (app.got_subcommand("assumptions")) return run_assumptions(e);
        return 2;
    } catch (const wp::config_error& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return 2;
    } catch (const wp::domain_error& err) {
        std::cerr << "config/domain error: " << err.what() << '\n';
        return 2;
    } catch (const wp::numeric_error& err) {
        std::cerr << "numeric error: " << err.what() << '\n';
        return 3;
    } catch (const wp::resource_error& err) {
        std::cerr << "resource error: " << err.what() << '\n';
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 3;
    }
}
