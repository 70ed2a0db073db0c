#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "lgt/abelian_model.hpp"
#include "lgt/unitary_group.hpp"

namespace lgt {

enum class ModelKind { U1, U2, Su2Embed, Su3Identities };
enum class PipelineKind { Census, EliminateMatter, EliminateGauge1D, Embed };

// Declarative run description. Parsing is strict: unknown keys anywhere in the
// tree are rejected so that typos cannot silently change an experiment.
struct RunConfig {
    ModelKind model = ModelKind::U1;
    std::vector<int> dims{2};
    Boundary boundary = Boundary::Open;
    int lambda = 1;
    int twice_jmax = 1;
    int lambda_q = 1;
    double g2 = 1.0;
    double mass = 0.0;
    double epsilon_uniform = 1.0;
    std::vector<cxd> epsilon_per_link; // overrides the uniform value when set
    MatterKind matter = MatterKind::HardCore;
    double rotor_r0 = 1.0;
    std::map<int, int> static_charges;
    PipelineKind pipeline = PipelineKind::Census;
    SolverOptions solver;
    double tol = kSpectrumTol;
    std::string output_dir = "out";
    Corruption corruption = Corruption::None;

    std::string canonical; // the parsed document, canonically re-serialized

    static RunConfig parse_file(const std::string& path);
    static RunConfig parse(const nlohmann::json& doc);

    std::vector<cxd> resolve_epsilon(const Lattice& lat) const {
        if (epsilon_per_link.empty())
            return std::vector<cxd>(lat.num_links(), cxd(epsilon_uniform, 0));
        if (static_cast<int>(epsilon_per_link.size()) != lat.num_links())
            throw ConfigInvalid("epsilon table size does not match the link count");
        return epsilon_per_link;
    }

    U1ModelConfig u1_config(const Lattice& lat) const {
        U1ModelConfig c;
        c.g2 = g2;
        c.mass = mass;
        c.epsilon = resolve_epsilon(lat);
        c.matter = matter;
        c.lambda = lambda;
        c.lambda_q = lambda_q;
        c.rotor_r0 = rotor_r0;
        c.static_charges.assign(lat.num_vertices(), 0);
        for (auto& [v, q] : static_charges) {
            if (v < 0 || v >= lat.num_vertices())
                throw ConfigInvalid("static charge on a vertex outside the lattice");
            c.static_charges[v] = q;
        }
        return c;
    }

    U2ModelConfig u2_config(const Lattice& lat) const {
        U2ModelConfig c;
        c.g2 = g2;
        c.mass = mass;
        c.epsilon = resolve_epsilon(lat);
        c.lambda = lambda;
        c.twice_jmax = twice_jmax;
        return c;
    }

    Su2EmbedConfig embed_config(const Lattice& lat) const {
        Su2EmbedConfig c;
        c.g2 = g2;
        c.mass = mass;
        c.epsilon = resolve_epsilon(lat);
        c.lambda = lambda;
        c.twice_jmax = twice_jmax;
        return c;
    }
};

namespace detail_cfg {

using nlohmann::json;

inline void expect_keys(const json& j, const std::set<std::string>& allowed,
                        const std::string& where) {
    if (!j.is_object()) throw ConfigInvalid(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigInvalid("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigInvalid("key '" + key + "' has the wrong type");
    }
}

} // namespace detail_cfg

inline RunConfig RunConfig::parse(const nlohmann::json& doc) {
    using detail_cfg::expect_keys;
    using detail_cfg::get_or;
    using nlohmann::json;

    expect_keys(doc, {"model", "lattice", "truncation", "couplings", "matter", "static_charges",
                      "pipeline", "solver", "output", "corruption", "tolerance"},
                "the configuration");

    RunConfig cfg;
    const std::string model = get_or<std::string>(doc, "model", "u1");
    if (model == "u1") cfg.model = ModelKind::U1;
    else if (model == "u2") cfg.model = ModelKind::U2;
    else if (model == "su2_embed") cfg.model = ModelKind::Su2Embed;
    else if (model == "su3_identities") cfg.model = ModelKind::Su3Identities;
    else throw ConfigInvalid("unknown model '" + model + "'");

    if (doc.contains("lattice")) {
        const auto& l = doc.at("lattice");
        expect_keys(l, {"dims", "boundary"}, "lattice");
        cfg.dims = get_or<std::vector<int>>(l, "dims", {2});
        const std::string bc = get_or<std::string>(l, "boundary", "open");
        if (bc == "open") cfg.boundary = Boundary::Open;
        else if (bc == "periodic") cfg.boundary = Boundary::Periodic;
        else throw ConfigInvalid("boundary must be 'open' or 'periodic'");
    }

    if (doc.contains("truncation")) {
        const auto& t = doc.at("truncation");
        expect_keys(t, {"lambda", "twice_jmax", "lambda_q"}, "truncation");
        cfg.lambda = get_or<int>(t, "lambda", 1);
        cfg.twice_jmax = get_or<int>(t, "twice_jmax", 1);
        cfg.lambda_q = get_or<int>(t, "lambda_q", 1);
    }

    if (doc.contains("couplings")) {
        const auto& c = doc.at("couplings");
        expect_keys(c, {"g2", "M", "epsilon"}, "couplings");
        cfg.g2 = get_or<double>(c, "g2", 1.0);
        cfg.mass = get_or<double>(c, "M", 0.0);
        if (c.contains("epsilon")) {
            const auto& e = c.at("epsilon");
            if (e.is_number()) {
                cfg.epsilon_uniform = e.get<double>();
            } else if (e.is_array()) {
                for (const auto& v : e) {
                    if (v.is_number()) cfg.epsilon_per_link.emplace_back(v.get<double>(), 0.0);
                    else if (v.is_array() && v.size() == 2)
                        cfg.epsilon_per_link.emplace_back(v.at(0).get<double>(),
                                                          v.at(1).get<double>());
                    else throw ConfigInvalid("epsilon entries must be numbers or [re, im]");
                }
            } else {
                throw ConfigInvalid("epsilon must be a number or an array");
            }
        }
    }

    if (doc.contains("matter")) {
        const auto& m = doc.at("matter");
        expect_keys(m, {"kind", "r0"}, "matter");
        const std::string kind = get_or<std::string>(m, "kind", "hardcore");
        if (kind == "hardcore") cfg.matter = MatterKind::HardCore;
        else if (kind == "fermion") cfg.matter = MatterKind::Fermion;
        else if (kind == "rotor") cfg.matter = MatterKind::Rotor;
        else throw ConfigInvalid("matter kind must be hardcore, fermion, or rotor");
        cfg.rotor_r0 = get_or<double>(m, "r0", 1.0);
    }

    if (doc.contains("static_charges")) {
        const auto& s = doc.at("static_charges");
        if (!s.is_object()) throw ConfigInvalid("static_charges must map vertex index to charge");
        for (auto it = s.begin(); it != s.end(); ++it) {
            try {
                cfg.static_charges[std::stoi(it.key())] = it.value().get<int>();
            } catch (const std::exception&) {
                throw ConfigInvalid("static_charges keys must be vertex indices");
            }
        }
    }

    const std::string pipe = get_or<std::string>(doc, "pipeline", "census");
    if (pipe == "census") cfg.pipeline = PipelineKind::Census;
    else if (pipe == "eliminate_matter") cfg.pipeline = PipelineKind::EliminateMatter;
    else if (pipe == "eliminate_gauge_1d") cfg.pipeline = PipelineKind::EliminateGauge1D;
    else if (pipe == "embed") cfg.pipeline = PipelineKind::Embed;
    else throw ConfigInvalid("unknown pipeline '" + pipe + "'");

    if (doc.contains("solver")) {
        const auto& s = doc.at("solver");
        expect_keys(s, {"mode", "k", "tol", "max_iter", "seed"}, "solver");
        const std::string mode = get_or<std::string>(s, "mode", "full");
        if (mode == "full") cfg.solver.mode = SolverOptions::Mode::Full;
        else if (mode == "lowest") cfg.solver.mode = SolverOptions::Mode::Lowest;
        else throw ConfigInvalid("solver mode must be 'full' or 'lowest'");
        cfg.solver.k = get_or<int>(s, "k", 1);
        cfg.solver.tol = get_or<double>(s, "tol", 1e-10);
        cfg.solver.max_iter = get_or<int>(s, "max_iter", 500);
        cfg.solver.seed = get_or<std::uint64_t>(s, "seed", 0);
    }
    cfg.tol = get_or<double>(doc, "tolerance", kSpectrumTol);

    if (doc.contains("output")) {
        const auto& o = doc.at("output");
        expect_keys(o, {"dir"}, "output");
        cfg.output_dir = get_or<std::string>(o, "dir", "out");
    }

    const std::string corr = get_or<std::string>(doc, "corruption", "none");
    if (corr == "none") cfg.corruption = Corruption::None;
    else if (corr == "stagger_flip") cfg.corruption = Corruption::StaggerFlip;
    else if (corr == "drop_projector") cfg.corruption = Corruption::DropProjector;
    else if (corr == "drop_signs") cfg.corruption = Corruption::DropSigns;
    else throw ConfigInvalid("unknown corruption '" + corr + "'");

    // semantic checks
    if (cfg.lambda < 1) throw ConfigInvalid("truncation.lambda must be >= 1");
    if (cfg.lambda_q < 1) throw ConfigInvalid("truncation.lambda_q must be >= 1");
    if (cfg.solver.k < 1) throw ConfigInvalid("solver.k must be >= 1");
    if (cfg.solver.tol <= 0 || cfg.tol <= 0) throw ConfigInvalid("tolerances must be positive");
    if (cfg.dims.empty()) throw ConfigInvalid("lattice.dims must not be empty");

    switch (cfg.model) {
    case ModelKind::U1:
        if (cfg.pipeline == PipelineKind::Embed)
            throw ConfigInvalid("the embed pipeline applies to the su2_embed model");
        break;
    case ModelKind::U2:
        if (cfg.pipeline != PipelineKind::Census && cfg.pipeline != PipelineKind::EliminateMatter)
            throw ConfigInvalid("u2 supports the census and eliminate_matter pipelines");
        break;
    case ModelKind::Su2Embed:
        if (cfg.pipeline != PipelineKind::Embed)
            throw ConfigInvalid("su2_embed supports only the embed pipeline");
        break;
    case ModelKind::Su3Identities:
        if (cfg.pipeline != PipelineKind::Census)
            throw ConfigInvalid("su3_identities supports only the census pipeline");
        break;
    }

    if (cfg.pipeline == PipelineKind::EliminateMatter || cfg.pipeline == PipelineKind::EliminateGauge1D) {
        if (cfg.model == ModelKind::U1 && cfg.matter == MatterKind::Rotor)
            throw ConfigInvalid("elimination pipelines need occupation-type matter");
        if (!cfg.static_charges.empty() && cfg.pipeline == PipelineKind::EliminateMatter)
            throw ConfigInvalid("matter elimination is certified in the zero static-charge sector");
    }
    if (cfg.pipeline == PipelineKind::EliminateGauge1D &&
        (cfg.dims.size() != 1 || cfg.boundary != Boundary::Open))
        throw ConfigInvalid("gauge removal needs an open one-dimensional chain");

    cfg.canonical = doc.dump();
    return cfg;
}

inline RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot read config file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    return parse(doc);
}

} // namespace lgt
