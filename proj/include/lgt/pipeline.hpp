#pragma once

#include <filesystem>
#include <string>

#include "lgt/report.hpp"
#include "lgt/run_config.hpp"

#ifndef LGTKIT_VERSION
#define LGTKIT_VERSION "0.1.0"
#endif

namespace lgt {

// Digit-level headroom audit: a case has headroom when no Hamiltonian matrix
// element between two states of the physical sector is clipped by the
// truncation window. Shift terms that already vanish on matter grounds
// (blocked occupations) do not count as clipped.
inline bool u1_headroom_ok(const Lattice& lat, const U1ModelConfig& cfg, const SpacePtr& space,
                           const Subspace& phys) {
    std::vector<int> d(space->num_sites());
    std::vector<int> lsite(lat.num_links());
    for (int l = 0; l < lat.num_links(); ++l)
        lsite[l] = space->site_of(SiteRef{SiteRef::LinkSite, l});
    auto occ = [&](int v) {
        const int s = space->site_of(SiteRef{SiteRef::Vertex, v});
        return space->site_space(s).occupation(d[s]);
    };
    for (std::uint64_t k = 0; k < phys.dim(); ++k) {
        space->decode(phys.member(k), d);
        for (int l = 0; l < lat.num_links(); ++l) {
            const auto& link = lat.link(l);
            const int e = space->site_space(lsite[l]).ladder_value(d[lsite[l]]);
            if (occ(link.from) == 0 && occ(link.to) == 1 && e == cfg.lambda) return false;
            if (occ(link.from) == 1 && occ(link.to) == 0 && e == -cfg.lambda) return false;
        }
        for (const auto& p : lat.plaquettes()) {
            const int e0 = space->site_space(lsite[p.links[0]]).ladder_value(d[lsite[p.links[0]]]);
            const int e1 = space->site_space(lsite[p.links[1]]).ladder_value(d[lsite[p.links[1]]]);
            const int e2 = space->site_space(lsite[p.links[2]]).ladder_value(d[lsite[p.links[2]]]);
            const int e3 = space->site_space(lsite[p.links[3]]).ladder_value(d[lsite[p.links[3]]]);
            if (e0 == cfg.lambda || e1 == cfg.lambda || e2 == -cfg.lambda || e3 == -cfg.lambda)
                return false; // forward orientation clipped
            if (e0 == -cfg.lambda || e1 == -cfg.lambda || e2 == cfg.lambda || e3 == cfg.lambda)
                return false; // reverse orientation clipped
        }
    }
    return true;
}

inline bool u2_headroom_ok(const Lattice& lat, const U2ModelConfig& cfg,
                           const NAGaussOperators& gauss, const Subspace& phys) {
    const auto& space = gauss.space();
    std::vector<int> d(space->num_sites());
    for (std::uint64_t k = 0; k < phys.dim(); ++k) {
        space->decode(phys.member(k), d);
        for (int l = 0; l < lat.num_links(); ++l) {
            const auto& link = lat.link(l);
            const int e = gauss.link_state(d, l).e;
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n) {
                    const bool fwd = gauss.occupation(d, link.from, m) == 0 &&
                                     gauss.occupation(d, link.to, n) == 1;
                    const bool bwd = gauss.occupation(d, link.from, m) == 1 &&
                                     gauss.occupation(d, link.to, n) == 0;
                    if (fwd && e == cfg.lambda) return false;
                    if (bwd && e == -cfg.lambda) return false;
                }
        }
    }
    return true;
}

struct PipelineResult {
    int exit_code = 0;
    json report;
    json manifest;
    std::vector<double> spectrum_before;
    std::vector<double> spectrum_after;
    double shift_after = 0.0;
    bool has_spectra = false;
};

namespace detail_pipeline {

inline json base_manifest(const RunConfig& cfg) {
    json m;
    m["config_hash"] = fnv1a_hex(cfg.canonical);
    m["tool_version"] = LGTKIT_VERSION;
    m["headroom"] = json::array();
    return m;
}

inline void add_headroom(json& manifest, const std::string& name, bool ok,
                         const std::string& detail) {
    json h;
    h["check"] = name;
    h["ok"] = ok;
    h["detail"] = detail;
    manifest["headroom"].push_back(h);
}

} // namespace detail_pipeline

inline PipelineResult run_pipeline(const RunConfig& cfg) {
    using detail_pipeline::add_headroom;
    PipelineResult out;
    out.manifest = detail_pipeline::base_manifest(cfg);

    auto lat = Lattice::build(cfg.dims, cfg.boundary);

    switch (cfg.model) {
    case ModelKind::U1: {
        auto mcfg = cfg.u1_config(lat);
        if (cfg.pipeline == PipelineKind::Census) {
            auto space = build_u1_space(lat, mcfg);
            GaussOperators gauss(space, lat, mcfg.matter, mcfg.static_charges);
            std::vector<SparseOperator> gens;
            for (int v = 0; v < lat.num_vertices(); ++v) gens.push_back(gauss.generator_op(v));
            auto table = sector_decompose(space, gens);
            out.report = to_json(table);
            auto phys = physical_sector(gauss);
            out.report["physical_sector_dim"] = phys.dim();
            out.report["empty_sector"] = phys.dim() == 0;
            add_headroom(out.manifest, "sector_dimensions_sum", table.total_dimension() == space->dim(),
                         "partition covers the product basis");
            out.exit_code = table.total_dimension() == space->dim() ? 0 : 2;
            return out;
        }
        if (cfg.pipeline == PipelineKind::EliminateMatter) {
            if (!lat.bipartite_staggering())
                throw ConfigInvalid("staggered elimination needs bipartite parity (even periodic extents)");
            auto rep = abelian_eliminate_case(lat, mcfg, cfg.corruption, cfg.tol, cfg.solver);
            auto space = build_u1_space(lat, mcfg);
            GaussOperators gauss(space, lat, mcfg.matter, mcfg.static_charges);
            auto phys = physical_sector(gauss);
            const bool headroom = u1_headroom_ok(lat, mcfg, space, phys);
            rep.headroom_ok = headroom;
            out.report = to_json(rep);
            add_headroom(out.manifest, "physical_sector_headroom", headroom,
                         "no clipped matrix element between physical states");
            out.spectrum_before = rep.spectrum_before;
            out.spectrum_after = rep.spectrum_after;
            out.shift_after = rep.mass_constant;
            out.has_spectra = true;
            out.exit_code = rep.pass ? 0 : 2;
            return out;
        }
        // gauge removal
        auto rep = gauge_removal_case(lat, mcfg, cfg.tol, cfg.solver);
        out.report = to_json(rep);
        add_headroom(out.manifest, "cumulative_charge_window", rep.headroom_ok,
                     "all zero-charge configurations representable on the ladder");
        out.spectrum_before = rep.spectrum_before;
        out.spectrum_after = rep.spectrum_after;
        out.shift_after = 0.0;
        out.has_spectra = true;
        out.exit_code = rep.pass ? 0 : 2;
        return out;
    }
    case ModelKind::U2: {
        auto mcfg = cfg.u2_config(lat);
        if (cfg.pipeline == PipelineKind::Census) {
            auto space = build_u2_space(lat, mcfg);
            NAGaussOperators gauss(space, lat, true);
            std::vector<SparseOperator> gens;
            for (int v = 0; v < lat.num_vertices(); ++v)
                for (int m = 0; m < 2; ++m) gens.push_back(gauss.g_op(v, m));
            auto table = sector_decompose(space, gens);
            out.report = to_json(table);
            out.report["physical_sector_dim"] = na_physical_sector(gauss).dim();
            out.exit_code = table.total_dimension() == space->dim() ? 0 : 2;
            add_headroom(out.manifest, "sector_dimensions_sum",
                         table.total_dimension() == space->dim(), "partition covers the basis");
            return out;
        }
        if (!lat.bipartite_staggering())
            throw ConfigInvalid("staggered elimination needs bipartite parity");
        const bool drop_signs = cfg.corruption == Corruption::DropSigns;
        auto rep = u2_eliminate_case(lat, mcfg, drop_signs, cfg.tol, cfg.solver);
        auto space = build_u2_space(lat, mcfg);
        NAGaussOperators gauss(space, lat, true);
        auto phys = na_physical_sector(gauss);
        const bool headroom = u2_headroom_ok(lat, mcfg, gauss, phys);
        rep.base.headroom_ok = headroom;
        out.report = to_json(rep);
        out.report["cartan"] = to_json(cartan_data(GroupKind::U, 2));
        add_headroom(out.manifest, "physical_sector_headroom", headroom,
                     "no clipped matrix element between physical states");
        out.spectrum_before = rep.base.spectrum_before;
        out.spectrum_after = rep.base.spectrum_after;
        out.shift_after = rep.base.mass_constant;
        out.has_spectra = true;
        out.exit_code = rep.base.pass ? 0 : 2;
        return out;
    }
    case ModelKind::Su2Embed: {
        auto mcfg = cfg.embed_config(lat);
        auto rep = su2_embed_case(lat, mcfg, cfg.tol < 1e-12 ? cfg.tol : 1e-12);
        out.report = to_json(rep);
        add_headroom(out.manifest, "clock_register_window", true,
                     "embedding construction verified the cumulative charges");
        out.exit_code = rep.pass ? 0 : 2;
        return out;
    }
    case ModelKind::Su3Identities: {
        auto rep = su3_gn_identity_check();
        out.report = to_json(rep);
        add_headroom(out.manifest, "exhaustive_enumeration", true,
                     "all single-vertex configurations enumerated");
        out.exit_code = rep.pass ? 0 : 2;
        return out;
    }
    }
    throw Error("unreachable");
}

// Writes report.json, spectra.csv (for spectral pipelines), and manifest.json
// into the output directory. The csv applies the mass-constant shift to the
// 'after' column so abs_diff is the certified deviation.
inline void write_artifacts(const PipelineResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    write_json_file((fs::path(out_dir) / "report.json").string(), res.report);
    write_json_file((fs::path(out_dir) / "manifest.json").string(), res.manifest);
    if (res.has_spectra)
        write_spectra_csv((fs::path(out_dir) / "spectra.csv").string(), res.spectrum_before,
                          res.spectrum_after, res.shift_after);
}

} // namespace lgt
