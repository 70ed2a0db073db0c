#pragma once

#include <limits>
#include <vector>

#include "lgt/abelian_model.hpp"
#include "lgt/gauss.hpp"
#include "lgt/solver.hpp"

namespace lgt {

enum class TransformKind { MatterRemoval, GaugeRemoval1D };

struct EliminationReport {
    TransformKind kind = TransformKind::MatterRemoval;
    double unitarity_residual = 0.0;
    double decoupling_residual = 0.0;
    double constraint_residual_after = 0.0;
    double leakage = 0.0;
    double mass_constant = 0.0;
    std::vector<double> spectrum_before;
    std::vector<double> spectrum_after; // raw; compare after adding mass_constant
    double max_abs_deviation = 0.0;
    double max_gap_error = 0.0;
    bool headroom_ok = true;
    bool pass = false;
    double tol = kSpectrumTol;
};

// Matter removal for staggered hard-core matter: the product over vertices of
// the spin flip raised to the staggered generator G(x) = D(x) + s(x). Every
// factor is an exactly unitary controlled involution, so no headroom is
// needed at any truncation.
inline SparseOperator build_matter_removal(const GaussOperators& g) {
    if (g.matter() != MatterKind::HardCore)
        throw ConfigInvalid("spin-flip matter removal requires hard-core matter");
    const auto& space = g.space();
    SparseOperator u = identity_op(space);
    for (int v = 0; v < g.lattice().num_vertices(); ++v) {
        const int site = space->site_of(SiteRef{SiteRef::Vertex, v});
        u = u * controlled_power({local::sigma_x(), site, g.staggered_op(v)});
    }
    OpFlags f;
    f.unitary = true;
    return u.with_flags(f);
}

// Rotor-matter removal: shifts each vertex charge by minus the local electric
// divergence. The truncated charge ladder makes this a partial isometry; it is
// exact on states whose forward and backward images stay inside the ladder,
// which is audited over `support` (hard error otherwise).
inline SparseOperator build_rotor_matter_removal(const GaussOperators& g, const Subspace& support) {
    if (g.matter() != MatterKind::Rotor)
        throw ConfigInvalid("rotor matter removal requires rotor matter");
    const auto& space = g.space();
    const auto& lat = g.lattice();
    const int nv = lat.num_vertices();

    std::vector<int> vsite(nv);
    for (int v = 0; v < nv; ++v) vsite[v] = space->site_of(SiteRef{SiteRef::Vertex, v});
    const int lambda_q = space->site_space(vsite[0]).lambda;

    std::vector<int> d(space->num_sites());
    for (std::uint64_t k = 0; k < support.dim(); ++k) {
        space->decode(support.member(k), d);
        for (int v = 0; v < nv; ++v) {
            const int q = space->site_space(vsite[v]).ladder_value(d[vsite[v]]);
            const int dv = g.d_value(d, v);
            if (std::abs(q - dv) > lambda_q || std::abs(q + dv) > lambda_q)
                throw HeadroomViolation("rotor charge truncation too small on the support");
        }
    }

    std::vector<Triplet> trips;
    for (std::uint64_t i = 0; i < space->dim(); ++i) {
        space->decode(i, d);
        bool ok = true;
        std::vector<int> nd(d.begin(), d.end());
        for (int v = 0; v < nv && ok; ++v) {
            const auto& vsp = space->site_space(vsite[v]);
            const int q = vsp.ladder_value(d[vsite[v]]);
            const int target = q - g.d_value(d, v);
            if (std::abs(target) > lambda_q) ok = false;
            else nd[vsite[v]] = vsp.ladder_digit(target);
        }
        if (ok)
            trips.emplace_back(static_cast<Eigen::Index>(space->encode(nd)),
                               static_cast<Eigen::Index>(i), 1.0);
    }
    return SparseOperator::from_triplets(space, trips);
}

inline SparseOperator transform_hamiltonian(const SparseOperator& h, const SparseOperator& u) {
    auto out = u * h * u.adjoint();
    OpFlags f;
    f.hermitian = h.flags().hermitian && u.flags().unitary;
    return out.with_flags(f);
}

// Gauge-field states allowed after matter removal: G(x)(G(x)-1) = 0 everywhere.
inline Subspace constrained_sector(const GaussOperators& gauge_only) {
    const auto& lat = gauge_only.lattice();
    return filter_subspace(gauge_only.space(), [&](std::span<const int> d) {
        for (int v = 0; v < lat.num_vertices(); ++v) {
            const int gv = gauge_only.g_value(d, v);
            if (gv != 0 && gv != 1) return false;
        }
        return true;
    });
}

// Final matter-free Hamiltonian on the gauge-only space: electric and
// magnetic terms, the telescoped mass term, and projector-dressed shifts.
inline SparseOperator assemble_matter_free(const SpacePtr& gspace, const Lattice& lat,
                                           const U1ModelConfig& cfg,
                                           Corruption corruption = Corruption::None) {
    detail::require_u1_links(gspace, lat);
    GaussOperators g(gspace, lat, MatterKind::None);
    auto h = build_hks(gspace, lat, cfg) + build_physical_mass(gspace, lat, cfg, corruption).op;
    for (int l = 0; l < lat.num_links(); ++l) {
        const auto& link = lat.link(l);
        const int ls = gspace->site_of(SiteRef{SiteRef::LinkSite, l});
        auto u = embed_local(gspace, ls, local::ladder_raise(gspace->site_space(ls)));
        auto p1_from = gauss_projectors(g, link.from).p1;
        auto p0_to = gauss_projectors(g, link.to).p0;
        SparseOperator term = p1_from * (corruption == Corruption::DropProjector ? u : p0_to * u);
        if (cfg.xi && cfg.xi->hop.count(l))
            term = detail::xi_phase_op(gspace, cfg.xi->hop.at(l)) * term;
        term = cfg.eps(l) * term;
        h = h + term + term.adjoint();
    }
    OpFlags f;
    f.hermitian = true;
    return h.with_flags(f);
}

// 1d open-chain gauge removal: every link's electric field is shifted down by
// the total charge (dynamical plus static) to its left. Built as a partial
// isometry; entries whose image leaves the ladder are dropped.
inline SparseOperator build_gauge_removal_1d(const GaussOperators& g) {
    const auto& lat = g.lattice();
    if (lat.ndim() != 1) throw ConfigInvalid("gauge removal is defined on 1d chains");
    if (lat.boundary() != Boundary::Open)
        throw PeriodicBoundary("gauge removal needs open boundary conditions");
    const auto& space = g.space();

    std::vector<int> lsite(lat.num_links());
    for (int l = 0; l < lat.num_links(); ++l)
        lsite[l] = space->site_of(SiteRef{SiteRef::LinkSite, l});

    std::vector<int> d(space->num_sites());
    std::vector<Triplet> trips;
    for (std::uint64_t i = 0; i < space->dim(); ++i) {
        space->decode(i, d);
        bool ok = true;
        std::vector<int> nd(d.begin(), d.end());
        int cum = 0;
        for (int l = 0; l < lat.num_links() && ok; ++l) {
            // links of a 1d chain are ordered left to right; link l starts at vertex l
            cum += g.q_value(d, lat.link(l).from) + g.static_charge(lat.link(l).from);
            const auto& lsp = space->site_space(lsite[l]);
            const int target = lsp.ladder_value(d[lsite[l]]) - cum;
            if (std::abs(target) > lsp.lambda) ok = false;
            else nd[lsite[l]] = lsp.ladder_digit(target);
        }
        if (ok)
            trips.emplace_back(static_cast<Eigen::Index>(space->encode(nd)),
                               static_cast<Eigen::Index>(i), 1.0);
    }
    return SparseOperator::from_triplets(space, trips);
}

struct EquivalenceInput {
    SparseOperator restricted_a;
    SparseOperator restricted_b;
    double shift_b = 0.0;
    double tol = kSpectrumTol;
};

// Sorted-spectrum comparison of two restricted hermitian blocks.
inline EliminationReport certify_equivalence(const EquivalenceInput& in) {
    if (in.restricted_a.dim() != in.restricted_b.dim())
        throw DimMismatch("restricted blocks have different dimensions");
    EliminationReport rep;
    rep.tol = in.tol;
    rep.mass_constant = in.shift_b;
    rep.spectrum_before = eig_full(in.restricted_a);
    rep.spectrum_after = eig_full(in.restricted_b);
    auto cmp = compare_spectra(rep.spectrum_before, rep.spectrum_after, in.shift_b, in.tol);
    rep.max_abs_deviation = cmp.max_abs_deviation;
    rep.max_gap_error = cmp.max_gap_error;
    rep.pass = cmp.pass;
    return rep;
}

// Full matter-elimination certification for a hard-core model: builds the
// original theory and the assembled matter-free one independently, restricts
// both to their sectors, and compares sorted spectra after the mass-constant
// shift. Decoupling and transported-constraint residuals come from applying
// the removal transform to every physical basis state.
inline EliminationReport abelian_eliminate_case(const Lattice& lat, const U1ModelConfig& cfg,
                                                Corruption corruption = Corruption::None,
                                                double tol = kSpectrumTol,
                                                const SolverOptions& solver = {}) {
    EliminationReport rep;
    rep.kind = TransformKind::MatterRemoval;
    rep.tol = tol;

    auto model = build_u1_model(lat, cfg);
    GaussOperators gauss(model.space, lat, cfg.matter, cfg.static_charges);
    auto phys = physical_sector(gauss);
    auto ha = restrict_to(model.hamiltonian, phys);
    const double leak_a = sector_leakage(model.hamiltonian, phys);

    auto gspace = build_u1_gauge_space(lat, cfg);
    GaussOperators ggauge(gspace, lat, MatterKind::None);
    auto hb = assemble_matter_free(gspace, lat, cfg, corruption);
    auto constrained = constrained_sector(ggauge);
    const double leak_b = sector_leakage(hb, constrained);
    const double shift = build_physical_mass(gspace, lat, cfg, corruption).constant;

    if (phys.dim() != constrained.dim()) {
        rep.spectrum_before = spectra_of(ha, solver);
        rep.spectrum_after = spectra_of(restrict_to(hb, constrained), solver);
        rep.max_abs_deviation = std::numeric_limits<double>::infinity();
        rep.pass = false;
        rep.leakage = std::max(leak_a, leak_b);
        return rep;
    }

    rep.spectrum_before = spectra_of(ha, solver);
    rep.spectrum_after = spectra_of(restrict_to(hb, constrained), solver);
    {
        auto cmp = compare_spectra(rep.spectrum_before, rep.spectrum_after, shift, tol);
        rep.mass_constant = shift;
        rep.max_abs_deviation = cmp.max_abs_deviation;
        rep.max_gap_error = cmp.max_gap_error;
        rep.pass = cmp.pass;
    }
    rep.leakage = std::max(leak_a, leak_b);
    if (rep.leakage >= 1e-3) rep.pass = false;

    if (cfg.matter == MatterKind::HardCore) {
        auto u = build_matter_removal(gauss);
        rep.unitarity_residual = u.unitary_residual();
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(model.space->dim()));
        std::vector<int> digits(model.space->num_sites());
        double worst_n = 0.0, worst_c = 0.0;
        for (std::uint64_t k = 0; k < phys.dim(); ++k) {
            psi.setZero();
            psi(static_cast<Eigen::Index>(phys.member(k))) = 1.0;
            Eigen::VectorXcd w = u.apply(psi);
            for (int v = 0; v < lat.num_vertices(); ++v) {
                const int site = model.space->site_of(SiteRef{SiteRef::Vertex, v});
                double acc = 0.0;
                for (Eigen::Index i = 0; i < w.size(); ++i) {
                    if (std::abs(w(i)) <= kDropTol) continue;
                    const int occ = model.space->site_space(site).occupation(
                        model.space->digit(static_cast<std::uint64_t>(i), site));
                    acc += std::norm(w(i)) * occ * occ;
                }
                worst_n = std::max(worst_n, std::sqrt(acc));
            }
            worst_c = std::max(worst_c, constraint_residual(gauss, w));
        }
        rep.decoupling_residual = worst_n;
        rep.constraint_residual_after = worst_c;
        if (rep.unitarity_residual > kFlagTol || worst_n > kFlagTol || worst_c > kFlagTol)
            rep.pass = false;
    }
    return rep;
}

// 1d gauge-removal certification: checks that the transform sends every
// physical basis state to the zero-field configuration and that the zero-field
// block of the conjugated Hamiltonian reproduces the physical spectrum on the
// zero-total-charge matter sector.
inline EliminationReport gauge_removal_case(const Lattice& lat, const U1ModelConfig& cfg,
                                            double tol = kSpectrumTol,
                                            const SolverOptions& solver = {}) {
    EliminationReport rep;
    rep.kind = TransformKind::GaugeRemoval1D;
    rep.tol = tol;

    auto model = build_u1_model(lat, cfg);
    GaussOperators gauss(model.space, lat, cfg.matter, cfg.static_charges);
    auto phys = physical_sector(gauss);
    auto w = build_gauge_removal_1d(gauss);

    const auto& space = model.space;
    std::vector<int> lsite(lat.num_links());
    for (int l = 0; l < lat.num_links(); ++l)
        lsite[l] = space->site_of(SiteRef{SiteRef::LinkSite, l});

    // physical states map to single basis states with E = 0 on every link
    std::vector<int> d(space->num_sites());
    double worst = 0.0, unit = 0.0;
    for (std::uint64_t k = 0; k < phys.dim(); ++k) {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space->dim()));
        psi(static_cast<Eigen::Index>(phys.member(k))) = 1.0;
        Eigen::VectorXcd img = w.apply(psi);
        unit = std::max(unit, std::abs(img.norm() - 1.0));
        for (Eigen::Index i = 0; i < img.size(); ++i) {
            if (std::abs(img(i)) <= kDropTol) continue;
            space->decode(static_cast<std::uint64_t>(i), d);
            double e2 = 0.0;
            for (int l = 0; l < lat.num_links(); ++l) {
                const double e = space->site_space(lsite[l]).ladder_value(d[lsite[l]]);
                e2 += e * e;
            }
            worst = std::max(worst, std::abs(img(i)) * std::sqrt(e2));
        }
    }
    rep.decoupling_residual = worst;
    rep.unitarity_residual = unit;

    // Zero-field matter sector: all E = 0, cumulative charge representable on
    // every link, and zero total charge (the open-chain closure condition).
    auto zsector = filter_subspace(space, [&](std::span<const int> dd) {
        for (int l = 0; l < lat.num_links(); ++l)
            if (space->site_space(lsite[l]).ladder_value(dd[lsite[l]]) != 0) return false;
        int cum = 0;
        for (int l = 0; l < lat.num_links(); ++l) {
            cum += gauss.q_value(dd, lat.link(l).from) + gauss.static_charge(lat.link(l).from);
            if (std::abs(cum) > cfg.lambda) return false;
        }
        const int last = lat.num_vertices() - 1;
        return cum + gauss.q_value(dd, last) + gauss.static_charge(last) == 0;
    });

    // headroom verdict: no zero-total-charge matter configuration is lost to
    // the electric truncation
    auto zfree = filter_subspace(space, [&](std::span<const int> dd) {
        for (int l = 0; l < lat.num_links(); ++l)
            if (space->site_space(lsite[l]).ladder_value(dd[lsite[l]]) != 0) return false;
        int total = 0;
        for (int v = 0; v < lat.num_vertices(); ++v)
            total += gauss.q_value(dd, v) + gauss.static_charge(v);
        return total == 0;
    });
    rep.headroom_ok = zfree.dim() == zsector.dim();

    auto conj = transform_hamiltonian(model.hamiltonian, w);
    auto block = restrict_to(conj, zsector).with_flags({true, false, false});
    auto before = restrict_to(model.hamiltonian, phys);

    if (zsector.dim() != phys.dim()) {
        rep.max_abs_deviation = std::numeric_limits<double>::infinity();
        rep.pass = false;
        return rep;
    }
    rep.spectrum_before = spectra_of(before, solver);
    rep.spectrum_after = spectra_of(block, solver);
    auto cmp = compare_spectra(rep.spectrum_before, rep.spectrum_after, 0.0, tol);
    rep.max_abs_deviation = cmp.max_abs_deviation;
    rep.max_gap_error = cmp.max_gap_error;
    rep.pass = cmp.pass && rep.decoupling_residual < kFlagTol && rep.unitarity_residual < kFlagTol;
    return rep;
}

} // namespace lgt
