#pragma once

#include <map>
#include <optional>
#include <vector>

#include "lgt/gauss.hpp"
#include "lgt/linop.hpp"
#include "lgt/local_ops.hpp"

namespace lgt {

// Pluggable diagonal unit-modulus phases attached to hopping and plaquette
// terms. Each entry reads the electric fields of a fixed list of links and
// returns a phase per configuration (default 1). Phases multiply the written
// term (the one whose h.c. is added afterwards), to the left of the shift
// operators; any consistent placement works because every certification uses
// the same convention on both routes.
struct XiTable {
    struct Entry {
        std::vector<int> watched_links;
        std::map<std::vector<int>, cxd> phases;
    };
    std::map<int, Entry> hop;       // keyed by link index
    std::map<int, Entry> plaquette; // keyed by plaquette index
};

struct U1ModelConfig {
    double g2 = 1.0;
    double mass = 0.0;
    std::vector<cxd> epsilon; // per link; empty means 1 everywhere
    MatterKind matter = MatterKind::HardCore;
    int lambda = 1;         // electric truncation
    int lambda_q = 1;       // rotor charge truncation
    double rotor_r0 = 1.0;
    std::vector<int> static_charges; // per vertex; empty means 0
    std::optional<XiTable> xi;

    cxd eps(int link) const {
        if (epsilon.empty()) return 1.0;
        return epsilon.at(link);
    }
};

inline SpacePtr build_u1_space(const Lattice& lat, const U1ModelConfig& cfg) {
    if (cfg.lambda < 1) throw ConfigInvalid("electric truncation must be >= 1");
    return build_space(lat,
                       [&](int) {
                           switch (cfg.matter) {
                           case MatterKind::HardCore: return LocalSpace::hardcore_vertex();
                           case MatterKind::Fermion: return LocalSpace::fermion_vertex(1);
                           case MatterKind::Rotor: return LocalSpace::rotor_vertex(cfg.lambda_q);
                           default: throw ConfigInvalid("u1 model needs matter on vertices");
                           }
                       },
                       [&](int) { return LocalSpace::u1_link(cfg.lambda); });
}

inline SpacePtr build_u1_gauge_space(const Lattice& lat, const U1ModelConfig& cfg) {
    std::vector<std::pair<SiteRef, LocalSpace>> sites;
    for (int l = 0; l < lat.num_links(); ++l)
        sites.push_back({SiteRef{SiteRef::LinkSite, l}, LocalSpace::u1_link(cfg.lambda)});
    return HilbertSpace::from_sites(std::move(sites));
}

namespace detail {

inline void require_u1_links(const SpacePtr& space, const Lattice& lat) {
    for (int l = 0; l < lat.num_links(); ++l) {
        const auto& sp = space->site_space(space->site_of(SiteRef{SiteRef::LinkSite, l}));
        if (sp.kind != SpaceKind::U1Link && sp.kind != SpaceKind::U1PhaseLink)
            throw MissingLink("link " + std::to_string(l) + " carries no electric ladder");
    }
}

inline SparseOperator xi_phase_op(const SpacePtr& space, const XiTable::Entry& entry) {
    std::vector<int> sites;
    for (int l : entry.watched_links) sites.push_back(space->site_of(SiteRef{SiteRef::LinkSite, l}));
    auto op = make_diagonal(space, [&](std::span<const int> d) -> cxd {
        std::vector<int> key;
        key.reserve(sites.size());
        for (int s : sites) key.push_back(space->site_space(s).ladder_value(d[s]));
        auto it = entry.phases.find(key);
        return it == entry.phases.end() ? cxd(1, 0) : it->second;
    });
    for (std::uint64_t i = 0; i < space->dim(); ++i)
        if (std::abs(std::abs(op.diagonal_entry(i)) - 1.0) > kFlagTol)
            throw ConfigInvalid("xi phases must have unit modulus");
    OpFlags f;
    f.diagonal = true;
    f.unitary = true;
    return op.with_flags(f);
}

} // namespace detail

// (g^2/2) sum E^2 - 1/(2 g^2) sum_p (xi_p U U Udag Udag + h.c.)
inline SparseOperator build_hks(const SpacePtr& space, const Lattice& lat,
                                const U1ModelConfig& cfg) {
    detail::require_u1_links(space, lat);
    auto h = make_diagonal(space, [&](std::span<const int> d) -> cxd {
        double acc = 0.0;
        for (int l = 0; l < lat.num_links(); ++l) {
            const int s = space->site_of(SiteRef{SiteRef::LinkSite, l});
            const double e = space->site_space(s).ladder_value(d[s]);
            acc += e * e;
        }
        return 0.5 * cfg.g2 * acc;
    });
    for (int p = 0; p < lat.num_plaquettes(); ++p) {
        const auto& pl = lat.plaquettes()[p];
        auto raise = [&](int l) {
            const int s = space->site_of(SiteRef{SiteRef::LinkSite, l});
            return embed_local(space, s, local::ladder_raise(space->site_space(s)));
        };
        auto term = raise(pl.links[0]) * raise(pl.links[1]) * raise(pl.links[2]).adjoint() *
                    raise(pl.links[3]).adjoint();
        if (cfg.xi && cfg.xi->plaquette.count(p))
            term = detail::xi_phase_op(space, cfg.xi->plaquette.at(p)) * term;
        term = term.scaled(-0.5 / cfg.g2);
        h = h + term + term.adjoint();
    }
    OpFlags f;
    f.hermitian = true;
    f.diagonal = lat.num_plaquettes() == 0;
    return h.with_flags(f);
}

// M sum (-1)^s n. Undefined for rotor matter (the radial mode is frozen and
// carries no occupation).
inline SparseOperator build_mass(const SpacePtr& space, const Lattice& lat,
                                 const U1ModelConfig& cfg) {
    if (cfg.matter == MatterKind::Rotor) {
        if (cfg.mass != 0.0) throw ConfigInvalid("mass term undefined for rotor matter");
        return zero_op(space);
    }
    return make_diagonal(space, [&](std::span<const int> d) -> cxd {
        double acc = 0.0;
        for (int v = 0; v < lat.num_vertices(); ++v) {
            const int s = space->site_of(SiteRef{SiteRef::Vertex, v});
            const int n = space->site_space(s).occupation(d[s]);
            acc += (lat.stagger(v) ? -1.0 : 1.0) * n;
        }
        return cfg.mass * acc;
    });
}

// sum_links (eps xi a^dag(x) U a(x+e_i) + h.c.), matter operators by kind.
inline SparseOperator build_interaction(const SpacePtr& space, const Lattice& lat,
                                        const U1ModelConfig& cfg) {
    detail::require_u1_links(space, lat);
    if (cfg.matter == MatterKind::Fermion && lat.ndim() >= 2 && !cfg.xi)
        throw MissingXi("fermionic hopping in d >= 2 requires a statistics phase table");

    auto h = zero_op(space);
    for (int l = 0; l < lat.num_links(); ++l) {
        const auto& link = lat.link(l);
        const int ls = space->site_of(SiteRef{SiteRef::LinkSite, l});
        auto u = embed_local(space, ls, local::ladder_raise(space->site_space(ls)));

        SparseOperator term;
        switch (cfg.matter) {
        case MatterKind::HardCore: {
            auto create = embed_at(space, SiteRef{SiteRef::Vertex, link.from}, local::sigma_plus());
            auto destroy = embed_at(space, SiteRef{SiteRef::Vertex, link.to}, local::sigma_minus());
            term = create * u * destroy;
            break;
        }
        case MatterKind::Fermion: {
            term = fermion_creator(space, link.from) * u * fermion_annihilator(space, link.to);
            break;
        }
        case MatterKind::Rotor: {
            const auto& vsp = space->site_space(space->site_of(SiteRef{SiteRef::Vertex, link.from}));
            auto raise_q = embed_at(space, SiteRef{SiteRef::Vertex, link.from},
                                    local::ladder_raise(vsp));
            auto lower_q = embed_at(space, SiteRef{SiteRef::Vertex, link.to},
                                    local::ladder_lower(vsp));
            term = (cfg.rotor_r0 * cfg.rotor_r0) * (raise_q * u * lower_q);
            break;
        }
        default: throw ConfigInvalid("interaction needs matter on vertices");
        }
        if (cfg.xi && cfg.xi->hop.count(l))
            term = detail::xi_phase_op(space, cfg.xi->hop.at(l)) * term;
        term = cfg.eps(l) * term;
        h = h + term + term.adjoint();
    }
    OpFlags f;
    f.hermitian = true;
    return h.with_flags(f);
}

enum class Corruption { None, StaggerFlip, DropProjector, DropSigns };

// Hopping dressed with the staggered Gauss projectors. The projector
// eigenvalues refer to the hopped state: the pair (P1 at the emitting vertex,
// P0 at the receiving one) is applied after the shift, which on the physical
// sector coincides with filtering (G=0, G=1) before it.
inline SparseOperator build_physical_interaction(const SpacePtr& space, const Lattice& lat,
                                                 const U1ModelConfig& cfg,
                                                 Corruption corruption = Corruption::None) {
    if (cfg.matter != MatterKind::HardCore)
        throw ConfigInvalid("projector-dressed interaction is defined for hard-core matter");
    GaussOperators g(space, lat, MatterKind::None); // G reads gauge data only
    auto h = zero_op(space);
    for (int l = 0; l < lat.num_links(); ++l) {
        const auto& link = lat.link(l);
        const int ls = space->site_of(SiteRef{SiteRef::LinkSite, l});
        auto u = embed_local(space, ls, local::ladder_raise(space->site_space(ls)));
        auto create = embed_at(space, SiteRef{SiteRef::Vertex, link.from}, local::sigma_plus());
        auto destroy = embed_at(space, SiteRef{SiteRef::Vertex, link.to}, local::sigma_minus());
        auto p1_from = gauss_projectors(g, link.from).p1;
        auto p0_to = gauss_projectors(g, link.to).p0;
        SparseOperator term = create * u * destroy;
        term = p1_from * (corruption == Corruption::DropProjector ? term : p0_to * term);
        if (cfg.xi && cfg.xi->hop.count(l))
            term = detail::xi_phase_op(space, cfg.xi->hop.at(l)) * term;
        term = cfg.eps(l) * term;
        h = h + term + term.adjoint();
    }
    OpFlags f;
    f.hermitian = true;
    return h.with_flags(f);
}

struct PhysicalMass {
    SparseOperator op;    // gauge-field-only diagonal part
    double constant = 0;  // additive remainder: H_M = op + constant on the sector
};

// Mass rewritten through the Gauss law: M sum (-1)^s G(x) telescopes to a
// per-link electric term plus a constant (-M times the odd-vertex count).
inline PhysicalMass build_physical_mass(const SpacePtr& space, const Lattice& lat,
                                        const U1ModelConfig& cfg,
                                        Corruption corruption = Corruption::None) {
    auto sign = [&](int v) {
        int s = lat.stagger(v);
        if (corruption == Corruption::StaggerFlip && v == 0) s ^= 1;
        return s ? -1.0 : 1.0;
    };
    PhysicalMass pm;
    pm.op = make_diagonal(space, [&](std::span<const int> d) -> cxd {
        double acc = 0.0;
        for (int l = 0; l < lat.num_links(); ++l) {
            const int s = space->site_of(SiteRef{SiteRef::LinkSite, l});
            const double e = space->site_space(s).ladder_value(d[s]);
            acc += (sign(lat.link(l).from) - sign(lat.link(l).to)) * e;
        }
        return cfg.mass * acc;
    });
    double c = 0.0;
    for (int v = 0; v < lat.num_vertices(); ++v) c += sign(v) * lat.stagger(v);
    pm.constant = cfg.mass * c;
    return pm;
}

struct U1Model {
    SpacePtr space;
    SparseOperator hks;
    SparseOperator mass;
    SparseOperator interaction;
    SparseOperator hamiltonian;
};

inline U1Model build_u1_model(const Lattice& lat, const U1ModelConfig& cfg) {
    U1Model m;
    m.space = build_u1_space(lat, cfg);
    m.hks = build_hks(m.space, lat, cfg);
    m.mass = build_mass(m.space, lat, cfg);
    m.interaction = build_interaction(m.space, lat, cfg);
    m.hamiltonian = (m.hks + m.mass + m.interaction).with_flags({true, false, false});
    return m;
}

} // namespace lgt
