#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "lgt/eliminate.hpp"
#include "lgt/gauss.hpp"
#include "lgt/linop.hpp"
#include "lgt/local_ops.hpp"

namespace lgt {

enum class GroupKind { U, SU };

// Diagonal Cartan generators in the fundamental representation, normalized to
// Tr(T_mu T_nu) = delta/2. For U(N) the extra generator is 1/sqrt(2N) times
// the identity and the row matrix Lambda_{mu m} = (T_mu)_{mm} is square with
// inverse 2 Lambda^T. SU(N) keeps the N-1 traceless rows; lambda_prime holds
// the alternative traceless basis delta_{mu m} - delta_{N m}.
struct CartanData {
    GroupKind group = GroupKind::U;
    int n = 1;
    std::vector<Eigen::MatrixXd> generators;
    Eigen::MatrixXd lambda;
    Eigen::MatrixXd lambda_prime; // SU only
};

inline CartanData cartan_data(GroupKind group, int n) {
    if (group == GroupKind::U && n < 1) throw ConfigInvalid("U(N) needs N >= 1");
    if (group == GroupKind::SU && n < 2) throw ConfigInvalid("SU(N) needs N >= 2");
    CartanData cd;
    cd.group = group;
    cd.n = n;

    std::vector<Eigen::MatrixXd> traceless;
    for (int mu = 1; mu < n; ++mu) {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
        const double norm = 1.0 / std::sqrt(2.0 * mu * (mu + 1));
        for (int m = 0; m < mu; ++m) t(m, m) = norm;
        t(mu, mu) = -mu * norm;
        traceless.push_back(t);
    }

    if (group == GroupKind::U) {
        cd.generators.push_back(Eigen::MatrixXd::Identity(n, n) / std::sqrt(2.0 * n));
        for (auto& t : traceless) cd.generators.push_back(t);
    } else {
        cd.generators = traceless;
        cd.lambda_prime = Eigen::MatrixXd::Zero(n - 1, n);
        for (int mu = 0; mu < n - 1; ++mu) {
            cd.lambda_prime(mu, mu) = 1.0;
            cd.lambda_prime(mu, n - 1) = -1.0;
        }
    }

    cd.lambda = Eigen::MatrixXd::Zero(static_cast<int>(cd.generators.size()), n);
    for (size_t mu = 0; mu < cd.generators.size(); ++mu)
        for (int m = 0; m < n; ++m) cd.lambda(static_cast<int>(mu), m) = cd.generators[mu](m, m);
    return cd;
}

// ---------------------------------------------------------------------------
// SU(2) rotor link operators.
//
// Conventions: states |j m n>; the left generators act on m through the
// conjugate representation matrices (giving [L_a, L_b] = -i eps_abc L_c) and
// the right ones on n through the representation itself. The group element in
// the fundamental representation has matrix elements
//   <j1 m1 n1| U_{mn} |j2 m2 n2> =
//     sqrt((2j2+1)/(2j1+1)) <j1 m1|j2 m2; 1/2 m> <j1 n1|j2 n2; 1/2 n>
// which reproduces [L_a, U_{mn}] = (tau_a)_{mm'} U_{m'n} and
// [R_a, U_{mn}] = U_{mn'} (tau_a)_{n'n} on all retained states.
// ---------------------------------------------------------------------------
namespace na {

// <j1, m2+m | j2 m2; 1/2 m>, all angular arguments doubled.
inline double cg_half(int tj2, int tm2, int tm, int tj1) {
    if (tj1 == tj2 + 1) {
        if (tm == 1) return std::sqrt((tj2 + tm2 + 2) / (2.0 * (tj2 + 1)));
        return std::sqrt((tj2 - tm2 + 2) / (2.0 * (tj2 + 1)));
    }
    if (tj1 == tj2 - 1) {
        if (tm == 1) return -std::sqrt((tj2 - tm2) / (2.0 * (tj2 + 1)));
        return std::sqrt((tj2 + tm2) / (2.0 * (tj2 + 1)));
    }
    return 0.0;
}

// tau_a in representation 2j = tj, basis tm ascending; axis 0,1,2 = x,y,z.
inline Eigen::MatrixXcd tau_matrix(int tj, int axis) {
    const int d = tj + 1;
    Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(d, d);
    const double j = tj / 2.0;
    for (int k = 0; k + 1 < d; ++k) {
        const double m = -j + k;
        jp(k + 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    Eigen::MatrixXcd jm = jp.adjoint();
    switch (axis) {
    case 0: return 0.5 * (jp + jm);
    case 1: return cxd(0, -0.5) * (jp - jm);
    default: {
        Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(d, d);
        for (int k = 0; k < d; ++k) jz(k, k) = -j + k;
        return jz;
    }
    }
}

inline void require_half(const LocalSpace& sp) {
    if (sp.twice_jmax != 1)
        throw UnsupportedTruncation("link operators are implemented for j_max = 1/2");
}

// Left generator: conj(tau) acting on the m label within each j block.
inline Eigen::MatrixXcd left_generator(const LocalSpace& sp, int axis) {
    require_half(sp);
    const auto& st = sp.link_states();
    const int d = sp.dim();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (st[a].tj != st[b].tj || st[a].tn != st[b].tn || st[a].e != st[b].e) continue;
            const int row = (st[a].tm + st[a].tj) / 2;
            const int col = (st[b].tm + st[b].tj) / 2;
            out(a, b) = std::conj(tau_matrix(st[a].tj, axis)(row, col));
        }
    return out;
}

inline Eigen::MatrixXcd right_generator(const LocalSpace& sp, int axis) {
    require_half(sp);
    const auto& st = sp.link_states();
    const int d = sp.dim();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (st[a].tj != st[b].tj || st[a].tm != st[b].tm || st[a].e != st[b].e) continue;
            const int row = (st[a].tn + st[a].tj) / 2;
            const int col = (st[b].tn + st[b].tj) / 2;
            out(a, b) = tau_matrix(st[a].tj, axis)(row, col);
        }
    return out;
}

inline Eigen::MatrixXcd casimir(const LocalSpace& sp) {
    const auto& st = sp.link_states();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(sp.dim(), sp.dim());
    for (int a = 0; a < sp.dim(); ++a) {
        const double j = st[a].tj / 2.0;
        out(a, a) = j * (j + 1);
    }
    return out;
}

inline Eigen::MatrixXcd abelian_field(const LocalSpace& sp) {
    const auto& st = sp.link_states();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(sp.dim(), sp.dim());
    for (int a = 0; a < sp.dim(); ++a) out(a, a) = st[a].e;
    return out;
}

// Group element component; species index ms, ns in {0, 1} maps to the spinor
// label tm = +1, -1. For U2Link the element also raises the e register by one
// (the extended element U' = U exp(i phi)); SU2Link leaves e untouched.
inline Eigen::MatrixXcd group_element(const LocalSpace& sp, int ms, int ns) {
    require_half(sp);
    const int tm = ms == 0 ? 1 : -1;
    const int tn = ns == 0 ? 1 : -1;
    const auto& st = sp.link_states();
    const int d = sp.dim();
    const int eshift = sp.kind == SpaceKind::U2Link ? 1 : 0;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int b = 0; b < d; ++b) {
        const auto& s2 = st[b];
        for (int a = 0; a < d; ++a) {
            const auto& s1 = st[a];
            if (s1.e != s2.e + eshift) continue;
            if (s1.tm != s2.tm + tm || s1.tn != s2.tn + tn) continue;
            if (std::abs(s1.tj - s2.tj) != 1) continue;
            const double red = std::sqrt((s2.tj + 1.0) / (s1.tj + 1.0));
            out(a, b) = red * cg_half(s2.tj, s2.tm, tm, s1.tj) * cg_half(s2.tj, s2.tn, tn, s1.tj);
        }
    }
    return out;
}

} // namespace na

// ---------------------------------------------------------------------------
// U(2) dynamical model: hard-core two-species matter on vertices, glued
// (SU(2) rotor x electric register) links.
// ---------------------------------------------------------------------------
struct U2ModelConfig {
    double g2 = 1.0;
    double mass = 0.0;
    std::vector<cxd> epsilon;
    int lambda = 2;
    int twice_jmax = 1;

    cxd eps(int link) const { return epsilon.empty() ? cxd(1, 0) : epsilon.at(link); }
};

inline SpacePtr build_u2_space(const Lattice& lat, const U2ModelConfig& cfg) {
    return build_space(lat, [](int) { return LocalSpace::fermion_vertex(2); },
                       [&](int) { return LocalSpace::u2_link(cfg.twice_jmax, cfg.lambda); });
}

inline SpacePtr build_u2_gauge_space(const Lattice& lat, const U2ModelConfig& cfg) {
    std::vector<std::pair<SiteRef, LocalSpace>> sites;
    for (int l = 0; l < lat.num_links(); ++l)
        sites.push_back({SiteRef{SiteRef::LinkSite, l},
                         LocalSpace::u2_link(cfg.twice_jmax, cfg.lambda)});
    return HilbertSpace::from_sites(std::move(sites));
}

// Digit-level Cartan data for U(2): doubled Abelian divergence (electric
// register) and doubled z-divergence (left labels out, right labels in), the
// staggered generators G_m = 2 Lambda^T D + s, and the matter charges.
class NAGaussOperators {
public:
    NAGaussOperators(SpacePtr space, const Lattice& lat, bool with_matter)
        : space_(std::move(space)), lat_(&lat), with_matter_(with_matter) {
        link_site_.resize(lat.num_links());
        for (int l = 0; l < lat.num_links(); ++l)
            link_site_[l] = space_->site_of(SiteRef{SiteRef::LinkSite, l});
        if (with_matter_) {
            vertex_site_.resize(lat.num_vertices());
            for (int v = 0; v < lat.num_vertices(); ++v)
                vertex_site_[v] = space_->site_of(SiteRef{SiteRef::Vertex, v});
        }
        for (int v = 0; v < lat.num_vertices(); ++v) incidence_.push_back(lat.incident_links(v));
    }

    const SpacePtr& space() const { return space_; }
    const Lattice& lattice() const { return *lat_; }

    const LinkState& link_state(std::span<const int> d, int l) const {
        return space_->site_space(link_site_[l]).link_states()[d[link_site_[l]]];
    }

    int twice_d0(std::span<const int> d, int v) const {
        int acc = 0;
        for (int l : incidence_[v].outgoing) acc += link_state(d, l).e;
        for (int l : incidence_[v].incoming) acc -= link_state(d, l).e;
        return acc; // twice D_0 in units where E = 2 D_0
    }

    int twice_dz(std::span<const int> d, int v) const {
        int acc = 0;
        for (int l : incidence_[v].outgoing) acc += link_state(d, l).tm;
        for (int l : incidence_[v].incoming) acc -= link_state(d, l).tn;
        return acc;
    }

    // staggered generator G_m, m in {0,1}; integer thanks to the parity gluing
    int g_value(std::span<const int> d, int v, int m) const {
        const int tw = m == 0 ? twice_d0(d, v) + twice_dz(d, v) : twice_d0(d, v) - twice_dz(d, v);
        return tw / 2 + lat_->stagger(v);
    }

    int occupation(std::span<const int> d, int v, int m) const {
        return space_->site_space(vertex_site_[v]).occupation(d[vertex_site_[v]], m);
    }

    bool physical(std::span<const int> d, int v) const {
        const int n1 = occupation(d, v, 0);
        const int n2 = occupation(d, v, 1);
        return twice_d0(d, v) == n1 + n2 - 2 * lat_->stagger(v) && twice_dz(d, v) == n1 - n2;
    }

    SparseOperator g_op(int v, int m) const {
        return make_diagonal(space_, [this, v, m](std::span<const int> d) -> cxd {
            return static_cast<double>(g_value(d, v, m));
        });
    }

    SparseOperator g_projector(int v, int m, int value) const {
        return make_diagonal(space_, [this, v, m, value](std::span<const int> d) -> cxd {
            return g_value(d, v, m) == value ? 1.0 : 0.0;
        });
    }

    // (-1)^{sum_{i<m} G_i}; for two species only m = 1 carries a sign
    SparseOperator sign_below(int v, int m) const {
        if (m == 0) return identity_op(space_);
        return make_diagonal(space_, [this, v](std::span<const int> d) -> cxd {
            return g_value(d, v, 0) % 2 ? -1.0 : 1.0;
        });
    }

private:
    SpacePtr space_;
    const Lattice* lat_;
    bool with_matter_;
    std::vector<int> link_site_;
    std::vector<int> vertex_site_;
    std::vector<Lattice::Incidence> incidence_;
};

inline Subspace na_physical_sector(const NAGaussOperators& g) {
    const auto& lat = g.lattice();
    return filter_subspace(g.space(), [&](std::span<const int> d) {
        for (int v = 0; v < lat.num_vertices(); ++v)
            if (!g.physical(d, v)) return false;
        return true;
    });
}

inline Subspace na_constrained_sector(const NAGaussOperators& gauge_only) {
    const auto& lat = gauge_only.lattice();
    return filter_subspace(gauge_only.space(), [&](std::span<const int> d) {
        for (int v = 0; v < lat.num_vertices(); ++v)
            for (int m = 0; m < 2; ++m) {
                const int gv = gauge_only.g_value(d, v, m);
                if (gv != 0 && gv != 1) return false;
            }
        return true;
    });
}

struct U2Model {
    SpacePtr space;
    SparseOperator hks;
    SparseOperator mass;
    SparseOperator interaction;
    SparseOperator hamiltonian;
};

// Electric part: (g^2/2) sum_links (J^2 + E^2/(2N)), the full U(2) Casimir.
inline SparseOperator build_u2_electric(const SpacePtr& space, const Lattice& lat,
                                        const U2ModelConfig& cfg) {
    auto h = zero_op(space);
    for (int l = 0; l < lat.num_links(); ++l) {
        const int s = space->site_of(SiteRef{SiteRef::LinkSite, l});
        const auto& lsp = space->site_space(s);
        Eigen::MatrixXcd loc = na::casimir(lsp);
        Eigen::MatrixXcd e = na::abelian_field(lsp);
        loc += 0.25 * (e * e);
        h = h + embed_local(space, s, 0.5 * cfg.g2 * loc, {true, false, true});
    }
    return h;
}

inline SparseOperator build_u2_mass(const SpacePtr& space, const Lattice& lat,
                                    const U2ModelConfig& cfg) {
    return make_diagonal(space, [&, cfg](std::span<const int> d) -> cxd {
        double acc = 0.0;
        for (int v = 0; v < lat.num_vertices(); ++v) {
            const int s = space->site_of(SiteRef{SiteRef::Vertex, v});
            const int n = space->site_space(s).occupation(d[s], 0) +
                          space->site_space(s).occupation(d[s], 1);
            acc += (lat.stagger(v) ? -1.0 : 1.0) * n;
        }
        return cfg.mass * acc;
    });
}

inline SparseOperator build_u2_interaction(const SpacePtr& space, const Lattice& lat,
                                           const U2ModelConfig& cfg, bool dressed,
                                           const NAGaussOperators* gauss = nullptr) {
    auto h = zero_op(space);
    for (int l = 0; l < lat.num_links(); ++l) {
        const auto& link = lat.link(l);
        const int ls = space->site_of(SiteRef{SiteRef::LinkSite, l});
        const int fs = space->site_of(SiteRef{SiteRef::Vertex, link.from});
        const int ts = space->site_of(SiteRef{SiteRef::Vertex, link.to});
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) {
                auto create = embed_local(space, fs,
                                          local::species_creator(space->site_space(fs), m));
                auto destroy = embed_local(space, ts,
                                           local::species_annihilator(space->site_space(ts), n));
                auto u = embed_local(space, ls, na::group_element(space->site_space(ls), m, n));
                SparseOperator term = create * u * destroy;
                if (dressed)
                    term = gauss->g_projector(link.from, m, 1) *
                           (gauss->g_projector(link.to, n, 0) * term);
                term = cfg.eps(l) * term;
                h = h + term + term.adjoint();
            }
    }
    OpFlags f;
    f.hermitian = true;
    return h.with_flags(f);
}

inline U2Model build_u2_model(const Lattice& lat, const U2ModelConfig& cfg) {
    U2Model m;
    m.space = build_u2_space(lat, cfg);
    m.hks = build_u2_electric(m.space, lat, cfg);
    m.mass = build_u2_mass(m.space, lat, cfg);
    m.interaction = build_u2_interaction(m.space, lat, cfg, false);
    m.hamiltonian = (m.hks + m.mass + m.interaction).with_flags({true, false, false});
    return m;
}

struct U2PhysicalMass {
    SparseOperator op;
    double constant = 0.0;
};

inline U2PhysicalMass build_u2_physical_mass(const SpacePtr& space, const Lattice& lat,
                                             const U2ModelConfig& cfg) {
    auto sign = [&](int v) { return lat.stagger(v) ? -1.0 : 1.0; };
    U2PhysicalMass pm;
    pm.op = make_diagonal(space, [&, cfg](std::span<const int> d) -> cxd {
        double acc = 0.0;
        for (int l = 0; l < lat.num_links(); ++l) {
            const int s = space->site_of(SiteRef{SiteRef::LinkSite, l});
            const int e = space->site_space(s).link_states()[d[s]].e;
            acc += (sign(lat.link(l).from) - sign(lat.link(l).to)) * e;
        }
        return cfg.mass * acc;
    });
    double c = 0.0;
    for (int v = 0; v < lat.num_vertices(); ++v) c += sign(v) * lat.stagger(v);
    pm.constant = 2.0 * cfg.mass * c; // two species share each staggered offset
    return pm;
}

// On-site removal factors u_m = eta_m + eta_m^dag raised to the staggered
// generators, multiplied highest species first (or reversed). Orders differ as
// operators but certify the same spectrum.
inline SparseOperator build_na_matter_removal(const NAGaussOperators& g, bool reversed = false) {
    const auto& space = g.space();
    SparseOperator u = identity_op(space);
    for (int v = 0; v < g.lattice().num_vertices(); ++v) {
        const int site = space->site_of(SiteRef{SiteRef::Vertex, v});
        const auto& vsp = space->site_space(site);
        auto u_m = [&](int m) {
            Eigen::MatrixXcd base = local::species_annihilator(vsp, m) +
                                    local::species_creator(vsp, m);
            return controlled_power({base, site, g.g_op(v, m)});
        };
        const auto factor = reversed ? u_m(0) * u_m(1) : u_m(1) * u_m(0);
        u = u * factor;
    }
    OpFlags f;
    f.unitary = true;
    return u.with_flags(f);
}

// Final matter-free U(2) Hamiltonian on the gauge-only space.
inline SparseOperator assemble_na_matter_free(const SpacePtr& gspace, const Lattice& lat,
                                              const U2ModelConfig& cfg,
                                              bool drop_signs = false) {
    NAGaussOperators g(gspace, lat, false);
    auto h = build_u2_electric(gspace, lat, cfg) + build_u2_physical_mass(gspace, lat, cfg).op;
    for (int l = 0; l < lat.num_links(); ++l) {
        const auto& link = lat.link(l);
        const int ls = gspace->site_of(SiteRef{SiteRef::LinkSite, l});
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) {
                auto u = embed_local(gspace, ls, na::group_element(gspace->site_space(ls), m, n));
                SparseOperator term =
                    g.g_projector(link.from, m, 1) * (g.g_projector(link.to, n, 0) * u);
                if (!drop_signs)
                    term = g.sign_below(link.from, m) * (g.sign_below(link.to, n) * term);
                term = cfg.eps(l) * term;
                h = h + term + term.adjoint();
            }
    }
    OpFlags f;
    f.hermitian = true;
    return h.with_flags(f);
}

struct U2EliminationReport {
    EliminationReport base;
    bool gauss_digit_check = false;      // G_m eigenvalue equals n_m on the sector
    double order_reversal_deviation = 0; // spectrum change under reversed factors
    double conjugation_deviation = 0;    // assembled vs transformed block
};

inline U2EliminationReport u2_eliminate_case(const Lattice& lat, const U2ModelConfig& cfg,
                                             bool drop_signs = false, double tol = kSpectrumTol,
                                             const SolverOptions& solver = {}) {
    U2EliminationReport out;
    auto model = build_u2_model(lat, cfg);
    NAGaussOperators gauss(model.space, lat, true);
    auto phys = na_physical_sector(gauss);

    // dressed Hamiltonian used for the transformation route
    auto pm_full = build_u2_physical_mass(model.space, lat, cfg);
    auto hphys = (build_u2_electric(model.space, lat, cfg) + pm_full.op +
                  build_u2_interaction(model.space, lat, cfg, true, &gauss))
                     .with_flags({true, false, false});

    // digit-level Gauss check on the enumerated sector
    out.gauss_digit_check = true;
    std::vector<int> d(model.space->num_sites());
    for (std::uint64_t k = 0; k < phys.dim(); ++k) {
        model.space->decode(phys.member(k), d);
        for (int v = 0; v < lat.num_vertices(); ++v)
            for (int m = 0; m < 2; ++m)
                if (gauss.g_value(d, v, m) != gauss.occupation(d, v, m))
                    out.gauss_digit_check = false;
    }

    auto ha = restrict_to(model.hamiltonian, phys);
    const double leak_a = sector_leakage(model.hamiltonian, phys);

    auto gspace = build_u2_gauge_space(lat, cfg);
    NAGaussOperators ggauge(gspace, lat, false);
    auto hb = assemble_na_matter_free(gspace, lat, cfg, drop_signs);
    auto constrained = na_constrained_sector(ggauge);
    const double leak_b = sector_leakage(hb, constrained);
    const double shift = build_u2_physical_mass(gspace, lat, cfg).constant;

    if (phys.dim() != constrained.dim()) {
        out.base.max_abs_deviation = std::numeric_limits<double>::infinity();
        out.base.pass = false;
        return out;
    }

    out.base.tol = tol;
    out.base.mass_constant = shift;
    out.base.spectrum_before = spectra_of(ha, solver);
    out.base.spectrum_after = spectra_of(restrict_to(hb, constrained), solver);
    {
        auto cmp = compare_spectra(out.base.spectrum_before, out.base.spectrum_after, shift, tol);
        out.base.max_abs_deviation = cmp.max_abs_deviation;
        out.base.max_gap_error = cmp.max_gap_error;
        out.base.pass = cmp.pass;
    }
    out.base.leakage = std::max(leak_a, leak_b);
    if (out.base.leakage >= 1e-3) out.base.pass = false;
    if (!out.gauss_digit_check) out.base.pass = false;

    // transformation route, both factor orders
    for (bool reversed : {false, true}) {
        auto u = build_na_matter_removal(gauss, reversed);
        if (!reversed) out.base.unitarity_residual = u.unitary_residual();

        double worst_n = 0.0;
        for (std::uint64_t k = 0; k < phys.dim(); ++k) {
            Eigen::VectorXcd psi =
                Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(model.space->dim()));
            psi(static_cast<Eigen::Index>(phys.member(k))) = 1.0;
            Eigen::VectorXcd w = u.apply(psi);
            std::vector<double> occ_norm(2 * lat.num_vertices(), 0.0);
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                if (std::abs(w(i)) <= kDropTol) continue;
                model.space->decode(static_cast<std::uint64_t>(i), d);
                for (int v = 0; v < lat.num_vertices(); ++v)
                    for (int m = 0; m < 2; ++m)
                        occ_norm[2 * v + m] += std::norm(w(i)) * gauss.occupation(d, v, m);
            }
            for (double a : occ_norm) worst_n = std::max(worst_n, std::sqrt(a));
        }
        if (!reversed) out.base.decoupling_residual = worst_n;

        auto conj = transform_hamiltonian(hphys, u);
        auto empty = filter_subspace(model.space, [&](std::span<const int> dd) {
            for (int v = 0; v < lat.num_vertices(); ++v)
                if (dd[model.space->site_of(SiteRef{SiteRef::Vertex, v})] != 0) return false;
            return true;
        });
        auto block = restrict_to(conj, empty).with_flags({true, false, false});
        // the empty-matter block in gauge digit order matches the gauge space
        if (!reversed && !drop_signs)
            out.conjugation_deviation = max_abs(SpMat(block.matrix() - hb.matrix()));
        auto block_constrained = [&] {
            SparseOperator on_gauge(gspace, block.matrix(), block.flags());
            return restrict_to(on_gauge, constrained);
        }();
        // the transformed route carries the telescoped mass, hence the shift
        auto cmp = compare_spectra(eig_full(ha), eig_full(block_constrained), shift, tol);
        out.order_reversal_deviation = std::max(out.order_reversal_deviation,
                                                cmp.max_abs_deviation);
        if (!cmp.pass) out.base.pass = false;
    }
    if (out.base.unitarity_residual > kFlagTol || out.base.decoupling_residual > kFlagTol)
        out.base.pass = false;
    return out;
}

// ---------------------------------------------------------------------------
// SU(2N+1) auxiliary-field construction, exercised for SU(3) on a single
// vertex with mock diagonal divergence registers. The auxiliary links are kept
// in the X eigenbasis (digit 0 -> +1, digit 1 -> -1) so that the composite
// X(x) and hence G_N are diagonal.
// ---------------------------------------------------------------------------
struct Z2MockVertex {
    SpacePtr space;
    int vertex_site = 0;              // three hard-core species
    std::array<int, 2> z2_sites{};    // auxiliary links incident on the vertex
    std::array<int, 2> d_sites{};     // registers holding D_1, D_2 in [-1, 1]
};

inline Z2MockVertex build_z2_mock_vertex() {
    std::vector<std::pair<SiteRef, LocalSpace>> sites;
    sites.push_back({SiteRef{SiteRef::Vertex, 0}, LocalSpace::fermion_vertex(3)});
    sites.push_back({SiteRef{SiteRef::LinkSite, 0}, LocalSpace::z2_link()});
    sites.push_back({SiteRef{SiteRef::LinkSite, 1}, LocalSpace::z2_link()});
    sites.push_back({SiteRef{SiteRef::Aux, 0}, LocalSpace::u1_link(1)});
    sites.push_back({SiteRef{SiteRef::Aux, 1}, LocalSpace::u1_link(1)});
    Z2MockVertex mock;
    mock.space = HilbertSpace::from_sites(std::move(sites));
    mock.vertex_site = 0;
    mock.z2_sites = {1, 2};
    mock.d_sites = {3, 4};
    return mock;
}

// G_N = (1 - X (-1)^D)/2 with X the product of incident auxiliary-link X
// eigenvalues and D the summed Cartan divergences. Spectrum {0,1} by
// construction; defined for odd N only.
inline SparseOperator build_gn_z2(const Z2MockVertex& mock, int n_species) {
    if (n_species % 2 == 0)
        throw EvenN("the auxiliary-field construction applies to odd N only");
    const auto& sp = mock.space;
    return make_diagonal(sp, [&](std::span<const int> d) -> cxd {
        int x = 1;
        for (int s : mock.z2_sites) x *= d[s] ? -1 : 1;
        int dsum = 0;
        for (int s : mock.d_sites) dsum += sp->site_space(s).ladder_value(d[s]);
        const int parity = ((dsum % 2) + 2) % 2 ? -1 : 1;
        return 0.5 * (1.0 - x * parity);
    });
}

struct Su3IdentityReport {
    bool spectrum_ok = false;     // G_N eigenvalues in {0,1} on the whole space
    bool identity_ok = false;     // G_N = n_3 and D_mu + G_N = n_mu on consistent states
    bool commute_ok = false;      // [G_mu, G_N] = 0
    std::uint64_t consistent_count = 0;
    bool pass = false;
};

// Exhaustive integer check over every (n, X, D) configuration consistent with
// the auxiliary Z2 symmetry and the Lambda'-basis Cartan Gauss laws.
inline Su3IdentityReport su3_gn_identity_check() {
    auto mock = build_z2_mock_vertex();
    const auto& sp = mock.space;
    auto gn = build_gn_z2(mock, 3);

    Su3IdentityReport rep;
    rep.spectrum_ok = true;
    rep.identity_ok = true;
    std::vector<int> d(sp->num_sites());
    for (std::uint64_t i = 0; i < sp->dim(); ++i) {
        sp->decode(i, d);
        const double g = gn.diagonal_entry(i).real();
        if (g != 0.0 && g != 1.0) rep.spectrum_ok = false;

        const int n1 = sp->site_space(0).occupation(d[0], 0);
        const int n2 = sp->site_space(0).occupation(d[0], 1);
        const int n3 = sp->site_space(0).occupation(d[0], 2);
        const int d1 = sp->site_space(mock.d_sites[0]).ladder_value(d[mock.d_sites[0]]);
        const int d2 = sp->site_space(mock.d_sites[1]).ladder_value(d[mock.d_sites[1]]);
        int x = 1;
        for (int s : mock.z2_sites) x *= d[s] ? -1 : 1;

        const bool consistent =
            d1 == n1 - n3 && d2 == n2 - n3 && x == (((n1 + n2 + n3) % 2) ? -1 : 1);
        if (!consistent) continue;
        ++rep.consistent_count;
        const long long gi = std::llround(g);
        if (gi != n3) rep.identity_ok = false;
        if (d1 + gi != n1 || d2 + gi != n2) rep.identity_ok = false;
    }

    auto gmu = [&](int mu) {
        return make_diagonal(sp, [&, mu](std::span<const int> dd) -> cxd {
            return static_cast<double>(
                sp->site_space(mock.d_sites[mu]).ladder_value(dd[mock.d_sites[mu]]));
        }) + gn;
    };
    rep.commute_ok = max_abs((gmu(0) * gn - gn * gmu(0)).matrix()) < 1e-14 &&
                     max_abs((gmu(1) * gn - gn * gmu(1)).matrix()) < 1e-14;
    // per occupation triple: D fixed, X product fixed, two z2 realizations
    rep.pass = rep.spectrum_ok && rep.identity_ok && rep.commute_ok &&
               rep.consistent_count == 16;
    return rep;
}

// ---------------------------------------------------------------------------
// SU(2) -> U(2) embedding on an open chain. Every link gains an auxiliary
// phase register realized as a Z_{2 lambda + 1} clock, so the zero-phase state
// is an exact eigenstate of the clock shift. The continuum group average
// becomes the orthogonal projector onto the Abelian Gauss sector.
// ---------------------------------------------------------------------------
struct Su2EmbedConfig {
    double g2 = 1.0;
    double mass = 0.0;
    std::vector<cxd> epsilon;
    int lambda = 2;      // auxiliary register truncation
    int twice_jmax = 1;

    cxd eps(int link) const { return epsilon.empty() ? cxd(1, 0) : epsilon.at(link); }
};

struct Su2Embedding {
    SpacePtr space_su;
    SpacePtr space_u;
    SparseOperator h_su;
    SparseOperator h_u;
    SparseOperator sector_projector;
    SpMat extend;  // dim_u x dim_su isometry |b> -> |b> (x) |phi = 0>
    double kappa = 1.0;
    Eigen::MatrixXcd physical_basis; // columns: zero-charge SU(2)-physical states
};

namespace detail_embed {

inline SparseOperator su2_hamiltonian(const SpacePtr& space, const Lattice& lat,
                                      const Su2EmbedConfig& cfg, bool extended) {
    auto h = make_diagonal(space, [&](std::span<const int> d) -> cxd {
        double acc = 0.0;
        for (int l = 0; l < lat.num_links(); ++l) {
            const int s = space->site_of(SiteRef{SiteRef::LinkSite, l});
            const int tj = space->site_space(s).link_states()[d[s]].tj;
            const double j = tj / 2.0;
            acc += 0.5 * cfg.g2 * j * (j + 1);
        }
        for (int v = 0; v < lat.num_vertices(); ++v) {
            const int s = space->site_of(SiteRef{SiteRef::Vertex, v});
            const int n = space->site_space(s).occupation(d[s], 0) +
                          space->site_space(s).occupation(d[s], 1);
            acc += cfg.mass * (lat.stagger(v) ? -n : n);
        }
        return acc;
    });
    for (int l = 0; l < lat.num_links(); ++l) {
        const auto& link = lat.link(l);
        const int ls = space->site_of(SiteRef{SiteRef::LinkSite, l});
        const int fs = space->site_of(SiteRef{SiteRef::Vertex, link.from});
        const int ts = space->site_of(SiteRef{SiteRef::Vertex, link.to});
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) {
                auto create =
                    embed_local(space, fs, local::species_creator(space->site_space(fs), m));
                auto destroy =
                    embed_local(space, ts, local::species_annihilator(space->site_space(ts), n));
                auto u = embed_local(space, ls, na::group_element(space->site_space(ls), m, n));
                SparseOperator term = create * u * destroy;
                if (extended) {
                    const int as = space->site_of(SiteRef{SiteRef::Aux, l});
                    term = term * embed_local(space, as,
                                              local::ladder_raise(space->site_space(as), true));
                }
                term = cfg.eps(l) * term;
                h = h + term + term.adjoint();
            }
    }
    OpFlags f;
    f.hermitian = true;
    return h.with_flags(f);
}

} // namespace detail_embed

inline Su2Embedding embed_su_in_u(const Lattice& lat, const Su2EmbedConfig& cfg) {
    if (lat.boundary() != Boundary::Open)
        throw PeriodicBoundary("the embedding needs open boundary conditions");

    Su2Embedding emb;
    emb.space_su = build_space(lat, [](int) { return LocalSpace::fermion_vertex(2); },
                               [&](int) { return LocalSpace::su2_link(cfg.twice_jmax); });
    std::vector<std::pair<SiteRef, LocalSpace>> aux;
    for (int l = 0; l < lat.num_links(); ++l)
        aux.push_back({SiteRef{SiteRef::Aux, l}, LocalSpace::u1_phase_link(cfg.lambda)});
    emb.space_u = build_space(lat, [](int) { return LocalSpace::fermion_vertex(2); },
                              [&](int) { return LocalSpace::su2_link(cfg.twice_jmax); }, aux);

    emb.h_su = detail_embed::su2_hamiltonian(emb.space_su, lat, cfg, false);
    emb.h_u = detail_embed::su2_hamiltonian(emb.space_u, lat, cfg, true);

    // Abelian Gauss projector: electric divergence equals n1 + n2 - 2 s.
    emb.sector_projector = make_diagonal(emb.space_u, [&](std::span<const int> d) -> cxd {
        for (int v = 0; v < lat.num_vertices(); ++v) {
            int div = 0;
            auto inc = lat.incident_links(v);
            for (int l : inc.outgoing) {
                const int s = emb.space_u->site_of(SiteRef{SiteRef::Aux, l});
                div += emb.space_u->site_space(s).ladder_value(d[s]);
            }
            for (int l : inc.incoming) {
                const int s = emb.space_u->site_of(SiteRef{SiteRef::Aux, l});
                div -= emb.space_u->site_space(s).ladder_value(d[s]);
            }
            const int vs = emb.space_u->site_of(SiteRef{SiteRef::Vertex, v});
            const int q = emb.space_u->site_space(vs).occupation(d[vs], 0) +
                          emb.space_u->site_space(vs).occupation(d[vs], 1) - 2 * lat.stagger(v);
            if (div != q) return 0.0;
        }
        return 1.0;
    });

    // extension by the zero-phase state of every clock register
    const int nl = lat.num_links();
    std::uint64_t aux_dim = 1;
    for (int l = 0; l < nl; ++l) aux_dim *= 2 * cfg.lambda + 1;
    emb.kappa = 1.0 / static_cast<double>(aux_dim);
    const double amp = std::sqrt(emb.kappa);
    std::vector<Triplet> trips;
    for (std::uint64_t b = 0; b < emb.space_su->dim(); ++b)
        for (std::uint64_t a = 0; a < aux_dim; ++a)
            trips.emplace_back(static_cast<Eigen::Index>(b * aux_dim + a),
                               static_cast<Eigen::Index>(b), amp);
    emb.extend.resize(static_cast<Eigen::Index>(emb.space_u->dim()),
                      static_cast<Eigen::Index>(emb.space_su->dim()));
    emb.extend.setFromTriplets(trips.begin(), trips.end());

    // zero-charge SU(2) physical basis from the null space of the positive
    // operator sum_a,v (D_a - Q_a)^2 + (total charge)^2
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(emb.space_su->dim()),
                                                static_cast<Eigen::Index>(emb.space_su->dim()));
    for (int v = 0; v < lat.num_vertices(); ++v) {
        auto inc = lat.incident_links(v);
        for (int axis = 0; axis < 3; ++axis) {
            auto gen = zero_op(emb.space_su);
            for (int l : inc.outgoing) {
                const int s = emb.space_su->site_of(SiteRef{SiteRef::LinkSite, l});
                gen = gen + embed_local(emb.space_su, s,
                                        na::left_generator(emb.space_su->site_space(s), axis));
            }
            for (int l : inc.incoming) {
                const int s = emb.space_su->site_of(SiteRef{SiteRef::LinkSite, l});
                gen = gen - embed_local(emb.space_su, s,
                                        na::right_generator(emb.space_su->site_space(s), axis));
            }
            const int vs = emb.space_su->site_of(SiteRef{SiteRef::Vertex, v});
            const auto& vsp = emb.space_su->site_space(vs);
            Eigen::MatrixXcd qloc = Eigen::MatrixXcd::Zero(vsp.dim(), vsp.dim());
            Eigen::MatrixXcd tau = na::tau_matrix(1, axis);
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    qloc += tau(1 - p, 1 - q) * (local::species_creator(vsp, p) *
                                                 local::species_annihilator(vsp, q));
            gen = gen - embed_local(emb.space_su, vs, qloc);
            Eigen::MatrixXcd gd = dense(gen);
            k += gd.adjoint() * gd;
        }
    }
    auto total = make_diagonal(emb.space_su, [&](std::span<const int> d) -> cxd {
        int t = 0;
        for (int v = 0; v < lat.num_vertices(); ++v) {
            const int vs = emb.space_su->site_of(SiteRef{SiteRef::Vertex, v});
            t += emb.space_su->site_space(vs).occupation(d[vs], 0) +
                 emb.space_su->site_space(vs).occupation(d[vs], 1) - 2 * lat.stagger(v);
        }
        return static_cast<double>(t);
    });
    Eigen::MatrixXcd td = dense(total);
    k += td.adjoint() * td;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
    std::vector<Eigen::Index> nullidx;
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
        if (es.eigenvalues()(j) < 1e-10) nullidx.push_back(j);
    emb.physical_basis.resize(k.rows(), static_cast<Eigen::Index>(nullidx.size()));
    for (size_t c = 0; c < nullidx.size(); ++c)
        emb.physical_basis.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(nullidx[c]);

    // headroom: every matter configuration reached by the physical basis must
    // have representable cumulative charges on the clock registers
    std::vector<int> d(emb.space_su->num_sites());
    for (Eigen::Index c = 0; c < emb.physical_basis.cols(); ++c)
        for (Eigen::Index r = 0; r < emb.physical_basis.rows(); ++r) {
            if (std::abs(emb.physical_basis(r, c)) < 1e-12) continue;
            emb.space_su->decode(static_cast<std::uint64_t>(r), d);
            int cum = 0;
            for (int l = 0; l < lat.num_links(); ++l) {
                const int v = lat.link(l).from;
                const int vs = emb.space_su->site_of(SiteRef{SiteRef::Vertex, v});
                cum += emb.space_su->site_space(vs).occupation(d[vs], 0) +
                       emb.space_su->site_space(vs).occupation(d[vs], 1) - 2 * lat.stagger(v);
                if (std::abs(cum) > cfg.lambda)
                    throw HeadroomViolation("clock register too small for the physical charges");
            }
        }
    return emb;
}

struct EmbedReport {
    double inner_product_deviation = 0.0;
    double matrix_element_deviation = 0.0;
    double zero_phase_block_deviation = 0.0;
    std::uint64_t physical_dim = 0;
    bool pass = false;
    double tol = 1e-12;
};

inline EmbedReport su2_embed_case(const Lattice& lat, const Su2EmbedConfig& cfg,
                                  double tol = 1e-12) {
    auto emb = embed_su_in_u(lat, cfg);
    EmbedReport rep;
    rep.tol = tol;
    rep.physical_dim = static_cast<std::uint64_t>(emb.physical_basis.cols());

    const auto& p0 = emb.sector_projector.matrix();
    Eigen::MatrixXcd psi_u = p0 * (emb.extend * emb.physical_basis) / std::sqrt(emb.kappa);

    Eigen::MatrixXcd gram_u = psi_u.adjoint() * psi_u;
    Eigen::MatrixXcd gram_su = emb.physical_basis.adjoint() * emb.physical_basis;
    rep.inner_product_deviation = (gram_u - gram_su).cwiseAbs().maxCoeff();

    Eigen::MatrixXcd hu = psi_u.adjoint() * (emb.h_u.matrix() * psi_u);
    Eigen::MatrixXcd hsu = emb.physical_basis.adjoint() * (emb.h_su.matrix() * emb.physical_basis);
    rep.matrix_element_deviation = (hu - hsu).cwiseAbs().maxCoeff();

    SpMat block = emb.extend.adjoint() * emb.h_u.matrix() * emb.extend;
    rep.zero_phase_block_deviation = max_abs(SpMat(block - emb.h_su.matrix()));

    rep.pass = rep.inner_product_deviation < tol && rep.matrix_element_deviation < tol &&
               rep.zero_phase_block_deviation < tol;
    return rep;
}

} // namespace lgt
