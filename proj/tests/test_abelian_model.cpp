#include <catch2/catch_amalgamated.hpp>

#include "lgt/abelian_model.hpp"
#include "lgt/eliminate.hpp"

using namespace lgt;

namespace {

// Kronecker product in site order (site 0 most significant), the oracle
// composition path for embedded operators.
SpMat kron(const SpMat& a, const SpMat& b) {
    std::vector<Triplet> trips;
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (SpMat::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (SpMat::InnerIterator ib(b, kb); ib; ++ib)
                    trips.emplace_back(ia.row() * b.rows() + ib.row(),
                                       ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
    SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SpMat kron_chain(const std::vector<SpMat>& factors) {
    SpMat acc = factors[0];
    for (size_t k = 1; k < factors.size(); ++k) acc = kron(acc, factors[k]);
    return acc;
}

U1ModelConfig hardcore_cfg(double g2, double m, int lambda) {
    U1ModelConfig cfg;
    cfg.g2 = g2;
    cfg.mass = m;
    cfg.lambda = lambda;
    cfg.matter = MatterKind::HardCore;
    return cfg;
}

} // namespace

TEST_CASE("electric energy on a chain is diagonal with (g2/2) E^2") {
    auto lat = Lattice::build({2}, Boundary::Open);
    auto cfg = hardcore_cfg(2.0, 0.0, 1);
    auto sp = build_u1_space(lat, cfg);
    auto h = build_hks(sp, lat, cfg);
    CHECK(h.structurally_diagonal());
    const int ls = sp->site_of(SiteRef{SiteRef::LinkSite, 0});
    for (std::uint64_t i = 0; i < sp->dim(); ++i) {
        const int e = sp->site_space(ls).ladder_value(sp->digit(i, ls));
        CHECK(h.diagonal_entry(i).real() == Catch::Approx(1.0 * e * e)); // g2/2 = 1
    }
}

TEST_CASE("single plaquette magnetic term is hermitian with bounded rows") {
    auto lat = Lattice::build({2, 2}, Boundary::Open);
    REQUIRE(lat.num_plaquettes() == 1);
    U1ModelConfig cfg = hardcore_cfg(1.5, 0.0, 1);
    std::vector<std::pair<SiteRef, LocalSpace>> sites;
    for (int l = 0; l < lat.num_links(); ++l)
        sites.push_back({SiteRef{SiteRef::LinkSite, l}, LocalSpace::u1_link(1)});
    auto sp = HilbertSpace::from_sites(std::move(sites));

    auto h = build_hks(sp, lat, cfg);
    CHECK(h.hermitian_residual() < 1e-14);

    // magnetic part only: subtract the diagonal electric piece, check row sums
    auto e2 = make_diagonal(sp, [&](std::span<const int> d) -> cxd {
        double acc = 0;
        for (int l = 0; l < lat.num_links(); ++l) {
            const int s = sp->site_of(SiteRef{SiteRef::LinkSite, l});
            const double e = sp->site_space(s).ladder_value(d[s]);
            acc += e * e;
        }
        return 0.5 * cfg.g2 * acc;
    });
    auto mag = h - e2;
    for (int k = 0; k < mag.matrix().outerSize(); ++k) {
        double row = 0;
        for (SpMat::InnerIterator it(mag.matrix(), k); it; ++it) row += std::abs(it.value());
        CHECK(row <= 1.0 / cfg.g2 + 1e-12);
    }
}

TEST_CASE("2x2 periodic gauge Hamiltonian equals the kronecker oracle") {
    auto lat = Lattice::build({2, 2}, Boundary::Periodic);
    U1ModelConfig cfg = hardcore_cfg(1.7, 0.0, 1);
    auto sp = build_u1_gauge_space(lat, cfg);
    auto h = build_hks(sp, lat, cfg);

    const int nl = lat.num_links();
    const int ld = 3;
    SpMat eye(ld, ld);
    eye.setIdentity();
    SpMat ediag = local::ladder_value_diag(LocalSpace::u1_link(1)).sparseView();
    SpMat raise = local::ladder_raise(LocalSpace::u1_link(1)).sparseView();

    auto one_site = [&](int l, const SpMat& op) {
        std::vector<SpMat> f(nl, eye);
        f[l] = op;
        return kron_chain(f);
    };

    SpMat oracle(h.matrix().rows(), h.matrix().cols());
    for (int l = 0; l < nl; ++l) {
        SpMat e = one_site(l, ediag);
        oracle = SpMat(oracle + SpMat(0.5 * cfg.g2 * SpMat(e * e)));
    }
    for (const auto& p : lat.plaquettes()) {
        std::vector<SpMat> f(nl, eye);
        f[p.links[0]] = SpMat(f[p.links[0]] * raise);
        f[p.links[1]] = SpMat(f[p.links[1]] * raise);
        f[p.links[2]] = SpMat(f[p.links[2]] * SpMat(raise.adjoint()));
        f[p.links[3]] = SpMat(f[p.links[3]] * SpMat(raise.adjoint()));
        SpMat term = kron_chain(f);
        oracle = SpMat(oracle + SpMat(cxd(-0.5 / cfg.g2, 0) * term) +
                       SpMat(cxd(-0.5 / cfg.g2, 0) * SpMat(term.adjoint())));
    }
    CHECK(max_abs(SpMat(h.matrix() - oracle)) < 1e-13);
}

TEST_CASE("staggered mass on the two-vertex chain") {
    auto lat = Lattice::build({2}, Boundary::Open);
    auto cfg = hardcore_cfg(1.0, 1.0, 1);
    auto sp = build_u1_space(lat, cfg);
    auto h = build_mass(sp, lat, cfg);
    for (std::uint64_t i = 0; i < sp->dim(); ++i) {
        const int n0 = sp->digit(i, 0);
        const int n1 = sp->digit(i, 1);
        CHECK(h.diagonal_entry(i).real() == Catch::Approx(double(n0 - n1)));
    }

    cfg.mass = 0.0;
    CHECK(build_mass(sp, lat, cfg).nonzeros() == 0);
}

TEST_CASE("fermionic and hard-core mass matrices agree in the occupation basis") {
    auto lat = Lattice::build({3}, Boundary::Open);
    auto ch = hardcore_cfg(1.0, 0.7, 1);
    auto cf = ch;
    cf.matter = MatterKind::Fermion;
    auto sph = build_u1_space(lat, ch);
    auto spf = build_u1_space(lat, cf);
    REQUIRE(sph->dim() == spf->dim());
    auto mh = build_mass(sph, lat, ch);
    auto mf = build_mass(spf, lat, cf);
    // same local dims and digit conventions, so matrices must be identical
    CHECK(max_abs(SpMat(mh.matrix() - mf.matrix())) == 0.0);
}

TEST_CASE("hopping connects exactly the two physical states of the small chain") {
    auto lat = Lattice::build({2}, Boundary::Open);
    auto cfg = hardcore_cfg(2.0, 1.0, 1);
    auto model = build_u1_model(lat, cfg);
    GaussOperators g(model.space, lat, MatterKind::HardCore);
    auto phys = physical_sector(g);
    REQUIRE(phys.dim() == 2);
    auto block = restrict_to(model.interaction, phys);
    Eigen::MatrixXcd b = dense(block);
    CHECK(std::abs(b(0, 0)) < 1e-15);
    CHECK(std::abs(b(1, 1)) < 1e-15);
    CHECK(std::abs(b(0, 1)) == Catch::Approx(1.0));
    CHECK(std::abs(b(1, 0)) == Catch::Approx(1.0));

    // full 2x2 physical block: [[-M, eps], [eps, g2/2 + M]]
    auto hp = dense(restrict_to(model.hamiltonian, phys));
    CHECK(hp(0, 0).real() == Catch::Approx(-1.0));
    CHECK(hp(1, 1).real() == Catch::Approx(2.0));
    CHECK(hp(0, 1).real() == Catch::Approx(1.0));
}

TEST_CASE("zero hopping gives a zero interaction") {
    auto lat = Lattice::build({2}, Boundary::Open);
    auto cfg = hardcore_cfg(1.0, 0.0, 1);
    cfg.epsilon.assign(lat.num_links(), 0.0);
    auto sp = build_u1_space(lat, cfg);
    CHECK(build_interaction(sp, lat, cfg).nonzeros() == 0);
}

TEST_CASE("fermion and hard-core physical blocks coincide in one dimension") {
    auto lat = Lattice::build({4}, Boundary::Open);
    auto ch = hardcore_cfg(2.0, 1.0, 2);
    auto cf = ch;
    cf.matter = MatterKind::Fermion;
    auto mh = build_u1_model(lat, ch);
    auto mf = build_u1_model(lat, cf);
    GaussOperators gh(mh.space, lat, MatterKind::HardCore);
    GaussOperators gf(mf.space, lat, MatterKind::Fermion);
    auto ph = physical_sector(gh);
    auto pf = physical_sector(gf);
    REQUIRE(ph.dim() == pf.dim());
    auto bh = dense(restrict_to(mh.hamiltonian, ph));
    auto bf = dense(restrict_to(mf.hamiltonian, pf));
    CHECK((bh - bf).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("fermionic hopping in two dimensions demands statistics phases") {
    auto lat = Lattice::build({2, 2}, Boundary::Open);
    U1ModelConfig cfg = hardcore_cfg(1.0, 0.0, 1);
    cfg.matter = MatterKind::Fermion;
    auto sp = build_u1_space(lat, cfg);
    CHECK_THROWS_AS(build_interaction(sp, lat, cfg), MissingXi);
}

TEST_CASE("xi phase tables multiply hopping terms") {
    auto lat = Lattice::build({2}, Boundary::Open);
    auto cfg = hardcore_cfg(1.0, 0.0, 1);
    auto sp = build_u1_space(lat, cfg);
    auto plain = build_interaction(sp, lat, cfg);

    XiTable xi;
    xi.hop[0] = {{0}, {}}; // watches its own link, all phases default to 1
    cfg.xi = xi;
    auto dressed = build_interaction(sp, lat, cfg);
    CHECK(max_abs(SpMat(plain.matrix() - dressed.matrix())) == 0.0);

    XiTable flip;
    flip.hop[0] = {{0}, {{{0}, cxd(-1, 0)}}}; // sign when the link is at E=0
    cfg.xi = flip;
    auto flipped = build_interaction(sp, lat, cfg);
    CHECK(flipped.hermitian_residual() < 1e-14);
    CHECK(max_abs(SpMat(plain.matrix() - flipped.matrix())) == Catch::Approx(2.0));

    XiTable bad;
    bad.hop[0] = {{0}, {{{0}, cxd(2, 0)}}};
    cfg.xi = bad;
    CHECK_THROWS_AS(build_interaction(sp, lat, cfg), ConfigInvalid);
}

TEST_CASE("projector-dressed interaction matches the raw one on the physical sector") {
    auto lat = Lattice::build({4}, Boundary::Open);
    auto cfg = hardcore_cfg(2.0, 1.0, 2);
    auto model = build_u1_model(lat, cfg);
    auto hphys = build_physical_interaction(model.space, lat, cfg);
    GaussOperators g(model.space, lat, MatterKind::HardCore);
    auto phys = physical_sector(g);

    // columns of (H_int - H_int^phys) at physical members vanish
    auto diff = model.interaction - hphys;
    for (std::uint64_t k = 0; k < phys.dim(); ++k) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(model.space->dim()));
        v(static_cast<Eigen::Index>(phys.member(k))) = 1.0;
        CHECK(diff.apply(v).norm() < 1e-14);
    }
}

TEST_CASE("dressed hopping annihilates states outside the admissible window") {
    auto lat = Lattice::build({2}, Boundary::Open);
    auto cfg = hardcore_cfg(1.0, 0.0, 2);
    auto sp = build_u1_space(lat, cfg);
    auto hphys = build_physical_interaction(sp, lat, cfg);

    // G(0) = 2 state: E = 2, occupied receiving vertex
    std::vector<int> d(sp->num_sites(), 0);
    d[1] = 1;
    const int ls = sp->site_of(SiteRef{SiteRef::LinkSite, 0});
    d[ls] = sp->site_space(ls).ladder_digit(2);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sp->dim()));
    v(static_cast<Eigen::Index>(sp->encode(d))) = 1.0;
    CHECK(hphys.apply(v).norm() < 1e-15);

    // rank of the dressed matrix on the small chain is at most 2
    Eigen::MatrixXcd dm = dense(hphys);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(dm);
    CHECK(lu.rank() <= 2);
}

TEST_CASE("telescoped mass equals the staggered mass plus constant on the sector") {
    auto lat = Lattice::build({4}, Boundary::Open);
    auto cfg = hardcore_cfg(1.0, 0.9, 2);
    auto model = build_u1_model(lat, cfg);
    GaussOperators g(model.space, lat, MatterKind::HardCore);
    auto phys = physical_sector(g);
    auto pm = build_physical_mass(model.space, lat, cfg);
    CHECK(pm.constant == Catch::Approx(-cfg.mass * 2)); // two odd vertices

    auto diff = restrict_to(model.mass - pm.op, phys);
    Eigen::MatrixXcd dmat = dense(diff) - pm.constant * Eigen::MatrixXcd::Identity(
                                              static_cast<Eigen::Index>(phys.dim()),
                                              static_cast<Eigen::Index>(phys.dim()));
    CHECK(dmat.cwiseAbs().maxCoeff() < 1e-13);

    U1ModelConfig m0 = cfg;
    m0.mass = 0.0;
    CHECK(build_physical_mass(model.space, lat, m0).op.nonzeros() == 0);
}

TEST_CASE("two-vertex telescoped mass has a single 2M coefficient") {
    auto lat = Lattice::build({2}, Boundary::Open);
    auto cfg = hardcore_cfg(1.0, 0.8, 1);
    auto sp = build_u1_space(lat, cfg);
    auto pm = build_physical_mass(sp, lat, cfg);
    const int ls = sp->site_of(SiteRef{SiteRef::LinkSite, 0});
    for (std::uint64_t i = 0; i < sp->dim(); ++i) {
        const int e = sp->site_space(ls).ladder_value(sp->digit(i, ls));
        CHECK(pm.op.diagonal_entry(i).real() == Catch::Approx(2 * cfg.mass * e));
    }
}

TEST_CASE("gauss generators commute with the hamiltonian") {
    auto check_case = [](const Lattice& lat, const U1ModelConfig& cfg) {
        auto model = build_u1_model(lat, cfg);
        GaussOperators g(model.space, lat, cfg.matter, cfg.static_charges);
        for (int v = 0; v < lat.num_vertices(); ++v) {
            auto gen = g.generator_op(v);
            CHECK(max_abs((model.hamiltonian * gen - gen * model.hamiltonian).matrix()) < 1e-12);
        }
    };
    check_case(Lattice::build({4}, Boundary::Open), hardcore_cfg(2.0, 1.0, 1));
    auto fermi = hardcore_cfg(0.5, 1.0, 1);
    fermi.matter = MatterKind::Fermion;
    check_case(Lattice::build({3}, Boundary::Open), fermi);
    check_case(Lattice::build({2, 2}, Boundary::Periodic), hardcore_cfg(1.0, 1.0, 1));
}

TEST_CASE("rotor interaction becomes matter independent after the removal transform") {
    auto lat = Lattice::build({2}, Boundary::Open);
    U1ModelConfig cfg;
    cfg.matter = MatterKind::Rotor;
    cfg.lambda = 1;
    cfg.lambda_q = 3;
    cfg.rotor_r0 = 1.2;
    auto sp = build_u1_space(lat, cfg);
    auto hint = build_interaction(sp, lat, cfg);
    GaussOperators g(sp, lat, MatterKind::Rotor);

    // interior support: charges within +-1 keep every image inside the ladder
    auto support = filter_subspace(sp, [&](std::span<const int> d) {
        for (int v = 0; v < 2; ++v) {
            const int site = sp->site_of(SiteRef{SiteRef::Vertex, v});
            if (std::abs(sp->site_space(site).ladder_value(d[site])) > 1) return false;
        }
        return true;
    });
    auto u = build_rotor_matter_removal(g, support);
    auto k = transform_hamiltonian(hint, u);

    // on interior states the transformed hopping reads the gauge field only
    const int ls = sp->site_of(SiteRef{SiteRef::LinkSite, 0});
    std::vector<int> di(sp->num_sites()), dj(sp->num_sites());
    for (std::uint64_t a = 0; a < support.dim(); ++a)
        for (std::uint64_t b = 0; b < support.dim(); ++b) {
            const auto i = support.member(a);
            const auto j = support.member(b);
            const cxd v = k.matrix().coeff(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j));
            if (std::abs(v) < 1e-14) continue;
            sp->decode(i, di);
            sp->decode(j, dj);
            CHECK(di[0] == dj[0]);
            CHECK(di[1] == dj[1]);
            const int de = sp->site_space(ls).ladder_value(di[ls]) -
                           sp->site_space(ls).ladder_value(dj[ls]);
            CHECK(std::abs(de) == 1);
            CHECK(std::abs(v - cxd(cfg.rotor_r0 * cfg.rotor_r0, 0)) < 1e-13);
        }

    // headroom audit rejects too-small charge ladders
    U1ModelConfig tight = cfg;
    tight.lambda_q = 1;
    auto spt = build_u1_space(lat, tight);
    GaussOperators gt(spt, lat, MatterKind::Rotor);
    auto full = filter_subspace(spt, [](std::span<const int>) { return true; });
    CHECK_THROWS_AS(build_rotor_matter_removal(gt, full), HeadroomViolation);
}
