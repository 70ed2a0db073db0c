#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lgt/gauss.hpp"
#include "lgt/hilbert.hpp"

using namespace lgt;

namespace {

SpacePtr two_vertex_space(int lambda = 1) {
    auto lat = std::make_shared<Lattice>(Lattice::build({2}, Boundary::Open));
    return build_space(*lat, [](int) { return LocalSpace::hardcore_vertex(); },
                       [&](int) { return LocalSpace::u1_link(lambda); });
}

} // namespace

TEST_CASE("product dimensions") {
    auto lat = Lattice::build({2}, Boundary::Open);
    auto sp = build_space(lat, [](int) { return LocalSpace::hardcore_vertex(); },
                          [](int) { return LocalSpace::u1_link(1); });
    CHECK(sp->dim() == 12);

    auto spf = build_space(lat, [](int) { return LocalSpace::fermion_vertex(1); },
                           [](int) { return LocalSpace::u1_link(1); });
    CHECK(spf->dim() == 12);

    CHECK(LocalSpace::su2_link(1).dim() == 5); // 1^2 + 2^2
    CHECK(LocalSpace::u2_link(1, 2).dim() == 11);
}

TEST_CASE("dimension overflow is guarded") {
    std::vector<std::pair<SiteRef, LocalSpace>> sites;
    for (int i = 0; i < 40; ++i)
        sites.push_back({SiteRef{SiteRef::Aux, i}, LocalSpace::rotor_vertex(8)});
    CHECK_THROWS_AS(HilbertSpace::from_sites(std::move(sites)), DimOverflow);
}

TEST_CASE("codec round-trips exhaustively on small spaces") {
    auto sp = two_vertex_space(2);
    REQUIRE(sp->dim() <= 10000);
    std::vector<int> digits(sp->num_sites());
    for (std::uint64_t i = 0; i < sp->dim(); ++i) {
        sp->decode(i, digits);
        CHECK(sp->encode(digits) == i);
        for (int s = 0; s < sp->num_sites(); ++s) CHECK(sp->digit(i, s) == digits[s]);
    }
}

TEST_CASE("codec round-trips on random digit tuples of a large space") {
    auto lat = Lattice::build({6}, Boundary::Open);
    auto sp = build_space(lat, [](int) { return LocalSpace::hardcore_vertex(); },
                          [](int) { return LocalSpace::u1_link(2); });
    std::mt19937_64 rng(7);
    std::vector<int> digits(sp->num_sites());
    for (int trial = 0; trial < 500; ++trial) {
        for (int s = 0; s < sp->num_sites(); ++s)
            digits[s] = static_cast<int>(rng() % sp->site_space(s).dim());
        std::vector<int> back(sp->num_sites());
        sp->decode(sp->encode(digits), back);
        CHECK(back == digits);
    }
}

TEST_CASE("gauss-law filter finds the two physical states") {
    auto lat = Lattice::build({2}, Boundary::Open);
    auto sp = build_space(lat, [](int) { return LocalSpace::hardcore_vertex(); },
                          [](int) { return LocalSpace::u1_link(1); });
    GaussOperators g(sp, lat, MatterKind::HardCore);
    auto sector = physical_sector(g);
    REQUIRE(sector.dim() == 2);

    // members in index order: decode and identify both states
    std::vector<int> d(sp->num_sites());
    sp->decode(sector.member(0), d);
    const int link_site = sp->site_of(SiteRef{SiteRef::LinkSite, 0});
    CHECK(d[0] == 0);
    CHECK(d[1] == 1);
    CHECK(sp->site_space(link_site).ladder_value(d[link_site]) == 0);
    sp->decode(sector.member(1), d);
    CHECK(d[0] == 1);
    CHECK(d[1] == 0);
    CHECK(sp->site_space(link_site).ladder_value(d[link_site]) == 1);
}

TEST_CASE("trivial predicates") {
    auto sp = two_vertex_space();
    CHECK(filter_subspace(sp, [](std::span<const int>) { return true; }).dim() == sp->dim());
    CHECK(filter_subspace(sp, [](std::span<const int>) { return false; }).dim() == 0);
}

TEST_CASE("disjoint sector dimensions partition the space") {
    auto lat = Lattice::build({2}, Boundary::Open);
    auto sp = build_space(lat, [](int) { return LocalSpace::hardcore_vertex(); },
                          [](int) { return LocalSpace::u1_link(1); });
    GaussOperators g(sp, lat, MatterKind::HardCore);
    std::uint64_t total = 0;
    // partition by the joint (D - Q) assignment at both vertices
    std::map<std::pair<int, int>, std::uint64_t> sectors;
    std::vector<int> d(sp->num_sites());
    for (std::uint64_t i = 0; i < sp->dim(); ++i) {
        sp->decode(i, d);
        ++sectors[{g.d_value(d, 0) - g.q_value(d, 0), g.d_value(d, 1) - g.q_value(d, 1)}];
    }
    for (auto& [key, dim] : sectors) total += dim;
    CHECK(total == sp->dim());
}

TEST_CASE("subspace projection is a left inverse of injection") {
    auto sp = two_vertex_space();
    auto sub = filter_subspace(sp, [&](std::span<const int> d) { return d[0] == 1; });
    for (std::uint64_t k = 0; k < sub.dim(); ++k) {
        auto r = sub.rank_of(sub.member(k));
        REQUIRE(r.has_value());
        CHECK(*r == k);
    }
    CHECK(!sub.rank_of(0).has_value()); // digit tuple (0,0,0) is not a member
}

TEST_CASE("u2 link basis respects the parity constraint and the (j,m,n,e) order") {
    auto sp = LocalSpace::u2_link(1, 2);
    const auto& st = sp.link_states();
    REQUIRE(st.size() == 11);
    for (const auto& s : st) CHECK(((s.e % 2) + 2) % 2 == s.tj % 2);
    for (size_t k = 0; k + 1 < st.size(); ++k) {
        auto key = [](const LinkState& s) { return std::array<int, 4>{s.tj, s.tm, s.tn, s.e}; };
        CHECK(key(st[k]) < key(st[k + 1]));
    }
}
