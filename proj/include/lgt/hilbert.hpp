#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lgt/errors.hpp"
#include "lgt/lattice.hpp"

namespace lgt {

enum class SpaceKind {
    U1Link,       // electric ladder, E in [-lambda, lambda]
    U1PhaseLink,  // same ladder, used as an auxiliary phase register
    HardCoreVertex,
    RotorVertex,  // charge ladder, q in [-lambda, lambda]
    FermionVertex,// `species` occupation bits, on-site anticommuting
    Z2Link,
    SU2Link,      // rotor states |j m n>, 2j <= twice_jmax, ordered by (j,m,n)
    U2Link        // (j m n) glued with an E register under 2j = E (mod 2)
};

// One state of an SU(2) or U(2) link, all angular labels doubled to stay integer.
struct LinkState {
    int tj = 0; // 2j
    int tm = 0; // 2m
    int tn = 0; // 2n
    int e = 0;  // U(1) register (U2Link only)
};

struct LocalSpace {
    SpaceKind kind = SpaceKind::HardCoreVertex;
    int lambda = 0;     // ladder truncation
    int species = 1;    // FermionVertex
    int twice_jmax = 0; // SU2Link / U2Link

    LocalSpace() = default;
    LocalSpace(SpaceKind k, int lam, int sp, int tj)
        : kind(k), lambda(lam), species(sp), twice_jmax(tj) {}

    static LocalSpace u1_link(int lambda) { return {SpaceKind::U1Link, lambda, 1, 0}; }
    static LocalSpace u1_phase_link(int lambda) { return {SpaceKind::U1PhaseLink, lambda, 1, 0}; }
    static LocalSpace hardcore_vertex() { return {SpaceKind::HardCoreVertex, 0, 1, 0}; }
    static LocalSpace rotor_vertex(int lambda_q) { return {SpaceKind::RotorVertex, lambda_q, 1, 0}; }
    static LocalSpace fermion_vertex(int species) { return {SpaceKind::FermionVertex, 0, species, 0}; }
    static LocalSpace z2_link() { return {SpaceKind::Z2Link, 0, 1, 0}; }

    static LocalSpace su2_link(int twice_jmax) {
        LocalSpace sp{SpaceKind::SU2Link, 0, 1, twice_jmax};
        sp.build_link_states();
        return sp;
    }

    static LocalSpace u2_link(int twice_jmax, int lambda) {
        LocalSpace sp{SpaceKind::U2Link, lambda, 1, twice_jmax};
        sp.build_link_states();
        return sp;
    }

    int dim() const {
        switch (kind) {
        case SpaceKind::U1Link:
        case SpaceKind::U1PhaseLink:
        case SpaceKind::RotorVertex: return 2 * lambda + 1;
        case SpaceKind::HardCoreVertex:
        case SpaceKind::Z2Link: return 2;
        case SpaceKind::FermionVertex: return 1 << species;
        case SpaceKind::SU2Link:
        case SpaceKind::U2Link: return static_cast<int>(states_.size());
        }
        return 0;
    }

    // U1Link / U1PhaseLink / RotorVertex: signed ladder value of a digit.
    int ladder_value(int digit) const { return digit - lambda; }
    int ladder_digit(int value) const { return value + lambda; }

    // FermionVertex / HardCoreVertex occupation of species s (0-based).
    int occupation(int digit, int s = 0) const {
        if (kind == SpaceKind::HardCoreVertex) return digit;
        return (digit >> s) & 1;
    }

    // SU2Link / U2Link basis table, ordered by (j, m, n, e) ascending.
    const std::vector<LinkState>& link_states() const { return states_; }

    std::optional<int> link_state_index(const LinkState& s) const {
        for (size_t k = 0; k < states_.size(); ++k)
            if (states_[k].tj == s.tj && states_[k].tm == s.tm && states_[k].tn == s.tn &&
                states_[k].e == s.e)
                return static_cast<int>(k);
        return std::nullopt;
    }

private:
    void build_link_states() {
        for (int tj = 0; tj <= twice_jmax; ++tj)
            for (int tm = -tj; tm <= tj; tm += 2)
                for (int tn = -tj; tn <= tj; tn += 2) {
                    if (kind == SpaceKind::SU2Link) {
                        states_.push_back({tj, tm, tn, 0});
                    } else {
                        for (int e = -lambda; e <= lambda; ++e)
                            if (((e % 2) + 2) % 2 == (tj % 2)) states_.push_back({tj, tm, tn, e});
                    }
                }
    }

    std::vector<LinkState> states_;
};

struct SiteRef {
    enum Kind { Vertex, LinkSite, Aux } kind = Vertex;
    int index = 0;
    bool operator==(const SiteRef&) const = default;
};

// Product basis over an ordered list of local spaces. Basis index runs
// lexicographically with site 0 as the most significant digit.
class HilbertSpace {
public:
    static constexpr std::uint64_t kMaxDim = 1ull << 48;

    static std::shared_ptr<const HilbertSpace>
    from_sites(std::vector<std::pair<SiteRef, LocalSpace>> sites) {
        auto sp = std::make_shared<HilbertSpace>();
        sp->sites_ = std::move(sites);
        const int n = static_cast<int>(sp->sites_.size());
        sp->strides_.assign(n, 1);
        std::uint64_t dim = 1;
        for (int s = n - 1; s >= 0; --s) {
            sp->strides_[s] = dim;
            const std::uint64_t d = static_cast<std::uint64_t>(sp->sites_[s].second.dim());
            if (d == 0 || dim > kMaxDim / d) throw DimOverflow("product dimension exceeds 2^48");
            dim *= d;
        }
        sp->dim_ = dim;
        return sp;
    }

    std::uint64_t dim() const { return dim_; }
    int num_sites() const { return static_cast<int>(sites_.size()); }
    const LocalSpace& site_space(int s) const { return sites_[s].second; }
    const SiteRef& site_ref(int s) const { return sites_[s].first; }
    std::uint64_t stride(int s) const { return strides_[s]; }

    int site_of(SiteRef ref) const {
        for (int s = 0; s < num_sites(); ++s)
            if (sites_[s].first == ref) return s;
        throw DimMismatch("no site with the requested location");
    }

    int digit(std::uint64_t idx, int site) const {
        return static_cast<int>((idx / strides_[site]) % sites_[site].second.dim());
    }

    void decode(std::uint64_t idx, std::span<int> digits) const {
        for (int s = 0; s < num_sites(); ++s)
            digits[s] = static_cast<int>((idx / strides_[s]) % sites_[s].second.dim());
    }

    std::uint64_t encode(std::span<const int> digits) const {
        std::uint64_t idx = 0;
        for (int s = 0; s < num_sites(); ++s)
            idx += static_cast<std::uint64_t>(digits[s]) * strides_[s];
        return idx;
    }

    bool same_as(const HilbertSpace& other) const { return this == &other; }

private:
    std::vector<std::pair<SiteRef, LocalSpace>> sites_;
    std::vector<std::uint64_t> strides_;
    std::uint64_t dim_ = 0;
};

using SpacePtr = std::shared_ptr<const HilbertSpace>;

// Vertices first (vertex order), then links (link order). Aux sites, when a
// model needs them, are appended by the caller via extra_sites.
inline SpacePtr build_space(const Lattice& lat,
                            const std::function<LocalSpace(int)>& vertex_space,
                            const std::function<LocalSpace(int)>& link_space,
                            std::vector<std::pair<SiteRef, LocalSpace>> extra_sites = {}) {
    std::vector<std::pair<SiteRef, LocalSpace>> sites;
    sites.reserve(lat.num_vertices() + lat.num_links() + extra_sites.size());
    for (int v = 0; v < lat.num_vertices(); ++v)
        sites.push_back({SiteRef{SiteRef::Vertex, v}, vertex_space(v)});
    for (int l = 0; l < lat.num_links(); ++l)
        sites.push_back({SiteRef{SiteRef::LinkSite, l}, link_space(l)});
    for (auto& s : extra_sites) sites.push_back(std::move(s));
    return HilbertSpace::from_sites(std::move(sites));
}

// Sorted list of parent basis indices; projection . injection = identity.
class Subspace {
public:
    Subspace() = default;
    Subspace(SpacePtr parent, std::vector<std::uint64_t> members)
        : parent_(std::move(parent)), members_(std::move(members)) {}

    const SpacePtr& parent() const { return parent_; }
    std::uint64_t dim() const { return members_.size(); }
    std::uint64_t member(std::uint64_t k) const { return members_[k]; }
    const std::vector<std::uint64_t>& members() const { return members_; }

    std::optional<std::uint64_t> rank_of(std::uint64_t parent_index) const {
        auto it = std::lower_bound(members_.begin(), members_.end(), parent_index);
        if (it == members_.end() || *it != parent_index) return std::nullopt;
        return static_cast<std::uint64_t>(it - members_.begin());
    }

private:
    SpacePtr parent_;
    std::vector<std::uint64_t> members_;
};

// All basis states whose digit tuple satisfies the predicate, in index order.
inline Subspace filter_subspace(const SpacePtr& space,
                                const std::function<bool(std::span<const int>)>& predicate) {
    std::vector<std::uint64_t> members;
    std::vector<int> digits(space->num_sites());
    for (std::uint64_t i = 0; i < space->dim(); ++i) {
        space->decode(i, digits);
        if (predicate(digits)) members.push_back(i);
    }
    return Subspace(space, std::move(members));
}

} // namespace lgt
