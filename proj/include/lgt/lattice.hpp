#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <vector>

#include "lgt/errors.hpp"

namespace lgt {

enum class Boundary { Open, Periodic };

// Directed link emanating from `from` in direction `dir` (0-based), ending at `to`.
struct Link {
    int from = -1;
    int dir = -1;
    int to = -1;
};

// Oriented elementary square: links traversed as
//   (x,i), (x+e_i,j), (x+e_j,i), (x,j)   with i<j,
// the first two with the orientation of the cycle, the last two against it.
struct Plaquette {
    std::array<int, 4> links{};
    int corner = -1;
    int dir_i = -1;
    int dir_j = -1;
};

// Finite hypercubic lattice with deterministic index tables:
// vertices in lexicographic coordinate order, links ordered direction-major.
class Lattice {
public:
    static Lattice build(std::vector<int> dims, Boundary boundary) {
        if (dims.empty()) throw ZeroExtent("lattice needs at least one dimension");
        for (int L : dims) {
            if (L < 1) throw ZeroExtent("lattice extent must be positive");
            if (boundary == Boundary::Periodic && L < 2)
                throw PeriodicTooSmall("periodic boundary requires extent >= 2 in every direction");
        }
        Lattice lat;
        lat.dims_ = std::move(dims);
        lat.boundary_ = boundary;
        const int d = static_cast<int>(lat.dims_.size());
        int nv = 1;
        for (int L : lat.dims_) nv *= L;
        lat.nv_ = nv;

        lat.coords_.resize(nv);
        std::vector<int> c(d, 0);
        for (int v = 0; v < nv; ++v) {
            lat.coords_[v] = c;
            for (int k = d - 1; k >= 0; --k) {
                if (++c[k] < lat.dims_[k]) break;
                c[k] = 0;
            }
        }

        lat.link_at_.assign(static_cast<size_t>(nv) * d, -1);
        for (int dir = 0; dir < d; ++dir) {
            for (int v = 0; v < nv; ++v) {
                auto t = lat.neighbor(v, dir);
                if (!t) continue;
                lat.link_at_[static_cast<size_t>(v) * d + dir] = static_cast<int>(lat.links_.size());
                lat.links_.push_back({v, dir, *t});
            }
        }

        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) {
                for (int v = 0; v < nv; ++v) {
                    auto vi = lat.neighbor(v, i);
                    auto vj = lat.neighbor(v, j);
                    if (!vi || !vj) continue;
                    Plaquette p;
                    p.corner = v;
                    p.dir_i = i;
                    p.dir_j = j;
                    p.links = {lat.link_index(v, i).value(), lat.link_index(*vi, j).value(),
                               lat.link_index(*vj, i).value(), lat.link_index(v, j).value()};
                    lat.plaquettes_.push_back(p);
                }
            }
        }
        return lat;
    }

    int ndim() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    Boundary boundary() const { return boundary_; }
    int num_vertices() const { return nv_; }
    int num_links() const { return static_cast<int>(links_.size()); }
    int num_plaquettes() const { return static_cast<int>(plaquettes_.size()); }

    const std::vector<int>& vertex_coords(int v) const { return coords_[v]; }

    int vertex_index(const std::vector<int>& c) const {
        int v = 0;
        for (int k = 0; k < ndim(); ++k) v = v * dims_[k] + c[k];
        return v;
    }

    // Sublattice parity: sum of coordinates mod 2.
    int stagger(int v) const {
        const auto& c = coords_[v];
        return std::accumulate(c.begin(), c.end(), 0) & 1;
    }

    const Link& link(int l) const { return links_[l]; }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<Plaquette>& plaquettes() const { return plaquettes_; }

    // Outgoing link at vertex v in direction dir, if present under the boundary rule.
    std::optional<int> link_index(int v, int dir) const {
        int l = link_at_[static_cast<size_t>(v) * ndim() + dir];
        if (l < 0) return std::nullopt;
        return l;
    }

    std::optional<int> neighbor(int v, int dir) const {
        std::vector<int> c = coords_[v];
        if (c[dir] + 1 < dims_[dir]) {
            ++c[dir];
            return vertex_index(c);
        }
        if (boundary_ == Boundary::Periodic) {
            c[dir] = 0;
            return vertex_index(c);
        }
        return std::nullopt;
    }

    struct Incidence {
        std::vector<int> outgoing; // links (v, i)
        std::vector<int> incoming; // links (v - e_i, i)
    };

    Incidence incident_links(int v) const {
        Incidence inc;
        for (int l = 0; l < num_links(); ++l) {
            if (links_[l].from == v) inc.outgoing.push_back(l);
            if (links_[l].to == v) inc.incoming.push_back(l);
        }
        return inc;
    }

    // True when every nearest-neighbor pair has opposite stagger parity.
    bool bipartite_staggering() const {
        if (boundary_ == Boundary::Open) return true;
        for (int L : dims_)
            if (L & 1) return false;
        return true;
    }

private:
    std::vector<int> dims_;
    Boundary boundary_ = Boundary::Open;
    int nv_ = 0;
    std::vector<std::vector<int>> coords_;
    std::vector<Link> links_;
    std::vector<Plaquette> plaquettes_;
    std::vector<int> link_at_; // (v, dir) -> link index or -1
};

} // namespace lgt
