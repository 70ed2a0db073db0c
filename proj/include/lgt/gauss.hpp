#pragma once

#include <map>
#include <span>
#include <vector>

#include "lgt/lattice.hpp"
#include "lgt/linop.hpp"
#include "lgt/local_ops.hpp"

namespace lgt {

enum class MatterKind { None, HardCore, Fermion, Rotor };

// Electric divergence, charge, and staggered Gauss generators for U(1)-type
// models. All of these are diagonal in the product basis, so eigenvalues are
// evaluated exactly from digit tuples.
class GaussOperators {
public:
    GaussOperators(SpacePtr space, const Lattice& lat, MatterKind matter,
                   std::vector<int> static_charges = {})
        : space_(std::move(space)), lat_(&lat), matter_(matter),
          lambda_(std::move(static_charges)) {
        if (lambda_.empty()) lambda_.assign(lat.num_vertices(), 0);
        link_site_.resize(lat.num_links());
        for (int l = 0; l < lat.num_links(); ++l)
            link_site_[l] = space_->site_of(SiteRef{SiteRef::LinkSite, l});
        vertex_site_.assign(lat.num_vertices(), -1);
        if (matter_ != MatterKind::None)
            for (int v = 0; v < lat.num_vertices(); ++v)
                vertex_site_[v] = space_->site_of(SiteRef{SiteRef::Vertex, v});
        incidence_.reserve(lat.num_vertices());
        for (int v = 0; v < lat.num_vertices(); ++v) incidence_.push_back(lat.incident_links(v));
    }

    const SpacePtr& space() const { return space_; }
    const Lattice& lattice() const { return *lat_; }
    MatterKind matter() const { return matter_; }
    int static_charge(int v) const { return lambda_[v]; }

    int link_e(std::span<const int> digits, int l) const {
        const int s = link_site_[l];
        return space_->site_space(s).ladder_value(digits[s]);
    }

    int d_value(std::span<const int> digits, int v) const {
        int d = 0;
        for (int l : incidence_[v].outgoing) d += link_e(digits, l);
        for (int l : incidence_[v].incoming) d -= link_e(digits, l);
        return d;
    }

    int q_value(std::span<const int> digits, int v) const {
        switch (matter_) {
        case MatterKind::None: return 0;
        case MatterKind::HardCore:
        case MatterKind::Fermion: {
            const int s = vertex_site_[v];
            return space_->site_space(s).occupation(digits[s]) - lat_->stagger(v);
        }
        case MatterKind::Rotor: {
            const int s = vertex_site_[v];
            return space_->site_space(s).ladder_value(digits[s]);
        }
        }
        return 0;
    }

    int g_value(std::span<const int> digits, int v) const {
        return d_value(digits, v) + lat_->stagger(v);
    }

    SparseOperator divergence_op(int v) const {
        return make_diagonal(space_, [&, v](std::span<const int> d) -> cxd {
            return static_cast<double>(d_value(d, v));
        });
    }

    SparseOperator charge_op(int v) const {
        return make_diagonal(space_, [&, v](std::span<const int> d) -> cxd {
            return static_cast<double>(q_value(d, v));
        });
    }

    // Staggered generator G = D + s (gauge-field data only).
    SparseOperator staggered_op(int v) const {
        return make_diagonal(space_, [&, v](std::span<const int> d) -> cxd {
            return static_cast<double>(g_value(d, v));
        });
    }

    // Gauss generator D - Q - lambda; zero on the physical sector.
    SparseOperator generator_op(int v) const {
        return make_diagonal(space_, [&, v](std::span<const int> d) -> cxd {
            return static_cast<double>(d_value(d, v) - q_value(d, v) - lambda_[v]);
        });
    }

private:
    SpacePtr space_;
    const Lattice* lat_;
    MatterKind matter_;
    std::vector<int> lambda_;
    std::vector<int> link_site_;
    std::vector<int> vertex_site_;
    std::vector<Lattice::Incidence> incidence_;
};

inline std::vector<SparseOperator> build_divergence(const SpacePtr& space, const Lattice& lat) {
    GaussOperators g(space, lat, MatterKind::None);
    std::vector<SparseOperator> out;
    out.reserve(lat.num_vertices());
    for (int v = 0; v < lat.num_vertices(); ++v) out.push_back(g.divergence_op(v));
    return out;
}

// All basis states with D(x) = Q(x) + lambda(x) at every vertex. An empty
// result is legal and left to the caller to report.
inline Subspace physical_sector(const GaussOperators& g) {
    const auto& lat = g.lattice();
    return filter_subspace(g.space(), [&](std::span<const int> d) {
        for (int v = 0; v < lat.num_vertices(); ++v)
            if (g.d_value(d, v) != g.q_value(d, v) + g.static_charge(v)) return false;
        return true;
    });
}

struct GaussProjectors {
    SparseOperator p0;
    SparseOperator p1;
    SparseOperator rest;
};

inline GaussProjectors gauss_projectors(const GaussOperators& g, int v) {
    auto make = [&](auto pred) {
        return make_diagonal(g.space(), [&, v, pred](std::span<const int> d) -> cxd {
            return pred(g.g_value(d, v)) ? 1.0 : 0.0;
        });
    };
    return {make([](int gv) { return gv == 0; }), make([](int gv) { return gv == 1; }),
            make([](int gv) { return gv != 0 && gv != 1; })};
}

// max over vertices of || G(G-1) psi ||_2.
inline double constraint_residual(const GaussOperators& g, const Eigen::VectorXcd& psi) {
    const auto space = g.space();
    std::vector<int> digits(space->num_sites());
    double worst = 0.0;
    for (int v = 0; v < g.lattice().num_vertices(); ++v) {
        double acc = 0.0;
        for (std::uint64_t i = 0; i < space->dim(); ++i) {
            const cxd a = psi(static_cast<Eigen::Index>(i));
            if (std::abs(a) <= kDropTol) continue;
            space->decode(i, digits);
            const double gv = g.g_value(digits, v);
            const double w = gv * (gv - 1.0);
            acc += std::norm(a * w);
        }
        worst = std::max(worst, std::sqrt(acc));
    }
    return worst;
}

inline double constraint_residual(const GaussOperators& g, const Subspace& sub) {
    double worst = 0.0;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.space()->dim()));
    for (std::uint64_t k = 0; k < sub.dim(); ++k) {
        psi.setZero();
        psi(static_cast<Eigen::Index>(sub.member(k))) = 1.0;
        worst = std::max(worst, constraint_residual(g, psi));
    }
    return worst;
}

// Complete partition of the basis by joint eigenvalues of commuting diagonal
// operators. Eigenvalues are keyed on 2*value rounded to integer, which is
// exact for the integer and half-integer spectra used here.
struct SectorTable {
    struct Row {
        std::vector<long long> key_twice;
        std::uint64_t dimension = 0;
        Subspace states;
    };
    std::vector<Row> rows;

    std::uint64_t total_dimension() const {
        std::uint64_t t = 0;
        for (const auto& r : rows) t += r.dimension;
        return t;
    }
};

inline SectorTable sector_decompose(const SpacePtr& space,
                                    const std::vector<SparseOperator>& diagonals) {
    for (const auto& op : diagonals)
        if (!op.structurally_diagonal()) throw NonIntegerControl("sector operators must be diagonal");
    std::map<std::vector<long long>, std::vector<std::uint64_t>> buckets;
    for (std::uint64_t i = 0; i < space->dim(); ++i) {
        std::vector<long long> key;
        key.reserve(diagonals.size());
        for (const auto& op : diagonals)
            key.push_back(std::llround(2.0 * op.diagonal_entry(i).real()));
        buckets[key].push_back(i);
    }
    SectorTable table;
    for (auto& [key, members] : buckets) {
        SectorTable::Row row;
        row.key_twice = key;
        row.dimension = members.size();
        row.states = Subspace(space, std::move(members));
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace lgt
