#pragma once

#include <Eigen/Dense>

#include "lgt/hilbert.hpp"
#include "lgt/linop.hpp"

namespace lgt {

// Local matrices are indexed by the digit conventions of hilbert.hpp:
// ladder digit d <-> value d - lambda, occupation bits for fermion vertices.

namespace local {

inline Eigen::MatrixXcd ladder_value_diag(const LocalSpace& sp) {
    const int d = sp.dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) m(k, k) = sp.ladder_value(k);
    return m;
}

// |v+1><v| shift. With wrap=false the top entry is dropped (pure truncated
// shift); with wrap=true the shift is cyclic, turning the register into a
// Z_{2*lambda+1} clock.
inline Eigen::MatrixXcd ladder_raise(const LocalSpace& sp, bool wrap = false) {
    const int d = sp.dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k + 1 < d; ++k) m(k + 1, k) = 1.0;
    if (wrap) m(0, d - 1) = 1.0;
    return m;
}

inline Eigen::MatrixXcd ladder_lower(const LocalSpace& sp, bool wrap = false) {
    return ladder_raise(sp, wrap).adjoint();
}

// Two-level matter in the occupation basis {|0>, |1>}.
inline Eigen::MatrixXcd number() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(1, 1) = 1.0;
    return m;
}

inline Eigen::MatrixXcd sigma_plus() { // raises occupation
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

inline Eigen::MatrixXcd sigma_minus() { return sigma_plus().adjoint(); }

inline Eigen::MatrixXcd sigma_x() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 1) = m(1, 0) = 1.0;
    return m;
}

// +1 on |1>, -1 on |0>; n = (sigma_z + 1)/2.
inline Eigen::MatrixXcd sigma_z() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    return m;
}

// (-1)^n parity.
inline Eigen::MatrixXcd parity() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

inline Eigen::MatrixXcd z2_x() { return sigma_x(); }
inline Eigen::MatrixXcd z2_z() { return parity(); } // +1 on |0>, -1 on |1>

// Annihilator of species s on a FermionVertex, with the on-site string over
// species of lower index. On-site pairs anticommute exactly; operators on
// different vertices commute because the string never leaves the vertex.
inline Eigen::MatrixXcd species_annihilator(const LocalSpace& sp, int s) {
    const int d = sp.dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        if (!((k >> s) & 1)) continue;
        int lower = 0;
        for (int t = 0; t < s; ++t) lower += (k >> t) & 1;
        m(k & ~(1 << s), k) = (lower & 1) ? -1.0 : 1.0;
    }
    return m;
}

inline Eigen::MatrixXcd species_creator(const LocalSpace& sp, int s) {
    return species_annihilator(sp, s).adjoint();
}

inline Eigen::MatrixXcd species_number(const LocalSpace& sp, int s) {
    const int d = sp.dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k)
        if ((k >> s) & 1) m(k, k) = 1.0;
    return m;
}

inline Eigen::MatrixXcd vertex_parity(const LocalSpace& sp) {
    const int d = sp.dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        int n = 0;
        for (int t = 0; t < sp.species; ++t) n += (k >> t) & 1;
        m(k, k) = (n & 1) ? -1.0 : 1.0;
    }
    return m;
}

} // namespace local

// Field operator psi(vertex) for single-species FermionVertex matter with the
// global Jordan-Wigner string ordered by vertex index.
inline SparseOperator fermion_annihilator(const SpacePtr& space, int vertex) {
    std::vector<int> fsites; // vertex-ordered fermionic sites
    for (int s = 0; s < space->num_sites(); ++s)
        if (space->site_space(s).kind == SpaceKind::FermionVertex) fsites.push_back(s);

    const int target = space->site_of(SiteRef{SiteRef::Vertex, vertex});
    std::vector<Triplet> trips;
    for (std::uint64_t i = 0; i < space->dim(); ++i) {
        if (!space->digit(i, target)) continue;
        int string = 0;
        for (int s : fsites) {
            if (s == target) break;
            string += space->digit(i, s);
        }
        const std::uint64_t j = i - space->stride(target);
        trips.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i),
                           (string & 1) ? -1.0 : 1.0);
    }
    return SparseOperator::from_triplets(space, trips);
}

inline SparseOperator fermion_creator(const SpacePtr& space, int vertex) {
    return fermion_annihilator(space, vertex).adjoint();
}

} // namespace lgt
