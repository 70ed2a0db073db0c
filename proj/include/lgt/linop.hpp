#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "lgt/errors.hpp"
#include "lgt/hilbert.hpp"

namespace lgt {

using cxd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cxd>;
using Triplet = Eigen::Triplet<cxd>;

constexpr double kDropTol = 1e-14;     // stored-zero threshold
constexpr double kFlagTol = 1e-12;     // flag verification
constexpr double kSpectrumTol = 1e-10; // spectrum comparison

struct OpFlags {
    bool hermitian = false;
    bool unitary = false;
    bool diagonal = false;
};

inline double max_abs(const SpMat& m) {
    double r = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it) r = std::max(r, std::abs(it.value()));
    return r;
}

// Immutable sparse operator bound to a HilbertSpace. Flags are advisory and
// verified on demand; arithmetic recomputes them conservatively.
class SparseOperator {
public:
    SparseOperator() = default;

    SparseOperator(SpacePtr space, SpMat mat, OpFlags flags = {})
        : space_(std::move(space)), mat_(std::move(mat)), flags_(flags) {
        prune();
    }

    static SparseOperator from_triplets(SpacePtr space, std::vector<Triplet>& trips,
                                        OpFlags flags = {}) {
        const auto n = static_cast<Eigen::Index>(space->dim());
        SpMat m(n, n);
        m.setFromTriplets(trips.begin(), trips.end());
        return SparseOperator(std::move(space), std::move(m), flags);
    }

    const SpacePtr& space() const { return space_; }
    const SpMat& matrix() const { return mat_; }
    // Restricted blocks carry no parent space; their dimension is the matrix size.
    std::uint64_t dim() const { return static_cast<std::uint64_t>(mat_.rows()); }
    Eigen::Index nonzeros() const { return mat_.nonZeros(); }
    const OpFlags& flags() const { return flags_; }
    SparseOperator with_flags(OpFlags f) const { return SparseOperator(space_, mat_, f); }

    cxd diagonal_entry(std::uint64_t i) const {
        return mat_.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    }

    SparseOperator adjoint() const {
        OpFlags f = flags_;
        return SparseOperator(space_, SpMat(mat_.adjoint()), f);
    }

    SparseOperator operator+(const SparseOperator& o) const {
        check_space(o);
        OpFlags f;
        f.hermitian = flags_.hermitian && o.flags_.hermitian;
        f.diagonal = flags_.diagonal && o.flags_.diagonal;
        return SparseOperator(space_, mat_ + o.mat_, f);
    }

    SparseOperator operator-(const SparseOperator& o) const {
        check_space(o);
        OpFlags f;
        f.hermitian = flags_.hermitian && o.flags_.hermitian;
        f.diagonal = flags_.diagonal && o.flags_.diagonal;
        return SparseOperator(space_, mat_ - o.mat_, f);
    }

    SparseOperator operator*(const SparseOperator& o) const {
        check_space(o);
        OpFlags f;
        f.unitary = flags_.unitary && o.flags_.unitary;
        f.diagonal = flags_.diagonal && o.flags_.diagonal;
        f.hermitian = f.diagonal && flags_.hermitian && o.flags_.hermitian;
        return SparseOperator(space_, SpMat(mat_ * o.mat_), f);
    }

    SparseOperator scaled(cxd c) const {
        OpFlags f;
        f.diagonal = flags_.diagonal;
        f.hermitian = flags_.hermitian && std::abs(c.imag()) < kDropTol;
        return SparseOperator(space_, SpMat(c * mat_), f);
    }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return mat_ * v; }

    // Residuals for on-demand flag verification.
    double hermitian_residual() const { return max_abs(SpMat(mat_ - SpMat(mat_.adjoint()))); }

    double unitary_residual() const {
        SpMat prod = mat_ * SpMat(mat_.adjoint());
        SpMat eye(mat_.rows(), mat_.cols());
        eye.setIdentity();
        return max_abs(SpMat(prod - eye));
    }

    bool structurally_diagonal() const {
        for (int k = 0; k < mat_.outerSize(); ++k)
            for (SpMat::InnerIterator it(mat_, k); it; ++it)
                if (it.row() != it.col()) return false;
        return true;
    }

private:
    void check_space(const SparseOperator& o) const {
        if (space_ && o.space_ && space_->same_as(*o.space_)) return;
        if (!space_ && !o.space_ && mat_.rows() == o.mat_.rows()) return;
        throw SpaceMismatch("operators live on different spaces");
    }

    void prune() {
        mat_.prune([](const Eigen::Index&, const Eigen::Index&, const cxd& v) {
            return std::abs(v) > kDropTol;
        });
        mat_.makeCompressed();
    }

    SpacePtr space_;
    SpMat mat_;
    OpFlags flags_;
};

inline SparseOperator operator*(cxd c, const SparseOperator& op) { return op.scaled(c); }
inline SparseOperator operator*(double c, const SparseOperator& op) { return op.scaled(cxd(c, 0)); }

inline SparseOperator identity_op(const SpacePtr& space) {
    SpMat m(static_cast<Eigen::Index>(space->dim()), static_cast<Eigen::Index>(space->dim()));
    m.setIdentity();
    return SparseOperator(space, std::move(m), {true, true, true});
}

inline SparseOperator zero_op(const SpacePtr& space) {
    SpMat m(static_cast<Eigen::Index>(space->dim()), static_cast<Eigen::Index>(space->dim()));
    return SparseOperator(space, std::move(m), {true, false, true});
}

// Diagonal operator whose entry at each basis state is a function of the digits.
inline SparseOperator make_diagonal(const SpacePtr& space,
                                    const std::function<cxd(std::span<const int>)>& value) {
    std::vector<Triplet> trips;
    std::vector<int> digits(space->num_sites());
    for (std::uint64_t i = 0; i < space->dim(); ++i) {
        space->decode(i, digits);
        cxd v = value(digits);
        if (std::abs(v) > kDropTol)
            trips.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), v);
    }
    OpFlags f;
    f.diagonal = true;
    f.hermitian = true; // callers supplying complex phases should re-flag
    return SparseOperator::from_triplets(space, trips, f);
}

// Embeds a local matrix at one tensor factor, identity elsewhere.
inline SparseOperator embed_local(const SpacePtr& space, int site, const Eigen::MatrixXcd& local,
                                  OpFlags flags = {}) {
    const int ld = space->site_space(site).dim();
    if (local.rows() != ld || local.cols() != ld)
        throw DimMismatch("local matrix dimension does not match the site");
    // collect nonzero local entries per column
    std::vector<std::vector<std::pair<int, cxd>>> cols(ld);
    for (int c = 0; c < ld; ++c)
        for (int r = 0; r < ld; ++r)
            if (std::abs(local(r, c)) > kDropTol) cols[c].push_back({r, local(r, c)});

    const std::uint64_t stride = space->stride(site);
    std::vector<Triplet> trips;
    for (std::uint64_t i = 0; i < space->dim(); ++i) {
        const int d = space->digit(i, site);
        for (const auto& [r, v] : cols[d]) {
            const std::uint64_t j = i + (static_cast<std::uint64_t>(r) - d) * stride;
            trips.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i), v);
        }
    }
    return SparseOperator::from_triplets(space, trips, flags);
}

inline SparseOperator embed_at(const SpacePtr& space, SiteRef ref, const Eigen::MatrixXcd& local,
                               OpFlags flags = {}) {
    return embed_local(space, space->site_of(ref), local, flags);
}

// Controlled integer power u^G: u unitary on one site, G diagonal with integer
// spectrum, independent of that site's digit. Negative powers use u^dagger.
struct ControlledPower {
    Eigen::MatrixXcd base; // local matrix of u
    int site = -1;
    SparseOperator control;
};

namespace detail {

inline const Eigen::MatrixXcd& local_power(std::map<long long, Eigen::MatrixXcd>& cache,
                                           const Eigen::MatrixXcd& u, long long g) {
    auto it = cache.find(g);
    if (it != cache.end()) return it->second;
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    const Eigen::MatrixXcd step = g >= 0 ? u : Eigen::MatrixXcd(u.adjoint());
    for (long long k = 0; k < std::llabs(g); ++k) p = step * p;
    return cache.emplace(g, std::move(p)).first->second;
}

} // namespace detail

inline SparseOperator controlled_power(const ControlledPower& cp) {
    const SpacePtr& space = cp.control.space();
    const int site = cp.site;
    const int ld = space->site_space(site).dim();
    if (cp.base.rows() != ld || cp.base.cols() != ld)
        throw DimMismatch("controlled-power base does not match its site");
    if (max_abs(SpMat((cp.base * cp.base.adjoint() - Eigen::MatrixXcd::Identity(ld, ld)).sparseView())) >
        kFlagTol)
        throw NonUnitaryBase("controlled-power base is not unitary");
    if (!cp.control.structurally_diagonal())
        throw NonIntegerControl("control operator must be diagonal");

    // control must not read the base site
    const std::uint64_t stride = space->stride(site);
    std::vector<long long> g_of(space->dim());
    for (std::uint64_t i = 0; i < space->dim(); ++i) {
        const cxd gv = cp.control.diagonal_entry(i);
        const double gr = gv.real();
        if (std::abs(gv.imag()) > 1e-9 || std::abs(gr - std::llround(gr)) > 1e-9)
            throw NonIntegerControl("control operator must have integer spectrum");
        g_of[i] = std::llround(gr);
    }
    for (std::uint64_t i = 0; i < space->dim(); ++i) {
        const int d = space->digit(i, site);
        if (d != 0) continue;
        for (int d2 = 1; d2 < ld; ++d2)
            if (g_of[i + static_cast<std::uint64_t>(d2) * stride] != g_of[i])
                throw NonIntegerControl("control operator must not act on the base site");
    }

    std::map<long long, Eigen::MatrixXcd> cache;
    std::vector<Triplet> trips;
    for (std::uint64_t i = 0; i < space->dim(); ++i) {
        const Eigen::MatrixXcd& ug = detail::local_power(cache, cp.base, g_of[i]);
        const int d = space->digit(i, site);
        for (int r = 0; r < ld; ++r) {
            const cxd v = ug(r, d);
            if (std::abs(v) <= kDropTol) continue;
            const std::uint64_t j = i + (static_cast<std::uint64_t>(r) - d) * stride;
            trips.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i), v);
        }
    }
    OpFlags f;
    f.unitary = true;
    return SparseOperator::from_triplets(space, trips, f);
}

// P A P^dagger as a dense-indexed sparse matrix on the subspace basis.
// The result is a bare operator (no parent space attached).
inline SparseOperator restrict_to(const SparseOperator& op, const Subspace& sub) {
    if (!op.space() || !op.space()->same_as(*sub.parent()))
        throw SpaceMismatch("subspace does not belong to the operator's space");
    const auto& m = op.matrix();
    std::vector<Triplet> trips;
    for (std::uint64_t c = 0; c < sub.dim(); ++c) {
        const auto col = static_cast<Eigen::Index>(sub.member(c));
        for (SpMat::InnerIterator it(m, col); it; ++it) {
            auto r = sub.rank_of(static_cast<std::uint64_t>(it.row()));
            if (r) trips.emplace_back(static_cast<Eigen::Index>(*r), static_cast<Eigen::Index>(c),
                                      it.value());
        }
    }
    SpMat rm(static_cast<Eigen::Index>(sub.dim()), static_cast<Eigen::Index>(sub.dim()));
    rm.setFromTriplets(trips.begin(), trips.end());
    OpFlags f;
    f.hermitian = op.flags().hermitian;
    f.diagonal = op.flags().diagonal;
    return SparseOperator(nullptr, std::move(rm), f);
}

// Dense view for small restricted blocks.
inline Eigen::MatrixXcd dense(const SparseOperator& op) { return Eigen::MatrixXcd(op.matrix()); }

// Leakage of op out of the subspace: max |<outside| op |inside>|.
inline double sector_leakage(const SparseOperator& op, const Subspace& sub) {
    const auto& m = op.matrix();
    double r = 0.0;
    for (std::uint64_t c = 0; c < sub.dim(); ++c) {
        const auto col = static_cast<Eigen::Index>(sub.member(c));
        for (SpMat::InnerIterator it(m, col); it; ++it)
            if (!sub.rank_of(static_cast<std::uint64_t>(it.row())))
                r = std::max(r, std::abs(it.value()));
    }
    return r;
}

} // namespace lgt
