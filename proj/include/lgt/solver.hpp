#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "lgt/linop.hpp"

namespace lgt {

constexpr std::uint64_t kDenseCap = 4096;

struct SpectrumRequest {
    double tol = 1e-10;
    int max_iter = 500;
    int k = 1;
    std::uint64_t seed = 0;
};

namespace detail {

inline void require_hermitian(const SparseOperator& op) {
    const double scale = std::max(1.0, max_abs(op.matrix()));
    if (op.hermitian_residual() > kFlagTol * scale)
        throw NotHermitian("operator failed hermiticity verification");
}

} // namespace detail

struct SolverOptions {
    enum class Mode { Full, Lowest } mode = Mode::Full;
    int k = 1;
    double tol = 1e-10;
    int max_iter = 500;
    std::uint64_t seed = 0;
};

// Full ascending spectrum via a dense solve. Residual || A v - w v || is
// checked for every pair before returning.
inline std::vector<double> eig_full(const SparseOperator& op) {
    if (op.dim() == 0) return {};
    if (op.dim() > kDenseCap) throw TooLarge("dense solver capped at dim 4096");
    detail::require_hermitian(op);
    Eigen::MatrixXcd a = Eigen::MatrixXcd(op.matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    if (es.info() != Eigen::Success) throw NoConvergence("dense eigensolver failed");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
        const double r =
            (a * es.eigenvectors().col(j) - es.eigenvalues()(j) * es.eigenvectors().col(j)).norm();
        if (r > 1e-10 * scale * static_cast<double>(a.rows()))
            throw NoConvergence("dense eigenpair residual too large");
    }
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

inline std::vector<double> eig_full_dense(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

// Lowest-k eigenvalues by Lanczos with full reorthogonalization and a
// deterministic seeded start vector.
inline std::vector<double> eig_lowest(const SparseOperator& op, const SpectrumRequest& req) {
    detail::require_hermitian(op);
    const auto n = static_cast<Eigen::Index>(op.dim());
    const int k = req.k;
    if (k < 1 || static_cast<Eigen::Index>(k) >= n)
        throw DimMismatch("eig_lowest requires 1 <= k < dim");

    std::mt19937_64 rng(req.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_vector = [&] {
        Eigen::VectorXcd v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v(i) = cxd(re, im);
        }
        return v;
    };

    std::vector<Eigen::VectorXcd> basis;
    std::vector<double> alpha, beta; // beta[j] couples basis[j] and basis[j+1]

    auto reorthogonalize = [&](Eigen::VectorXcd& w) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= q.dot(w) * q;
    };

    Eigen::VectorXcd v = random_vector();
    v.normalize();
    basis.push_back(v);

    const int mmax = std::min<Eigen::Index>(n, req.max_iter);
    double last_residual = 0.0;
    for (int m = 0; m < mmax; ++m) {
        Eigen::VectorXcd w = op.apply(basis.back());
        const double a = std::real(basis.back().dot(w));
        alpha.push_back(a);
        w -= a * basis.back();
        if (basis.size() > 1) w -= beta.back() * basis[basis.size() - 2];
        reorthogonalize(w);
        const double b = w.norm();

        // Ritz values of the current tridiagonal block.
        const int mm = static_cast<int>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(mm, mm);
        for (int i = 0; i < mm; ++i) t(i, i) = alpha[i];
        for (int i = 0; i + 1 < mm; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(t);

        bool converged = mm >= k;
        if (converged) {
            for (int j = 0; j < k; ++j) {
                const double bound = b * std::abs(tes.eigenvectors()(mm - 1, j));
                if (bound > req.tol) {
                    converged = false;
                    last_residual = bound;
                    break;
                }
            }
        }
        if (converged && mm >= k) {
            std::vector<double> out(tes.eigenvalues().data(), tes.eigenvalues().data() + k);
            return out;
        }

        if (b < 1e-12) {
            // invariant subspace; continue from a fresh deterministic vector
            Eigen::VectorXcd f = random_vector();
            reorthogonalize(f);
            const double fn = f.norm();
            if (fn < 1e-12 || static_cast<Eigen::Index>(basis.size()) >= n) {
                const int avail = std::min(k, static_cast<int>(tes.eigenvalues().size()));
                std::vector<double> out(tes.eigenvalues().data(), tes.eigenvalues().data() + avail);
                while (static_cast<int>(out.size()) < k) out.push_back(out.back());
                return out;
            }
            beta.push_back(0.0);
            basis.push_back(f / fn);
        } else {
            beta.push_back(b);
            basis.push_back(w / b);
        }
    }
    throw NoConvergence("Lanczos did not converge after " + std::to_string(mmax) +
                        " iterations (last residual bound " + std::to_string(last_residual) + ")");
}

// Spectrum under the requested mode; Lowest falls back to the dense path when
// k reaches the block dimension.
inline std::vector<double> spectra_of(const SparseOperator& op, const SolverOptions& opts) {
    if (opts.mode == SolverOptions::Mode::Full ||
        static_cast<std::uint64_t>(opts.k) >= op.dim())
        return eig_full(op);
    SpectrumRequest req;
    req.k = opts.k;
    req.tol = opts.tol;
    req.max_iter = opts.max_iter;
    req.seed = opts.seed;
    return eig_lowest(op, req);
}

struct SpectrumComparison {
    double max_abs_deviation = 0.0;
    double max_gap_error = 0.0;
    bool pass = false;
    double tol = kSpectrumTol;
};

// Sorted-multiset comparison; shift is added to b before comparing.
inline SpectrumComparison compare_spectra(const std::vector<double>& a,
                                          const std::vector<double>& b, double shift_b = 0.0,
                                          double tol = kSpectrumTol) {
    if (a.size() != b.size()) throw DimMismatch("spectra have different lengths");
    SpectrumComparison c;
    c.tol = tol;
    for (size_t i = 0; i < a.size(); ++i)
        c.max_abs_deviation = std::max(c.max_abs_deviation, std::abs(a[i] - (b[i] + shift_b)));
    for (size_t i = 0; i + 1 < a.size(); ++i) {
        const double ga = a[i + 1] - a[i];
        const double gb = b[i + 1] - b[i];
        c.max_gap_error = std::max(c.max_gap_error, std::abs(ga - gb));
    }
    c.pass = c.max_abs_deviation < tol;
    return c;
}

} // namespace lgt
