#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include "leakbf/errors.hpp"

namespace leakbf {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Dense complex matrix, row-major. Sized for the small fixed dimensions of
/// this problem family (antennas/users), not for general linear algebra.
class CMat {
public:
    CMat() = default;

    CMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cplx{0.0, 0.0}) {
        if (rows == 0 || cols == 0)
            throw InvalidInputError("CMat: dimensions must be positive");
    }

    static CMat identity(std::size_t n) {
        CMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    CVec row(std::size_t i) const {
        return CVec(a_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                    a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
    }

    CVec col(std::size_t j) const {
        CVec v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

inline CMat adjoint(const CMat& m) {
    CMat r(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = std::conj(m(i, j));
    return r;
}

inline CMat matmul(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw InvalidInputError("matmul: dimension mismatch");
    CMat r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

inline double frobenius_norm(const CMat& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

// --- vector helpers -------------------------------------------------------

inline double norm2(const CVec& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return s;
}

inline double norm(const CVec& v) { return std::sqrt(norm2(v)); }

/// a b^H = sum_i a_i conj(b_i)
inline cplx inner_conj(const CVec& a, const CVec& b) {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

/// Row vector times column vector, no conjugation: sum_i h_i w_i.
inline cplx row_times_col(const CVec& h, const CVec& w) {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * w[i];
    return s;
}

inline CVec scaled(const CVec& v, cplx s) {
    CVec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] * s;
    return r;
}

inline CVec normalized(const CVec& v) {
    double n = norm(v);
    if (n <= 0.0) throw InvalidInputError("normalized: zero vector");
    return scaled(v, cplx{1.0 / n, 0.0});
}

// --- Hermitian matrices ----------------------------------------------------

/// Hermitian matrix of small dimension. Construction symmetrizes the input and
/// rejects matrices that are not Hermitian to within 1e-12 relative.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(std::size_t dim) : n_(dim), a_(dim * dim, cplx{}) {
        if (dim == 0) throw InvalidInputError("HermitianMatrix: dim must be positive");
    }

    static HermitianMatrix from_matrix(const CMat& m, double rel_tol = 1e-12) {
        if (m.rows() != m.cols()) throw InvalidInputError("HermitianMatrix: not square");
        double scale = frobenius_norm(m);
        double tol = rel_tol * std::max(scale, 1e-300);
        HermitianMatrix h(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = i; j < m.cols(); ++j) {
                cplx upper = m(i, j);
                cplx lower = std::conj(m(j, i));
                if (std::abs(upper - lower) > tol)
                    throw InvalidInputError("HermitianMatrix: input not Hermitian within tolerance");
                cplx v = 0.5 * (upper + lower);
                if (i == j) v = cplx{v.real(), 0.0};
                h.set(i, j, v);
            }
        }
        return h;
    }

    static HermitianMatrix identity(std::size_t n) {
        HermitianMatrix h(n);
        for (std::size_t i = 0; i < n; ++i) h.set(i, i, 1.0);
        return h;
    }

    static HermitianMatrix zero(std::size_t n) { return HermitianMatrix(n); }

    /// v v^H for a length-n vector (v as column).
    static HermitianMatrix outer_self(const CVec& v) {
        HermitianMatrix h(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i; j < v.size(); ++j) h.set(i, j, v[i] * std::conj(v[j]));
        return h;
    }

    std::size_t dim() const { return n_; }

    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    /// Assign entry (i, j) with j >= i; the mirror entry follows.
    void set(std::size_t i, std::size_t j, cplx v) {
        if (i == j) v = cplx{v.real(), 0.0};
        a_[i * n_ + j] = v;
        a_[j * n_ + i] = std::conj(v);
    }

    void add_scaled(const HermitianMatrix& other, double s) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i; j < n_; ++j) set(i, j, (*this)(i, j) + s * other(i, j));
    }

    void scale(double s) {
        for (auto& x : a_) x *= s;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < n_; ++i) t += a_[i * n_ + i].real();
        return t;
    }

    /// w^H A w; real for Hermitian A.
    double quad_form(const CVec& w) const {
        cplx s{0.0, 0.0};
        for (std::size_t i = 0; i < n_; ++i) {
            cplx row{0.0, 0.0};
            for (std::size_t j = 0; j < n_; ++j) row += (*this)(i, j) * w[j];
            s += std::conj(w[i]) * row;
        }
        return s.real();
    }

    CMat to_matrix() const {
        CMat m(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    double frob_norm() const {
        double s = 0.0;
        for (const auto& x : a_) s += std::norm(x);
        return std::sqrt(s);
    }

private:
    std::size_t n_ = 0;
    std::vector<cplx> a_;
};

/// tr(A B) for Hermitian A, B (real by symmetry).
inline double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) s += a(i, j) * b(j, i);
    return s.real();
}

/// A w for Hermitian A and column vector w.
inline CVec matvec(const HermitianMatrix& a, const CVec& w) {
    CVec r(a.dim(), cplx{});
    for (std::size_t i = 0; i < a.dim(); ++i) {
        cplx s{0.0, 0.0};
        for (std::size_t j = 0; j < a.dim(); ++j) s += a(i, j) * w[j];
        r[i] = s;
    }
    return r;
}

namespace detail {

/// Dense real symmetric matrix in a flat vector, used by the Jacobi
/// eigensolver and the SDP barrier (real embedding of Hermitian problems).
struct RSym {
    std::size_t n = 0;
    std::vector<double> a; // row-major n x n, kept symmetric

    RSym() = default;
    explicit RSym(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

struct JacobiResult {
    std::vector<double> values;      // descending
    std::vector<double> vectors;     // column-major: vectors[i + n*k] = component i of k-th
    std::size_t n = 0;

    double vec(std::size_t i, std::size_t k) const { return vectors[i + n * k]; }
};

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
/// Accuracy ~ machine epsilon times the norm; fine for n <= 32.
inline JacobiResult jacobi_eigh(RSym m) {
    const std::size_t n = m.n;
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i + n * i] = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += m.at(i, j) * m.at(i, j);
        return std::sqrt(2.0 * s);
    };

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(m.at(i, j)));
    if (scale == 0.0) scale = 1.0;

    const double tol = 1e-15 * scale * static_cast<double>(n);
    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = m.at(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                double app = m.at(p, p), aqq = m.at(q, q);
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    double mip = m.at(i, p), miq = m.at(i, q);
                    m.at(i, p) = c * mip - s * miq;
                    m.at(i, q) = s * mip + c * miq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    double mpj = m.at(p, j), mqj = m.at(q, j);
                    m.at(p, j) = c * mpj - s * mqj;
                    m.at(q, j) = s * mpj + c * mqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double vip = v[i + n * p], viq = v[i + n * q];
                    v[i + n * p] = c * vip - s * viq;
                    v[i + n * q] = s * vip + c * viq;
                }
            }
        }
    }

    JacobiResult r;
    r.n = n;
    r.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.values[i] = m.at(i, i);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return r.values[a] > r.values[b]; });

    JacobiResult sorted;
    sorted.n = n;
    sorted.values.resize(n);
    sorted.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted.values[k] = r.values[order[k]];
        for (std::size_t i = 0; i < n; ++i) sorted.vectors[i + n * k] = v[i + n * order[k]];
    }
    return sorted;
}

/// Real symmetric embedding of a Hermitian matrix:
/// Q = X + iY  ->  [[X, -Y], [Y, X]], symmetric 2n x 2n.
inline RSym embed_hermitian(const HermitianMatrix& q) {
    const std::size_t n = q.dim();
    RSym r(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double re = q(i, j).real(), im = q(i, j).imag();
            r.at(i, j) = re;
            r.at(i + n, j + n) = re;
            r.at(i, j + n) = -im;
            r.at(i + n, j) = im;
        }
    }
    return r;
}

} // namespace detail

struct HermitianEig {
    std::vector<double> eigenvalues; // descending
    CMat eigenvectors;               // columns, orthonormal
};

/// Eigendecomposition of a Hermitian matrix via the real symmetric embedding.
/// The embedded spectrum doubles; eigenvalues appear in pairs and the complex
/// basis is recovered by deduplicating real eigenvectors (a pair's partner
/// maps to i times the same complex vector).
inline HermitianEig eig_hermitian(const HermitianMatrix& a) {
    const std::size_t n = a.dim();
    detail::JacobiResult jr = detail::jacobi_eigh(detail::embed_hermitian(a));

    double scale = 0.0;
    for (double v : jr.values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;

    HermitianEig out;
    out.eigenvectors = CMat(n, n);
    std::vector<CVec> accepted;
    for (std::size_t k = 0; k < 2 * n && accepted.size() < n; ++k) {
        CVec cand(n);
        for (std::size_t i = 0; i < n; ++i)
            cand[i] = cplx{jr.vec(i, k), jr.vec(i + n, k)};
        // Project out previously accepted vectors of the same eigenvalue cluster.
        for (std::size_t m = 0; m < accepted.size(); ++m) {
            if (std::abs(out.eigenvalues[m] - jr.values[k]) > 1e-8 * scale) continue;
            cplx c = inner_conj(cand, accepted[m]);
            for (std::size_t i = 0; i < n; ++i) cand[i] -= c * accepted[m][i];
        }
        double nn = norm(cand);
        if (nn < 0.5) continue; // J-partner of an accepted vector
        for (auto& x : cand) x /= nn;
        out.eigenvalues.push_back(jr.values[k]);
        accepted.push_back(cand);
    }
    if (accepted.size() != n)
        throw SolverNumericError("eig_hermitian: failed to extract a full complex basis");
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = accepted[k][i];
    return out;
}

/// Validating wrapper: accepts a general square matrix, checks Hermitian-ness.
inline HermitianEig eig_hermitian(const CMat& a, double rel_tol = 1e-9) {
    return eig_hermitian(HermitianMatrix::from_matrix(a, rel_tol));
}

/// Moore-Penrose pseudo-inverse of a full-row-rank K x N matrix (K <= N):
/// A^dagger = A^H (A A^H)^{-1}, with the Gram inverse from the Hermitian
/// eigendecomposition. Rank deficiency raises SingularMatrixError.
inline CMat pseudo_inverse(const CMat& a) {
    if (a.rows() > a.cols())
        throw InvalidInputError("pseudo_inverse: expects K x N with K <= N");
    CMat gram = matmul(a, adjoint(a)); // K x K Hermitian PSD
    HermitianEig eig = eig_hermitian(HermitianMatrix::from_matrix(gram, 1e-9));
    double lmax = eig.eigenvalues.front();
    if (lmax <= 0.0 || eig.eigenvalues.back() < 1e-12 * lmax)
        throw SingularMatrixError("pseudo_inverse: matrix is rank deficient");

    const std::size_t k = a.rows();
    CMat gram_inv(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            cplx s{0.0, 0.0};
            for (std::size_t m = 0; m < k; ++m)
                s += eig.eigenvectors(i, m) * std::conj(eig.eigenvectors(j, m)) / eig.eigenvalues[m];
            gram_inv(i, j) = s;
        }
    return matmul(adjoint(a), gram_inv);
}

/// Orthonormal basis (as column vectors) of the eigenspace of A with
/// eigenvalues <= rel_tol * |lambda|_max. May be empty.
inline std::vector<CVec> null_space_basis(const HermitianMatrix& a, double rel_tol = 1e-10) {
    HermitianEig eig = eig_hermitian(a);
    double lmax = 0.0;
    for (double v : eig.eigenvalues) lmax = std::max(lmax, std::abs(v));
    double tol = rel_tol * std::max(lmax, 1e-300);
    std::vector<CVec> basis;
    for (std::size_t k = 0; k < a.dim(); ++k) {
        if (std::abs(eig.eigenvalues[k]) > tol) continue;
        basis.push_back(eig.eigenvectors.col(k));
    }
    return basis;
}

} // namespace leakbf
