#include <gtest/gtest.h>

#include <cmath>

#include "leakbf/linalg.hpp"
#include "leakbf/rng.hpp"

using namespace leakbf;

namespace {

HermitianMatrix random_hermitian(std::size_t n, StreamRng& rng) {
    HermitianMatrix h(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (i == j)
                h.set(i, j, cplx{2.0 * rng.uniform() - 1.0, 0.0});
            else
                h.set(i, j, cplx{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0});
        }
    }
    return h;
}

CMat random_full_rank(std::size_t k, std::size_t n, StreamRng& rng) {
    CMat a(k, n);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.complex_gaussian();
    return a;
}

double reconstruction_residual(const HermitianMatrix& a, const HermitianEig& e) {
    const std::size_t n = a.dim();
    CMat recon(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                recon(i, j) += e.eigenvalues[k] * e.eigenvectors(i, k) *
                               std::conj(e.eigenvectors(j, k));
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) num += std::norm(recon(i, j) - a(i, j));
    double den = a.frob_norm();
    return std::sqrt(num) / std::max(den, 1e-30);
}

} // namespace

TEST(HermitianEigTest, IdentityHasUnitEigenvalues) {
    auto e = eig_hermitian(HermitianMatrix::identity(3));
    ASSERT_EQ(e.eigenvalues.size(), 3u);
    for (double v : e.eigenvalues) EXPECT_NEAR(v, 1.0, 1e-12);
    // basis must still be orthonormal
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            cplx d = inner_conj(e.eigenvectors.col(i), e.eigenvectors.col(j));
            EXPECT_NEAR(std::abs(d), i == j ? 1.0 : 0.0, 1e-9);
        }
}

TEST(HermitianEigTest, DiagonalSortedDescending) {
    HermitianMatrix h(3);
    h.set(0, 0, 3.0);
    h.set(1, 1, 1.0);
    h.set(2, 2, 2.0);
    auto e = eig_hermitian(h);
    EXPECT_NEAR(e.eigenvalues[0], 3.0, 1e-12);
    EXPECT_NEAR(e.eigenvalues[1], 2.0, 1e-12);
    EXPECT_NEAR(e.eigenvalues[2], 1.0, 1e-12);
    EXPECT_NEAR(std::abs(e.eigenvectors(0, 0)), 1.0, 1e-9);
    EXPECT_NEAR(std::abs(e.eigenvectors(2, 1)), 1.0, 1e-9);
    EXPECT_NEAR(std::abs(e.eigenvectors(1, 2)), 1.0, 1e-9);
}

TEST(HermitianEigTest, RandomReconstruction4x4) {
    auto rng = StreamRng::keyed(7, 0, 0, RngPurpose::generic);
    HermitianMatrix h = random_hermitian(4, rng);
    auto e = eig_hermitian(h);
    EXPECT_LT(reconstruction_residual(h, e), 1e-9);
}

TEST(HermitianEigTest, ReconstructionPropertyAcrossDims) {
    auto rng = StreamRng::keyed(11, 0, 0, RngPurpose::generic);
    for (int rep = 0; rep < 1000; ++rep) {
        std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 7); // 2..8
        HermitianMatrix h = random_hermitian(n, rng);
        auto e = eig_hermitian(h);
        ASSERT_LT(reconstruction_residual(h, e), 1e-9);
        // eigenvector residual ||A v - lambda v||
        double scale = h.frob_norm();
        for (std::size_t k = 0; k < n; ++k) {
            CVec v = e.eigenvectors.col(k);
            CVec av = matvec(h, v);
            double res = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                res += std::norm(av[i] - e.eigenvalues[k] * v[i]);
            ASSERT_LT(std::sqrt(res), 1e-9 * std::max(scale, 1.0));
        }
    }
}

TEST(HermitianEigTest, RejectsNonHermitianInput) {
    CMat m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = cplx{1.0, 2.0};
    m(1, 0) = cplx{1.0, 2.0}; // should be the conjugate
    m(1, 1) = 1.0;
    EXPECT_THROW(eig_hermitian(m), InvalidInputError);
}

TEST(PseudoInverseTest, IdentityAndUnitary) {
    CMat id = CMat::identity(4);
    CMat pinv = pseudo_inverse(id);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            EXPECT_NEAR(std::abs(pinv(i, j) - id(i, j)), 0.0, 1e-10);

    // DFT matrix scaled to unitary: pinv must equal the adjoint
    const std::size_t n = 4;
    CMat u(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double a = -2.0 * M_PI * static_cast<double>(i * j) / static_cast<double>(n);
            u(i, j) = cplx{std::cos(a), std::sin(a)} / std::sqrt(static_cast<double>(n));
        }
    CMat uh = adjoint(u);
    CMat up = pseudo_inverse(u);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            EXPECT_NEAR(std::abs(up(i, j) - uh(i, j)), 0.0, 1e-9);
}

TEST(PseudoInverseTest, ResidualPropertyRandomWide) {
    auto rng = StreamRng::keyed(23, 0, 0, RngPurpose::generic);
    for (int rep = 0; rep < 300; ++rep) {
        std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 7);
        std::size_t k = 1 + static_cast<std::size_t>(rng.next_u64() % n);
        CMat a = random_full_rank(k, n, rng);
        CMat p = pseudo_inverse(a);
        CMat prod = matmul(a, p);
        double res = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                res += std::norm(prod(i, j) - (i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0}));
        ASSERT_LT(std::sqrt(res), 1e-9);
    }
}

TEST(PseudoInverseTest, RankDeficientThrows) {
    CMat a(2, 3);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(0, 2) = cplx{0.0, 1.0};
    for (std::size_t j = 0; j < 3; ++j) a(1, j) = 2.0 * a(0, j);
    EXPECT_THROW(pseudo_inverse(a), SingularMatrixError);
}

TEST(LinalgTest, HermitianValidationTolerance) {
    CMat m(2, 2);
    m(0, 0) = 5.0;
    m(0, 1) = cplx{1.0, 1.0};
    m(1, 0) = std::conj(cplx{1.0, 1.0}) + cplx{1e-15, 0};
    m(1, 1) = 3.0;
    EXPECT_NO_THROW(HermitianMatrix::from_matrix(m));
}

TEST(LinalgTest, NullSpaceOfProjector) {
    // rank-1 projector on e0 in C^3: nullspace has dim 2
    CVec v{cplx{1.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}};
    auto basis = null_space_basis(HermitianMatrix::outer_self(v));
    ASSERT_EQ(basis.size(), 2u);
    for (const auto& b : basis) {
        EXPECT_NEAR(std::abs(b[0]), 0.0, 1e-10);
        EXPECT_NEAR(norm(b), 1.0, 1e-10);
    }
}
