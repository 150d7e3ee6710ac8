#include <gtest/gtest.h>

#include "poptsim/matrix.hpp"
#include "poptsim/povm.hpp"
#include "poptsim/rng.hpp"

namespace poptsim {
namespace {

Matrix diag2(double a, double b) {
  Matrix m(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// SWAP assembled entry by entry, independent of any library constructor.
Matrix swap_matrix(int d) {
  Matrix s(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s(i * d + j, j * d + i) = 1.0;
  return s;
}

TEST(Kron, IdentityTimesIdentity) {
  EXPECT_EQ(max_abs_diff(kron(Matrix::identity(2), Matrix::identity(2)), Matrix::identity(4)),
            0.0);
}

TEST(Kron, DiagonalProduct) {
  const Matrix k = kron(diag2(1.0, 2.0), diag2(3.0, 4.0));
  Matrix expected(4, 4);
  expected(0, 0) = 3.0;
  expected(1, 1) = 4.0;
  expected(2, 2) = 6.0;
  expected(3, 3) = 8.0;
  EXPECT_EQ(max_abs_diff(k, expected), 0.0);
}

TEST(Kron, PauliXTimesPauliZ) {
  // expanding the block definition by hand: block (0,1) of sigma_x (x) sigma_z
  // is +sigma_z, block (1,0) is +sigma_z
  const Matrix k = kron(pauli_x(), pauli_z());
  EXPECT_EQ(k(0, 2), Complex(1.0, 0.0));
  EXPECT_EQ(k(1, 3), Complex(-1.0, 0.0));
  EXPECT_EQ(k(0, 0), Complex(0.0, 0.0));
  EXPECT_EQ(k(2, 0), Complex(1.0, 0.0));
}

TEST(Kron, MixedProductProperty) {
  for (int d : {2, 3}) {
    Rng rng(901 + d);
    for (int rep = 0; rep < 20; ++rep) {
      const Matrix a = random_gaussian_matrix(d, d, rng);
      const Matrix b = random_gaussian_matrix(d, d, rng);
      const Matrix c = random_gaussian_matrix(d, d, rng);
      const Matrix e = random_gaussian_matrix(d, d, rng);
      EXPECT_LT(max_abs_diff(kron(a, b) * kron(c, e), kron(a * c, b * e)), 1e-10);
    }
  }
}

TEST(PartialTrace, ProductStates) {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_hermitian(2, rng);
    const Matrix b = random_hermitian(3, rng);
    const Matrix w = kron(a, b);
    EXPECT_LT(max_abs_diff(partial_trace(w, 2, 3, Side::kB), a * b.trace()), 1e-12);
    EXPECT_LT(max_abs_diff(partial_trace(w, 2, 3, Side::kA), b * a.trace()), 1e-12);
  }
}

TEST(PartialTrace, MaxEntangledMarginalIsMaximallyMixed) {
  for (int d : {2, 3, 4}) {
    const Vector phi = max_entangled(d);
    const Matrix proj = outer(phi, phi);
    const Matrix expected = Matrix::identity(d) / Complex(static_cast<double>(d), 0.0);
    EXPECT_LT(max_abs_diff(partial_trace(proj, d, d, Side::kB), expected), 1e-14);
    EXPECT_LT(max_abs_diff(partial_trace(proj, d, d, Side::kA), expected), 1e-14);
  }
}

TEST(PartialTrace, SwapMarginal) {
  // brute-force entry computation at d=2: tr_A(SWAP/2) = I/2
  const Matrix w = swap_matrix(2) * Complex(0.5, 0.0);
  EXPECT_LT(max_abs_diff(partial_trace(w, 2, 2, Side::kA),
                         Matrix::identity(2) * Complex(0.5, 0.0)),
            1e-14);
}

TEST(PartialTrace, LinearAndTracePreserving) {
  Rng rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix u = random_gaussian_matrix(6, 6, rng);
    const Matrix v = random_gaussian_matrix(6, 6, rng);
    const Complex c1(rng.gaussian(), rng.gaussian());
    const Matrix lhs = partial_trace(u * c1 + v, 2, 3, Side::kB);
    const Matrix rhs = partial_trace(u, 2, 3, Side::kB) * c1 + partial_trace(v, 2, 3, Side::kB);
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12);
    EXPECT_LT(std::abs(partial_trace(u, 2, 3, Side::kA).trace() - u.trace()), 1e-12);
  }
}

TEST(MaxEntangled, QubitAmplitudes) {
  const Vector phi = max_entangled(2);
  const double amp = 1.0 / std::sqrt(2.0);
  EXPECT_DOUBLE_EQ(phi[0].real(), amp);
  EXPECT_EQ(phi[1], Complex(0.0, 0.0));
  EXPECT_EQ(phi[2], Complex(0.0, 0.0));
  EXPECT_DOUBLE_EQ(phi[3].real(), amp);
}

TEST(MaxEntangled, UnitNorm) {
  for (int d = 2; d <= 6; ++d) EXPECT_NEAR(vnorm(max_entangled(d)), 1.0, 1e-14);
}

TEST(MaxEntangled, RippleIdentity) {
  // (A (x) 1) |Phi> = (1 (x) A^T) |Phi>
  for (int d : {2, 3, 4}) {
    Rng rng(700 + d);
    const Vector phi = max_entangled(d);
    for (int rep = 0; rep < 100; ++rep) {
      const Matrix a = random_gaussian_matrix(d, d, rng);
      const Vector lhs = mat_vec(kron(a, Matrix::identity(d)), phi);
      const Vector rhs = mat_vec(kron(Matrix::identity(d), a.transpose()), phi);
      double worst = 0.0;
      for (std::size_t k = 0; k < lhs.size(); ++k) {
        worst = std::max(worst, std::abs(lhs[k] - rhs[k]));
      }
      EXPECT_LT(worst, 1e-12);
    }
  }
}

TEST(PartialTranspose, MaxEntangledGivesSwap) {
  const Vector phi = max_entangled(2);
  const Matrix pt = partial_transpose_bob(outer(phi, phi), 2, 2);
  EXPECT_LT(max_abs_diff(pt, swap_matrix(2) * Complex(0.5, 0.0)), 1e-14);
}

TEST(ProductExpectation, MatchesKronRoute) {
  Rng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix w = random_hermitian(6, rng);
    const Matrix q = random_hermitian(2, rng);
    const Matrix r = random_hermitian(3, rng);
    const Complex direct = product_expectation(w, 2, 3, q, r);
    const Complex via_kron = (kron(q, r) * w).trace();
    EXPECT_LT(std::abs(direct - via_kron), 1e-11);
  }
}

TEST(Contractions, MatchDefinitions) {
  Rng rng(14);
  const Matrix w = random_hermitian(6, rng);
  const Vector alpha = random_unit_vector(2, rng);
  const Vector beta = random_unit_vector(3, rng);
  const Vector prod = kron(alpha, beta);
  const Complex direct = vdot(prod, mat_vec(w, prod));
  const Matrix kb = contract_bob(w, 2, 3, beta);
  const Matrix ka = contract_alice(w, 2, 3, alpha);
  EXPECT_LT(std::abs(vdot(alpha, mat_vec(kb, alpha)) - direct), 1e-12);
  EXPECT_LT(std::abs(vdot(beta, mat_vec(ka, beta)) - direct), 1e-12);
  EXPECT_LT(kb.hermiticity_error(), 1e-13);
  EXPECT_LT(ka.hermiticity_error(), 1e-13);
}

TEST(Contractions, ConditionalOperatorsMatchKronRoute) {
  Rng rng(15);
  const Matrix sigma = random_density(4, rng);
  const Matrix q = random_hermitian(2, rng);
  const Matrix r = random_hermitian(2, rng);
  const Matrix lhs = conditional_alice(sigma, 2, 2, r);
  const Matrix rhs = partial_trace(kron(Matrix::identity(2), r) * sigma, 2, 2, Side::kB);
  EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12);
  const Matrix lhs_b = conditional_bob(sigma, 2, 2, q);
  const Matrix rhs_b = partial_trace(kron(q, Matrix::identity(2)) * sigma, 2, 2, Side::kA);
  EXPECT_LT(max_abs_diff(lhs_b, rhs_b), 1e-12);
}

TEST(HermitianBasis, Orthonormal) {
  for (int n : {2, 3, 4}) {
    const auto basis = hermitian_basis(n);
    ASSERT_EQ(static_cast<int>(basis.size()), n * n);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      EXPECT_LT(basis[i].hermiticity_error(), 1e-15);
      for (std::size_t j = i; j < basis.size(); ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        EXPECT_NEAR((basis[i] * basis[j]).trace().real(), expected, 1e-14);
      }
    }
  }
}

TEST(Matrix, ShapeMismatchThrows) {
  EXPECT_THROW(Matrix(2, 2) + Matrix(3, 3), DimensionError);
  EXPECT_THROW(Matrix(2, 3).trace(), DimensionError);
  EXPECT_THROW(partial_trace(Matrix::identity(4), 3, 2, Side::kA), DimensionError);
}

}  // namespace
}  // namespace poptsim
