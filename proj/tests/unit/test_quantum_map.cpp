#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "openmap/errors.hpp"
#include "openmap/quantum_map.hpp"

using namespace openmap;

namespace {

ComplexVector random_state(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v.normalized();
}

// Shifted DFT written out entry by entry, without phase reduction.
Complex dft_entry(int n, int row, int col) {
  const double phase = -2.0 * std::numbers::pi * (row + 0.5) * (col + 0.5) / n;
  return std::polar(1.0 / std::sqrt(static_cast<double>(n)), phase);
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Dft, MatchesEntrywiseDefinition) {
  for (int n : {3, 9, 27}) {
    const ComplexMatrix f = dft_matrix(n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) EXPECT_NEAR(std::abs(f(r, c) - dft_entry(n, r, c)), 0.0, 1e-13);
    }
  }
}

TEST(Dft, IsUnitaryAndSymmetric) {
  const ComplexMatrix f = dft_matrix(81);
  EXPECT_LT(max_abs(f.adjoint() * f - ComplexMatrix::Identity(81, 81)), 1e-13);
  EXPECT_LT(max_abs(f - f.transpose()), 1e-15);
}

TEST(Dft, FastTransformAgreesWithMatrix) {
  for (int n : {9, 81, 243}) {
    const ComplexVector v = random_state(n, 3);
    EXPECT_LT((dft_matrix(n) * v - momentum_transform(v)).norm(), 1e-12) << "N=" << n;
    EXPECT_LT((inverse_momentum_transform(momentum_transform(v)) - v).norm(), 1e-12);
  }
}

TEST(Dft, RejectsEmptyInput) {
  EXPECT_THROW(dft_matrix(0), ValidationError);
  EXPECT_THROW(momentum_transform(ComplexVector()), ValidationError);
}

TEST(BakerUnitary, IsUnitary) {
  for (int n : {3, 27, 243}) {
    const ComplexMatrix u = baker_unitary(n);
    EXPECT_LT(max_abs(u.adjoint() * u - ComplexMatrix::Identity(n, n)), 1e-12) << "N=" << n;
  }
}

TEST(BakerUnitary, CommutesWithParity) {
  // The map is symmetric under (q, p) -> (1 - q, 1 - p); the shifted
  // grids make the reflection n -> N - 1 - n an exact symmetry.
  const int n = 81;
  ComplexMatrix parity = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) parity(i, n - 1 - i) = 1.0;
  const ComplexMatrix u = baker_unitary(n);
  EXPECT_LT(max_abs(parity * u - u * parity), 1e-12);
}

TEST(BakerUnitary, RequiresMultipleOfThree) {
  EXPECT_THROW(baker_unitary(10), ValidationError);
  EXPECT_THROW(baker_unitary(0), ValidationError);
  EXPECT_NO_THROW(baker_unitary(6));
}

TEST(Projectors, OpeningKeepsMiddleThird) {
  const auto p = opening_projector(27);
  ASSERT_EQ(p.trace(), 9);
  EXPECT_EQ(p.kept_indices().front(), 9);
  EXPECT_EQ(p.kept_indices().back(), 17);
  EXPECT_EQ(p.complement().trace(), 18);
}

TEST(Projectors, EscapeRegionsCountGridPoints) {
  // R_+^m holds 2^m intervals of 3^{k-m-1} grid points each.
  const int k = 6;
  const int n = 729;
  for (int m = 0; m < k; ++m) {
    EXPECT_EQ(escape_projector(m, n).trace(), (1 << m) * static_cast<int>(std::pow(3, k - m - 1)));
  }
  EXPECT_THROW(escape_projector(k, n), UnresolvedRegionError);
}

TEST(Projectors, EscapeRegionsPartitionWithSurvivors) {
  const int n = 243;
  std::vector<int> hits(n, 0);
  for (int m = 0; m < 5; ++m) {
    const auto proj = escape_projector(m, n);
    for (int i : proj.kept_indices()) ++hits[static_cast<std::size_t>(i)];
  }
  int survivors = 0;
  for (int h : hits) {
    EXPECT_LE(h, 1);
    survivors += h == 0 ? 1 : 0;
  }
  EXPECT_EQ(survivors, 32);  // grid points with five leading digits in {0, 2}
}

TEST(Projectors, MomentumStripsAreNotDiagonal) {
  EXPECT_THROW(projector_for_region(region_r_minus(1), 27), ValidationError);
}

TEST(Projectors, DiagonalProjectorValidation) {
  EXPECT_THROW(DiagonalProjector(0, {}), ValidationError);
  EXPECT_THROW(DiagonalProjector(3, {3}), ValidationError);
  const DiagonalProjector p(4, {2, 0, 2});
  EXPECT_EQ(p.trace(), 2);
  EXPECT_TRUE(p.keeps(0));
  EXPECT_FALSE(p.keeps(1));
  EXPECT_THROW(p.apply(ComplexVector::Ones(3)), ValidationError);
  EXPECT_LT(max_abs(p.matrix() * p.matrix() - p.matrix()), 1e-15);
}

TEST(OpenMap, SatisfiesIdentityAndHasRankTwoThirds) {
  for (int n : {27, 81, 243}) {
    const ComplexMatrix u = open_propagator(n);
    const ComplexMatrix expected = ComplexMatrix::Identity(n, n) - opening_projector(n).matrix();
    EXPECT_LT(max_abs(u.adjoint() * u - expected), 1e-12);
    Eigen::JacobiSVD<ComplexMatrix> svd(u);
    svd.setThreshold(1e-10);
    EXPECT_EQ(svd.rank(), 2 * n / 3);
  }
}

TEST(OpenMap, CustomOpeningAndMismatch) {
  const QuantizationConfig cfg{27, region_r_plus(1)};
  const ComplexMatrix u = open_propagator(cfg);
  const auto closed_cols = escape_projector(1, 27);
  for (int c : closed_cols.kept_indices()) EXPECT_EQ(u.col(c).norm(), 0.0);
  EXPECT_THROW(open_propagator(baker_unitary(27), opening_projector(81)), ValidationError);
}
