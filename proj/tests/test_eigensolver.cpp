#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "rmtclt/eigensolver.hpp"
#include "rmtclt/ensemble.hpp"
#include "rmtclt/spectral.hpp"

using namespace rmtclt;

namespace {

SymMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  SymMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void expect_values(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "index " << i;
}

}  // namespace

TEST(Eigensolver, Diagonal) {
  expect_values(symmetric_eigenvalues(from_rows({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}})), {1, 2, 3}, 0.0);
}

TEST(Eigensolver, TwoByTwoSwap) {
  expect_values(symmetric_eigenvalues(from_rows({{0, 1}, {1, 0}})), {-1, 1}, 1e-15);
}

TEST(Eigensolver, SecondDifferenceMatrix) {
  // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(k pi / (n + 1))
  const std::size_t n = 40;
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 2.0;
    if (i + 1 < n) m.set_symmetric(i, i + 1, -1.0);
  }
  std::vector<double> want(n);
  for (std::size_t k = 1; k <= n; ++k) want[k - 1] = 2.0 - 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / (n + 1.0));
  expect_values(symmetric_eigenvalues(m), want, 1e-13);
}

TEST(Eigensolver, AllOnesMatrix) {
  const std::size_t n = 25;
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = 1.0;
  std::vector<double> want(n, 0.0);
  want.back() = static_cast<double>(n);
  expect_values(symmetric_eigenvalues(m), want, 1e-12);
}

TEST(Eigensolver, DenseThreeByThree) {
  // [[2,1,1],[1,2,1],[1,1,2]] = I + J: eigenvalues 1, 1, 4
  expect_values(symmetric_eigenvalues(from_rows({{2, 1, 1}, {1, 2, 1}, {1, 1, 2}})), {1, 1, 4}, 1e-14);
}

TEST(Eigensolver, EmptyAndScalar) {
  EXPECT_TRUE(symmetric_eigenvalues(SymMatrix(0)).empty());
  SymMatrix one(1);
  one(0, 0) = -3.5;
  expect_values(symmetric_eigenvalues(one), {-3.5}, 0.0);
}

TEST(Eigensolver, MatchesEigenOnRandomMatrices) {
  for (auto kind : {EnsembleKind::Wigner, EnsembleKind::SampleCovariance}) {
    EnsembleSpec spec;
    spec.kind = kind;
    spec.n = 150;
    spec.seed = 99;
    if (kind == EnsembleKind::SampleCovariance) spec.c = 1.5;
    auto shared = std::make_shared<const EnsembleSpec>(spec);
    for (std::uint32_t r = 0; r < 3; ++r) {
      const MatrixSample s = sample_matrix(shared, r);
      Eigen::MatrixXd a(spec.n, spec.n);
      for (std::size_t i = 0; i < spec.n; ++i)
        for (std::size_t j = 0; j < spec.n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s.matrix(i, j);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(a, Eigen::EigenvaluesOnly);
      ASSERT_EQ(oracle.info(), Eigen::Success);
      const std::vector<double> got = symmetric_eigenvalues(s.matrix);
      const double scale = std::max(std::abs(got.front()), std::abs(got.back()));
      for (std::size_t i = 0; i < spec.n; ++i)
        EXPECT_NEAR(got[i], oracle.eigenvalues()(static_cast<Eigen::Index>(i)), 1e-12 * scale);
    }
  }
}

TEST(Eigensolver, IterationCapRaisesWithReplicate) {
  const MatrixSample s = sample_wigner(
      [] {
        EnsembleSpec e;
        e.n = 30;
        e.seed = 5;
        return e;
      }(),
      17);
  QlOptions opt;
  opt.sweeps_per_row = 0;
  EXPECT_FALSE(tridiagonal_eigenvalues(tridiagonalize(s.matrix), opt).has_value());
  try {
    (void)symmetric_eigenvalues(s.matrix, 5, 17, opt);
    FAIL() << "no exception";
  } catch (const EigensolverFailure& e) {
    EXPECT_EQ(e.seed(), 5u);
    EXPECT_EQ(e.replicate(), 17);
    EXPECT_TRUE(e.is_numeric());
  }
}

TEST(Eigensolver, TridiagonalizationPreservesTraces) {
  EnsembleSpec e;
  e.n = 80;
  e.seed = 21;
  const MatrixSample s = sample_wigner(e, 0);
  const Tridiagonal t = tridiagonalize(s.matrix);
  double tr = 0.0, tr2 = 0.0;
  for (double d : t.diag) {
    tr += d;
    tr2 += d * d;
  }
  for (double o : t.offdiag) tr2 += 2.0 * o * o;
  EXPECT_NEAR(tr, s.matrix.trace(), 1e-12 * 80);
  EXPECT_NEAR(tr2, s.matrix.trace_square(), 1e-11 * 80);
}
