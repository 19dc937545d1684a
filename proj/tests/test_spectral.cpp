#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "usvt/spectral.hpp"

using namespace usvt;
namespace ts = testing_support;
using std::numbers::pi;

TEST(EigenTail, ZeroMatrix) {
  const auto t = eigen_tail(Matrix::Zero(10, 10));
  ASSERT_EQ(t.tail.size(), 11);
  EXPECT_EQ(t.tail.cwiseAbs().maxCoeff(), 0.0);
}

TEST(EigenTail, RankOneWithZeroedDiagonal) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::Index n = 200;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = u(gen);
  Matrix m = v * v.transpose();
  m.diagonal().setZero();
  const auto t = eigen_tail(m);
  for (Eigen::Index r = 1; r <= n; ++r)
    ASSERT_LE(t(r), 1.0 / n);
}

TEST(EigenTail, SbmTailBelowDiagonalFloor) {
  const auto spec = GraphonSpec::sbm(random_block_matrix(4, 3));
  const auto m = edge_prob_matrix(spec, sample_latents(spec, 400, 5));
  EXPECT_LE(eigen_tail(m)(4), 1.0 / 400);
}

TEST(EigenTail, ProfileInvariants) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix m = ts::random_probability_matrix(gen, 60);
    const auto t = eigen_tail(m);
    const double n2 = 60.0 * 60.0;
    EXPECT_NEAR(t(0), m.squaredNorm() / n2, 1e-8 * m.squaredNorm() / n2);
    EXPECT_LE(t(0), 1.0);
    EXPECT_EQ(t(60), 0.0);
    for (Eigen::Index r = 1; r <= 60; ++r) {
      ASSERT_LE(t(r), t(r - 1));
      const double lam = t.eigenvalues[r - 1];
      ASSERT_NEAR(t(r - 1) - t(r), lam * lam / n2, 1e-10 * t(0));
    }
    for (Eigen::Index r = 1; r < 60; ++r)
      ASSERT_GE(std::abs(t.eigenvalues[r - 1]), std::abs(t.eigenvalues[r]));
    const auto oracle = ts::jacobi_singular_values(m);
    for (Eigen::Index r = 0; r < 60; ++r)
      ASSERT_NEAR(std::abs(t.eigenvalues[r]), oracle[static_cast<std::size_t>(r)], 1e-9);
  }
}

TEST(SpectralNormDeviation, ExactExpectationGivesZero) {
  Matrix m = Matrix::Ones(30, 30);
  m.diagonal().setZero();
  const auto g = sample_graph(EdgeProbabilityMatrix(m), 1.0, 1);
  EXPECT_EQ(spectral_norm_deviation(g, EdgeProbabilityMatrix(m), 1.0), 0.0);
}

TEST(SpectralNormDeviation, MatchesDenseOracle) {
  const auto spec = GraphonSpec::sobolev_min();
  const auto m = edge_prob_matrix(spec, sample_latents(spec, 300, 3));
  const auto g = sample_graph(m, 0.3, 4);
  const Matrix diff = g.dense() - 0.3 * m.matrix();
  const double oracle = ts::jacobi_singular_values(diff)[0];
  EXPECT_NEAR(spectral_norm_deviation(g, m, 0.3), oracle, 1e-6 * oracle);
}

TEST(SpectralNormDeviation, ErdosRenyiConcentration) {
  const Eigen::Index n = 1000;
  Matrix half = Matrix::Constant(n, n, 0.5);
  half.diagonal().setZero();
  const EdgeProbabilityMatrix m(half);
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    within += spectral_norm_deviation(sample_graph(m, 1.0, seed), m, 1.0) <= 3.0 * std::sqrt(n * 0.5);
  EXPECT_GE(within, 95);
}

TEST(OperatorSpectrum, TranslationAbsClosedForm) {
  EXPECT_NEAR(std::abs(translation_abs_fourier_coefficient(1)), 2.0 / (pi * pi), 1e-15);
  EXPECT_EQ(translation_abs_fourier_coefficient(2), 0.0);
  EXPECT_NEAR(std::abs(translation_abs_fourier_coefficient(3)), 2.0 / (9.0 * pi * pi), 1e-15);
  EXPECT_EQ(translation_abs_fourier_coefficient(0), 0.5);
}

TEST(OperatorSpectrum, TranslationAbsCoefficientMatchesQuadrature) {
  // h_hat[k] = (1/2) \int_{-1}^{1} |x| cos(pi k x) dx
  for (int k = 1; k <= 5; ++k) {
    const double q = 0.5 * quad::simpson([k](double x) { return std::abs(x) * std::cos(pi * k * x); }, -1.0, 1.0, 20000);
    EXPECT_NEAR(translation_abs_fourier_coefficient(k), q, 1e-9) << "k=" << k;
  }
}

TEST(OperatorSpectrum, TranslationAbsStructure) {
  const auto s = operator_spectrum_translation_abs(7);
  // constant, then (cos, sin) for k = 1, 3, 5, 7
  ASSERT_EQ(s.size(), 9);
  EXPECT_EQ(s.eigenvalues[0], 0.5);
  EXPECT_EQ(s.eigenvalues[1], s.eigenvalues[2]);
  for (Eigen::Index i = 1; i < s.size(); ++i)
    EXPECT_GE(std::abs(s.eigenvalues[i - 1]), std::abs(s.eigenvalues[i]));
  EXPECT_EQ(s.moments(0, 0), 1.0);
  EXPECT_EQ(s.moments(1, 1), 1.5);
  EXPECT_GE(s.moments.minCoeff(), 0.0);
  // Mercer expansion on the diagonal: h(0) = 0 = sum_k lambda_k phi_k(x)^2
  const auto big = operator_spectrum_translation_abs(1001);
  double diag = 0.0;
  for (Eigen::Index i = 0; i < big.size(); ++i) {
    const double phi = big.eigenfunctions[static_cast<std::size_t>(i)](0.3);
    diag += big.eigenvalues[i] * phi * phi;
  }
  EXPECT_NEAR(diag, 0.0, 1e-3);
}

TEST(OperatorSpectrum, MinKernelClosedForm) {
  EXPECT_NEAR(min_kernel_eigenvalue(1), 4.0 / (pi * pi), 1e-15);
  EXPECT_NEAR(min_kernel_eigenvalue(1), 0.4053, 1e-4);
  EXPECT_NEAR(min_kernel_eigenvalue(2), 0.04503, 1e-5);
  const auto s = operator_spectrum_min(5);
  EXPECT_EQ(s.size(), 5);
  EXPECT_EQ(s.eigenvalues[1], min_kernel_eigenvalue(2));
}

TEST(OperatorSpectrum, MinKernelQuadratureEigenCheck) {
  const auto s = operator_spectrum_min(1);
  const auto &phi = s.eigenfunctions[0];
  const double lambda = s.eigenvalues[0];
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    const double applied = quad::simpson([&](double y) { return std::min(x, y) * phi(y); }, 0.0, 1.0, 10000);
    worst = std::max(worst, std::abs(applied - lambda * phi(x)));
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(OperatorSpectrum, MomentsMatchQuadratureAndOrthonormality) {
  const auto s = operator_spectrum_min(4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const auto &fa = s.eigenfunctions[static_cast<std::size_t>(a)];
      const auto &fb = s.eigenfunctions[static_cast<std::size_t>(b)];
      const double inner = quad::simpson([&](double x) { return fa(x) * fb(x); }, 0.0, 1.0, 4000);
      EXPECT_NEAR(inner, a == b ? 1.0 : 0.0, 1e-10);
      const double m4 = quad::simpson([&](double x) { return fa(x) * fa(x) * fb(x) * fb(x); }, 0.0, 1.0, 4000);
      EXPECT_NEAR(s.moments(a, b), m4, 1e-9);
    }
  // E[phi_1^4] = 4 \int_0^1 sin^4(pi x / 2) dx = 1.5
  EXPECT_NEAR(quad::simpson([](double x) { return 4.0 * std::pow(std::sin(pi * x / 2.0), 4); }, 0.0, 1.0, 1000),
              1.5, 1e-12);
}

TEST(OperatorSpectrum, TotalSquareSumsMatchKernelNorms) {
  // ||f||^2 under the product measure
  // split the inner integral at the kink y = x
  const double min_norm = quad::simpson(
      [](double x) { return quad::simpson([](double y) { return y * y; }, 0.0, x, 2) + x * x * (1.0 - x); }, 0.0,
      1.0, 400);
  EXPECT_NEAR(operator_spectrum_min(1).total_square_sum, min_norm, 1e-8);
  double direct = 0.0;
  for (int k = 1; k <= 200000; ++k)
    direct += std::pow(min_kernel_eigenvalue(k), 2);
  EXPECT_NEAR(direct, 1.0 / 6.0, 1e-12);
  // |x| on [-1,1]: 1/4 + 2 * sum_{k odd} (2/(pi k)^2)^2 = 1/4 + (8/pi^4)(pi^4/96) = 1/3
  double abs_direct = 0.25;
  for (int k = 1; k <= 200001; k += 2)
    abs_direct += 2.0 * std::pow(2.0 / (pi * pi * k * k), 2);
  EXPECT_NEAR(operator_spectrum_translation_abs(1).total_square_sum, abs_direct, 1e-12);
}

TEST(ExpectedTailBound, Examples) {
  const auto s = operator_spectrum_min(20);
  EXPECT_NEAR(theorem6_bound(s, 0, 1000), 1.0 / 6.0, 1e-15);
  double tail = 0.0;
  for (int k = 2; k <= 400000; ++k)
    tail += std::pow(min_kernel_eigenvalue(k), 2);
  const double l1 = min_kernel_eigenvalue(1);
  EXPECT_NEAR(theorem6_bound(s, 1, 1000), tail + l1 * l1 * 1.5 / 1000.0, 1e-12);
  for (Eigen::Index r : {0, 3, 10})
    EXPECT_NEAR(theorem6_bound(s, r, 1000000000), theorem6_bound(s, r, 1000000000000000), 1e-6);
  EXPECT_THROW(theorem6_bound(s, 21, 1000), ValidationError);
}

TEST(DecayFit, ExactPowerLaw) {
  EigenTailProfile p;
  p.n = 200;
  p.tail = Vector::Zero(201);
  for (int r = 1; r < 200; ++r)
    p.tail[r] = std::pow(r, -3.0);
  const auto fit = decay_fit(p, 2, 50, 0.0);
  EXPECT_FALSE(fit.degenerate);
  EXPECT_NEAR(fit.beta_hat, 3.0, 1e-6);
  EXPECT_LE(fit.residual, 1e-9);
}

TEST(DecayFit, ExponentialOnLinearAxis) {
  EigenTailProfile p;
  p.n = 100;
  p.tail = Vector::Zero(101);
  for (int r = 1; r < 100; ++r)
    p.tail[r] = 2.0 * std::exp(-0.7 * r);
  EXPECT_NEAR(decay_fit(p, 2, 20, 0.0, DecayAxis::R).slope, -0.7, 1e-10);
}

TEST(DecayFit, SobolevKernelTailIsCubic) {
  // Kernel matrix with its diagonal: the zeroed diagonal would add a flat
  // floor near 1/(3n) that swamps the tail beyond a handful of ranks.
  const auto spec = GraphonSpec::sobolev_min();
  const Eigen::Index n = 2000;
  EigenTailProfile mean;
  mean.n = n;
  mean.tail = Vector::Zero(n + 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    mean.tail += eigen_tail(kernel_matrix(spec, sample_latents(spec, n, seed))).tail / 10.0;
  const auto fit = decay_fit(mean, 2, 50, 0.0);
  EXPECT_FALSE(fit.degenerate);
  EXPECT_GE(fit.beta_hat, 2.5);
}

TEST(DecayFit, SbmProfileIsDegenerate) {
  const auto spec = GraphonSpec::sbm(random_block_matrix(3, 8));
  const auto t = eigen_tail(edge_prob_matrix(spec, sample_latents(spec, 300, 1)));
  EXPECT_TRUE(decay_fit(t, 5, 40).degenerate);
}

TEST(DecayFit, RejectsBadRange) {
  EigenTailProfile p;
  p.n = 10;
  p.tail = Vector::Ones(11);
  EXPECT_THROW(decay_fit(p, 0, 5), ValidationError);
  EXPECT_THROW(decay_fit(p, 2, 4), ValidationError);
  EXPECT_THROW(decay_fit(p, 5, 10), ValidationError);
}

TEST(SpectralCsv, Headers) {
  const auto t = eigen_tail(Matrix::Zero(2, 2));
  EXPECT_EQ(tail_csv(t), "r,tail\n0,0\n1,0\n2,0\n");
  const auto csv = spectrum_csv(operator_spectrum_min(2));
  EXPECT_EQ(csv.substr(0, 10), "k,lambda\n1");
}
