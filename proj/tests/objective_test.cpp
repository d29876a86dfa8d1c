#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace gfm {
namespace {

using test::random_spd;
using test::random_sym;

const DensityGenerator kGauss = DensityGenerator::gaussian();
const DensityGenerator kStudent5 = DensityGenerator::student_t(5.0);

Data rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(Index(r.size()), Index(r.begin()->size()));
  Index i = 0;
  for (const auto& row : r) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return Data(m);
}

// Sum over i of ρ(xᵢᵀΣ⁻¹xᵢ)/n + ½ log det Σ, evaluated sample by sample with
// an explicit inverse; independent of the whitening route in the library.
double nll_oracle(const Matrix& sigma, const Matrix& x, const DensityGenerator& g) {
  const Matrix inv = sigma.inverse();
  const Index p = sigma.rows();
  double acc = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    const double t = x.row(i) * inv * x.row(i).transpose();
    acc += g.is_gaussian() ? t / 2 : (g.nu + p) / 2 * std::log1p(t / g.nu);
  }
  return acc / x.rows() + 0.5 * std::log(sigma.determinant());
}

double penalty_oracle(const Matrix& sigma, double eps) {
  const Matrix theta = sigma.inverse();
  double acc = 0;
  for (Index i = 0; i < theta.rows(); ++i)
    for (Index j = 0; j < theta.cols(); ++j)
      if (i != j) {
        const double a = std::abs(theta(i, j)) / eps;
        acc += a > 30 ? std::abs(theta(i, j)) - eps * std::log(2.0)
                      : eps * std::log(std::cosh(a));
      }
  return acc;
}

TEST(DensityGenerator, StudentRequiresNuAboveTwo) {
  EXPECT_THROW(DensityGenerator::student_t(2.0), Error);
  EXPECT_NO_THROW(DensityGenerator::student_t(2.5));
}

TEST(DataSet, RejectsNonFiniteAndTooFewVariables) {
  Matrix m = Matrix::Ones(3, 2);
  m(1, 1) = INFINITY;
  try {
    Data d(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteValue);
  }
  EXPECT_THROW(Data(Matrix::Ones(3, 1)), Error);
}

TEST(WeightU, GaussianIsOne) {
  for (double t : {0.0, 1.0, 1e6}) EXPECT_EQ(weight_u(kGauss, t, Index(7)), 1.0);
}

TEST(WeightU, StudentValue) {
  EXPECT_DOUBLE_EQ(weight_u(kStudent5, 5.0, Index(10)), 1.5);
}

TEST(WeightU, StudentDecreasesToZero) {
  double prev = weight_u(kStudent5, 0.0, Index(4));
  for (double t = 0.5; t < 1e3; t *= 2) {
    const double u = weight_u(kStudent5, t, Index(4));
    EXPECT_LE(u, prev);
    prev = u;
  }
  EXPECT_LT(weight_u(kStudent5, 1e12, Index(4)), 1e-10);
}

TEST(WeightU, IsMinusTwiceLogDensityDerivative) {
  // u(t) = 2ρ'(t).
  for (double t : {0.0, 0.3, 4.0, 50.0}) {
    const double h = 1e-6;
    const double d = (rho(kStudent5, t + h, Index(6)) - rho(kStudent5, t, Index(6))) / h;
    EXPECT_NEAR(weight_u(kStudent5, t, Index(6)), 2 * d, 1e-5);
  }
}

TEST(NegLogLikelihood, GaussianIdentityCovariance) {
  Rng rng(50);
  const Data x(test::gaussian_matrix(12, 4, rng));
  const SpdMatrix<double> id(Matrix::Identity(4, 4));
  EXPECT_NEAR(neg_log_likelihood(id, x, kGauss),
              x.samples().squaredNorm() / (2.0 * 12), 1e-12);
}

TEST(NegLogLikelihood, SingleGaussianSample) {
  // Two-variable analog of the scalar case x = 2, Σ = 1: ½·4 + 0.
  const Data x = rows({{2.0, 0.0}});
  EXPECT_NEAR(neg_log_likelihood(SpdMatrix<double>(Matrix::Identity(2, 2)), x, kGauss),
              2.0, 1e-14);
}

TEST(NegLogLikelihood, StudentAtOriginIsHalfLogDet) {
  const Data x = rows({{0.0, 0.0}});
  Matrix s = Matrix::Identity(2, 2);
  s(0, 0) = std::exp(2.0);
  EXPECT_NEAR(neg_log_likelihood(SpdMatrix<double>(s), x, kStudent5), 1.0, 1e-14);
}

TEST(NegLogLikelihood, MatchesSampleWiseOracle) {
  Rng rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    const Data x = test::random_data(20, 5, rng);
    const Matrix s = random_spd(5, rng);
    for (const auto& g : {kGauss, kStudent5}) {
      EXPECT_NEAR(neg_log_likelihood(SpdMatrix<double>(s), x, g),
                  nll_oracle(s, x.samples(), g), 1e-10);
    }
  }
}

TEST(NegLogLikelihood, StudentDifferencesInvariantUnderJointRescaling) {
  Rng rng(52);
  const Data x = test::random_data(30, 4, rng);
  const Data cx(Matrix(3.0 * x.samples()));
  const Matrix a = random_spd(4, rng), b = random_spd(4, rng);
  const auto f = [&](const Data& d, const Matrix& s) {
    return neg_log_likelihood(SpdMatrix<double>(s), d, kStudent5);
  };
  EXPECT_NEAR(f(x, a) - f(x, b), f(cx, Matrix(9.0 * a)) - f(cx, Matrix(9.0 * b)), 1e-9);
}

TEST(LikelihoodEgrad, SingleGaussianSample) {
  const Data x = rows({{2.0, 0.0}});
  const Matrix g =
      likelihood_egrad(SpdMatrix<double>(Matrix::Identity(2, 2)), x, kGauss);
  EXPECT_NEAR(g(0, 0), -1.5, 1e-14);
  EXPECT_NEAR(g(1, 1), 0.5, 1e-14);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-14);
}

TEST(LikelihoodEgrad, GaussianStationaryAtSampleCovariance) {
  Rng rng(53);
  const Data x(test::gaussian_matrix(40, 5, rng));
  const SpdMatrix<double> s(x.scatter());
  const Matrix rgrad = egrad_to_rgrad_spd(s, likelihood_egrad(s, x, kGauss));
  EXPECT_LT(rgrad.norm(), 1e-12);
}

TEST(LikelihoodEgrad, RiemannianFormIsHalfSigmaMinusWeightedScatter) {
  Rng rng(54);
  const Data x = test::random_data(25, 4, rng);
  const SpdMatrix<double> s(random_spd(4, rng));
  const Matrix rgrad = egrad_to_rgrad_spd(s, likelihood_egrad(s, x, kStudent5));
  const Matrix inv = s.inverse_matrix();
  Matrix expected = 0.5 * s.matrix();
  for (Index i = 0; i < x.n(); ++i) {
    const Vector xi = x.samples().row(i).transpose();
    const double t = xi.dot(inv * xi);
    expected -= weight_u(kStudent5, t, Index(4)) * xi * xi.transpose() / (2.0 * x.n());
  }
  EXPECT_LT((rgrad - expected).norm(), 1e-10);
}

TEST(LikelihoodEgrad, FiniteDifferences) {
  Rng rng(55);
  const Data x = test::random_data(40, 5, rng);
  const Matrix s = random_spd(5, rng);
  for (const auto& g : {kGauss, kStudent5}) {
    const Matrix grad = likelihood_egrad(SpdMatrix<double>(s), x, g);
    EXPECT_LT((grad - grad.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    for (int d = 0; d < 10; ++d) {
      const Matrix xi = random_sym(5, rng);
      const double fd = test::directional_derivative([&](double t) {
        return neg_log_likelihood(SpdMatrix<double>(Matrix(s + t * xi)), x, g);
      });
      EXPECT_LT(test::relative_error(fd, grad.cwiseProduct(xi).sum()), 1e-6);
    }
  }
}

TEST(LogCosh, AsymptoteAndQuadraticRegime) {
  EXPECT_NEAR(log_cosh_penalty(0.3, 1e-12), 0.3 - 1e-12 * std::log(2.0), 1e-16);
  EXPECT_NEAR(log_cosh_penalty(1e-3, 1.0), 1e-6 / 2, 1e-9);
  EXPECT_NEAR(log_cosh_penalty(1e-3, 1.0), 1e-6 / 2 - 1e-12 / 12, 1e-18);  // next Taylor term
  EXPECT_EQ(log_cosh_penalty(0.0, 1e-12), 0.0);
  // The two branches agree at the switch point.
  const double eps = 0.1;
  EXPECT_NEAR(log_cosh_penalty(30 * eps * (1 - 1e-12), eps),
              log_cosh_penalty(30 * eps * (1 + 1e-12), eps), 1e-10);
}

TEST(LogCosh, DerivativeSaturates) {
  EXPECT_EQ(log_cosh_derivative(0.4, 1e-12), 1.0);
  EXPECT_EQ(log_cosh_derivative(-0.4, 1e-12), -1.0);
  EXPECT_EQ(log_cosh_derivative(0.0, 1e-12), 0.0);
  EXPECT_NEAR(log_cosh_derivative(0.5, 1.0), std::tanh(0.5), 1e-15);
}

TEST(PenaltyValue, DiagonalCovarianceIsZero) {
  Vector d(3);
  d << 1, 2, 3;
  const SpdMatrix<double> s(Matrix(d.asDiagonal()));
  EXPECT_EQ(penalty_value(s, PenaltyConfig{1.0, 1e-12}), 0.0);
  EXPECT_EQ(penalty_egrad(s, PenaltyConfig{1.0, 1e-12}).norm(), 0.0);
}

TEST(PenaltyValue, CountsBothSymmetricEntries) {
  Matrix theta = Matrix::Identity(2, 2);
  theta(0, 1) = theta(1, 0) = 0.3;
  const SpdMatrix<double> s(Matrix(theta.inverse()));
  EXPECT_NEAR(penalty_value(s, PenaltyConfig{1.0, 1e-12}),
              2 * (0.3 - 1e-12 * std::log(2.0)), 1e-12);
}

TEST(PenaltyValue, MatchesOracleAndIsNonNegative) {
  Rng rng(56);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = random_spd(5, rng);
    for (double eps : {1e-12, 0.05, 1.0}) {
      const double v = penalty_value(SpdMatrix<double>(s), PenaltyConfig{1.0, eps});
      EXPECT_GE(v, 0.0);
      EXPECT_NEAR(v, penalty_oracle(s, eps), 1e-10);
    }
  }
}

TEST(PenaltyEgrad, SignPatternWhenSaturated) {
  // With Σ⁻¹ = Θ, the chain rule gives −Θ M Θ; recover M = sign(Θ_offdiag).
  Rng rng(57);
  const Matrix s = random_spd(4, rng);
  const SpdMatrix<double> sig(s);
  const Matrix theta = sig.inverse_matrix();
  const Matrix m = -(s * penalty_egrad(sig, PenaltyConfig{1.0, 1e-12}) * s);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j)
      EXPECT_NEAR(m(i, j), i == j ? 0.0 : (theta(i, j) > 0 ? 1.0 : -1.0), 1e-9);
}

TEST(PenaltyEgrad, FiniteDifferences) {
  Rng rng(58);
  for (double eps : {1e-12, 0.1}) {
    const Matrix s = random_spd(4, rng);
    const PenaltyConfig cfg{1.0, eps};
    const Matrix grad = penalty_egrad(SpdMatrix<double>(s), cfg);
    for (int d = 0; d < 10; ++d) {
      const Matrix xi = random_sym(4, rng);
      const double fd = test::directional_derivative([&](double t) {
        return penalty_value(SpdMatrix<double>(Matrix(s + t * xi)), cfg);
      });
      EXPECT_LT(test::relative_error(fd, grad.cwiseProduct(xi).sum()), 1e-5);
    }
  }
}

TEST(ObjectiveAndEgrad, DecomposesIntoComponents) {
  Rng rng(59);
  const Data x = test::random_data(30, 5, rng);
  const SpdMatrix<double> s(random_spd(5, rng));
  const PenaltyConfig cfg{0.3, 1e-12};
  for (const auto& g : {kGauss, kStudent5}) {
    const auto [v, grad] = objective_and_egrad(s, x, g, cfg);
    EXPECT_NEAR(v, neg_log_likelihood(s, x, g) + 0.3 * penalty_value(s, cfg), 1e-12);
    const Matrix expected = likelihood_egrad(s, x, g) + 0.3 * penalty_egrad(s, cfg);
    EXPECT_LT((grad - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ObjectiveAndEgrad, ZeroLambdaIsLikelihood) {
  Rng rng(60);
  const Data x = test::random_data(30, 4, rng);
  const SpdMatrix<double> s(random_spd(4, rng));
  const auto [v, grad] = objective_and_egrad(s, x, kStudent5, PenaltyConfig{});
  EXPECT_EQ(v, neg_log_likelihood(s, x, kStudent5));
  EXPECT_LT((grad - likelihood_egrad(s, x, kStudent5)).norm(), 1e-14);
}

TEST(FactorObjective, AgreesWithComposedRoute) {
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Index p = test::uniform_int(3, 9, rng);
    const Index k = test::uniform_int(1, int(p) - 1, rng);
    // Both Gaussian data routes: samples when n ≤ p, scatter when n > p.
    const int n = trial % 4 < 2 ? test::uniform_int(2, int(p), rng)
                                : test::uniform_int(int(p) + 1, 40, rng);
    const Data x = test::random_data(n, p, rng);
    const auto th = test::random_factor_point(p, k, rng);
    const DensityGenerator g = trial % 2 ? kGauss : kStudent5;
    const PenaltyConfig cfg{trial % 3 ? 0.1 : 0.0, 1e-12};
    const FactorObjective<double> fast(x, g, cfg);
    const ComposedFactorObjective<double> ref(x, g, cfg);
    const auto [fv, fg] = fast.value_and_egrad(th);
    const auto [rv, rg] = ref.value_and_egrad(th);
    EXPECT_NEAR(fv, rv, 1e-10 * (1 + std::abs(rv)));
    EXPECT_NEAR(fast.value(th), fv, 1e-12 * (1 + std::abs(fv)));
    EXPECT_LT((fg.v - rg.v).norm(), 1e-9 * (1 + rg.v.norm()));
    EXPECT_LT((fg.lambda - rg.lambda).norm(), 1e-9 * (1 + rg.lambda.norm()));
    EXPECT_LT((Vector(fg.psi.diagonal()) - Vector(rg.psi.diagonal())).norm(),
              1e-9 * (1 + rg.psi.norm()));
  }
}

}  // namespace
}  // namespace gfm
