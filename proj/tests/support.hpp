#pragma once

// Random-instance generators and numerical oracles shared by the unit tests
// and the acceptance suite.

#include <cmath>
#include <functional>
#include <random>

#include "gfm/bench.hpp"
#include "gfm/factor_manifold.hpp"
#include "gfm/objective.hpp"
#include "gfm/pipeline.hpp"
#include "gfm/spd_manifold.hpp"

namespace gfm::test {

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = z(rng);
  return m;
}

inline double uniform(double lo, double hi, Rng& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(int lo, int hi, Rng& rng) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Matrix random_sym(Index p, Rng& rng) {
  return symmetrized(gaussian_matrix(p, p, rng));
}

/// Well-conditioned SPD: GGᵀ/p + shift·I.
inline Matrix random_spd(Index p, Rng& rng, double shift = 0.5) {
  const Matrix g = gaussian_matrix(p, p, rng);
  Matrix a = g * g.transpose() / double(p);
  a.diagonal().array() += shift;
  return symmetrized(a);
}

inline Matrix random_stiefel(Index p, Index k, Rng& rng) {
  return polar_orthogonal_factor(gaussian_matrix(p, k, rng));
}

/// Haar-ish orthogonal matrix, reflections included.
inline Matrix random_orthogonal(Index k, Rng& rng) {
  return random_stiefel(k, k, rng);
}

inline Matrix random_skew(Index k, Rng& rng) {
  const Matrix g = gaussian_matrix(k, k, rng);
  return (g - g.transpose()) / 2;
}

inline FactorPoint<double> random_factor_point(Index p, Index k, Rng& rng) {
  Vector psi(p);
  for (Index i = 0; i < p; ++i) psi(i) = uniform(0.5, 2.0, rng);
  return FactorPoint<double>(random_stiefel(p, k, rng), random_spd(k, rng, 0.3),
                             psi);
}

inline AmbientTriple<double> random_ambient(Index p, Index k, Rng& rng) {
  return {gaussian_matrix(p, k, rng), gaussian_matrix(k, k, rng),
          gaussian_matrix(p, p, rng)};
}

inline FactorTangent<double> random_factor_tangent(const FactorPoint<double>& theta,
                                                   Rng& rng) {
  return project_tangent(theta, random_ambient(theta.p(), theta.k(), rng));
}

/// Student-t(5) samples with a random scatter, so that both generators see
/// non-Gaussian data.
inline Data random_data(Index n, Index p, Rng& rng) {
  const SpdMatrix<double> sigma(random_spd(p, rng));
  return sample_elliptical(sigma, DensityGenerator::student_t(5.0), n, rng);
}

/// Richardson-extrapolated central difference of f at 0; error O(h⁴).
inline double directional_derivative(const std::function<double(double)>& f,
                                     double h = 1e-4) {
  const auto central = [&](double t) { return (f(t) - f(-t)) / (2 * t); };
  return (4 * central(h / 2) - central(h)) / 3;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

/// Σ^{1/2} expm(t Σ^{-1/2} ξ Σ^{-1/2}) Σ^{1/2}, the affine-invariant geodesic.
inline Matrix spd_geodesic(const Matrix& sigma, const Matrix& xi, double t) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  const Matrix s_half = es.operatorSqrt();
  const Matrix s_ihalf = es.operatorInverseSqrt();
  const Eigen::SelfAdjointEigenSolver<Matrix> inner(
      symmetrized(t * s_ihalf * xi * s_ihalf));
  const Matrix e = inner.eigenvectors() *
                   inner.eigenvalues().array().exp().matrix().asDiagonal() *
                   inner.eigenvectors().transpose();
  return s_half * e * s_half;
}

}  // namespace gfm::test
