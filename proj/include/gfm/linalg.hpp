#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "gfm/error.hpp"

namespace gfm {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// (A + Aᵀ)/2, evaluated. The result is exactly symmetric.
template <typename Derived>
MatrixX<typename Derived::Scalar> symmetrized(
    const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return (Scalar(0.5) * (a + a.transpose())).eval();
}

/// Max-abs deviation of VᵀV from the identity.
template <typename Derived>
typename Derived::Scalar orthonormality_error(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Index k = v.cols();
  return (v.transpose() * v - MatrixX<Scalar>::Identity(k, k))
      .cwiseAbs()
      .maxCoeff();
}

template <typename Derived>
bool is_stiefel(const Eigen::MatrixBase<Derived>& v,
                typename Derived::Scalar tol = 1e-10) {
  return v.cols() <= v.rows() && v.cols() >= 1 &&
         orthonormality_error(v) <= tol;
}

/// A symmetric positive-definite matrix together with its Cholesky factor.
/// Positive definiteness is certified by a successful factorization.
template <typename Scalar_>
class SpdMatrix {
 public:
  using Scalar = Scalar_;
  using Matrix = MatrixX<Scalar>;

  template <typename Derived>
  explicit SpdMatrix(const Eigen::MatrixBase<Derived>& a)
      : value_(symmetrized(a)), llt_(value_.rows()) {
    if (value_.rows() < 1 || value_.rows() != value_.cols()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "SPD matrix must be square with dim >= 1");
    }
    if (!value_.allFinite()) {
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "matrix has non-finite entries");
    }
    llt_.compute(value_);
    if (llt_.info() != Eigen::Success) {
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "Cholesky factorization failed (non-positive pivot)");
    }
  }

  Index dim() const { return value_.rows(); }
  const Matrix& matrix() const { return value_; }
  const Eigen::LLT<Matrix>& llt() const { return llt_; }
  Matrix lower() const { return llt_.matrixL(); }

  /// Σ⁻¹ as a plain symmetric matrix.
  Matrix inverse_matrix() const {
    return symmetrized(llt_.solve(Matrix::Identity(dim(), dim())));
  }

  Scalar log_det() const {
    return Scalar(2) * llt_.matrixLLT().diagonal().array().log().sum();
  }

  /// L⁻¹ a, with Σ = L Lᵀ.
  template <typename Derived>
  Matrix whiten(const Eigen::MatrixBase<Derived>& a) const {
    return llt_.matrixL().solve(a);
  }

 private:
  Matrix value_;
  Eigen::LLT<Matrix> llt_;
};

template <typename Derived>
SpdMatrix(const Eigen::MatrixBase<Derived>&)
    -> SpdMatrix<typename Derived::Scalar>;

template <typename Scalar>
MatrixX<Scalar> spd_cholesky(const SpdMatrix<Scalar>& a) {
  return a.lower();
}

template <typename Derived>
MatrixX<typename Derived::Scalar> spd_cholesky(
    const Eigen::MatrixBase<Derived>& a) {
  return SpdMatrix(a).lower();
}

template <typename Scalar>
SpdMatrix<Scalar> spd_inverse(const SpdMatrix<Scalar>& a) {
  return SpdMatrix<Scalar>(a.inverse_matrix());
}

/// Orthogonal factor U·Wᵀ of the polar decomposition of a full-column-rank
/// p×k matrix.
template <typename Derived>
MatrixX<typename Derived::Scalar> polar_orthogonal_factor(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Matrix = MatrixX<Scalar>;
  if (m.cols() < 1 || m.cols() > m.rows()) {
    throw Error(ErrorCode::kInvalidArgument,
                "polar factor needs a p x k matrix with 1 <= k <= p");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::kRankDeficient, "polar factor of non-finite input");
  }
  const Eigen::JacobiSVD<Matrix> svd(m.derived().eval(),
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) >= Scalar(1e-12) * s(0)) || s(0) == Scalar(0)) {
    throw Error(ErrorCode::kRankDeficient,
                "polar factor: matrix is numerically rank deficient");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

namespace detail {

/// U f(D) Uᵀ for a symmetric eigendecomposition.
template <typename Scalar, typename F>
MatrixX<Scalar> spectral_apply(
    const Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>>& es, F&& f) {
  const VectorX<Scalar> d = es.eigenvalues().unaryExpr(f);
  return symmetrized(es.eigenvectors() * d.asDiagonal() *
                     es.eigenvectors().transpose());
}

}  // namespace detail

/// (target·base⁻¹)^{1/2}, computed through the symmetric congruence
/// base^{1/2}·(base^{-1/2}·target·base^{-1/2})^{1/2}·base^{-1/2}.
template <typename Scalar>
MatrixX<Scalar> spd_congruence_sqrt(const SpdMatrix<Scalar>& base,
                                    const SpdMatrix<Scalar>& target) {
  using Matrix = MatrixX<Scalar>;
  if (base.dim() != target.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "dimension mismatch");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> base_es(base.matrix());
  if (base_es.eigenvalues()(0) <= Scalar(0)) {
    throw Error(ErrorCode::kNotPositiveDefinite, "base is not SPD");
  }
  const Matrix base_sqrt = detail::spectral_apply<Scalar>(
      base_es, [](Scalar x) { return std::sqrt(x); });
  const Matrix base_isqrt = detail::spectral_apply<Scalar>(
      base_es, [](Scalar x) { return Scalar(1) / std::sqrt(x); });
  const Matrix inner =
      symmetrized(base_isqrt * target.matrix() * base_isqrt);
  const Eigen::SelfAdjointEigenSolver<Matrix> inner_es(inner);
  const Matrix inner_sqrt = detail::spectral_apply<Scalar>(
      inner_es, [](Scalar x) { return std::sqrt(std::max(x, Scalar(0))); });
  return base_sqrt * inner_sqrt * base_isqrt;
}

/// Unit eigenvectors of the k largest eigenvalues, in descending eigenvalue
/// order. Exact ties keep the eigensolver's ascending index order; each column
/// is signed so that its largest-magnitude entry is positive.
template <typename Derived>
MatrixX<typename Derived::Scalar> leading_eigvecs(
    const Eigen::MatrixBase<Derived>& s, Index k) {
  using Scalar = typename Derived::Scalar;
  using Matrix = MatrixX<Scalar>;
  const Index p = s.rows();
  if (s.cols() != p || k < 1 || k > p) {
    throw Error(ErrorCode::kInvalidArgument,
                "leading_eigvecs: need square input and 1 <= k <= p");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(s));
  const auto& values = es.eigenvalues();
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return values(a) > values(b);
  });
  Matrix out(p, k);
  for (Index c = 0; c < k; ++c) {
    VectorX<Scalar> col = es.eigenvectors().col(order[std::size_t(c)]);
    Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col(arg) < Scalar(0)) col = -col;
    out.col(c) = col;
  }
  return out;
}

}  // namespace gfm
