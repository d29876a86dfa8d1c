#pragma once

// Affine-invariant geometry of the symmetric positive-definite cone. Tangent
// vectors are plain symmetric matrices.

#include "gfm/linalg.hpp"

namespace gfm {

namespace detail {

inline void require_same_dim(Index a, Index b) {
  if (a != b) throw Error(ErrorCode::kInvalidArgument, "dimension mismatch");
}

}  // namespace detail

/// tr(Σ⁻¹ ξ Σ⁻¹ η).
template <typename Scalar, typename D1, typename D2>
Scalar metric_spd(const SpdMatrix<Scalar>& sigma,
                  const Eigen::MatrixBase<D1>& xi,
                  const Eigen::MatrixBase<D2>& eta) {
  detail::require_same_dim(sigma.dim(), xi.rows());
  detail::require_same_dim(sigma.dim(), eta.rows());
  // With Σ = LLᵀ: tr(Σ⁻¹ξΣ⁻¹η) = <L⁻¹ξL⁻ᵀ, L⁻¹ηL⁻ᵀ>_F.
  const auto& l = sigma.llt().matrixL();
  const MatrixX<Scalar> a = l.solve(l.solve(xi).transpose());
  const MatrixX<Scalar> b = l.solve(l.solve(eta).transpose());
  return a.cwiseProduct(b.transpose()).sum();
}

/// Σ·symm(G)·Σ.
template <typename Scalar, typename Derived>
MatrixX<Scalar> egrad_to_rgrad_spd(const SpdMatrix<Scalar>& sigma,
                                   const Eigen::MatrixBase<Derived>& g) {
  detail::require_same_dim(sigma.dim(), g.rows());
  const auto& s = sigma.matrix();
  return symmetrized(s * symmetrized(g) * s);
}

/// Parallel transport of ξ from T_Σ to T_Σ̄, E·ξ·Eᵀ with E = (Σ̄Σ⁻¹)^{1/2}.
template <typename Scalar>
class SpdTransport {
 public:
  SpdTransport(const SpdMatrix<Scalar>& from, const SpdMatrix<Scalar>& to)
      : e_(spd_congruence_sqrt(from, to)) {}

  template <typename Derived>
  MatrixX<Scalar> operator()(const Eigen::MatrixBase<Derived>& xi) const {
    return symmetrized(e_ * xi * e_.transpose());
  }

 private:
  MatrixX<Scalar> e_;
};

template <typename Scalar, typename Derived>
MatrixX<Scalar> transport_spd(const SpdMatrix<Scalar>& from,
                              const SpdMatrix<Scalar>& to,
                              const Eigen::MatrixBase<Derived>& xi) {
  detail::require_same_dim(from.dim(), xi.rows());
  return SpdTransport<Scalar>(from, to)(xi);
}

/// Second-order retraction Σ + ξ + ½ξΣ⁻¹ξ. Throws NotPositiveDefinite when
/// the result is numerically singular (the step was too long).
template <typename Scalar, typename Derived>
SpdMatrix<Scalar> retract_spd(const SpdMatrix<Scalar>& sigma,
                              const Eigen::MatrixBase<Derived>& xi) {
  detail::require_same_dim(sigma.dim(), xi.rows());
  const MatrixX<Scalar> w = sigma.whiten(xi);  // L⁻¹ξ
  const MatrixX<Scalar> second = w.transpose() * w;  // ξΣ⁻¹ξ
  return SpdMatrix<Scalar>(sigma.matrix() + xi + Scalar(0.5) * second);
}

/// Manifold adaptor consumed by the conjugate-gradient solver.
template <typename Scalar_>
struct SpdManifold {
  using Scalar = Scalar_;
  using Point = SpdMatrix<Scalar>;
  using Tangent = MatrixX<Scalar>;
  using EuclideanGradient = MatrixX<Scalar>;

  Scalar inner(const Point& x, const Tangent& a, const Tangent& b) const {
    return metric_spd(x, a, b);
  }
  Tangent egrad_to_rgrad(const Point& x, const EuclideanGradient& g) const {
    return egrad_to_rgrad_spd(x, g);
  }
  Point retract(const Point& x, const Tangent& v) const {
    return retract_spd(x, v);
  }
  SpdTransport<Scalar> transporter(const Point& from, const Point& to) const {
    return SpdTransport<Scalar>(from, to);
  }
  bool satisfies_constraints(const Point& x) const {
    // Construction of an SpdMatrix already certified the Cholesky factor.
    return x.matrix().allFinite();
  }
};

}  // namespace gfm
