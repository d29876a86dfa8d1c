#pragma once

// Quotient geometry of St(p,k) × S⁺⁺(k) × D⁺⁺(p) modulo the orthogonal group
// O(k), parameterizing rank-k-plus-diagonal covariances Σ = VΛVᵀ + Ψ.
//
// Ψ and its tangent directions are diagonal and stored as length-p vectors.

#include <utility>

#include "gfm/linalg.hpp"

namespace gfm {

template <typename Scalar>
class FactorPoint {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  FactorPoint(Matrix v, SpdMatrix<Scalar> lambda, Vector psi)
      : v_(std::move(v)), lambda_(std::move(lambda)), psi_(std::move(psi)) {
    if (v_.cols() != lambda_.dim() || v_.rows() != psi_.size() ||
        v_.cols() > v_.rows()) {
      throw Error(ErrorCode::kInvalidArgument, "factor point: inconsistent dims");
    }
    if (!is_stiefel(v_)) {
      throw Error(ErrorCode::kRankDeficient, "factor point: V is not orthonormal");
    }
    if (!psi_.allFinite() || !(psi_.array() > Scalar(0)).all()) {
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "factor point: diagonal part must be positive");
    }
  }

  FactorPoint(Matrix v, const Matrix& lambda, Vector psi)
      : FactorPoint(std::move(v), SpdMatrix<Scalar>(lambda), std::move(psi)) {}

  Index p() const { return v_.rows(); }
  Index k() const { return v_.cols(); }
  const Matrix& V() const { return v_; }
  const SpdMatrix<Scalar>& Lambda() const { return lambda_; }
  const Vector& psi() const { return psi_; }

 private:
  Matrix v_;
  SpdMatrix<Scalar> lambda_;
  Vector psi_;
};

/// Tangent vector (ξ_V, ξ_Λ, ξ_Ψ). Tangency: Vᵀξ_V + ξ_VᵀV = 0.
template <typename Scalar>
struct FactorTangent {
  MatrixX<Scalar> v;
  MatrixX<Scalar> lambda;
  VectorX<Scalar> psi;

  static FactorTangent zero(Index p, Index k) {
    return {MatrixX<Scalar>::Zero(p, k), MatrixX<Scalar>::Zero(k, k),
            VectorX<Scalar>::Zero(p)};
  }

  FactorTangent& operator+=(const FactorTangent& o) {
    v += o.v;
    lambda += o.lambda;
    psi += o.psi;
    return *this;
  }
  FactorTangent& operator*=(Scalar a) {
    v *= a;
    lambda *= a;
    psi *= a;
    return *this;
  }
  friend FactorTangent operator+(FactorTangent a, const FactorTangent& b) {
    return a += b;
  }
  friend FactorTangent operator-(FactorTangent a, const FactorTangent& b) {
    a.v -= b.v;
    a.lambda -= b.lambda;
    a.psi -= b.psi;
    return a;
  }
  friend FactorTangent operator-(FactorTangent a) { return a *= Scalar(-1); }
  friend FactorTangent operator*(Scalar s, FactorTangent a) { return a *= s; }
  friend FactorTangent operator*(FactorTangent a, Scalar s) { return a *= s; }

  Scalar max_abs() const {
    return std::max({v.cwiseAbs().maxCoeff(), lambda.cwiseAbs().maxCoeff(),
                     psi.cwiseAbs().maxCoeff()});
  }
};

/// Raw element of R^{p×k} × R^{k×k} × R^{p×p}.
template <typename Scalar>
struct AmbientTriple {
  MatrixX<Scalar> v;
  MatrixX<Scalar> lambda;
  MatrixX<Scalar> psi;
};

/// Group action θ∗O = (VO, OᵀΛO, Ψ).
template <typename Scalar, typename Derived>
FactorPoint<Scalar> act(const FactorPoint<Scalar>& theta,
                        const Eigen::MatrixBase<Derived>& o) {
  return FactorPoint<Scalar>(theta.V() * o,
                             symmetrized(o.transpose() *
                                         theta.Lambda().matrix() * o),
                             theta.psi());
}

/// ξ∗O = (ξ_V O, Oᵀξ_Λ O, ξ_Ψ).
template <typename Scalar, typename Derived>
FactorTangent<Scalar> act(const FactorTangent<Scalar>& xi,
                          const Eigen::MatrixBase<Derived>& o) {
  return {xi.v * o, symmetrized(o.transpose() * xi.lambda * o), xi.psi};
}

/// VΛVᵀ + Ψ.
template <typename Scalar>
SpdMatrix<Scalar> embed(const FactorPoint<Scalar>& theta) {
  const auto& v = theta.V();
  MatrixX<Scalar> sigma = v * theta.Lambda().matrix() * v.transpose();
  sigma.diagonal() += theta.psi();
  return SpdMatrix<Scalar>(sigma);
}

/// tr(ξ_Vᵀ(I − ½VVᵀ)η_V) + tr(Λ⁻¹ξ_ΛΛ⁻¹η_Λ) + tr(Ψ⁻²ξ_Ψη_Ψ).
template <typename Scalar>
Scalar metric_factor(const FactorPoint<Scalar>& theta,
                     const FactorTangent<Scalar>& xi,
                     const FactorTangent<Scalar>& eta) {
  const auto& v = theta.V();
  const MatrixX<Scalar> vx = v.transpose() * xi.v;
  const MatrixX<Scalar> ve = v.transpose() * eta.v;
  const Scalar stiefel =
      xi.v.cwiseProduct(eta.v).sum() - Scalar(0.5) * vx.cwiseProduct(ve).sum();
  const auto& lam = theta.Lambda().llt();
  const MatrixX<Scalar> a = lam.solve(xi.lambda);
  const MatrixX<Scalar> b = lam.solve(eta.lambda);
  const Scalar core = a.cwiseProduct(b.transpose()).sum();
  const Scalar diag =
      (xi.psi.array() * eta.psi.array() / theta.psi().array().square()).sum();
  return stiefel + core + diag;
}

namespace detail {

template <typename Scalar>
FactorTangent<Scalar> project_tangent_blocks(const FactorPoint<Scalar>& theta,
                                             const MatrixX<Scalar>& a_v,
                                             const MatrixX<Scalar>& a_lambda,
                                             VectorX<Scalar> a_psi_diag) {
  const auto& v = theta.V();
  return {a_v - v * symmetrized(v.transpose() * a_v), symmetrized(a_lambda),
          std::move(a_psi_diag)};
}

}  // namespace detail

/// Orthogonal projection of an ambient triple onto T_θ:
/// (a_V − V symm(Vᵀa_V), symm(a_Λ), ddiag(a_Ψ)).
template <typename Scalar>
FactorTangent<Scalar> project_tangent(const FactorPoint<Scalar>& theta,
                                      const AmbientTriple<Scalar>& a) {
  return detail::project_tangent_blocks(theta, a.v, a.lambda,
                                        VectorX<Scalar>(a.psi.diagonal()));
}

/// Projection of a tangent vector stored at another base point (its identity
/// lift into the ambient space).
template <typename Scalar>
FactorTangent<Scalar> project_tangent(const FactorPoint<Scalar>& theta,
                                      const FactorTangent<Scalar>& xi) {
  return detail::project_tangent_blocks(theta, xi.v, xi.lambda, xi.psi);
}

/// Skew-symmetric Ω solving 2(Λ⁻¹ΩΛ + ΛΩΛ⁻¹) − 3Ω = R for skew R.
///
/// In the eigenbasis Λ = Q diag(d) Qᵀ the operator is diagonal with
/// coefficients 2(d_j/d_i + d_i/d_j) − 3 ≥ 1, so the solve is exact.
template <typename Scalar>
MatrixX<Scalar> solve_horizontal_omega(const SpdMatrix<Scalar>& lambda,
                                       const MatrixX<Scalar>& rhs) {
  using Matrix = MatrixX<Scalar>;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(lambda.matrix());
  const Matrix& q = es.eigenvectors();
  const auto& d = es.eigenvalues();
  Matrix w = q.transpose() * (Scalar(0.5) * (rhs - rhs.transpose())) * q;
  const Index k = w.rows();
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < k; ++i) {
      if (i == j) {
        w(i, j) = Scalar(0);
        continue;
      }
      const Scalar ratio = d(j) / d(i);
      w(i, j) /= Scalar(2) * (ratio + Scalar(1) / ratio) - Scalar(3);
    }
  }
  Matrix omega = q * w * q.transpose();
  return (Scalar(0.5) * (omega - omega.transpose())).eval();
}

/// Same system, solved by materializing the operator on the basis
/// {E_ij − E_ji : i < j} of skew-symmetric matrices and LU-solving the
/// k(k−1)/2 dense system.
template <typename Scalar>
MatrixX<Scalar> solve_horizontal_omega_dense(const SpdMatrix<Scalar>& lambda,
                                             const MatrixX<Scalar>& rhs) {
  using Matrix = MatrixX<Scalar>;
  const Index k = lambda.dim();
  const Index m = k * (k - 1) / 2;
  if (m == 0) return Matrix::Zero(k, k);
  const Matrix& lam = lambda.matrix();
  const Matrix lam_inv = lambda.inverse_matrix();

  std::vector<std::pair<Index, Index>> basis;
  for (Index j = 1; j < k; ++j)
    for (Index i = 0; i < j; ++i) basis.emplace_back(i, j);

  Matrix op(m, m);
  VectorX<Scalar> b(m);
  for (Index c = 0; c < m; ++c) {
    Matrix e = Matrix::Zero(k, k);
    e(basis[std::size_t(c)].first, basis[std::size_t(c)].second) = Scalar(1);
    e(basis[std::size_t(c)].second, basis[std::size_t(c)].first) = Scalar(-1);
    const Matrix image =
        Scalar(2) * (lam_inv * e * lam + lam * e * lam_inv) - Scalar(3) * e;
    for (Index r = 0; r < m; ++r)
      op(r, c) = image(basis[std::size_t(r)].first, basis[std::size_t(r)].second);
  }
  for (Index r = 0; r < m; ++r) {
    const auto [i, j] = basis[std::size_t(r)];
    b(r) = Scalar(0.5) * (rhs(i, j) - rhs(j, i));
  }
  const Eigen::FullPivLU<Matrix> lu(op);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kSolveFailure, "horizontal projection system is singular");
  }
  const VectorX<Scalar> x = lu.solve(b);
  Matrix omega = Matrix::Zero(k, k);
  for (Index r = 0; r < m; ++r) {
    const auto [i, j] = basis[std::size_t(r)];
    omega(i, j) = x(r);
    omega(j, i) = -x(r);
  }
  return omega;
}

/// Right-hand side Vᵀξ_V + 2(ξ_ΛΛ⁻¹ − Λ⁻¹ξ_Λ) of the horizontal-projection
/// equation.
template <typename Scalar>
MatrixX<Scalar> horizontal_rhs(const FactorPoint<Scalar>& theta,
                               const FactorTangent<Scalar>& xi) {
  const MatrixX<Scalar> li_x = theta.Lambda().llt().solve(xi.lambda);
  return theta.V().transpose() * xi.v +
         Scalar(2) * (li_x.transpose() - li_x);
}

/// Orthogonal projection of a tangent vector onto the horizontal space:
/// (ξ_V − VΩ, ξ_Λ + ΩΛ − ΛΩ, ξ_Ψ).
template <typename Scalar>
FactorTangent<Scalar> project_horizontal(const FactorPoint<Scalar>& theta,
                                         const FactorTangent<Scalar>& xi) {
  const MatrixX<Scalar> omega =
      solve_horizontal_omega(theta.Lambda(), horizontal_rhs(theta, xi));
  const MatrixX<Scalar>& lam = theta.Lambda().matrix();
  return {xi.v - theta.V() * omega,
          symmetrized(xi.lambda + omega * lam - lam * omega), xi.psi};
}

/// Vertical vector (VΩ, ΛΩ − ΩΛ, 0) generated by a skew Ω.
template <typename Scalar>
FactorTangent<Scalar> vertical_vector(const FactorPoint<Scalar>& theta,
                                      const MatrixX<Scalar>& omega) {
  const MatrixX<Scalar>& lam = theta.Lambda().matrix();
  return {theta.V() * omega, lam * omega - omega * lam,
          VectorX<Scalar>::Zero(theta.p())};
}

/// Max-abs residual of Vᵀξ_V − 2(Λ⁻¹ξ_Λ − ξ_ΛΛ⁻¹); zero on the horizontal
/// space.
template <typename Scalar>
Scalar horizontality_residual(const FactorPoint<Scalar>& theta,
                              const FactorTangent<Scalar>& xi) {
  const MatrixX<Scalar> li_x = theta.Lambda().llt().solve(xi.lambda);
  return (theta.V().transpose() * xi.v - Scalar(2) * (li_x - li_x.transpose()))
      .cwiseAbs()
      .maxCoeff();
}

/// Max-abs residual of Vᵀξ_V + ξ_VᵀV; zero on the tangent space.
template <typename Scalar>
Scalar tangency_residual(const FactorPoint<Scalar>& theta,
                         const FactorTangent<Scalar>& xi) {
  const MatrixX<Scalar> a = theta.V().transpose() * xi.v;
  return (a + a.transpose()).cwiseAbs().maxCoeff();
}

/// Euclidean gradient of f∘φ from the Euclidean gradient G of f at φ(θ):
/// (2GVΛ, VᵀGV, ddiag(G)).
template <typename Scalar, typename Derived>
AmbientTriple<Scalar> egrad_chain(const FactorPoint<Scalar>& theta,
                                  const Eigen::MatrixBase<Derived>& g) {
  const auto& v = theta.V();
  const MatrixX<Scalar> gv = g * v;
  MatrixX<Scalar> psi = MatrixX<Scalar>::Zero(g.rows(), g.cols());
  psi.diagonal() = g.diagonal();
  return {Scalar(2) * gv * theta.Lambda().matrix(),
          symmetrized(v.transpose() * gv), std::move(psi)};
}

/// (G_V − V G_Vᵀ V, Λ G_Λ Λ, Ψ² ddiag(G_Ψ)) without horizontal projection.
template <typename Scalar>
FactorTangent<Scalar> riemannian_gradient_raw(const FactorPoint<Scalar>& theta,
                                              const AmbientTriple<Scalar>& a) {
  const auto& v = theta.V();
  const MatrixX<Scalar>& lam = theta.Lambda().matrix();
  return {a.v - v * (a.v.transpose() * v), symmetrized(lam * a.lambda * lam),
          (theta.psi().array().square() * a.psi.diagonal().array()).matrix()};
}

/// Riemannian gradient on the quotient. For class-invariant objectives the raw
/// gradient is already horizontal; the projection removes rounding drift.
template <typename Scalar>
FactorTangent<Scalar> egrad_to_rgrad_factor(const FactorPoint<Scalar>& theta,
                                            const AmbientTriple<Scalar>& a) {
  return project_horizontal(theta, riemannian_gradient_raw(theta, a));
}

/// Vector transport: horizontal projection at θ̄ of the tangent projection at
/// θ̄ of ξ.
template <typename Scalar>
FactorTangent<Scalar> transport_factor(const FactorPoint<Scalar>& /*from*/,
                                       const FactorPoint<Scalar>& to,
                                       const FactorTangent<Scalar>& xi) {
  return project_horizontal(to, project_tangent(to, xi));
}

/// (uf(V + ξ_V), Λ + ξ_Λ + ½ξ_ΛΛ⁻¹ξ_Λ, Ψ + ξ_Ψ + ½ξ_Ψ²Ψ⁻¹).
template <typename Scalar>
FactorPoint<Scalar> retract_factor(const FactorPoint<Scalar>& theta,
                                   const FactorTangent<Scalar>& xi) {
  MatrixX<Scalar> v = polar_orthogonal_factor(theta.V() + xi.v);
  const auto& lam = theta.Lambda();
  const MatrixX<Scalar> w = lam.whiten(xi.lambda);
  SpdMatrix<Scalar> lambda(lam.matrix() + xi.lambda +
                           Scalar(0.5) * (w.transpose() * w));
  VectorX<Scalar> psi = (theta.psi().array() + xi.psi.array() +
                         Scalar(0.5) * xi.psi.array().square() /
                             theta.psi().array())
                            .matrix();
  return FactorPoint<Scalar>(std::move(v), std::move(lambda), std::move(psi));
}

template <typename Scalar>
class FactorTransport {
 public:
  explicit FactorTransport(FactorPoint<Scalar> to) : to_(std::move(to)) {}
  FactorTangent<Scalar> operator()(const FactorTangent<Scalar>& xi) const {
    return project_horizontal(to_, project_tangent(to_, xi));
  }

 private:
  FactorPoint<Scalar> to_;
};

/// Manifold adaptor consumed by the conjugate-gradient solver.
template <typename Scalar_>
struct FactorManifold {
  using Scalar = Scalar_;
  using Point = FactorPoint<Scalar>;
  using Tangent = FactorTangent<Scalar>;
  using EuclideanGradient = AmbientTriple<Scalar>;

  Scalar inner(const Point& x, const Tangent& a, const Tangent& b) const {
    return metric_factor(x, a, b);
  }
  Tangent egrad_to_rgrad(const Point& x, const EuclideanGradient& g) const {
    return egrad_to_rgrad_factor(x, g);
  }
  Point retract(const Point& x, const Tangent& v) const {
    return retract_factor(x, v);
  }
  FactorTransport<Scalar> transporter(const Point& /*from*/,
                                      const Point& to) const {
    return FactorTransport<Scalar>(to);
  }
  bool satisfies_constraints(const Point& x) const {
    return is_stiefel(x.V()) && (x.psi().array() > Scalar(0)).all();
  }
};

}  // namespace gfm
