#pragma once

// Penalized negative log-likelihood of a centered elliptical model,
//   L(Σ) + λ h(Σ),  L(Σ) = (1/n) Σᵢ ρ(xᵢᵀΣ⁻¹xᵢ) + ½ log det Σ,
//   h(Σ) = Σ_{q≠ℓ} φ([Σ⁻¹]_{qℓ}),  φ(t) = ε log cosh(t/ε).
// Additive constants of L are dropped. All gradients are Euclidean gradients
// with respect to Σ.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gfm/factor_manifold.hpp"
#include "gfm/linalg.hpp"

namespace gfm {

struct DensityGenerator {
  enum class Kind { kGaussian, kStudentT };

  Kind kind = Kind::kGaussian;
  double nu = 5.0;  // degrees of freedom, StudentT only

  static DensityGenerator gaussian() { return {Kind::kGaussian, 5.0}; }
  static DensityGenerator student_t(double nu = 5.0) {
    if (!(nu > 2.0)) {
      throw Error(ErrorCode::kInvalidArgument, "Student-t requires nu > 2");
    }
    return {Kind::kStudentT, nu};
  }
  bool is_gaussian() const { return kind == Kind::kGaussian; }
};

struct PenaltyConfig {
  double lambda = 0.0;
  double epsilon = 1e-12;

  void validate() const {
    if (!(lambda >= 0.0) || !(epsilon > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "penalty requires lambda >= 0 and epsilon > 0");
    }
  }
};

/// n samples of p variables, one sample per row.
template <typename Scalar>
class DataSet {
 public:
  using Matrix = MatrixX<Scalar>;

  explicit DataSet(Matrix samples, std::vector<std::string> names = {})
      : samples_(std::move(samples)), names_(std::move(names)) {
    if (samples_.rows() < 1 || samples_.cols() < 2) {
      throw Error(ErrorCode::kInvalidArgument, "data set needs n >= 1 and p >= 2");
    }
    if (!samples_.allFinite()) {
      throw Error(ErrorCode::kNonFiniteValue, "data set has non-finite entries");
    }
    if (names_.empty()) {
      for (Index j = 0; j < samples_.cols(); ++j)
        names_.push_back("x" + std::to_string(j));
    }
    if (Index(names_.size()) != samples_.cols()) {
      throw Error(ErrorCode::kInvalidArgument, "one name per variable required");
    }
  }

  Index n() const { return samples_.rows(); }
  Index p() const { return samples_.cols(); }
  const Matrix& samples() const { return samples_; }
  const std::vector<std::string>& names() const { return names_; }

  /// (1/n) Σᵢ xᵢxᵢᵀ.
  Matrix scatter() const {
    return symmetrized(samples_.transpose() * samples_ / Scalar(n()));
  }

 private:
  Matrix samples_;
  std::vector<std::string> names_;
};

/// u(t) = −2g′(t)/g(t): 1 for Gaussian, (ν+p)/(ν+t) for Student-t.
template <typename Scalar>
Scalar weight_u(const DensityGenerator& g, Scalar t, Index p) {
  if (g.is_gaussian()) return Scalar(1);
  const Scalar nu(g.nu);
  return (nu + Scalar(p)) / (nu + t);
}

/// ρ(t) = −log g(t) without constants.
template <typename Scalar>
Scalar rho(const DensityGenerator& g, Scalar t, Index p) {
  if (g.is_gaussian()) return t / Scalar(2);
  const Scalar nu(g.nu);
  return (nu + Scalar(p)) / Scalar(2) * std::log1p(t / nu);
}

/// φ(t) = ε log cosh(t/ε), switching to |t| − ε log 2 once |t|/ε > 30.
template <typename Scalar>
Scalar log_cosh_penalty(Scalar t, Scalar eps) {
  const Scalar a = std::abs(t) / eps;
  if (a > Scalar(30)) return std::abs(t) - eps * Scalar(std::log(2.0));
  // Small a: log cosh(a) = log1p(2 sinh²(a/2)) avoids the cancellation in
  // the large-a form a + log1p(e^{-2a}) − log 2.
  if (a < Scalar(1)) {
    const Scalar sh = std::sinh(a / Scalar(2));
    return eps * std::log1p(Scalar(2) * sh * sh);
  }
  return eps * (a + std::log1p(std::exp(Scalar(-2) * a)) -
                Scalar(std::log(2.0)));
}

/// φ′(t) = tanh(t/ε).
template <typename Scalar>
Scalar log_cosh_derivative(Scalar t, Scalar eps) {
  const Scalar a = t / eps;
  if (a > Scalar(30)) return Scalar(1);
  if (a < Scalar(-30)) return Scalar(-1);
  return std::tanh(a);
}

namespace detail {

/// Off-diagonal φ sum and the tanh matrix M (zero diagonal) of a precision
/// matrix.
template <typename Scalar>
std::pair<Scalar, MatrixX<Scalar>> penalty_terms(const MatrixX<Scalar>& theta,
                                                 Scalar eps, bool need_m) {
  const Index p = theta.rows();
  Scalar value(0);
  MatrixX<Scalar> m;
  if (need_m) m.setZero(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      const Scalar t = theta(i, j);
      value += Scalar(2) * log_cosh_penalty(t, eps);
      if (need_m) {
        const Scalar d = log_cosh_derivative(t, eps);
        m(i, j) = d;
        m(j, i) = d;
      }
    }
  }
  return {value, std::move(m)};
}

/// Mahalanobis terms tᵢ = xᵢᵀΣ⁻¹xᵢ and whitened samples L⁻¹Xᵀ.
template <typename Scalar>
std::pair<VectorX<Scalar>, MatrixX<Scalar>> mahalanobis(
    const SpdMatrix<Scalar>& sigma, const MatrixX<Scalar>& x) {
  MatrixX<Scalar> w = sigma.whiten(x.transpose());
  VectorX<Scalar> t = w.colwise().squaredNorm().transpose();
  return {std::move(t), std::move(w)};
}

template <typename Scalar>
void check_dims(const SpdMatrix<Scalar>& sigma, const DataSet<Scalar>& x) {
  if (sigma.dim() != x.p()) {
    throw Error(ErrorCode::kInvalidArgument, "Sigma and data dims differ");
  }
}

}  // namespace detail

template <typename Scalar>
Scalar neg_log_likelihood(const SpdMatrix<Scalar>& sigma,
                          const DataSet<Scalar>& x, const DensityGenerator& g) {
  detail::check_dims(sigma, x);
  const auto [t, w] = detail::mahalanobis(sigma, x.samples());
  Scalar acc(0);
  for (Index i = 0; i < t.size(); ++i) acc += rho(g, t(i), x.p());
  return acc / Scalar(x.n()) + sigma.log_det() / Scalar(2);
}

/// ½Σ⁻¹ − (1/2n) Σᵢ u(tᵢ) Σ⁻¹xᵢxᵢᵀΣ⁻¹.
template <typename Scalar>
MatrixX<Scalar> likelihood_egrad(const SpdMatrix<Scalar>& sigma,
                                 const DataSet<Scalar>& x,
                                 const DensityGenerator& g) {
  detail::check_dims(sigma, x);
  const auto [t, w] = detail::mahalanobis(sigma, x.samples());
  // Σ⁻¹xᵢ = L⁻ᵀ(L⁻¹xᵢ).
  const MatrixX<Scalar> y = sigma.llt().matrixU().solve(w);
  VectorX<Scalar> u(t.size());
  for (Index i = 0; i < t.size(); ++i) u(i) = weight_u(g, t(i), x.p());
  const MatrixX<Scalar> weighted = y * u.asDiagonal() * y.transpose();
  return symmetrized(Scalar(0.5) * sigma.inverse_matrix() -
                     weighted / (Scalar(2) * Scalar(x.n())));
}

template <typename Scalar>
Scalar penalty_value(const SpdMatrix<Scalar>& sigma, const PenaltyConfig& cfg) {
  cfg.validate();
  return detail::penalty_terms<Scalar>(sigma.inverse_matrix(),
                                       Scalar(cfg.epsilon), false)
      .first;
}

/// −Σ⁻¹ M Σ⁻¹ with M_{qℓ} = φ′([Σ⁻¹]_{qℓ}) off the diagonal and 0 on it.
template <typename Scalar>
MatrixX<Scalar> penalty_egrad(const SpdMatrix<Scalar>& sigma,
                              const PenaltyConfig& cfg) {
  cfg.validate();
  const MatrixX<Scalar> theta = sigma.inverse_matrix();
  const auto [v, m] =
      detail::penalty_terms<Scalar>(theta, Scalar(cfg.epsilon), true);
  return symmetrized(-(theta * m * theta));
}

/// Penalized negative log-likelihood over the full SPD cone. The Gaussian
/// sample covariance is computed once at construction.
template <typename Scalar>
class SpdObjective {
 public:
  using Matrix = MatrixX<Scalar>;

  SpdObjective(const DataSet<Scalar>& data, DensityGenerator g,
               PenaltyConfig penalty)
      : data_(&data), g_(g), penalty_(penalty) {
    penalty_.validate();
    if (g_.is_gaussian()) scatter_ = data.scatter();
  }

  Index p() const { return data_->p(); }

  Scalar value(const SpdMatrix<Scalar>& sigma) const {
    return evaluate(sigma, false).first;
  }

  std::pair<Scalar, Matrix> value_and_egrad(
      const SpdMatrix<Scalar>& sigma) const {
    return evaluate(sigma, true);
  }

 private:
  std::pair<Scalar, Matrix> evaluate(const SpdMatrix<Scalar>& sigma,
                                     bool with_grad) const {
    detail::check_dims(sigma, *data_);
    const Index p = sigma.dim();
    const Scalar lambda(penalty_.lambda);
    const Matrix theta = sigma.inverse_matrix();

    Scalar value = sigma.log_det() / Scalar(2);
    // B collects the matrix sandwiched as −½ΘBΘ in the gradient.
    Matrix b;
    Matrix theta_x;  // Θxᵢ columns, Student case
    VectorX<Scalar> u;
    if (g_.is_gaussian()) {
      value += theta.cwiseProduct(scatter_).sum() / Scalar(2);
      if (with_grad) b = scatter_;
    } else {
      const auto [t, w] = detail::mahalanobis(sigma, data_->samples());
      Scalar acc(0);
      u.resize(t.size());
      for (Index i = 0; i < t.size(); ++i) {
        acc += rho(g_, t(i), p);
        u(i) = weight_u(g_, t(i), p);
      }
      value += acc / Scalar(data_->n());
      if (with_grad) {
        theta_x = sigma.llt().matrixU().solve(w);
        b = Matrix::Zero(p, p);
      }
    }
    Matrix m;
    if (lambda > Scalar(0)) {
      auto [h, mm] =
          detail::penalty_terms<Scalar>(theta, Scalar(penalty_.epsilon),
                                        with_grad);
      value += lambda * h;
      m = std::move(mm);
    }
    if (!with_grad) return {value, Matrix()};

    if (lambda > Scalar(0)) b += Scalar(2) * lambda * m;
    Matrix grad = Scalar(0.5) * theta - Scalar(0.5) * (theta * b * theta);
    if (!g_.is_gaussian()) {
      grad -= theta_x * u.asDiagonal() * theta_x.transpose() /
              (Scalar(2) * Scalar(data_->n()));
    }
    return {value, symmetrized(grad)};
  }

  const DataSet<Scalar>* data_;
  DensityGenerator g_;
  PenaltyConfig penalty_;
  Matrix scatter_;
};

/// Value and Euclidean gradient of L + λh at Σ, sharing one factorization.
template <typename Scalar>
std::pair<Scalar, MatrixX<Scalar>> objective_and_egrad(
    const SpdMatrix<Scalar>& sigma, const DataSet<Scalar>& x,
    const DensityGenerator& g, const PenaltyConfig& cfg) {
  return SpdObjective<Scalar>(x, g, cfg).value_and_egrad(sigma);
}

/// f∘φ on the factor parameterization, routed through the full p×p
/// objective and egrad_chain. O(p³) per evaluation; reference route.
template <typename Scalar>
class ComposedFactorObjective {
 public:
  ComposedFactorObjective(const DataSet<Scalar>& data, DensityGenerator g,
                          PenaltyConfig penalty)
      : inner_(data, g, penalty) {}

  Scalar value(const FactorPoint<Scalar>& theta) const {
    return inner_.value(embed(theta));
  }

  std::pair<Scalar, AmbientTriple<Scalar>> value_and_egrad(
      const FactorPoint<Scalar>& theta) const {
    auto [f, g] = inner_.value_and_egrad(embed(theta));
    return {f, egrad_chain(theta, g)};
  }

 private:
  SpdObjective<Scalar> inner_;
};

/// f∘φ evaluated through the low-rank-plus-diagonal structure:
/// Θ = Ψ⁻¹ − W K⁻¹ Wᵀ with W = Ψ⁻¹V, K = Λ⁻¹ + VᵀΨ⁻¹V, and
/// log det Σ = log det Ψ + log det Λ + log det K. Every product is at most
/// O(p²k + npk); no p×p factorization is formed. The Gaussian data term goes
/// through the p×p scatter only when n > p, otherwise through the samples.
template <typename Scalar>
class FactorObjective {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  FactorObjective(const DataSet<Scalar>& data, DensityGenerator g,
                  PenaltyConfig penalty)
      : data_(&data), g_(g), penalty_(penalty) {
    penalty_.validate();
    if (g_.is_gaussian() && data.n() > data.p()) scatter_ = data.scatter();
  }

  Scalar value(const FactorPoint<Scalar>& theta) const {
    return evaluate(theta, false).first;
  }

  std::pair<Scalar, AmbientTriple<Scalar>> value_and_egrad(
      const FactorPoint<Scalar>& theta) const {
    return evaluate(theta, true);
  }

 private:
  bool use_scatter() const { return scatter_.size() > 0; }

  std::pair<Scalar, AmbientTriple<Scalar>> evaluate(
      const FactorPoint<Scalar>& point, bool with_grad) const {
    const Index p = point.p();
    if (p != data_->p()) {
      throw Error(ErrorCode::kInvalidArgument, "factor point and data dims differ");
    }
    const Matrix& v = point.V();
    const Vector psi_inv = point.psi().cwiseInverse();
    const Matrix w = psi_inv.asDiagonal() * v;
    const Matrix lambda_inv = point.Lambda().inverse_matrix();
    const SpdMatrix<Scalar> k_mat(lambda_inv + v.transpose() * w);
    // R = L_K⁻¹Wᵀ so that W K⁻¹ Wᵀ = RᵀR and Θ = Ψ⁻¹ − RᵀR.
    const Matrix r = k_mat.whiten(w.transpose());

    const Scalar lambda(penalty_.lambda);
    const bool need_theta = lambda > Scalar(0) || use_scatter();
    Matrix theta;
    if (need_theta) {
      theta.setZero(p, p);
      theta.template selfadjointView<Eigen::Lower>().rankUpdate(r.transpose(),
                                                                Scalar(-1));
      theta.template triangularView<Eigen::StrictlyUpper>() = theta.transpose();
      theta.diagonal() += psi_inv;
    }

    const Scalar log_det = point.psi().array().log().sum() +
                           point.Lambda().log_det() + k_mat.log_det();
    Scalar value = log_det / Scalar(2);

    Vector u;
    Matrix x_t;  // Xᵀ, sample route
    if (use_scatter()) {
      value += theta.cwiseProduct(scatter_).sum() / Scalar(2);
    } else {
      x_t = data_->samples().transpose();
      // tᵢ = xᵢᵀΨ⁻¹xᵢ − ‖R xᵢ‖².
      const Matrix rx = r * x_t;
      const Vector t =
          (psi_inv.asDiagonal() * x_t.cwiseAbs2()).colwise().sum().transpose() -
          rx.colwise().squaredNorm().transpose();
      u.resize(t.size());
      Scalar acc(0);
      for (Index i = 0; i < t.size(); ++i) {
        const Scalar ti = std::max(t(i), Scalar(0));
        acc += rho(g_, ti, p);
        u(i) = weight_u(g_, ti, p);
      }
      value += acc / Scalar(data_->n());
    }
    Matrix m;
    if (lambda > Scalar(0)) {
      auto [h, mm] = detail::penalty_terms<Scalar>(
          theta, Scalar(penalty_.epsilon), with_grad);
      value += lambda * h;
      m = std::move(mm);
    }
    if (!with_grad) return {value, AmbientTriple<Scalar>{}};

    // G = ½Θ − ½ΘBΘ − (1/2n)Θ Xᵀ diag(u) X Θ, with B = S + 2λM on the
    // scatter route and B = 2λM on the sample route. Only GV and diag G are
    // needed.
    const auto apply_theta = [&](const Matrix& a) -> Matrix {
      return psi_inv.asDiagonal() * a - r.transpose() * (r * a);
    };
    Matrix b;
    if (use_scatter()) {
      b = scatter_;
      if (lambda > Scalar(0)) b += Scalar(2) * lambda * m;
    } else if (lambda > Scalar(0)) {
      b = Scalar(2) * lambda * m;
    }

    const Matrix rv = r * v;
    const Matrix dv = psi_inv.asDiagonal() * v;
    const Matrix y = dv - r.transpose() * rv;  // ΘV
    Matrix by = Matrix::Zero(p, v.cols());
    Vector diag_tbt = Vector::Zero(p);  // diag(ΘBΘ) plus the sample term
    if (b.size() > 0) {
      // One pass over B: [BRᵀ, BΨ⁻¹V]. Then BΘV = BΨ⁻¹V − BRᵀ·RV and
      // diag(ΘBΘ)ᵢ = dᵢ²Bᵢᵢ − 2dᵢ(BRᵀR)ᵢᵢ + (Rᵀ·RBRᵀ·R)ᵢᵢ.
      const Index k = r.rows();
      Matrix rhs(p, 2 * k);
      rhs << r.transpose(), dv;
      const Matrix z = b * rhs;
      const auto b_rt = z.leftCols(k);
      by = z.rightCols(k) - b_rt * rv;
      const Matrix rbr = r * b_rt;
      diag_tbt = psi_inv.cwiseAbs2().cwiseProduct(b.diagonal()) -
                 Scalar(2) * psi_inv.cwiseProduct(
                                 b_rt.cwiseProduct(r.transpose()).rowwise().sum()) +
                 (rbr * r).cwiseProduct(r).colwise().sum().transpose();
    }
    if (!use_scatter()) {
      const Scalar inv_n = Scalar(1) / Scalar(data_->n());
      const Matrix xy = data_->samples() * y;  // n×k
      by += x_t * (u.asDiagonal() * xy) * inv_n;
      const Matrix theta_x = apply_theta(x_t);  // p×n
      diag_tbt += theta_x.cwiseAbs2() * u * inv_n;
    }
    const Matrix gv = Scalar(0.5) * y - Scalar(0.5) * apply_theta(by);
    const Vector theta_diag =
        psi_inv - r.cwiseAbs2().colwise().sum().transpose();
    const Vector g_diag = Scalar(0.5) * theta_diag - Scalar(0.5) * diag_tbt;

    AmbientTriple<Scalar> grad;
    grad.v = Scalar(2) * gv * point.Lambda().matrix();
    grad.lambda = symmetrized(v.transpose() * gv);
    grad.psi = Matrix::Zero(p, p);
    grad.psi.diagonal() = g_diag;
    return {value, std::move(grad)};
  }

  const DataSet<Scalar>* data_;
  DensityGenerator g_;
  PenaltyConfig penalty_;
  Matrix scatter_;
};

}  // namespace gfm
