#pragma once

#include <Eigen/Dense>
#include <vector>

#include "liedyn/lie_core.hpp"

namespace liedyn {

/// Left-invariant metric on the algebra, held as the Gram matrix of the
/// coefficient basis. Validated symmetric (1e-12) and positive definite.
class Metric {
 public:
  explicit Metric(Eigen::MatrixXd gram);
  static Metric identity(int dim);

  const Eigen::MatrixXd& gram() const { return gram_; }
  int dim() const { return static_cast<int>(gram_.rows()); }

  CoAlgebraVector flat(const AlgebraVector& xi) const;
  AlgebraVector sharp(const CoAlgebraVector& mu) const;

  double inner(const AlgebraVector& a, const AlgebraVector& b) const;
  double norm(const AlgebraVector& a) const;

 private:
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Linear subspace of the algebra with a metric-orthonormal basis and the
/// full annihilator (dim - k covectors vanishing on the subspace).
class Subspace {
 public:
  /// Orthonormalizes a raw spanning matrix (columns) in the metric inner
  /// product; throws RankDeficient below singular value 1e-10 of the
  /// metric-weighted basis. An empty basis (k = 0) is allowed.
  static Subspace orthonormalize(const Metric& metric, const Signature& sig,
                                 const Eigen::MatrixXd& raw_basis);
  static Subspace orthonormalize(const Metric& metric,
                                 const std::vector<AlgebraVector>& raw_basis);

  const Signature& signature() const { return signature_; }
  const Eigen::MatrixXd& basis() const { return basis_; }        // dim x k
  const Eigen::MatrixXd& annihilator() const { return annihilator_; }  // (dim-k) x dim
  int dim() const { return static_cast<int>(basis_.rows()); }
  int rank() const { return static_cast<int>(basis_.cols()); }

  AlgebraVector basis_vector(int j) const;

 private:
  Subspace() = default;
  Signature signature_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd annihilator_;
};

/// Metric-orthogonal projection onto the subspace.
AlgebraVector project(const Subspace& sub, const Metric& metric, const AlgebraVector& xi);

/// Residual ||xi - P xi|| in the metric norm (distance to the subspace).
double subspace_residual(const Subspace& sub, const Metric& metric, const AlgebraVector& xi);

/// Projection onto `onto` along `along`; requires the two bases to form a
/// full-rank decomposition of the whole algebra.
AlgebraVector oblique_project(const Subspace& onto, const Subspace& along,
                              const AlgebraVector& xi);

/// Concatenates the two spans and orthonormalizes.
Subspace direct_sum(const Metric& metric, const Subspace& a, const Subspace& b);

/// Riemannian algebra-level connection of the left-invariant metric:
/// nabla_xi eta = 1/2 ([xi,eta] - sharp ad*_xi flat(eta) - sharp ad*_eta flat(xi)).
AlgebraVector g_connection(const Metric& metric, const AlgebraVector& xi,
                           const AlgebraVector& eta);

/// Projected connection P(nabla_xi eta) for xi, eta in d (residual 1e-10,
/// else NotInSubspace).
AlgebraVector d_connection(const Metric& metric, const Subspace& d,
                           const AlgebraVector& xi, const AlgebraVector& eta);

/// Connection adapted to the splitting g = d + (f + s):
/// nabla^{d,f}_xi eta = nabla_xi eta + nabla_xi(p_f eta) - p_f(nabla_xi eta),
/// where p_f projects onto f_plus_s along d. For eta in d this reduces
/// algebraically to p_d(nabla_xi eta).
AlgebraVector df_connection(const Metric& metric, const Subspace& d,
                            const Subspace& f_plus_s, const AlgebraVector& xi,
                            const AlgebraVector& eta);

}  // namespace liedyn
