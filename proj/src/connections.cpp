#include "liedyn/connections.hpp"

#include <cmath>

namespace liedyn {

namespace {
constexpr double kRankTol = 1e-10;

Eigen::MatrixXd metric_sqrt(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}
}  // namespace

// ---------------------------------------------------------------------------
// Metric
// ---------------------------------------------------------------------------

Metric::Metric(Eigen::MatrixXd gram) : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols())
    throw NotPositiveDefinite("gram matrix is not square");
  if ((gram_ - gram_.transpose()).norm() > 1e-12)
    throw NotPositiveDefinite("gram matrix is not symmetric");
  gram_ = 0.5 * (gram_ + gram_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NotPositiveDefinite("gram matrix is not positive definite");
  llt_.compute(gram_);
  if (llt_.info() != Eigen::Success)
    throw NotPositiveDefinite("gram matrix factorization failed");
}

Metric Metric::identity(int dim) { return Metric(Eigen::MatrixXd::Identity(dim, dim)); }

CoAlgebraVector Metric::flat(const AlgebraVector& xi) const {
  return CoAlgebraVector(xi.signature, gram_ * xi.coeffs);
}

AlgebraVector Metric::sharp(const CoAlgebraVector& mu) const {
  return AlgebraVector(mu.signature, llt_.solve(mu.coeffs));
}

double Metric::inner(const AlgebraVector& a, const AlgebraVector& b) const {
  return a.coeffs.dot(gram_ * b.coeffs);
}

double Metric::norm(const AlgebraVector& a) const {
  return std::sqrt(std::max(0.0, inner(a, a)));
}

// ---------------------------------------------------------------------------
// Subspace
// ---------------------------------------------------------------------------

Subspace Subspace::orthonormalize(const Metric& metric, const Signature& sig,
                                  const Eigen::MatrixXd& raw_basis) {
  const int dim = metric.dim();
  if (sig.dim() != dim) throw SignatureMismatch("metric dimension does not match signature");
  if (raw_basis.rows() != dim && raw_basis.size() != 0)
    throw SignatureMismatch("basis rows do not match algebra dimension");
  const int k = static_cast<int>(raw_basis.cols());

  Subspace out;
  out.signature_ = sig;
  if (k == 0) {
    out.basis_ = Eigen::MatrixXd::Zero(dim, 0);
    out.annihilator_ = Eigen::MatrixXd::Identity(dim, dim);
    return out;
  }

  // Whitened SVD: columns of raw * V * S^-1 are orthonormal in the metric.
  const Eigen::MatrixXd weighted = metric_sqrt(metric.gram()) * raw_basis;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(weighted, Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() <= kRankTol)
    throw RankDeficient("spanning set is numerically rank-deficient");
  out.basis_ = raw_basis * svd.matrixV() *
               svd.singularValues().cwiseInverse().asDiagonal();

  if (k == dim) {
    out.annihilator_ = Eigen::MatrixXd::Zero(0, dim);
  } else {
    // Covectors vanishing on the subspace: null space of basis^T.
    Eigen::JacobiSVD<Eigen::MatrixXd> null_svd(out.basis_.transpose(),
                                               Eigen::ComputeFullV);
    out.annihilator_ = null_svd.matrixV().rightCols(dim - k).transpose();
  }
  return out;
}

Subspace Subspace::orthonormalize(const Metric& metric,
                                  const std::vector<AlgebraVector>& raw_basis) {
  if (raw_basis.empty())
    throw RankDeficient("cannot infer signature from an empty basis list");
  const Signature& sig = raw_basis.front().signature;
  Eigen::MatrixXd m(sig.dim(), static_cast<int>(raw_basis.size()));
  for (size_t j = 0; j < raw_basis.size(); ++j) {
    if (raw_basis[j].signature != sig) throw SignatureMismatch("mixed signatures in basis");
    m.col(static_cast<int>(j)) = raw_basis[j].coeffs;
  }
  return orthonormalize(metric, sig, m);
}

AlgebraVector Subspace::basis_vector(int j) const {
  return AlgebraVector(signature_, basis_.col(j));
}

// ---------------------------------------------------------------------------
// Projections
// ---------------------------------------------------------------------------

AlgebraVector project(const Subspace& sub, const Metric& metric, const AlgebraVector& xi) {
  if (sub.signature() != xi.signature) throw SignatureMismatch("subspace/vector signatures differ");
  if (sub.rank() == 0) return AlgebraVector::zero(xi.signature);
  return AlgebraVector(xi.signature,
                       sub.basis() * (sub.basis().transpose() * (metric.gram() * xi.coeffs)));
}

double subspace_residual(const Subspace& sub, const Metric& metric, const AlgebraVector& xi) {
  return metric.norm(xi - project(sub, metric, xi));
}

AlgebraVector oblique_project(const Subspace& onto, const Subspace& along,
                              const AlgebraVector& xi) {
  if (onto.signature() != xi.signature || along.signature() != xi.signature)
    throw SignatureMismatch("subspace/vector signatures differ");
  const int k1 = onto.rank(), k2 = along.rank();
  if (k1 == 0) return AlgebraVector::zero(xi.signature);
  Eigen::MatrixXd stacked(xi.coeffs.size(), k1 + k2);
  stacked.leftCols(k1) = onto.basis();
  stacked.rightCols(k2) = along.basis();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().minCoeff() <= kRankTol)
    throw NotComplementary("onto/along bases overlap or degenerate");
  const Eigen::VectorXd c = svd.solve(xi.coeffs);
  if ((stacked * c - xi.coeffs).norm() > 1e-9 * std::max(1.0, xi.coeffs.norm()))
    throw NotComplementary("vector lies outside onto + along");
  return AlgebraVector(xi.signature, onto.basis() * c.head(k1));
}

Subspace direct_sum(const Metric& metric, const Subspace& a, const Subspace& b) {
  if (a.signature() != b.signature()) throw SignatureMismatch("subspace signatures differ");
  Eigen::MatrixXd stacked(a.dim(), a.rank() + b.rank());
  stacked.leftCols(a.rank()) = a.basis();
  stacked.rightCols(b.rank()) = b.basis();
  return Subspace::orthonormalize(metric, a.signature(), stacked);
}

// ---------------------------------------------------------------------------
// Connections
// ---------------------------------------------------------------------------

AlgebraVector g_connection(const Metric& metric, const AlgebraVector& xi,
                           const AlgebraVector& eta) {
  const AlgebraVector bracket = ad(xi, eta);
  const AlgebraVector a = metric.sharp(ad_star(xi, metric.flat(eta)));
  const AlgebraVector b = metric.sharp(ad_star(eta, metric.flat(xi)));
  return 0.5 * (bracket - a - b);
}

AlgebraVector d_connection(const Metric& metric, const Subspace& d,
                           const AlgebraVector& xi, const AlgebraVector& eta) {
  if (subspace_residual(d, metric, xi) > 1e-10 || subspace_residual(d, metric, eta) > 1e-10)
    throw NotInSubspace("arguments must lie in the constraint subspace");
  return project(d, metric, g_connection(metric, xi, eta));
}

AlgebraVector df_connection(const Metric& metric, const Subspace& d,
                            const Subspace& f_plus_s, const AlgebraVector& xi,
                            const AlgebraVector& eta) {
  if (d.rank() + f_plus_s.rank() != metric.dim())
    throw NotComplementary("d and f+s do not decompose the algebra");
  const AlgebraVector nabla = g_connection(metric, xi, eta);
  // When both arguments lie in d the connection collapses to p_d(nabla).
  if (subspace_residual(d, metric, xi) <= 1e-10 &&
      subspace_residual(d, metric, eta) <= 1e-10)
    return oblique_project(d, f_plus_s, nabla);
  const AlgebraVector pf_eta = oblique_project(f_plus_s, d, eta);
  return nabla + g_connection(metric, xi, pf_eta) - oblique_project(f_plus_s, d, nabla);
}

}  // namespace liedyn
