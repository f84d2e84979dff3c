#include "liedyn/virtual_constraints.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "liedyn/errors.hpp"

namespace liedyn {

namespace {

constexpr double kDecouplingTol = 1e-10;
constexpr double kOnConstraintTol = 1e-8;

State flow_by(const State& state, double tau) {
  AlgebraVector scaled = state.xi;
  scaled.coeffs *= tau;
  return State{compose(state.g, exp(state.g.signature(), scaled)), state.xi,
               state.t + tau};
}

Eigen::MatrixXd mu_rate_rows(const ConstraintSpec& spec, const State& state,
                             Eigen::Index rows, Eigen::Index cols) {
  if (!spec.state_dependent) return Eigen::MatrixXd::Zero(rows, cols);
  if (spec.mu_rate) return spec.mu_rate(state);
  return mu_rate_fd(spec, state);
}

}  // namespace

Eigen::MatrixXd mu_rate_fd(const ConstraintSpec& spec, const State& state, double step) {
  const Eigen::MatrixXd ahead = spec.mu_of_state(flow_by(state, step));
  const Eigen::MatrixXd behind = spec.mu_of_state(flow_by(state, -step));
  return (ahead - behind) / (2.0 * step);
}

TransversalityReport check_transversality(const ConstraintSpec& spec, const Metric& metric,
                                          const State& state) {
  const Subspace d = spec.d_of_state(state);
  const Eigen::MatrixXd frame = spec.frame_of_state(state);
  Eigen::MatrixXd stacked(metric.dim(), d.rank() + frame.cols());
  stacked << d.basis(), frame;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(metric.gram());
  const Eigen::MatrixXd root =
      eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
      eig.eigenvectors().transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> stacked_svd(root * stacked);

  const Eigen::MatrixXd decoupling = spec.mu_of_state(state) * frame;
  Eigen::JacobiSVD<Eigen::MatrixXd> dec_svd(decoupling);

  TransversalityReport report;
  report.sigma_min_stacked = stacked_svd.singularValues().minCoeff();
  report.sigma_min_decoupling = dec_svd.singularValues().minCoeff();
  report.pass = report.sigma_min_stacked > 1e-8 && report.sigma_min_decoupling > 1e-8;
  return report;
}

std::pair<AlgebraVector, Eigen::VectorXd> decompose_drift(const ConstraintSpec& spec,
                                                          const State& state,
                                                          const AlgebraVector& v) {
  const Subspace d = spec.d_of_state(state);
  const Eigen::MatrixXd frame = spec.frame_of_state(state);
  const Eigen::Index k = d.rank();
  Eigen::MatrixXd stacked(d.basis().rows(), k + frame.cols());
  stacked << d.basis(), frame;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().minCoeff() <= kDecouplingTol)
    throw NotComplementary("constraint subspace and input frame overlap");
  const Eigen::VectorXd c = svd.solve(v.coeffs);
  const double scale = std::max(1.0, v.coeffs.norm());
  if ((stacked * c - v.coeffs).norm() > 1e-11 * scale)
    throw NotComplementary("vector not contained in constraint-plus-frame span");

  AlgebraVector eta = AlgebraVector::zero(v.signature);
  eta.coeffs = d.basis() * c.head(k);
  return {eta, c.tail(frame.cols())};
}

ControlOutput solve_control(const ConstraintSpec& spec, const Metric& metric,
                            const HomogeneousStructure& hs, const Potential& pot,
                            const State& state) {
  const Subspace d = spec.d_of_state(state);
  if (subspace_residual(d, metric, state.xi) > kOnConstraintTol)
    throw NotOnConstraint("velocity does not satisfy the constraint");

  AlgebraVector drift = g_connection(metric, state.xi, state.xi) +
                        trivialized_gradient(hs, metric, pot, state.g);

  const Eigen::MatrixXd frame = spec.frame_of_state(state);
  const Eigen::MatrixXd mu = spec.mu_of_state(state);
  const Eigen::MatrixXd rate = mu_rate_rows(spec, state, mu.rows(), mu.cols());

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mu * frame,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sigma = svd.singularValues().minCoeff();
  if (sigma <= kDecouplingTol)
    throw SingularDecoupling("decoupling matrix is numerically singular", sigma);

  ControlOutput out;
  out.u = svd.solve(mu * drift.coeffs - rate * state.xi.coeffs);

  const Eigen::VectorXd xi_dot = -drift.coeffs + frame * out.u;
  out.residual = (mu * xi_dot + rate * state.xi.coeffs).lpNorm<Eigen::Infinity>();

  auto [eta, tau] = decompose_drift(spec, state, drift);
  out.eta = std::move(eta);
  out.tau = std::move(tau);
  return out;
}

RhsFn closed_loop_rhs(const ConstraintSpec& spec, const Metric& metric,
                      const HomogeneousStructure& hs, const Potential& pot) {
  FrameFn frame = spec.frame_of_state;
  ControllerFn controller = [spec, metric, hs, pot](const State& state) {
    return solve_control(spec, metric, hs, pot, state).u;
  };
  return controlled_rhs(metric, hs, pot, std::move(frame), std::move(controller));
}

ReconstructionReport reconstruction_check(const Trajectory& traj,
                                          const HomogeneousStructure& hs,
                                          const Metric& metric, const ConstraintSpec& spec) {
  ReconstructionReport report;
  for (const Sample& sample : traj.samples) {
    const State state{sample.g, sample.xi, sample.t};
    const double vertical = subspace_residual(hs.horizontal, metric, sample.xi);

    // Base velocity of the projected curve, and the horizontal basis pushed
    // down at the same configuration; both via the same finite-difference map
    // so the comparison is self-consistent.
    const Eigen::VectorXd qdot = pi_star_fd(hs, sample.g, sample.xi);
    const Eigen::Index k = hs.horizontal.rank();
    Eigen::MatrixXd pushed(qdot.size(), k);
    for (Eigen::Index j = 0; j < k; ++j)
      pushed.col(j) = pi_star_fd(hs, sample.g, hs.horizontal.basis_vector(static_cast<int>(j)));
    const Eigen::VectorXd kappa = pushed.colPivHouseholderQr().solve(qdot);

    AlgebraVector horizontal_part = AlgebraVector::zero(sample.xi.signature);
    horizontal_part.coeffs = hs.horizontal.basis() * kappa;
    const Eigen::MatrixXd mu = spec.mu_of_state(state);
    const double constraint = (mu * horizontal_part.coeffs).lpNorm<Eigen::Infinity>();

    report.max_vertical_residual = std::max(report.max_vertical_residual, vertical);
    report.max_constraint_residual = std::max(report.max_constraint_residual, constraint);
    ++report.samples;
  }
  return report;
}

}  // namespace liedyn
