#pragma once

#include <functional>
#include <utility>

#include "liedyn/dynamics.hpp"

namespace liedyn {

/// Constraint data for control synthesis. The input frame is kept exactly as
/// authored (columns f_b, not re-normalized): control coefficients are only
/// meaningful relative to a chosen frame. The covector rows mu^a span the
/// annihilator of d within the horizontal space (extended by zero on the
/// vertical space) and mu_rate, when present, is their time derivative along
/// the flow in the same row convention.
struct ConstraintSpec {
  std::function<Subspace(const State&)> d_of_state;
  std::function<Eigen::MatrixXd(const State&)> frame_of_state;
  std::function<Eigen::MatrixXd(const State&)> mu_of_state;
  std::function<Eigen::MatrixXd(const State&)> mu_rate;  // optional analytic rate
  bool state_dependent = false;
};

/// Central-difference fallback for mu_rate: differentiates mu_of_state along
/// the frozen flow g exp(tau xi).
Eigen::MatrixXd mu_rate_fd(const ConstraintSpec& spec, const State& state,
                           double step = 1e-6);

struct TransversalityReport {
  double sigma_min_stacked;    // metric-weighted [basis(d) | frame]
  double sigma_min_decoupling; // decoupling matrix [mu^a(f_b)]
  bool pass;                   // both above 1e-8
};

TransversalityReport check_transversality(const ConstraintSpec& spec, const Metric& metric,
                                          const State& state);

/// Splits v = eta + sum_b tau^b f_b with eta in d; unique when d and the
/// frame are transversal. Throws NotComplementary when the stacked system is
/// rank-deficient or v lies outside the span.
std::pair<AlgebraVector, Eigen::VectorXd> decompose_drift(const ConstraintSpec& spec,
                                                          const State& state,
                                                          const AlgebraVector& v);

struct ControlOutput {
  Eigen::VectorXd u;      // one coefficient per frame column
  double residual;        // |d/dt mu^a(xi)| under the closed loop, worst a
  AlgebraVector eta;      // drift component inside d
  Eigen::VectorXd tau;    // drift coefficients along the frame
};

/// The unique control making d invariant: with drift = nabla_xi xi + grad,
/// solve [mu^a(f_b)] u = [mu^a(drift)] - [mu_rate^a(xi)]. The rate term
/// vanishes for state-independent d. Throws NotOnConstraint when xi is not
/// in d (1e-8) and SingularDecoupling when the decoupling matrix is rank
/// deficient (1e-10, reported singular value attached).
ControlOutput solve_control(const ConstraintSpec& spec, const Metric& metric,
                            const HomogeneousStructure& hs, const Potential& pot,
                            const State& state);

/// Mechanical dynamics with the synthesized control substituted.
RhsFn closed_loop_rhs(const ConstraintSpec& spec, const Metric& metric,
                      const HomogeneousStructure& hs, const Potential& pot);

struct ReconstructionReport {
  double max_vertical_residual = 0.0;    // vertical part of xi, metric norm
  double max_constraint_residual = 0.0;  // |mu^a| of the base velocity pulled
                                         // back through the projected frame
  long samples = 0;
};

/// Measures, per sample, how horizontal the velocity stayed and how well the
/// projected curve respects the constraint distribution downstairs: the base
/// velocity (finite-difference pushforward of the flow) is expressed in the
/// pushed-forward horizontal basis and tested against the covector rows.
ReconstructionReport reconstruction_check(const Trajectory& traj,
                                          const HomogeneousStructure& hs,
                                          const Metric& metric, const ConstraintSpec& spec);

}  // namespace liedyn
