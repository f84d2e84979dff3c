#pragma once

#include <functional>
#include <string>
#include <vector>

#include "liedyn/connections.hpp"
#include "liedyn/homogeneous.hpp"
#include "liedyn/lie_core.hpp"

namespace liedyn {

struct State {
  GroupElement g;
  AlgebraVector xi;
  double t = 0.0;
};

struct Diagnostics {
  double energy = 0.0;
  double vertical_residual = 0.0;
  double orthonormality_defect = 0.0;
  Eigen::VectorXd constraint_residuals;  // |mu^a(xi)| per constraint covector
};

struct Sample {
  double t = 0.0;
  GroupElement g;
  AlgebraVector xi;
  HomogeneousPoint q;
  Diagnostics diagnostics;
};

struct Trajectory {
  std::vector<Sample> samples;
  double step = 0.0;
  std::string scheme;
};

using RhsFn = std::function<AlgebraVector(const State&)>;
using ControllerFn = std::function<Eigen::VectorXd(const State&)>;
/// Columns are the input vector fields evaluated at the state.
using FrameFn = std::function<Eigen::MatrixXd(const State&)>;
/// Rows are the constraint covectors evaluated at the state.
using AnnihilatorFn = std::function<Eigen::MatrixXd(const State&)>;

/// Free motion: xi' = -nabla_xi xi.
RhsFn geodesic_rhs(const Metric& metric);

/// Adds the left-trivialized potential gradient: xi' = -nabla_xi xi - grad.
RhsFn mechanical_rhs(const Metric& metric, const HomogeneousStructure& hs,
                     const Potential& pot);

/// Constrained motion inside a fixed subspace d:
/// xi' = P(sharp ad*_xi flat xi) - P(grad). Requires xi in d to 1e-8.
RhsFn nonholonomic_rhs(const Metric& metric, const Subspace& d);
RhsFn nonholonomic_rhs(const Metric& metric, const Subspace& d,
                       const HomogeneousStructure& hs, const Potential& pot);

/// Mechanical motion plus controls along the input frame:
/// xi' = mechanical + sum_a u^a f_a.
RhsFn controlled_rhs(const Metric& metric, const HomogeneousStructure& hs,
                     const Potential& pot, FrameFn frame, ControllerFn controller);

/// One fixed step of the 4-stage Lie-group Runge-Kutta scheme: classical RK4
/// on the algebra velocity paired with exponential reconstruction of the
/// group factors (stage increments corrected by the inverse right-trivialized
/// differential of exp). Group invariants survive without renormalization.
State step(const RhsFn& rhs, const State& state, double h);

struct SimulationSetup {
  RhsFn rhs;
  HomogeneousStructure structure;
  Metric metric;
  Potential potential{};          // diagnostics only; dynamics live in rhs
  AnnihilatorFn mu_of_state{};    // optional constraint residual tracking
  std::string scheme = "rkmk4";
};

Diagnostics diagnose(const SimulationSetup& setup, const State& state);

/// Integrates over [initial.t, initial.t + T] in ceil(T/h) steps, the last
/// one shortened to land exactly on the horizon. Samples (with diagnostics)
/// are recorded at every grid point including the initial state. Throws
/// NonFinite with the offending step index if the state leaves IEEE range.
Trajectory simulate(const SimulationSetup& setup, const State& initial, double T,
                    double h);

}  // namespace liedyn
