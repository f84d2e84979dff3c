#include "liedyn/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace liedyn {

namespace {

// Inverse right-trivialized differential of exp for the body-frame equation
// g' = g xi: u' = w + 1/2 [u, w] + 1/12 [u, [u, w]] + O(u^4). The quadratic
// term is required for fourth order.
AlgebraVector dexpinv(const AlgebraVector& u, const AlgebraVector& w) {
  const AlgebraVector uw = ad(u, w);
  return w + 0.5 * uw + (1.0 / 12.0) * ad(u, uw);
}

}  // namespace

RhsFn geodesic_rhs(const Metric& metric) {
  return [metric](const State& s) { return -g_connection(metric, s.xi, s.xi); };
}

RhsFn mechanical_rhs(const Metric& metric, const HomogeneousStructure& hs,
                     const Potential& pot) {
  return [metric, hs, pot](const State& s) {
    return -g_connection(metric, s.xi, s.xi) - trivialized_gradient(hs, metric, pot, s.g);
  };
}

RhsFn nonholonomic_rhs(const Metric& metric, const Subspace& d) {
  return [metric, d](const State& s) {
    if (subspace_residual(d, metric, s.xi) > 1e-8)
      throw NotInSubspace("velocity left the constraint subspace");
    return project(d, metric, metric.sharp(ad_star(s.xi, metric.flat(s.xi))));
  };
}

RhsFn nonholonomic_rhs(const Metric& metric, const Subspace& d,
                       const HomogeneousStructure& hs, const Potential& pot) {
  const RhsFn kinetic = nonholonomic_rhs(metric, d);
  return [metric, d, hs, pot, kinetic](const State& s) {
    return kinetic(s) - project(d, metric, trivialized_gradient(hs, metric, pot, s.g));
  };
}

RhsFn controlled_rhs(const Metric& metric, const HomogeneousStructure& hs,
                     const Potential& pot, FrameFn frame, ControllerFn controller) {
  const RhsFn mech = mechanical_rhs(metric, hs, pot);
  return [mech, frame = std::move(frame),
          controller = std::move(controller)](const State& s) {
    const Eigen::MatrixXd fields = frame(s);
    const Eigen::VectorXd u = controller(s);
    if (fields.cols() != u.size())
      throw SignatureMismatch("control dimension does not match the input frame");
    AlgebraVector out = mech(s);
    out.coeffs += fields * u;
    return out;
  };
}

State step(const RhsFn& rhs, const State& state, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
  const Signature& sig = state.xi.signature;
  const GroupElement& g = state.g;
  const AlgebraVector& xi = state.xi;

  const AlgebraVector a1 = rhs(state);
  const AlgebraVector& k1 = xi;

  const AlgebraVector u2 = (0.5 * h) * k1;
  const AlgebraVector xi2 = xi + (0.5 * h) * a1;
  const AlgebraVector k2 = dexpinv(u2, xi2);
  const AlgebraVector a2 =
      rhs(State{compose(g, exp(sig, u2)), xi2, state.t + 0.5 * h});

  const AlgebraVector u3 = (0.5 * h) * k2;
  const AlgebraVector xi3 = xi + (0.5 * h) * a2;
  const AlgebraVector k3 = dexpinv(u3, xi3);
  const AlgebraVector a3 =
      rhs(State{compose(g, exp(sig, u3)), xi3, state.t + 0.5 * h});

  const AlgebraVector u4 = h * k3;
  const AlgebraVector xi4 = xi + h * a3;
  const AlgebraVector k4 = dexpinv(u4, xi4);
  const AlgebraVector a4 = rhs(State{compose(g, exp(sig, u4)), xi4, state.t + h});

  const AlgebraVector increment = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return State{compose(g, exp(sig, increment)),
               xi + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4), state.t + h};
}

Diagnostics diagnose(const SimulationSetup& setup, const State& state) {
  Diagnostics d;
  d.energy = 0.5 * setup.metric.inner(state.xi, state.xi);
  if (setup.potential.value)
    d.energy += setup.potential.value(pi(setup.structure, state.g));
  d.vertical_residual =
      is_horizontal(setup.structure, setup.metric, state.xi).residual;
  d.orthonormality_defect = state.g.orthonormality_defect();
  if (setup.mu_of_state) {
    const Eigen::MatrixXd mu = setup.mu_of_state(state);
    d.constraint_residuals = (mu * state.xi.coeffs).cwiseAbs();
  }
  return d;
}

Trajectory simulate(const SimulationSetup& setup, const State& initial, double T,
                    double h) {
  if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(h > 0.0) || h > T * (1.0 + 1e-12))
    throw std::invalid_argument("step must satisfy 0 < h <= T");

  const double ratio = T / h;
  long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9)
    n = static_cast<long>(std::ceil(ratio));

  Trajectory traj;
  traj.step = h;
  traj.scheme = setup.scheme;
  traj.samples.reserve(static_cast<size_t>(n) + 1);

  State s = initial;
  const double t0 = initial.t;
  const auto record = [&](const State& st) {
    traj.samples.push_back(
        Sample{st.t, st.g, st.xi, pi(setup.structure, st.g), diagnose(setup, st)});
  };
  record(s);
  for (long i = 0; i < n; ++i) {
    const double target = (i + 1 == n) ? t0 + T : t0 + static_cast<double>(i + 1) * h;
    s = step(setup.rhs, s, target - s.t);
    s.t = target;
    if (!s.g.finite() || !s.xi.coeffs.allFinite())
      throw NonFinite("state left IEEE range during integration", i);
    record(s);
  }
  return traj;
}

}  // namespace liedyn
