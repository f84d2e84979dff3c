#include "liedyn/scenarios.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "liedyn/errors.hpp"

namespace liedyn {

namespace {

Subspace coordinate_span(const Metric& m, const Signature& sig,
                         std::initializer_list<int> idx) {
  Eigen::MatrixXd raw(sig.dim(), static_cast<int>(idx.size()));
  int j = 0;
  for (int i : idx) raw.col(j++) = Eigen::VectorXd::Unit(sig.dim(), i);
  return Subspace::orthonormalize(m, sig, raw);
}

HomogeneousStructure euclidean_structure(const Metric& m) {
  const Signature sig = Signature::se3();
  auto pi_fn = [](const GroupElement& g) {
    return HomogeneousPoint({PointFactor(g.translation(1))});
  };
  auto act = [](const GroupElement& a, const HomogeneousPoint& q) {
    return HomogeneousPoint(
        {PointFactor(Vec3(a.rotation(0) * q.vec(0) + a.translation(1)))});
  };
  return HomogeneousStructure(sig, pi_fn, act, coordinate_span(m, sig, {0, 1, 2}),
                              coordinate_span(m, sig, {3, 4, 5}));
}

HomogeneousStructure sphere_pair_structure(const Metric& m) {
  const Signature sig = Signature::so3xso3();
  auto pi_fn = [](const GroupElement& g) {
    return HomogeneousPoint(
        {PointFactor(UnitVec3(g.rotation(0) * Vec3::UnitZ())), PointFactor(g.rotation(1))});
  };
  auto act = [](const GroupElement& a, const HomogeneousPoint& q) {
    return HomogeneousPoint({PointFactor(UnitVec3(a.rotation(0) * q.unit(0))),
                             PointFactor(Mat3(a.rotation(1) * q.rot(1)))});
  };
  return HomogeneousStructure(sig, pi_fn, act, coordinate_span(m, sig, {2}),
                              coordinate_span(m, sig, {0, 1, 3, 4, 5}));
}

HomogeneousStructure blade_structure(const Metric& m) {
  const Signature sig = Signature::so3xs1();
  auto pi_fn = [](const GroupElement& g) {
    return HomogeneousPoint(
        {PointFactor(UnitVec3(g.rotation(0) * Vec3::UnitZ())), PointFactor(g.angle(1))});
  };
  auto act = [](const GroupElement& a, const HomogeneousPoint& q) {
    return HomogeneousPoint({PointFactor(UnitVec3(a.rotation(0) * q.unit(0))),
                             PointFactor(a.angle(1) + q.angle(1))});
  };
  return HomogeneousStructure(sig, pi_fn, act, coordinate_span(m, sig, {2}),
                              coordinate_span(m, sig, {0, 1, 3}));
}

GroupElement random_group_element(const Signature& sig, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::uniform_real_distribution<double> turn(0.0, 2.0 * M_PI);
  std::vector<Factor> factors;
  for (int i = 0; i < sig.factor_count(); ++i) {
    switch (sig.kind(i)) {
      case FactorKind::Rotation: {
        const Vec3 axis(box(rng), box(rng), box(rng));
        factors.emplace_back(exp_so3(Vec3(1.5 * axis)));
        break;
      }
      case FactorKind::Translation:
        factors.emplace_back(Vec3(box(rng), box(rng), box(rng)));
        break;
      case FactorKind::Angle:
        factors.emplace_back(turn(rng));
        break;
    }
  }
  return GroupElement(sig, std::move(factors));
}

State initial_from_coeffs(const ScenarioSpec& spec, const Eigen::VectorXd& coeffs) {
  return State{identity(spec.structure.signature),
               AlgebraVector(spec.structure.signature, coeffs), 0.0};
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

PropertyResult residual_property(std::string name, double worst, double tol) {
  PropertyResult r;
  r.name = std::move(name);
  r.worst = worst;
  r.tolerance = tol;
  r.pass = worst <= tol;
  return r;
}

PropertyResult rank_property(std::string name, double worst, double tol) {
  PropertyResult r;
  r.name = std::move(name);
  r.worst = worst;
  r.tolerance = tol;
  r.pass = worst > tol;
  return r;
}

}  // namespace

ScenarioSpec build_se3_r3(double k) {
  if (k < 0.0) throw ConfigError("parameters.k", "spring constant must be nonnegative");
  Metric metric = Metric::identity(6);
  HomogeneousStructure structure = euclidean_structure(metric);
  Potential potential;
  if (k > 0.0) {
    potential.value = [k](const HomogeneousPoint& q) {
      return 0.5 * k * q.vec(0).squaredNorm();
    };
    potential.gradient = [k](const GroupElement& g) {
      AlgebraVector out = AlgebraVector::zero(Signature::se3());
      out.coeffs.tail<3>() = k * (g.rotation(0).transpose() * g.translation(1));
      return out;
    };
  }
  return ScenarioSpec{"se3_r3",     std::move(structure),     std::move(metric),
                      std::nullopt, std::move(potential), {}, {{"k", k}}};
}

ScenarioSpec build_sphere_on_sphere(const Vec3& inertia) {
  if (!(inertia.minCoeff() > 0.0))
    throw NonPositiveInertia("rotor inertia must be componentwise positive");
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(6, 6);
  gram.block<3, 3>(3, 3) = inertia.asDiagonal();
  Metric metric{std::move(gram)};
  HomogeneousStructure structure = sphere_pair_structure(metric);
  const Signature sig = Signature::so3xso3();

  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(6, 3);
  raw(0, 0) = -1.0;
  raw(3, 0) = 1.0;
  raw(1, 1) = -1.0;
  raw(4, 1) = 1.0;
  raw(5, 2) = 1.0;
  const Subspace d = Subspace::orthonormalize(metric, sig, raw);

  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(6, 2);
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(2, 6);
  for (int a = 0; a < 2; ++a) {
    frame(a, a) = 1.0;
    frame(3 + a, a) = 1.0 / inertia[a];
    mu(a, a) = 1.0;
    mu(a, 3 + a) = 1.0;
  }
  ConstraintSpec constraint;
  constraint.d_of_state = [d](const State&) { return d; };
  constraint.frame_of_state = [frame](const State&) { return frame; };
  constraint.mu_of_state = [mu](const State&) { return mu; };
  constraint.state_dependent = false;

  const Vec3 j = inertia;
  auto feedback = [j](const State& s) {
    const Vec3 w = s.xi.part3(1);
    Eigen::VectorXd u(2);
    u << (j[2] - j[1]) / (j[0] + 1.0) * w[1] * w[2],
        (j[0] - j[2]) / (j[1] + 1.0) * w[0] * w[2];
    return u;
  };

  return ScenarioSpec{"sphere_on_sphere",
                      std::move(structure),
                      std::move(metric),
                      std::move(constraint),
                      Potential{},
                      feedback,
                      {{"J1", inertia[0]}, {"J2", inertia[1]}, {"J3", inertia[2]}, {"rho", 2.0}}};
}

ScenarioSpec build_blade_on_sphere() {
  Metric metric = Metric::identity(4);
  HomogeneousStructure structure = blade_structure(metric);

  ConstraintSpec constraint;
  constraint.state_dependent = true;
  constraint.d_of_state = [metric](const State& s) {
    const double th = s.g.angle(1);
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(4, 2);
    raw(0, 0) = -std::sin(th);
    raw(1, 0) = std::cos(th);
    raw(3, 1) = 1.0;
    return Subspace::orthonormalize(metric, Signature::so3xs1(), raw);
  };
  constraint.frame_of_state = [](const State& s) {
    const double th = s.g.angle(1);
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(4, 1);
    f(0, 0) = std::cos(th);
    f(1, 0) = std::sin(th);
    return f;
  };
  constraint.mu_of_state = [](const State& s) {
    const double th = s.g.angle(1);
    Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(1, 4);
    mu(0, 0) = std::cos(th);
    mu(0, 1) = std::sin(th);
    return mu;
  };
  constraint.mu_rate = [](const State& s) {
    const double th = s.g.angle(1);
    const double w = s.xi.coeffs[3];
    Eigen::MatrixXd rate = Eigen::MatrixXd::Zero(1, 4);
    rate(0, 0) = -w * std::sin(th);
    rate(0, 1) = w * std::cos(th);
    return rate;
  };

  auto feedback = [](const State& s) {
    const double th = s.g.angle(1);
    Eigen::VectorXd u(1);
    u << s.xi.coeffs[3] * (s.xi.coeffs[0] * std::sin(th) - s.xi.coeffs[1] * std::cos(th));
    return u;
  };

  return ScenarioSpec{"blade_on_sphere", std::move(structure), std::move(metric),
                      std::move(constraint), Potential{}, feedback, {}};
}

std::vector<std::string> scenario_names() {
  return {"se3_r3", "sphere_on_sphere", "blade_on_sphere"};
}

std::map<std::string, double> scenario_default_parameters(const std::string& name) {
  if (name == "se3_r3") return {{"k", 0.0}};
  if (name == "sphere_on_sphere") return {{"J1", 1.0}, {"J2", 2.0}, {"J3", 3.0}, {"rho", 2.0}};
  if (name == "blade_on_sphere") return {};
  throw ConfigError("scenario", "unknown scenario '" + name + "'");
}

ScenarioSpec build_scenario(const std::string& name,
                            const std::map<std::string, double>& overrides) {
  std::map<std::string, double> params = scenario_default_parameters(name);
  for (const auto& [key, value] : overrides) {
    auto it = params.find(key);
    if (it == params.end())
      throw ConfigError("parameters." + key, "not a parameter of scenario '" + name + "'");
    it->second = value;
  }
  if (name == "se3_r3") return build_se3_r3(params.at("k"));
  if (name == "sphere_on_sphere") {
    ScenarioSpec spec = build_sphere_on_sphere(
        Vec3(params.at("J1"), params.at("J2"), params.at("J3")));
    spec.parameters["rho"] = params.at("rho");
    return spec;
  }
  return build_blade_on_sphere();
}

State default_initial(const ScenarioSpec& spec, const std::string& mode) {
  const bool constrained_mode = mode == "nonholonomic" || mode == "closed_loop";
  if (mode != "geodesic" && mode != "mechanical" && !constrained_mode)
    throw ConfigError("mode", "unknown mode '" + mode + "'");
  if (constrained_mode && !spec.constraint)
    throw ConfigError("mode", "scenario '" + spec.name + "' has no constraint");

  Eigen::VectorXd coeffs;
  if (spec.name == "se3_r3") {
    coeffs = Eigen::VectorXd::Zero(6);
    coeffs[3] = 1.0;
  } else if (spec.name == "sphere_on_sphere") {
    coeffs.resize(6);
    if (constrained_mode)
      coeffs << -0.1, -0.2, 0.0, 0.1, 0.2, 0.3;
    else
      coeffs << 0.4, -0.7, 0.0, 0.9, 1.1, -0.8;
  } else {
    coeffs.resize(4);
    coeffs << 0.0, 0.3, 0.0, 1.0;
  }
  return initial_from_coeffs(spec, coeffs);
}

State sample_on_constraint(const ScenarioSpec& spec, std::mt19937_64& rng) {
  const Signature sig = spec.structure.signature;
  const GroupElement g = random_group_element(sig, rng);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  AlgebraVector xi = AlgebraVector::zero(sig);
  if (spec.constraint) {
    const Subspace d = spec.constraint->d_of_state(State{g, xi, 0.0});
    Eigen::VectorXd c(d.rank());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = box(rng);
    xi.coeffs = d.basis() * c;
  } else {
    for (Eigen::Index i = 0; i < xi.coeffs.size(); ++i) xi.coeffs[i] = box(rng);
  }
  return State{g, std::move(xi), 0.0};
}

PropertyResult check_gram_positive_definite(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (gram + gram.transpose()));
  return rank_property("metric_positive_definite", eig.eigenvalues().minCoeff(), 0.0);
}

VerifyReport verify_scenario(const ScenarioSpec& spec, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("verify_scenario needs n_samples >= 1");
  std::mt19937_64 rng(seed);
  VerifyReport report;
  report.scenario = spec.name;
  report.samples = n_samples;
  report.seed = seed;

  report.properties.push_back(check_gram_positive_definite(spec.metric.gram()));

  // The isotropy directions must be exactly the kernel of the projection:
  // vertical pushforwards vanish, horizontal ones stay independent.
  const GroupElement e = identity(spec.structure.signature);
  double kernel_worst = 0.0;
  for (int j = 0; j < spec.structure.vertical.rank(); ++j)
    kernel_worst = std::max(
        kernel_worst, pi_star_fd(spec.structure, e, spec.structure.vertical.basis_vector(j)).norm());
  report.properties.push_back(residual_property("isotropy_kernel", kernel_worst, 1e-6));

  const int hrank = spec.structure.horizontal.rank();
  Eigen::MatrixXd pushed(
      pi_star_fd(spec.structure, e, spec.structure.horizontal.basis_vector(0)).size(), hrank);
  for (int j = 0; j < hrank; ++j)
    pushed.col(j) = pi_star_fd(spec.structure, e, spec.structure.horizontal.basis_vector(j));
  Eigen::JacobiSVD<Eigen::MatrixXd> pushed_svd(pushed);
  report.properties.push_back(
      rank_property("horizontal_rank", pushed_svd.singularValues().minCoeff(), 1e-6));

  if (spec.constraint) {
    double sigma_worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
      const State s = sample_on_constraint(spec, rng);
      const TransversalityReport tr = check_transversality(*spec.constraint, spec.metric, s);
      sigma_worst = std::min({sigma_worst, tr.sigma_min_stacked, tr.sigma_min_decoupling});
    }
    report.properties.push_back(rank_property("transversality", sigma_worst, 1e-8));
  }

  if (spec.constraint && spec.closed_form_control) {
    double agree_worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
      const State s = sample_on_constraint(spec, rng);
      const ControlOutput out =
          solve_control(*spec.constraint, spec.metric, spec.structure, spec.potential, s);
      agree_worst = std::max(
          agree_worst, (out.u - spec.closed_form_control(s)).lpNorm<Eigen::Infinity>());
    }
    report.properties.push_back(residual_property("closed_form_agreement", agree_worst, 1e-10));
  }

  if (spec.name == "se3_r3") {
    const State init = default_initial(spec, "geodesic");
    SimulationSetup setup{geodesic_rhs(spec.metric), spec.structure, spec.metric};
    const Trajectory traj = simulate(setup, init, 1.0, 1e-2);
    const Vec3 v = init.xi.part3(1);
    double line_worst = 0.0;
    for (const Sample& s : traj.samples) {
      line_worst = std::max(line_worst,
                            (s.q.vec(0) - s.t * v).lpNorm<Eigen::Infinity>());
      line_worst = std::max(
          line_worst, (s.g.rotation(0) - Mat3::Identity()).lpNorm<Eigen::Infinity>());
    }
    report.properties.push_back(residual_property("straight_line_geodesic", line_worst, 1e-10));

    double proj_worst = 0.0;
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    for (int i = 0; i < n_samples; ++i) {
      AlgebraVector xi = AlgebraVector::zero(spec.structure.signature);
      for (Eigen::Index j = 0; j < xi.coeffs.size(); ++j) xi.coeffs[j] = box(rng);
      Eigen::VectorXd expect = xi.coeffs;
      expect.head<3>().setZero();
      const AlgebraVector h = project(spec.structure.horizontal, spec.metric, xi);
      proj_worst = std::max(proj_worst, (h.coeffs - expect).lpNorm<Eigen::Infinity>());
    }
    report.properties.push_back(residual_property("horizontal_projection", proj_worst, 1e-12));
  } else if (spec.name == "sphere_on_sphere") {
    const State init = default_initial(spec, "closed_loop");
    SimulationSetup setup{
        closed_loop_rhs(*spec.constraint, spec.metric, spec.structure, spec.potential),
        spec.structure, spec.metric, spec.potential, spec.constraint->mu_of_state};
    const Trajectory traj = simulate(setup, init, 10.0, 1e-3);
    double pi3_worst = 0.0;
    for (const Sample& s : traj.samples)
      pi3_worst = std::max(pi3_worst, std::abs(s.xi.coeffs[2] - init.xi.coeffs[2]));
    report.properties.push_back(residual_property("first_integral_pi3", pi3_worst, 1e-9));
  } else if (spec.name == "blade_on_sphere") {
    const State init = default_initial(spec, "geodesic");
    SimulationSetup setup{geodesic_rhs(spec.metric), spec.structure, spec.metric};
    const Trajectory traj = simulate(setup, init, 1.0, 1e-2);
    double still_worst = 0.0;
    for (const Sample& s : traj.samples)
      still_worst = std::max(still_worst,
                             (s.xi.coeffs - init.xi.coeffs).lpNorm<Eigen::Infinity>());
    report.properties.push_back(residual_property("free_motion_constant", still_worst, 1e-12));
  }

  report.all_pass = true;
  for (const PropertyResult& p : report.properties) report.all_pass = report.all_pass && p.pass;
  return report;
}

std::string render_report(const VerifyReport& report) {
  std::string out;
  out += "scenario " + report.scenario + "\n";
  out += "samples " + std::to_string(report.samples) + "\n";
  out += "seed " + std::to_string(report.seed) + "\n";
  for (const PropertyResult& p : report.properties) {
    out += p.name + " " + (p.pass ? "pass" : "fail") + " worst " + fmt17(p.worst) +
           " tol " + fmt17(p.tolerance) + "\n";
  }
  out += std::string("overall ") + (report.all_pass ? "pass" : "fail") + "\n";
  return out;
}

}  // namespace liedyn
