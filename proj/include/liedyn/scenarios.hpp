#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "liedyn/virtual_constraints.hpp"

namespace liedyn {

/// A fully wired system: group, metric, projection, optional constraint and
/// feedback data, plus the named parameters it was built from. Immutable
/// after construction; all callbacks are pure.
struct ScenarioSpec {
  std::string name;
  HomogeneousStructure structure;
  Metric metric;
  std::optional<ConstraintSpec> constraint;
  Potential potential;
  std::function<Eigen::VectorXd(const State&)> closed_form_control;
  std::map<std::string, double> parameters;
};

/// Rigid motions over flat space; the isotropy group is the rotation block
/// and an optional spring potential 0.5 k |r|^2 acts on the base point.
ScenarioSpec build_se3_r3(double k);

/// Sphere rolling on a sphere: paired counter-rotation constraint, rotor
/// inputs on the first two axes, feedback law attached in closed form.
ScenarioSpec build_sphere_on_sphere(const Vec3& inertia);

/// Knife-edge blade on a sphere: heading-dependent constraint with analytic
/// covector rate and a single steering input.
ScenarioSpec build_blade_on_sphere();

/// Registry used by the command line: canonical names, per-scenario defaults,
/// and construction from a parameter map. Unknown names or parameters raise
/// ConfigError.
std::vector<std::string> scenario_names();
std::map<std::string, double> scenario_default_parameters(const std::string& name);
ScenarioSpec build_scenario(const std::string& name,
                            const std::map<std::string, double>& overrides = {});

/// Default initial state for a run mode; constraint modes start on the
/// constraint by construction.
State default_initial(const ScenarioSpec& spec, const std::string& mode);

/// Random state whose velocity lies in the constraint subspace at a random
/// configuration (anywhere in the algebra when the scenario is unconstrained).
State sample_on_constraint(const ScenarioSpec& spec, std::mt19937_64& rng);

struct PropertyResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;      // extremal measured value, per-property meaning
  double tolerance = 0.0;  // threshold the value was held against
};

struct VerifyReport {
  std::string scenario;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<PropertyResult> properties;
  bool all_pass = false;
};

/// Positive-definiteness diagnostic on a raw Gram matrix (worst = smallest
/// eigenvalue). Exposed separately so corrupted input is reportable; Metric
/// itself refuses to hold one.
PropertyResult check_gram_positive_definite(const Eigen::MatrixXd& gram);

/// Runs the scenario's property suite: metric validity, projection kernel
/// against the isotropy splitting, constraint transversality and closed-form
/// feedback agreement when present, and the scenario's conserved-quantity
/// checks. Deterministic for a given seed.
VerifyReport verify_scenario(const ScenarioSpec& spec, int n_samples, std::uint64_t seed);

/// Stable text rendering of a report (17 significant digits), suitable for
/// byte-level comparison across runs.
std::string render_report(const VerifyReport& report);

}  // namespace liedyn
