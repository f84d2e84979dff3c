#pragma once

#include <stdexcept>
#include <string>

namespace liedyn {

// Error taxonomy. Each type names the violated precondition so callers can
// react to the class instead of parsing messages.

struct NotSkew : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SignatureMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RankDeficient : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotComplementary : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotInSubspace : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotTangent : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotPositiveDefinite : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonPositiveInertia : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Decoupling matrix [mu^a(f_b)] numerically singular; carries the offending
// singular value for diagnosis.
struct SingularDecoupling : std::runtime_error {
  SingularDecoupling(const std::string& what, double sigma)
      : std::runtime_error(what), sigma_min(sigma) {}
  double sigma_min;
};

struct NotOnConstraint : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// State became non-finite during integration; carries the step index.
struct NonFinite : std::runtime_error {
  NonFinite(const std::string& what, long step)
      : std::runtime_error(what), step_index(step) {}
  long step_index;
};

// Configuration rejected; carries the offending key path.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& key_path, const std::string& reason)
      : std::runtime_error(key_path + ": " + reason), key(key_path) {}
  std::string key;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace liedyn
