#pragma once

#include <random>

#include "liedyn/lie_core.hpp"

namespace liedyn::testsupport {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec3(std::mt19937_64& rng, double scale = 1.0) {
  return Vec3(uniform(rng, -scale, scale), uniform(rng, -scale, scale),
              uniform(rng, -scale, scale));
}

inline AlgebraVector random_algebra(const Signature& sig, std::mt19937_64& rng,
                                    double scale = 1.0) {
  Eigen::VectorXd c(sig.dim());
  for (int i = 0; i < c.size(); ++i) c[i] = uniform(rng, -scale, scale);
  return AlgebraVector(sig, std::move(c));
}

inline CoAlgebraVector random_coalgebra(const Signature& sig, std::mt19937_64& rng,
                                        double scale = 1.0) {
  Eigen::VectorXd c(sig.dim());
  for (int i = 0; i < c.size(); ++i) c[i] = uniform(rng, -scale, scale);
  return CoAlgebraVector(sig, std::move(c));
}

inline GroupElement random_group(const Signature& sig, std::mt19937_64& rng) {
  std::vector<Factor> f;
  for (int i = 0; i < sig.factor_count(); ++i) {
    switch (sig.kind(i)) {
      case FactorKind::Rotation:
        f.emplace_back(exp_so3(random_vec3(rng, 1.5)));
        break;
      case FactorKind::Translation:
        f.emplace_back(random_vec3(rng, 1.0));
        break;
      case FactorKind::Angle:
        f.emplace_back(uniform(rng, 0.0, 6.283185307179586));
        break;
    }
  }
  return GroupElement(sig, std::move(f));
}

}  // namespace liedyn::testsupport
