#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "liedyn/connections.hpp"
#include "liedyn/lie_core.hpp"

namespace liedyn {

/// Point on the unit sphere; construction normalizes and rejects vectors
/// whose norm is off by more than 1e-6.
class UnitVec3 {
 public:
  UnitVec3() : v_(0.0, 0.0, 1.0) {}
  explicit UnitVec3(const Vec3& v);
  const Vec3& value() const { return v_; }

 private:
  Vec3 v_;
};

/// One factor of a point on the base manifold: sphere point, Euclidean
/// point, rotation, or angle (kept in [0, 2pi)).
using PointFactor = std::variant<UnitVec3, Vec3, Mat3, double>;

class HomogeneousPoint {
 public:
  HomogeneousPoint() = default;
  explicit HomogeneousPoint(std::vector<PointFactor> factors);

  int factor_count() const { return static_cast<int>(factors_.size()); }
  const PointFactor& factor(int i) const { return factors_[static_cast<size_t>(i)]; }
  const Vec3& unit(int i) const;
  const Vec3& vec(int i) const;
  const Mat3& rot(int i) const;
  double angle(int i) const;

 private:
  std::vector<PointFactor> factors_;
};

/// Ambient coordinates of the point: 3 per sphere/Euclidean factor, 9 per
/// rotation (row-major), 1 per angle.
Eigen::VectorXd flatten(const HomogeneousPoint& q);

/// Componentwise distance with angle wrap; max over factors.
double point_distance(const HomogeneousPoint& a, const HomogeneousPoint& b);

/// Projection G -> H together with the transitive action of G on H and the
/// metric-orthogonal vertical/horizontal splitting of the algebra.
struct HomogeneousStructure {
  using PiFn = std::function<HomogeneousPoint(const GroupElement&)>;
  using ActionFn = std::function<HomogeneousPoint(const GroupElement&, const HomogeneousPoint&)>;

  HomogeneousStructure(Signature sig, PiFn pi, ActionFn action, Subspace vertical,
                       Subspace horizontal);

  Signature signature;
  PiFn pi_fn;
  ActionFn action_fn;
  Subspace vertical;
  Subspace horizontal;
};

HomogeneousPoint pi(const HomogeneousStructure& hs, const GroupElement& g);
HomogeneousPoint action(const HomogeneousStructure& hs, const GroupElement& a,
                        const HomogeneousPoint& q);

/// Pulls a tangent value at g back to the algebra through left translation.
/// Factor rules: rotation R^T Rdot (must be skew to 1e-9, else NotTangent),
/// translation R_partner^T rdot (plain rdot when unpaired), angle thetadot.
AlgebraVector left_trivialize(const GroupElement& g, const std::vector<Factor>& gdot);

/// Inverse map: the tangent value at g of the left-invariant field xi.
std::vector<Factor> tangent_from_algebra(const GroupElement& g, const AlgebraVector& xi);

struct HorizontalityCheck {
  bool horizontal;
  double residual;  // metric norm of the vertical component
};

HorizontalityCheck is_horizontal(const HomogeneousStructure& hs, const Metric& metric,
                                 const AlgebraVector& xi, double tol = 1e-8);

/// Potential energy on the base manifold. Either callback may be empty:
/// an absent gradient falls back to central differences of `value` in
/// exponential coordinates (step 1e-6); absent both means V = 0.
struct Potential {
  std::function<double(const HomogeneousPoint&)> value;
  std::function<AlgebraVector(const GroupElement&)> gradient;
};

/// Left-trivialized gradient of V composed with the projection. Horizontal
/// by construction (the potential cannot see vertical directions).
AlgebraVector trivialized_gradient(const HomogeneousStructure& hs, const Metric& metric,
                                   const Potential& pot, const GroupElement& g);

/// Pushforward T_g(pi . L_g) applied to xi, by central differences of the
/// projected flow in ambient coordinates (angle factors unwrapped).
Eigen::VectorXd pi_star_fd(const HomogeneousStructure& hs, const GroupElement& g,
                           const AlgebraVector& xi, double step = 1e-6);

}  // namespace liedyn
