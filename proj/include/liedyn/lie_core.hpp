#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "liedyn/errors.hpp"

namespace liedyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// ---------------------------------------------------------------------------
// Signatures
// ---------------------------------------------------------------------------

enum class FactorKind { Rotation, Translation, Angle };

/// Ordered factor kinds of a product group. A Translation factor composes
/// semidirectly with the nearest preceding Rotation factor (the SE(3) rule
/// (R1,r1)(R2,r2) = (R1 R2, R1 r2 + r1)); with no preceding rotation it is
/// plain vector addition. Rotation and Angle factors always compose directly.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<FactorKind> kinds);

  static Signature se3();       // [Rotation, Translation]
  static Signature so3xso3();   // [Rotation, Rotation]
  static Signature so3xs1();    // [Rotation, Angle]

  int factor_count() const { return static_cast<int>(kinds_.size()); }
  FactorKind kind(int i) const { return kinds_[static_cast<size_t>(i)]; }
  int factor_dim(int i) const;
  int factor_offset(int i) const { return offsets_[static_cast<size_t>(i)]; }
  int dim() const { return dim_; }

  /// Index of the rotation factor acting on translation factor i, or -1.
  int rotation_partner(int i) const { return partners_[static_cast<size_t>(i)]; }

  bool operator==(const Signature& other) const { return kinds_ == other.kinds_; }
  bool operator!=(const Signature& other) const { return !(*this == other); }

 private:
  std::vector<FactorKind> kinds_;
  std::vector<int> offsets_;
  std::vector<int> partners_;
  int dim_ = 0;
};

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

/// One group factor value: Rot3 | Vec3 | Angle.
using Factor = std::variant<Mat3, Vec3, double>;

double angle_mod_2pi(double theta);          // canonical representative in [0, 2pi)
double angle_difference(double a, double b); // wrapped to (-pi, pi]

/// Element of a product group. Angles are kept normalized to [0, 2pi).
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(Signature signature, std::vector<Factor> factors);

  const Signature& signature() const { return signature_; }
  const Factor& factor(int i) const { return factors_[static_cast<size_t>(i)]; }
  const Mat3& rotation(int i) const;
  const Vec3& translation(int i) const;
  double angle(int i) const;

  /// Validates factor invariants (rotation orthonormality within 1e-9,
  /// det within 1e-9 of 1, finite entries). Intended for external inputs;
  /// internal operations preserve the invariants by construction.
  void validate() const;

  /// Largest rotation-factor defect max_i ||R_i^T R_i - I||_F (0 if none).
  double orthonormality_defect() const;

  bool finite() const;

 private:
  Signature signature_;
  std::vector<Factor> factors_;
};

/// Lie algebra element as a coefficient vector in the fixed per-factor basis:
/// so(3) factor -> 3 coeffs (hat convention below), R^3 factor -> 3 coeffs,
/// S^1 factor -> 1 coeff.
struct AlgebraVector {
  AlgebraVector() = default;
  AlgebraVector(Signature sig, Eigen::VectorXd c);
  static AlgebraVector zero(const Signature& sig);

  Eigen::Vector3d part3(int factor) const;
  double part1(int factor) const;

  Signature signature;
  Eigen::VectorXd coeffs;
};

/// Covector; pairing with AlgebraVector is the coefficient dot product.
struct CoAlgebraVector {
  CoAlgebraVector() = default;
  CoAlgebraVector(Signature sig, Eigen::VectorXd c);
  static CoAlgebraVector zero(const Signature& sig);

  Signature signature;
  Eigen::VectorXd coeffs;
};

AlgebraVector operator+(const AlgebraVector& a, const AlgebraVector& b);
AlgebraVector operator-(const AlgebraVector& a, const AlgebraVector& b);
AlgebraVector operator*(double s, const AlgebraVector& a);
AlgebraVector operator-(const AlgebraVector& a);

double pairing(const CoAlgebraVector& mu, const AlgebraVector& xi);

// ---------------------------------------------------------------------------
// so(3) primitives. Convention: hat(x) y = x cross y, i.e.
// hat(e1) e3 = -e2, hat(e2) e3 = e1.
// ---------------------------------------------------------------------------

Mat3 hat(const Vec3& v);
Vec3 vee(const Mat3& a);  // requires ||A + A^T||_F <= 1e-9, else NotSkew

/// Rodrigues formula; series fallback below ||v|| = 1e-4 avoids 0/0.
Mat3 exp_so3(const Vec3& v);

/// Inverse of exp_so3 with clamped acos and a dedicated near-pi branch.
/// Returns the representative with ||result|| <= pi.
Vec3 log_so3(const Mat3& r);

/// Left Jacobian of exp_so3 and its inverse (used by the SE(3)-coupled
/// group exponential/logarithm).
Mat3 left_jacobian_so3(const Vec3& v);
Mat3 left_jacobian_inv_so3(const Vec3& v);

// ---------------------------------------------------------------------------
// Group operations
// ---------------------------------------------------------------------------

GroupElement identity(const Signature& sig);
GroupElement compose(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);

/// Standalone factor exponential: so(3) -> Rodrigues, R^3 -> identity map,
/// S^1 -> angle normalized to [0, 2pi).
Factor exp_factor(FactorKind kind, const Eigen::VectorXd& v);

/// Group exponential. Translation factors paired with a rotation receive the
/// left-Jacobian coupling, so exp is the genuine exponential on SE(3)-style
/// products and frozen flows g0 * exp(t xi) solve g' = g xi exactly.
GroupElement exp(const Signature& sig, const AlgebraVector& xi);

/// Inverse of exp (principal branch; rotation angles <= pi).
AlgebraVector log(const GroupElement& g);

// ---------------------------------------------------------------------------
// Brackets
// ---------------------------------------------------------------------------

/// Adjoint bracket per factor block: rotation factors Pi1 x Pi2; a paired
/// translation block follows se(3): (Pi x Om, Pi x s - Om x t); unpaired
/// translations and angles are abelian (0).
AlgebraVector ad(const AlgebraVector& xi, const AlgebraVector& eta);

/// Coadjoint: <ad_star(xi, mu), eta> = <mu, ad(xi, eta)> for all eta.
CoAlgebraVector ad_star(const AlgebraVector& xi, const CoAlgebraVector& mu);

}  // namespace liedyn
