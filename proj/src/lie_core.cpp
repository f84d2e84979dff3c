#include "liedyn/lie_core.hpp"

#include <cmath>

namespace liedyn {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kSmallAngle = 1e-4;
}  // namespace

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

Signature::Signature(std::vector<FactorKind> kinds) : kinds_(std::move(kinds)) {
  offsets_.reserve(kinds_.size());
  partners_.reserve(kinds_.size());
  int last_rotation = -1;
  for (size_t i = 0; i < kinds_.size(); ++i) {
    offsets_.push_back(dim_);
    switch (kinds_[i]) {
      case FactorKind::Rotation:
        last_rotation = static_cast<int>(i);
        partners_.push_back(-1);
        dim_ += 3;
        break;
      case FactorKind::Translation:
        partners_.push_back(last_rotation);
        dim_ += 3;
        break;
      case FactorKind::Angle:
        partners_.push_back(-1);
        dim_ += 1;
        break;
    }
  }
}

Signature Signature::se3() {
  return Signature({FactorKind::Rotation, FactorKind::Translation});
}
Signature Signature::so3xso3() {
  return Signature({FactorKind::Rotation, FactorKind::Rotation});
}
Signature Signature::so3xs1() {
  return Signature({FactorKind::Rotation, FactorKind::Angle});
}

int Signature::factor_dim(int i) const {
  return kinds_[static_cast<size_t>(i)] == FactorKind::Angle ? 1 : 3;
}

// ---------------------------------------------------------------------------
// Angles
// ---------------------------------------------------------------------------

double angle_mod_2pi(double theta) {
  double m = std::fmod(theta, kTwoPi);
  if (m < 0.0) m += kTwoPi;
  if (m >= kTwoPi) m = 0.0;
  return m;
}

double angle_difference(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

// ---------------------------------------------------------------------------
// GroupElement
// ---------------------------------------------------------------------------

GroupElement::GroupElement(Signature signature, std::vector<Factor> factors)
    : signature_(std::move(signature)), factors_(std::move(factors)) {
  if (static_cast<int>(factors_.size()) != signature_.factor_count())
    throw SignatureMismatch("group element has wrong factor count");
  for (int i = 0; i < signature_.factor_count(); ++i) {
    const bool ok = (signature_.kind(i) == FactorKind::Rotation &&
                     std::holds_alternative<Mat3>(factors_[static_cast<size_t>(i)])) ||
                    (signature_.kind(i) == FactorKind::Translation &&
                     std::holds_alternative<Vec3>(factors_[static_cast<size_t>(i)])) ||
                    (signature_.kind(i) == FactorKind::Angle &&
                     std::holds_alternative<double>(factors_[static_cast<size_t>(i)]));
    if (!ok) throw SignatureMismatch("factor value kind does not match signature");
    if (signature_.kind(i) == FactorKind::Angle) {
      factors_[static_cast<size_t>(i)] =
          angle_mod_2pi(std::get<double>(factors_[static_cast<size_t>(i)]));
    }
  }
}

const Mat3& GroupElement::rotation(int i) const { return std::get<Mat3>(factors_[static_cast<size_t>(i)]); }
const Vec3& GroupElement::translation(int i) const { return std::get<Vec3>(factors_[static_cast<size_t>(i)]); }
double GroupElement::angle(int i) const { return std::get<double>(factors_[static_cast<size_t>(i)]); }

void GroupElement::validate() const {
  if (!finite()) throw std::invalid_argument("group element has non-finite entries");
  for (int i = 0; i < signature_.factor_count(); ++i) {
    if (signature_.kind(i) != FactorKind::Rotation) continue;
    const Mat3& r = rotation(i);
    if ((r.transpose() * r - Mat3::Identity()).norm() > 1e-9 ||
        std::abs(r.determinant() - 1.0) > 1e-9)
      throw std::invalid_argument("rotation factor is not orthonormal with det 1");
  }
}

double GroupElement::orthonormality_defect() const {
  double worst = 0.0;
  for (int i = 0; i < signature_.factor_count(); ++i) {
    if (signature_.kind(i) != FactorKind::Rotation) continue;
    const Mat3& r = rotation(i);
    worst = std::max(worst, (r.transpose() * r - Mat3::Identity()).norm());
  }
  return worst;
}

bool GroupElement::finite() const {
  for (int i = 0; i < signature_.factor_count(); ++i) {
    switch (signature_.kind(i)) {
      case FactorKind::Rotation:
        if (!rotation(i).allFinite()) return false;
        break;
      case FactorKind::Translation:
        if (!translation(i).allFinite()) return false;
        break;
      case FactorKind::Angle:
        if (!std::isfinite(angle(i))) return false;
        break;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Algebra values
// ---------------------------------------------------------------------------

AlgebraVector::AlgebraVector(Signature sig, Eigen::VectorXd c)
    : signature(std::move(sig)), coeffs(std::move(c)) {
  if (coeffs.size() != signature.dim())
    throw SignatureMismatch("algebra coefficient length does not match signature");
}

AlgebraVector AlgebraVector::zero(const Signature& sig) {
  return AlgebraVector(sig, Eigen::VectorXd::Zero(sig.dim()));
}

Eigen::Vector3d AlgebraVector::part3(int factor) const {
  return coeffs.segment<3>(signature.factor_offset(factor));
}
double AlgebraVector::part1(int factor) const {
  return coeffs[signature.factor_offset(factor)];
}

CoAlgebraVector::CoAlgebraVector(Signature sig, Eigen::VectorXd c)
    : signature(std::move(sig)), coeffs(std::move(c)) {
  if (coeffs.size() != signature.dim())
    throw SignatureMismatch("covector coefficient length does not match signature");
}

CoAlgebraVector CoAlgebraVector::zero(const Signature& sig) {
  return CoAlgebraVector(sig, Eigen::VectorXd::Zero(sig.dim()));
}

namespace {
void require_same(const Signature& a, const Signature& b) {
  if (a != b) throw SignatureMismatch("signatures differ");
}
}  // namespace

AlgebraVector operator+(const AlgebraVector& a, const AlgebraVector& b) {
  require_same(a.signature, b.signature);
  return AlgebraVector(a.signature, a.coeffs + b.coeffs);
}
AlgebraVector operator-(const AlgebraVector& a, const AlgebraVector& b) {
  require_same(a.signature, b.signature);
  return AlgebraVector(a.signature, a.coeffs - b.coeffs);
}
AlgebraVector operator*(double s, const AlgebraVector& a) {
  return AlgebraVector(a.signature, s * a.coeffs);
}
AlgebraVector operator-(const AlgebraVector& a) {
  return AlgebraVector(a.signature, -a.coeffs);
}

double pairing(const CoAlgebraVector& mu, const AlgebraVector& xi) {
  require_same(mu.signature, xi.signature);
  return mu.coeffs.dot(xi.coeffs);
}

// ---------------------------------------------------------------------------
// so(3) primitives
// ---------------------------------------------------------------------------

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& a) {
  if ((a + a.transpose()).norm() > 1e-9) throw NotSkew("matrix is not skew-symmetric");
  return Vec3(a(2, 1), a(0, 2), a(1, 0));
}

Mat3 exp_so3(const Vec3& v) {
  const double th2 = v.squaredNorm();
  const Mat3 w = hat(v);
  double ca, cb;  // R = I + ca*W + cb*W^2
  if (th2 < kSmallAngle * kSmallAngle) {
    ca = 1.0 - th2 / 6.0 * (1.0 - th2 / 20.0);
    cb = 0.5 - th2 / 24.0 * (1.0 - th2 / 30.0);
  } else {
    const double th = std::sqrt(th2);
    ca = std::sin(th) / th;
    cb = (1.0 - std::cos(th)) / th2;
  }
  return Mat3::Identity() + ca * w + cb * (w * w);
}

Vec3 log_so3(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const Vec3 sv(0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)),
                0.5 * (r(1, 0) - r(0, 1)));  // = sin(th) * axis
  // atan2 stays well-conditioned where acos degrades (th near 0 and pi).
  const double th = std::atan2(std::min(sv.norm(), 1.0), c);
  if (th < kSmallAngle) {
    const double th2 = th * th;
    return (1.0 + th2 / 6.0 + 7.0 * th2 * th2 / 360.0) * sv;
  }
  if (th > kPi - kSmallAngle) {
    // Near pi the skew part degenerates; recover the axis from the symmetric
    // part via a a^T = I + W^2 = I + (sym(R) - I) / (1 - cos th).
    const Mat3 sym = 0.5 * (r + r.transpose());
    const Mat3 aat = Mat3::Identity() + (sym - Mat3::Identity()) / (1.0 - c);
    int k = 0;
    aat.diagonal().maxCoeff(&k);
    Vec3 axis = aat.row(k);
    axis /= std::sqrt(std::max(aat(k, k), 1e-300));
    // Orient along the remaining skew part when it is resolvable; otherwise
    // pick the representative whose largest-magnitude component is positive.
    if (sv.norm() > 1e-12) {
      if (axis.dot(sv) < 0.0) axis = -axis;
    } else {
      int m = 0;
      axis.cwiseAbs().maxCoeff(&m);
      if (axis[m] < 0.0) axis = -axis;
    }
    return th * axis;
  }
  return (th / std::sin(th)) * sv;
}

Mat3 left_jacobian_so3(const Vec3& v) {
  const double th2 = v.squaredNorm();
  const Mat3 w = hat(v);
  double ca, cb;  // J = I + ca*W + cb*W^2
  if (th2 < kSmallAngle * kSmallAngle) {
    ca = 0.5 - th2 / 24.0 * (1.0 - th2 / 30.0);
    cb = 1.0 / 6.0 - th2 / 120.0 * (1.0 - th2 / 42.0);
  } else {
    const double th = std::sqrt(th2);
    ca = (1.0 - std::cos(th)) / th2;
    cb = (th - std::sin(th)) / (th2 * th);
  }
  return Mat3::Identity() + ca * w + cb * (w * w);
}

Mat3 left_jacobian_inv_so3(const Vec3& v) {
  const double th2 = v.squaredNorm();
  const Mat3 w = hat(v);
  double cb;  // Jinv = I - W/2 + cb*W^2
  if (th2 < kSmallAngle * kSmallAngle) {
    cb = 1.0 / 12.0 + th2 / 720.0 + th2 * th2 / 30240.0;
  } else {
    const double th = std::sqrt(th2);
    cb = 1.0 / th2 - (1.0 + std::cos(th)) / (2.0 * th * std::sin(th));
  }
  return Mat3::Identity() - 0.5 * w + cb * (w * w);
}

// ---------------------------------------------------------------------------
// Group operations
// ---------------------------------------------------------------------------

GroupElement identity(const Signature& sig) {
  std::vector<Factor> f;
  f.reserve(static_cast<size_t>(sig.factor_count()));
  for (int i = 0; i < sig.factor_count(); ++i) {
    switch (sig.kind(i)) {
      case FactorKind::Rotation: f.emplace_back(Mat3(Mat3::Identity())); break;
      case FactorKind::Translation: f.emplace_back(Vec3(Vec3::Zero())); break;
      case FactorKind::Angle: f.emplace_back(0.0); break;
    }
  }
  return GroupElement(sig, std::move(f));
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
  require_same(g.signature(), h.signature());
  const Signature& sig = g.signature();
  std::vector<Factor> f;
  f.reserve(static_cast<size_t>(sig.factor_count()));
  for (int i = 0; i < sig.factor_count(); ++i) {
    switch (sig.kind(i)) {
      case FactorKind::Rotation:
        f.emplace_back(Mat3(g.rotation(i) * h.rotation(i)));
        break;
      case FactorKind::Translation: {
        const int p = sig.rotation_partner(i);
        if (p >= 0)
          f.emplace_back(Vec3(g.translation(i) + g.rotation(p) * h.translation(i)));
        else
          f.emplace_back(Vec3(g.translation(i) + h.translation(i)));
        break;
      }
      case FactorKind::Angle:
        f.emplace_back(angle_mod_2pi(g.angle(i) + h.angle(i)));
        break;
    }
  }
  return GroupElement(sig, std::move(f));
}

GroupElement inverse(const GroupElement& g) {
  const Signature& sig = g.signature();
  std::vector<Factor> f;
  f.reserve(static_cast<size_t>(sig.factor_count()));
  for (int i = 0; i < sig.factor_count(); ++i) {
    switch (sig.kind(i)) {
      case FactorKind::Rotation:
        f.emplace_back(Mat3(g.rotation(i).transpose()));
        break;
      case FactorKind::Translation: {
        const int p = sig.rotation_partner(i);
        if (p >= 0)
          f.emplace_back(Vec3(-(g.rotation(p).transpose() * g.translation(i))));
        else
          f.emplace_back(Vec3(-g.translation(i)));
        break;
      }
      case FactorKind::Angle:
        f.emplace_back(angle_mod_2pi(-g.angle(i)));
        break;
    }
  }
  return GroupElement(sig, std::move(f));
}

Factor exp_factor(FactorKind kind, const Eigen::VectorXd& v) {
  switch (kind) {
    case FactorKind::Rotation:
      return Mat3(exp_so3(Vec3(v)));
    case FactorKind::Translation:
      return Vec3(v);
    case FactorKind::Angle:
      return angle_mod_2pi(v[0]);
  }
  throw std::invalid_argument("unknown factor kind");
}

GroupElement exp(const Signature& sig, const AlgebraVector& xi) {
  require_same(sig, xi.signature);
  std::vector<Factor> f;
  f.reserve(static_cast<size_t>(sig.factor_count()));
  for (int i = 0; i < sig.factor_count(); ++i) {
    switch (sig.kind(i)) {
      case FactorKind::Rotation:
        f.emplace_back(Mat3(exp_so3(xi.part3(i))));
        break;
      case FactorKind::Translation: {
        const int p = sig.rotation_partner(i);
        if (p >= 0)
          f.emplace_back(Vec3(left_jacobian_so3(xi.part3(p)) * xi.part3(i)));
        else
          f.emplace_back(Vec3(xi.part3(i)));
        break;
      }
      case FactorKind::Angle:
        f.emplace_back(angle_mod_2pi(xi.part1(i)));
        break;
    }
  }
  return GroupElement(sig, std::move(f));
}

AlgebraVector log(const GroupElement& g) {
  const Signature& sig = g.signature();
  Eigen::VectorXd c(sig.dim());
  for (int i = 0; i < sig.factor_count(); ++i) {
    switch (sig.kind(i)) {
      case FactorKind::Rotation:
        c.segment<3>(sig.factor_offset(i)) = log_so3(g.rotation(i));
        break;
      case FactorKind::Translation: {
        const int p = sig.rotation_partner(i);
        if (p >= 0)
          c.segment<3>(sig.factor_offset(i)) =
              left_jacobian_inv_so3(log_so3(g.rotation(p))) * g.translation(i);
        else
          c.segment<3>(sig.factor_offset(i)) = g.translation(i);
        break;
      }
      case FactorKind::Angle: {
        const double th = g.angle(i);
        c[sig.factor_offset(i)] = th <= kPi ? th : th - kTwoPi;
        break;
      }
    }
  }
  return AlgebraVector(sig, std::move(c));
}

// ---------------------------------------------------------------------------
// Brackets
// ---------------------------------------------------------------------------

AlgebraVector ad(const AlgebraVector& xi, const AlgebraVector& eta) {
  require_same(xi.signature, eta.signature);
  const Signature& sig = xi.signature;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sig.dim());
  for (int i = 0; i < sig.factor_count(); ++i) {
    switch (sig.kind(i)) {
      case FactorKind::Rotation:
        c.segment<3>(sig.factor_offset(i)) = xi.part3(i).cross(eta.part3(i));
        break;
      case FactorKind::Translation: {
        const int p = sig.rotation_partner(i);
        if (p >= 0)
          c.segment<3>(sig.factor_offset(i)) =
              xi.part3(p).cross(eta.part3(i)) - eta.part3(p).cross(xi.part3(i));
        break;  // unpaired translations are abelian
      }
      case FactorKind::Angle:
        break;  // abelian
    }
  }
  return AlgebraVector(sig, std::move(c));
}

CoAlgebraVector ad_star(const AlgebraVector& xi, const CoAlgebraVector& mu) {
  require_same(xi.signature, mu.signature);
  const Signature& sig = xi.signature;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sig.dim());
  for (int i = 0; i < sig.factor_count(); ++i) {
    const int off = sig.factor_offset(i);
    switch (sig.kind(i)) {
      case FactorKind::Rotation: {
        Vec3 v = Vec3(mu.coeffs.segment<3>(off)).cross(xi.part3(i));
        // Paired translation factors feed back into their rotation block.
        for (int j = 0; j < sig.factor_count(); ++j) {
          if (sig.kind(j) == FactorKind::Translation && sig.rotation_partner(j) == i)
            v += Vec3(mu.coeffs.segment<3>(sig.factor_offset(j))).cross(xi.part3(j));
        }
        c.segment<3>(off) = v;
        break;
      }
      case FactorKind::Translation: {
        const int p = sig.rotation_partner(i);
        if (p >= 0)
          c.segment<3>(off) = Vec3(mu.coeffs.segment<3>(off)).cross(xi.part3(p));
        break;
      }
      case FactorKind::Angle:
        break;
    }
  }
  return CoAlgebraVector(sig, std::move(c));
}

}  // namespace liedyn
