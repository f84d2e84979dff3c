#include "liedyn/homogeneous.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace liedyn {

UnitVec3::UnitVec3(const Vec3& v) {
  const double n = v.norm();
  if (std::abs(n - 1.0) > 1e-6)
    throw std::invalid_argument("sphere point norm deviates from 1");
  v_ = v / n;
}

HomogeneousPoint::HomogeneousPoint(std::vector<PointFactor> factors)
    : factors_(std::move(factors)) {
  for (auto& f : factors_)
    if (auto* a = std::get_if<double>(&f)) *a = angle_mod_2pi(*a);
}

const Vec3& HomogeneousPoint::unit(int i) const {
  return std::get<UnitVec3>(factors_[static_cast<size_t>(i)]).value();
}
const Vec3& HomogeneousPoint::vec(int i) const {
  return std::get<Vec3>(factors_[static_cast<size_t>(i)]);
}
const Mat3& HomogeneousPoint::rot(int i) const {
  return std::get<Mat3>(factors_[static_cast<size_t>(i)]);
}
double HomogeneousPoint::angle(int i) const {
  return std::get<double>(factors_[static_cast<size_t>(i)]);
}

namespace {
int point_factor_width(const PointFactor& f) {
  if (std::holds_alternative<Mat3>(f)) return 9;
  if (std::holds_alternative<double>(f)) return 1;
  return 3;
}
}  // namespace

Eigen::VectorXd flatten(const HomogeneousPoint& q) {
  int width = 0;
  for (int i = 0; i < q.factor_count(); ++i) width += point_factor_width(q.factor(i));
  Eigen::VectorXd out(width);
  int at = 0;
  for (int i = 0; i < q.factor_count(); ++i) {
    const PointFactor& f = q.factor(i);
    if (const auto* u = std::get_if<UnitVec3>(&f)) {
      out.segment<3>(at) = u->value();
      at += 3;
    } else if (const auto* v = std::get_if<Vec3>(&f)) {
      out.segment<3>(at) = *v;
      at += 3;
    } else if (const auto* m = std::get_if<Mat3>(&f)) {
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[at++] = (*m)(r, c);
    } else {
      out[at++] = std::get<double>(f);
    }
  }
  return out;
}

double point_distance(const HomogeneousPoint& a, const HomogeneousPoint& b) {
  if (a.factor_count() != b.factor_count())
    throw SignatureMismatch("points have different factor counts");
  double worst = 0.0;
  for (int i = 0; i < a.factor_count(); ++i) {
    const PointFactor& fa = a.factor(i);
    const PointFactor& fb = b.factor(i);
    if (fa.index() != fb.index())
      throw SignatureMismatch("points have different factor kinds");
    double d = 0.0;
    if (const auto* u = std::get_if<UnitVec3>(&fa)) {
      d = (u->value() - std::get<UnitVec3>(fb).value()).norm();
    } else if (const auto* v = std::get_if<Vec3>(&fa)) {
      d = (*v - std::get<Vec3>(fb)).norm();
    } else if (const auto* m = std::get_if<Mat3>(&fa)) {
      d = (*m - std::get<Mat3>(fb)).norm();
    } else {
      d = std::abs(angle_difference(std::get<double>(fa), std::get<double>(fb)));
    }
    worst = std::max(worst, d);
  }
  return worst;
}

HomogeneousStructure::HomogeneousStructure(Signature sig, PiFn pi, ActionFn action,
                                           Subspace vertical_in, Subspace horizontal_in)
    : signature(std::move(sig)),
      pi_fn(std::move(pi)),
      action_fn(std::move(action)),
      vertical(std::move(vertical_in)),
      horizontal(std::move(horizontal_in)) {
  if (vertical.signature() != signature || horizontal.signature() != signature)
    throw SignatureMismatch("splitting subspaces do not match the group signature");
  if (vertical.rank() + horizontal.rank() != signature.dim())
    throw NotComplementary("vertical + horizontal ranks do not fill the algebra");
}

HomogeneousPoint pi(const HomogeneousStructure& hs, const GroupElement& g) {
  if (g.signature() != hs.signature)
    throw SignatureMismatch("group element does not match the structure");
  return hs.pi_fn(g);
}

HomogeneousPoint action(const HomogeneousStructure& hs, const GroupElement& a,
                        const HomogeneousPoint& q) {
  if (a.signature() != hs.signature)
    throw SignatureMismatch("group element does not match the structure");
  return hs.action_fn(a, q);
}

AlgebraVector left_trivialize(const GroupElement& g, const std::vector<Factor>& gdot) {
  const Signature& sig = g.signature();
  if (static_cast<int>(gdot.size()) != sig.factor_count())
    throw SignatureMismatch("tangent value has wrong factor count");
  Eigen::VectorXd coeffs(sig.dim());
  for (int i = 0; i < sig.factor_count(); ++i) {
    const int at = sig.factor_offset(i);
    switch (sig.kind(i)) {
      case FactorKind::Rotation: {
        const auto* rdot = std::get_if<Mat3>(&gdot[static_cast<size_t>(i)]);
        if (!rdot) throw SignatureMismatch("rotation factor expects a matrix rate");
        const Mat3 body = g.rotation(i).transpose() * (*rdot);
        if ((body + body.transpose()).norm() > 1e-9)
          throw NotTangent("rotation rate is not tangent to the group");
        coeffs.segment<3>(at) = vee(body);
        break;
      }
      case FactorKind::Translation: {
        const auto* rdot = std::get_if<Vec3>(&gdot[static_cast<size_t>(i)]);
        if (!rdot) throw SignatureMismatch("translation factor expects a vector rate");
        const int p = sig.rotation_partner(i);
        coeffs.segment<3>(at) = p < 0 ? *rdot : Vec3(g.rotation(p).transpose() * (*rdot));
        break;
      }
      case FactorKind::Angle: {
        const auto* adot = std::get_if<double>(&gdot[static_cast<size_t>(i)]);
        if (!adot) throw SignatureMismatch("angle factor expects a scalar rate");
        coeffs[at] = *adot;
        break;
      }
    }
  }
  return AlgebraVector(sig, std::move(coeffs));
}

std::vector<Factor> tangent_from_algebra(const GroupElement& g, const AlgebraVector& xi) {
  const Signature& sig = g.signature();
  if (xi.signature != sig) throw SignatureMismatch("algebra vector does not match the element");
  std::vector<Factor> out;
  out.reserve(static_cast<size_t>(sig.factor_count()));
  for (int i = 0; i < sig.factor_count(); ++i) {
    switch (sig.kind(i)) {
      case FactorKind::Rotation:
        out.emplace_back(Mat3(g.rotation(i) * hat(xi.part3(i))));
        break;
      case FactorKind::Translation: {
        const int p = sig.rotation_partner(i);
        out.emplace_back(p < 0 ? xi.part3(i) : Vec3(g.rotation(p) * xi.part3(i)));
        break;
      }
      case FactorKind::Angle:
        out.emplace_back(xi.part1(i));
        break;
    }
  }
  return out;
}

HorizontalityCheck is_horizontal(const HomogeneousStructure& hs, const Metric& metric,
                                 const AlgebraVector& xi, double tol) {
  const double r = metric.norm(project(hs.vertical, metric, xi));
  return HorizontalityCheck{r <= tol, r};
}

AlgebraVector trivialized_gradient(const HomogeneousStructure& hs, const Metric& metric,
                                   const Potential& pot, const GroupElement& g) {
  if (pot.gradient) return pot.gradient(g);
  if (!pot.value) return AlgebraVector::zero(hs.signature);
  const Signature& sig = hs.signature;
  const double h = 1e-6;
  Eigen::VectorXd diff(sig.dim());
  for (int i = 0; i < sig.dim(); ++i) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(sig.dim());
    dir[i] = h;
    const double plus = pot.value(pi(hs, compose(g, exp(sig, AlgebraVector(sig, dir)))));
    dir[i] = -h;
    const double minus = pot.value(pi(hs, compose(g, exp(sig, AlgebraVector(sig, dir)))));
    diff[i] = (plus - minus) / (2.0 * h);
  }
  return metric.sharp(CoAlgebraVector(sig, std::move(diff)));
}

Eigen::VectorXd pi_star_fd(const HomogeneousStructure& hs, const GroupElement& g,
                           const AlgebraVector& xi, double step) {
  const HomogeneousPoint plus = pi(hs, compose(g, exp(hs.signature, step * xi)));
  const HomogeneousPoint minus = pi(hs, compose(g, exp(hs.signature, -step * xi)));
  const int n = static_cast<int>(flatten(plus).size());
  Eigen::VectorXd out(n);
  int at = 0;
  for (int i = 0; i < plus.factor_count(); ++i) {
    const PointFactor& fp = plus.factor(i);
    if (std::holds_alternative<double>(fp)) {
      out[at++] = angle_difference(plus.angle(i), minus.angle(i)) / (2.0 * step);
    } else {
      const int w = point_factor_width(fp);
      out.segment(at, w) =
          (flatten(HomogeneousPoint({fp})) - flatten(HomogeneousPoint({minus.factor(i)}))) /
          (2.0 * step);
      at += w;
    }
  }
  return out;
}

}  // namespace liedyn
