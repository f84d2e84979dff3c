#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "liedyn/connections.hpp"
#include "support.hpp"

using namespace liedyn;
namespace ts = liedyn::testsupport;

namespace {

Eigen::MatrixXd random_spd(int dim, std::mt19937_64& rng) {
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = ts::uniform(rng, -1.0, 1.0);
  return a.transpose() * a + 0.5 * Eigen::MatrixXd::Identity(dim, dim);
}

// Block metric <(P1,O1),(P2,O2)> = P1.P2 + O1.J O2 on two rotation factors.
Eigen::MatrixXd sphere_gram(const Vec3& j) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(6, 6);
  g.block<3, 3>(3, 3) = j.asDiagonal();
  return g;
}

// Rolling constraint subspace of the sphere scenario: paired counter-rotations
// about the two horizontal axes plus spin about the third.
Eigen::MatrixXd sphere_d_basis() {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(6, 3);
  d(0, 0) = -1.0;
  d(3, 0) = 1.0;
  d(1, 1) = -1.0;
  d(4, 1) = 1.0;
  d(5, 2) = 1.0;
  return d;
}

double span_residual(const Eigen::MatrixXd& cols, const Eigen::VectorXd& v) {
  if (cols.cols() == 0) return v.norm();
  const Eigen::VectorXd c = cols.colPivHouseholderQr().solve(v);
  return (cols * c - v).norm();
}

AlgebraVector vec(const Signature& sig, const Eigen::VectorXd& c) {
  return AlgebraVector(sig, c);
}

const std::vector<Signature> kSignatures = {Signature::se3(), Signature::so3xso3(),
                                            Signature::so3xs1()};

}  // namespace

TEST_CASE("metric validates the gram matrix and inverts flat with sharp") {
  const Metric id6 = Metric::identity(6);
  CHECK(id6.gram().isIdentity(0.0));

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(4, 4);
  bad(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(Metric{bad}, NotPositiveDefinite);
  Eigen::MatrixXd indef = Eigen::MatrixXd::Identity(4, 4);
  indef(2, 2) = -1.0;
  CHECK_THROWS_AS(Metric{indef}, NotPositiveDefinite);
  CHECK_THROWS_AS(Metric{Eigen::MatrixXd::Zero(2, 3)}, NotPositiveDefinite);

  // Sphere scenario flat map sends (Pi, Omega) to (Pi, J Omega).
  const Signature sig = Signature::so3xso3();
  const Metric gj(sphere_gram(Vec3(1.0, 2.0, 3.0)));
  Eigen::VectorXd c(6);
  c << 0.3, -0.4, 0.5, 1.0, -2.0, 0.25;
  const CoAlgebraVector mu = gj.flat(vec(sig, c));
  Eigen::VectorXd expect(6);
  expect << 0.3, -0.4, 0.5, 1.0, -4.0, 0.75;
  CHECK((mu.coeffs - expect).norm() == 0.0);
  CHECK((gj.sharp(mu).coeffs - c).norm() <= 1e-14);

  std::mt19937_64 rng(71001);
  for (int it = 0; it < 1000; ++it) {
    const Signature& s = kSignatures[it % kSignatures.size()];
    const Metric m(random_spd(s.dim(), rng));
    const AlgebraVector xi = ts::random_algebra(s, rng, 2.0);
    const AlgebraVector eta = ts::random_algebra(s, rng, 2.0);
    CHECK((m.sharp(m.flat(xi)).coeffs - xi.coeffs).norm() <= 1e-12 * (1.0 + xi.coeffs.norm()));
    CHECK(pairing(m.flat(xi), eta) == doctest::Approx(m.inner(xi, eta)).epsilon(1e-12));
  }
}

TEST_CASE("orthonormalize yields metric-orthonormal bases with exact annihilators") {
  std::mt19937_64 rng(71002);
  for (const Signature& sig : kSignatures) {
    const int dim = sig.dim();
    for (int k = 0; k <= dim; ++k) {
      const Metric m(random_spd(dim, rng));
      Eigen::MatrixXd raw(dim, k);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < k; ++j) raw(i, j) = ts::uniform(rng, -1.0, 1.0);
      const Subspace sub = Subspace::orthonormalize(m, sig, raw);
      CHECK(sub.rank() == k);
      CHECK(sub.annihilator().rows() == dim - k);
      if (k == 0) {
        CHECK(sub.annihilator().isIdentity(0.0));
        continue;
      }
      const Eigen::MatrixXd gram_in_basis =
          sub.basis().transpose() * m.gram() * sub.basis();
      CHECK((gram_in_basis - Eigen::MatrixXd::Identity(k, k)).norm() <= 1e-10);
      CHECK((sub.annihilator() * sub.basis()).norm() <= 1e-10);
      for (int j = 0; j < k; ++j) {
        const AlgebraVector col = vec(sig, raw.col(j));
        CHECK(subspace_residual(sub, m, col) <= 1e-10 * (1.0 + col.coeffs.norm()));
      }
      // Re-orthonormalizing an orthonormal basis keeps span and invariants.
      const Subspace again = Subspace::orthonormalize(m, sig, sub.basis());
      for (int j = 0; j < k; ++j)
        CHECK(subspace_residual(again, m, sub.basis_vector(j)) <= 1e-10);
    }
  }

  const Signature sig = Signature::so3xso3();
  const Metric id6 = Metric::identity(6);
  Eigen::MatrixXd dup(6, 2);
  dup.col(0) = Eigen::VectorXd::Unit(6, 1);
  dup.col(1) = Eigen::VectorXd::Unit(6, 1);
  CHECK_THROWS_AS(Subspace::orthonormalize(id6, sig, dup), RankDeficient);
  dup.col(1) = dup.col(0) + 1e-12 * Eigen::VectorXd::Unit(6, 4);
  CHECK_THROWS_AS(Subspace::orthonormalize(id6, sig, dup), RankDeficient);
}

TEST_CASE("rolling constraint annihilator is spanned by the paired covectors") {
  const Signature sig = Signature::so3xso3();
  const Metric id6 = Metric::identity(6);
  const Eigen::MatrixXd raw = sphere_d_basis();
  const Subspace d = Subspace::orthonormalize(id6, sig, raw);
  CHECK(d.rank() == 3);

  // Independent oracle: right null space of the pairing matrix raw^T.
  Eigen::JacobiSVD<Eigen::MatrixXd> nsvd(raw.transpose(), Eigen::ComputeFullV);
  const Eigen::MatrixXd oracle = nsvd.matrixV().rightCols(3);
  for (int i = 0; i < 3; ++i) {
    CHECK(span_residual(oracle, d.annihilator().row(i).transpose()) <= 1e-10);
    CHECK(span_residual(d.annihilator().transpose(), oracle.col(i)) <= 1e-10);
  }

  Eigen::VectorXd mu1(6), mu2(6);
  mu1 << 1, 0, 0, 1, 0, 0;
  mu2 << 0, 1, 0, 0, 1, 0;
  CHECK((raw.transpose() * mu1).norm() == 0.0);
  CHECK((raw.transpose() * mu2).norm() == 0.0);
  CHECK(span_residual(d.annihilator().transpose(), mu1) <= 1e-10);
  CHECK(span_residual(d.annihilator().transpose(), mu2) <= 1e-10);

  // Quotient out the vertical spin direction: what is left is exactly the
  // two-covector span above, up to scale.
  Eigen::MatrixXd s_raw = Eigen::MatrixXd::Zero(6, 1);
  s_raw(2, 0) = 1.0;
  const Subspace s = Subspace::orthonormalize(id6, sig, s_raw);
  const Subspace ds = direct_sum(id6, d, s);
  CHECK(ds.rank() == 4);
  Eigen::MatrixXd mu_span(6, 2);
  mu_span.col(0) = mu1;
  mu_span.col(1) = mu2;
  for (int i = 0; i < 2; ++i) {
    CHECK(span_residual(mu_span, ds.annihilator().row(i).transpose()) <= 1e-10);
    CHECK(span_residual(ds.annihilator().transpose(), mu_span.col(i)) <= 1e-10);
  }
}

TEST_CASE("orthogonal projection is idempotent, self-adjoint, and complementary") {
  std::mt19937_64 rng(71003);
  for (const Signature& sig : kSignatures) {
    const int dim = sig.dim();
    for (int it = 0; it < 50; ++it) {
      const Metric m(random_spd(dim, rng));
      const int k = 1 + static_cast<int>(ts::uniform(rng, 0.0, dim - 1.0));
      Eigen::MatrixXd raw(dim, k);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < k; ++j) raw(i, j) = ts::uniform(rng, -1.0, 1.0);
      const Subspace sub = Subspace::orthonormalize(m, sig, raw);

      const AlgebraVector xi = ts::random_algebra(sig, rng, 2.0);
      const AlgebraVector eta = ts::random_algebra(sig, rng, 2.0);
      const AlgebraVector pxi = project(sub, m, xi);
      CHECK((project(sub, m, pxi).coeffs - pxi.coeffs).norm() <= 1e-12);
      CHECK(subspace_residual(sub, m, pxi) <= 1e-11);
      CHECK(m.inner(pxi, eta) == doctest::Approx(m.inner(xi, project(sub, m, eta))).epsilon(1e-11));
      for (int j = 0; j < k; ++j)
        CHECK(std::abs(m.inner(xi - pxi, sub.basis_vector(j))) <= 1e-11);

      // Orthogonal complement from the sharped annihilator covectors.
      const Eigen::MatrixXd comp_raw =
          m.gram().llt().solve(sub.annihilator().transpose());
      const Subspace comp = Subspace::orthonormalize(m, sig, comp_raw);
      const AlgebraVector both = project(sub, m, xi) + project(comp, m, xi);
      CHECK((both.coeffs - xi.coeffs).norm() <= 1e-11 * (1.0 + xi.coeffs.norm()));
    }
  }

  // Sphere scenario horizontal projector kills the spin component of the
  // first factor and leaves the second factor alone.
  const Signature sig = Signature::so3xso3();
  const Metric gj(sphere_gram(Vec3(1.0, 2.0, 3.0)));
  Eigen::MatrixXd h_raw = Eigen::MatrixXd::Zero(6, 5);
  h_raw(0, 0) = 1.0;
  h_raw(1, 1) = 1.0;
  h_raw(3, 2) = 1.0;
  h_raw(4, 3) = 1.0;
  h_raw(5, 4) = 1.0;
  const Subspace h = Subspace::orthonormalize(gj, sig, h_raw);
  Eigen::VectorXd c(6);
  c << 0.7, -0.3, 0.9, 0.2, 0.4, -0.6;
  const AlgebraVector p = project(h, gj, vec(sig, c));
  Eigen::VectorXd expect(6);
  expect << 0.7, -0.3, 0.0, 0.2, 0.4, -0.6;
  CHECK((p.coeffs - expect).norm() <= 1e-14);
}

TEST_CASE("oblique projection decomposes along the chosen complement") {
  std::mt19937_64 rng(71004);
  const Signature sig = Signature::so3xso3();
  for (int it = 0; it < 100; ++it) {
    const Metric m(random_spd(6, rng));
    Eigen::MatrixXd raw(6, 2);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 2; ++j) raw(i, j) = ts::uniform(rng, -1.0, 1.0);
    const Subspace onto = Subspace::orthonormalize(m, sig, raw);
    // A complement that is generically not metric-orthogonal to `onto`.
    const Metric skew(random_spd(6, rng));
    const Eigen::MatrixXd comp_raw = skew.gram().llt().solve(onto.annihilator().transpose());
    const Subspace along = Subspace::orthonormalize(m, sig, comp_raw);

    const AlgebraVector xi = ts::random_algebra(sig, rng, 2.0);
    const AlgebraVector p = oblique_project(onto, along, xi);
    const AlgebraVector q = oblique_project(along, onto, xi);
    CHECK(subspace_residual(onto, m, p) <= 1e-10);
    CHECK(subspace_residual(along, m, xi - p) <= 1e-10);
    CHECK((p.coeffs + q.coeffs - xi.coeffs).norm() <= 1e-12 * (1.0 + xi.coeffs.norm()));
    CHECK((oblique_project(onto, along, p).coeffs - p.coeffs).norm() <= 1e-11);
    CHECK(oblique_project(onto, along, q).coeffs.norm() <= 1e-11);

    const AlgebraVector in_onto = vec(sig, onto.basis() * Eigen::Vector2d(0.3, -1.1));
    CHECK((oblique_project(onto, along, in_onto).coeffs - in_onto.coeffs).norm() <= 1e-11);
  }

  const Metric id6 = Metric::identity(6);
  const Subspace d = Subspace::orthonormalize(id6, sig, sphere_d_basis());
  CHECK_THROWS_AS(oblique_project(d, d, AlgebraVector::zero(sig)), NotComplementary);
}

TEST_CASE("g_connection reproduces the blockwise closed forms") {
  std::mt19937_64 rng(71005);

  // Two rotation factors, inertia on the second.
  {
    const Signature sig = Signature::so3xso3();
    const Vec3 j(1.0, 2.0, 3.0);
    const Metric m(sphere_gram(j));
    for (int it = 0; it < 200; ++it) {
      const AlgebraVector x = ts::random_algebra(sig, rng, 2.0);
      const AlgebraVector y = ts::random_algebra(sig, rng, 2.0);
      const Vec3 p1 = x.part3(0), o1 = x.part3(1);
      const Vec3 p2 = y.part3(0), o2 = y.part3(1);
      const Vec3 first = 0.5 * p1.cross(p2);
      const Vec3 second =
          0.5 * (o1.cross(o2) -
                 j.cwiseInverse().asDiagonal() *
                     (Vec3(j.asDiagonal() * o2).cross(o1) + Vec3(j.asDiagonal() * o1).cross(o2)));
      const AlgebraVector n = g_connection(m, x, y);
      CHECK((n.part3(0) - first).norm() <= 1e-13);
      CHECK((n.part3(1) - second).norm() <= 1e-13);
    }
  }

  // Rotation x angle with the identity metric: only the half-bracket remains.
  {
    const Signature sig = Signature::so3xs1();
    const Metric m = Metric::identity(4);
    for (int it = 0; it < 200; ++it) {
      const AlgebraVector x = ts::random_algebra(sig, rng, 2.0);
      const AlgebraVector y = ts::random_algebra(sig, rng, 2.0);
      const AlgebraVector n = g_connection(m, x, y);
      CHECK((n.part3(0) - Vec3(0.5 * x.part3(0).cross(y.part3(0)))).norm() <= 1e-14);
      CHECK(n.part1(1) == doctest::Approx(0.0).epsilon(1e-15));
      CHECK(g_connection(m, x, x).coeffs.norm() <= 1e-13);
      CHECK((n.coeffs - 0.5 * ad(x, y).coeffs).norm() <= 1e-13);
    }
  }

  // Bi-invariant case on the rotation pair: self-connection vanishes.
  {
    const Signature sig = Signature::so3xso3();
    const Metric m = Metric::identity(6);
    for (int it = 0; it < 200; ++it) {
      const AlgebraVector x = ts::random_algebra(sig, rng, 2.0);
      CHECK(g_connection(m, x, x).coeffs.norm() <= 1e-13);
    }
  }

  // Rigid motion with the product metric: straight-line translations come
  // from nabla_xi xi = (0, Omega x v).
  {
    const Signature sig = Signature::se3();
    const Metric m = Metric::identity(6);
    for (int it = 0; it < 200; ++it) {
      const AlgebraVector x = ts::random_algebra(sig, rng, 2.0);
      const AlgebraVector n = g_connection(m, x, x);
      CHECK(n.part3(0).norm() <= 1e-14);
      CHECK((n.part3(1) - Vec3(x.part3(0).cross(x.part3(1)))).norm() <= 1e-14);
    }
  }
}

TEST_CASE("g_connection is metric compatible, torsion free, and bilinear") {
  std::mt19937_64 rng(71006);
  for (const Signature& sig : kSignatures) {
    const Metric m(random_spd(sig.dim(), rng));
    for (int it = 0; it < 1000; ++it) {
      const AlgebraVector x = ts::random_algebra(sig, rng, 2.0);
      const AlgebraVector y = ts::random_algebra(sig, rng, 2.0);
      const AlgebraVector z = ts::random_algebra(sig, rng, 2.0);
      CHECK(std::abs(m.inner(g_connection(m, x, y), z) + m.inner(y, g_connection(m, x, z))) <=
            1e-11);
      CHECK((g_connection(m, x, y).coeffs - g_connection(m, y, x).coeffs - ad(x, y).coeffs)
                .norm() <= 1e-11);
    }
    const AlgebraVector x = ts::random_algebra(sig, rng, 2.0);
    const AlgebraVector y = ts::random_algebra(sig, rng, 2.0);
    const AlgebraVector z = ts::random_algebra(sig, rng, 2.0);
    const AlgebraVector lhs = g_connection(m, x, 2.0 * y + (-0.5) * z);
    const AlgebraVector rhs = 2.0 * g_connection(m, x, y) + (-0.5) * g_connection(m, x, z);
    CHECK((lhs.coeffs - rhs.coeffs).norm() <= 1e-12);
    const AlgebraVector lhs2 = g_connection(m, 2.0 * x + (-0.5) * y, z);
    const AlgebraVector rhs2 = 2.0 * g_connection(m, x, z) + (-0.5) * g_connection(m, y, z);
    CHECK((lhs2.coeffs - rhs2.coeffs).norm() <= 1e-12);
  }
}

TEST_CASE("d_connection projects the connection and conserves energy in the subspace") {
  std::mt19937_64 rng(71007);
  const Signature sig = Signature::so3xso3();
  const Metric m(sphere_gram(Vec3(1.0, 2.0, 3.0)));
  const Subspace d = Subspace::orthonormalize(m, sig, sphere_d_basis());

  for (int it = 0; it < 300; ++it) {
    const Vec3 a = ts::random_vec3(rng, 2.0), b = ts::random_vec3(rng, 2.0);
    const AlgebraVector x = vec(sig, d.basis() * a);
    const AlgebraVector y = vec(sig, d.basis() * b);
    const AlgebraVector n = d_connection(m, d, x, y);
    CHECK((n.coeffs - project(d, m, g_connection(m, x, y)).coeffs).norm() <= 1e-13);
    CHECK(subspace_residual(d, m, n) <= 1e-11);
    CHECK(std::abs(m.inner(d_connection(m, d, x, x), x)) <= 1e-11);
    const AlgebraVector z = vec(sig, d.basis() * ts::random_vec3(rng, 2.0).eval());
    CHECK(std::abs(m.inner(d_connection(m, d, x, y), z) + m.inner(y, d_connection(m, d, x, z))) <=
          1e-11);
  }

  const AlgebraVector outside = vec(sig, Eigen::VectorXd::Unit(6, 2));
  const AlgebraVector inside = vec(sig, d.basis().col(0));
  CHECK_THROWS_AS(d_connection(m, d, outside, inside), NotInSubspace);
  CHECK_THROWS_AS(d_connection(m, d, inside, outside), NotInSubspace);

  // Isotropic inertia kills the coadjoint terms entirely.
  const Metric iso(sphere_gram(Vec3(2.0, 2.0, 2.0)));
  const Subspace d_iso = Subspace::orthonormalize(iso, sig, sphere_d_basis());
  const AlgebraVector xi = vec(sig, d_iso.basis() * Vec3(0.4, -0.2, 0.9));
  CHECK(d_connection(iso, d_iso, xi, xi).coeffs.norm() <= 1e-13);

  // Full-space constraint reduces to the unprojected connection.
  const Subspace full =
      Subspace::orthonormalize(m, sig, Eigen::MatrixXd::Identity(6, 6));
  const AlgebraVector x = ts::random_algebra(sig, rng, 2.0);
  const AlgebraVector y = ts::random_algebra(sig, rng, 2.0);
  CHECK((d_connection(m, full, x, y).coeffs - g_connection(m, x, y).coeffs).norm() <= 1e-12);
}

TEST_CASE("df_connection matches the splitting decomposition") {
  std::mt19937_64 rng(71008);
  const Signature sig = Signature::so3xso3();
  const Vec3 j(1.0, 2.0, 3.0);
  const Metric m(sphere_gram(j));
  const Subspace d = Subspace::orthonormalize(m, sig, sphere_d_basis());

  // Input directions sharpened by the inertia, plus the vertical spin.
  Eigen::MatrixXd fs_raw = Eigen::MatrixXd::Zero(6, 3);
  fs_raw(0, 0) = 1.0;
  fs_raw(3, 0) = 1.0 / j[0];
  fs_raw(1, 1) = 1.0;
  fs_raw(4, 1) = 1.0 / j[1];
  fs_raw(2, 2) = 1.0;
  const Subspace fs = Subspace::orthonormalize(m, sig, fs_raw);

  // Test-local expansion oracle with its own linear solve.
  Eigen::MatrixXd stacked(6, 6);
  stacked.leftCols(3) = d.basis();
  stacked.rightCols(3) = fs.basis();
  const auto qr = stacked.colPivHouseholderQr();
  const auto pf = [&](const AlgebraVector& v) {
    const Eigen::VectorXd c = qr.solve(v.coeffs);
    return vec(sig, fs.basis() * c.tail(3));
  };
  const auto expansion = [&](const AlgebraVector& x, const AlgebraVector& y) {
    const AlgebraVector n = g_connection(m, x, y);
    return n + g_connection(m, x, pf(y)) - pf(n);
  };

  for (int it = 0; it < 300; ++it) {
    const AlgebraVector xd = vec(sig, d.basis() * ts::random_vec3(rng, 2.0).eval());
    const AlgebraVector yd = vec(sig, d.basis() * ts::random_vec3(rng, 2.0).eval());
    const AlgebraVector n_dd = df_connection(m, d, fs, xd, yd);
    CHECK((n_dd.coeffs - oblique_project(d, fs, g_connection(m, xd, yd)).coeffs).norm() <= 1e-12);
    CHECK((n_dd.coeffs - expansion(xd, yd).coeffs).norm() <= 1e-11);

    const AlgebraVector x = ts::random_algebra(sig, rng, 2.0);
    const AlgebraVector yf = vec(sig, fs.basis() * ts::random_vec3(rng, 2.0).eval());
    CHECK((df_connection(m, d, fs, x, yf).coeffs - expansion(x, yf).coeffs).norm() <= 1e-11);
    const AlgebraVector y = ts::random_algebra(sig, rng, 2.0);
    CHECK((df_connection(m, d, fs, x, y).coeffs - expansion(x, y).coeffs).norm() <= 1e-11);
  }

  // Empty complement: the splitting connection is the plain connection.
  const Subspace whole =
      Subspace::orthonormalize(m, sig, Eigen::MatrixXd::Identity(6, 6));
  const Subspace none = Subspace::orthonormalize(m, sig, Eigen::MatrixXd::Zero(6, 0));
  const AlgebraVector x = ts::random_algebra(sig, rng, 2.0);
  const AlgebraVector y = ts::random_algebra(sig, rng, 2.0);
  CHECK((df_connection(m, whole, none, x, y).coeffs - g_connection(m, x, y).coeffs).norm() <=
        1e-12);

  CHECK_THROWS_AS(df_connection(m, d, d, x, y), NotComplementary);
}
