#include <doctest.h>

#include <random>
#include <sstream>

#include "lipnet/extension.hpp"

using namespace lipnet;

namespace {

Matrix col(std::initializer_list<double> xs) {
  Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const NormSpec kAbs(NormKind::L1, 1);

}  // namespace

TEST_CASE("mcshane examples") {
  const ExtensionProblem two(col({0, 1}), vec({0, 1}), 1.0, kAbs, 1.0);
  CHECK(mcshane_extend(two, vec({2})) == 1.0);
  CHECK(mcshane_extend(two, vec({0})) == 0.0);
  CHECK(mcshane_extend(two, vec({1})) == 1.0);

  const ExtensionProblem far(col({0, 2}), vec({0, 1}), 1.0, kAbs);
  CHECK(mcshane_extend(far, vec({1})) == 1.0);
}

TEST_CASE("extension errors") {
  CHECK_THROWS_AS(ExtensionProblem(Matrix(0, 1), Vector(0), 1.0, kAbs), ArgumentError);
  try {
    ExtensionProblem(col({0, 0.5, 1}), vec({0, 0.1, 2}), 1.0, kAbs);
    FAIL("expected a consistency error");
  } catch (const ConsistencyError& e) {
    CHECK(e.second() == 2);
  }
  CHECK_THROWS_AS(ExtensionProblem(col({0, 1}), vec({0, 1}), 1.0, kAbs, 0.5), ArgumentError);
}

TEST_CASE("extend_to_grid examples") {
  const ExtensionProblem two(col({0, 1}), vec({0, 1}), 1.0, kAbs, 1.0);
  const auto g = extend_to_grid(two, BoxDomain(vec({-1}), vec({3})), 5);
  CHECK(g.values() == vec({1, 0, 1, 1, 1}));

  Matrix p(1, 2);
  p << 0.5, 0.3;
  const NormSpec linf(NormKind::Linf, 2);
  const ExtensionProblem single(p, vec({0.7}), 1.0, linf, 2.0);
  const auto cone = extend_to_grid(single, BoxDomain::cube(2, 0, 1), 11);
  for (Eigen::Index k = 0; k < cone.lattice().size(); ++k) {
    const Vector x = cone.lattice().point(k);
    const double expect = std::min(0.7 + linf.norm(x - p.row(0).transpose()), 2.0);
    CHECK(cone.values()(k) == doctest::Approx(expect).epsilon(1e-15));
  }

  Matrix q(3, 2);
  q << 0, 0, 1, 0, 0.5, 0.5;
  const ExtensionProblem flat(q, vec({0.2, 0.2, 0.2}), 1.0, linf);
  const auto c = extend_to_grid(flat, BoxDomain::cube(2, -1, 2), 7);
  CHECK((c.values().array() == 0.2).all());
  // a negative constant rises away from the samples until the clamp
  const ExtensionProblem neg(q, vec({-0.2, -0.2, -0.2}), 1.0, linf, 0.2);
  const auto cn = extend_to_grid(neg, BoxDomain::cube(2, -1, 2), 7);
  CHECK(cn.values().minCoeff() == -0.2);
  CHECK(cn.values().maxCoeff() == 0.2);
  CHECK_THROWS_AS(extend_to_grid(flat, BoxDomain::cube(2, 0.1, 2), 7), ArgumentError);
}

TEST_CASE("restriction, Lipschitz and bound preservation on random sample sets") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 1 + trial % 2;
    const NormSpec n(trial % 3 == 0 ? NormKind::L1 : (trial % 3 == 1 ? NormKind::L2 : NormKind::Linf), d);
    const double L = 0.5 + 2.0 * u(rng);
    const int count = 3 + trial % 7;
    Matrix pts(count, d);
    Vector vals(count);
    for (int i = 0; i < count; ++i) {
      for (int j = 0; j < d; ++j) pts(i, j) = u(rng);
      double lo = -1e300, hi = 1e300;
      for (int k = 0; k < i; ++k) {
        const double r = L * n.norm((pts.row(i) - pts.row(k)).transpose());
        lo = std::max(lo, vals(k) - r);
        hi = std::min(hi, vals(k) + r);
      }
      vals(i) = i == 0 ? u(rng) - 0.5 : lo + (hi - lo) * u(rng);
    }
    const ExtensionProblem prob(pts, vals, L, n);
    for (int i = 0; i < count; ++i) CHECK(prob(pts.row(i).transpose()) == vals(i));
    const auto grid = extend_to_grid(prob, BoxDomain::cube(d, -1, 2), d == 1 ? 61 : 21);
    CHECK(grid.values().cwiseAbs().maxCoeff() <= prob.sup_bound());
    std::uniform_int_distribution<Eigen::Index> pick(0, grid.lattice().size() - 1);
    for (int t = 0; t < 2000; ++t) {
      const Eigen::Index a = pick(rng), b = pick(rng);
      const double lhs = std::abs(grid.values()(a) - grid.values()(b));
      const double rhs = L * n.norm(grid.lattice().point(a) - grid.lattice().point(b));
      CHECK(lhs <= rhs * (1 + 1e-9) + 1e-15);
    }
  }
}

TEST_CASE("scattered csv round trip") {
  ScatteredSamples s;
  s.points.resize(3, 2);
  s.points << 0.1, 0.2, 0.3, 0.4, 1.0 / 3.0, 0.5;
  s.values = vec({1.0, -2.0, 0.25});
  std::stringstream ss;
  write_scattered_csv(ss, s);
  const auto back = read_scattered_csv(ss);
  CHECK(back.points == s.points);
  CHECK(back.values == s.values);
  std::stringstream headed("x,y,value\n0,0,1\n1,0,2\n");
  CHECK(read_scattered_csv(headed).values == vec({1, 2}));
}
