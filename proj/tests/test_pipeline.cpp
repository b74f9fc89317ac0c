#include <doctest.h>

#include <cmath>
#include <random>

#include "lipnet/pipeline.hpp"
#include "lipnet/targets.hpp"

using namespace lipnet;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Max |net - f| over `count` uniform random points of the box.
double random_sup_error(const ShallowNet& net, const ScalarFunction& f, const BoxDomain& box, int count,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < count; ++t) {
    Vector x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x(i) = box.lower()(i) + u(rng) * box.edges()(i);
    worst = std::max(worst, std::abs(net(x) - f(x)));
  }
  return worst;
}

ApproximationProblem builtin(const std::string& name, NormKind kind, int d, double eps, double L = 1.0) {
  const NormSpec n(kind, d);
  ApproximationProblem p{make_target(name, n, L), L, BoxDomain::unit(d), eps, n, Activation::Relu, 0};
  p.global_target = true;
  return p;
}

}  // namespace

TEST_CASE("tolerance examples") {
  const auto t2 = choose_tolerances(0.1, 2, NormSpec(NormKind::L1, 2));
  CHECK(t2.delta == std::min(0.1 / 4, 0.1 / (4 * 2 * 1.0)));
  CHECK(t2.delta == doctest::Approx(0.0125));
  const auto t1 = choose_tolerances(0.1, 1, NormSpec(NormKind::L1, 1));
  CHECK(t1.delta == doctest::Approx(0.025));
  const auto half = choose_tolerances(0.5, 1, NormSpec(NormKind::L2, 1));
  CHECK(half.shrink == 0.75);
  CHECK(half.lip_budget == 0.875);
  CHECK(half.shrink * half.c_conv * half.kappa <= 0.5 / 4 * (1 + 1e-15));
  for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
    for (int d = 1; d <= 5; ++d) {
      for (double e : {0.05, 0.3, 1.9}) CHECK(choose_tolerances(e, d, NormSpec(k, d)).delta == std::min(e / 4, e / (4.0 * d)));
    }
  }
  CHECK_THROWS_AS(choose_tolerances(2.0, 1, NormSpec(NormKind::L1, 1)), ArgumentError);
  CHECK_THROWS_AS(choose_tolerances(0.0, 1, NormSpec(NormKind::L1, 1)), ArgumentError);
}

TEST_CASE("kappa keeps the mollification error within a quarter of epsilon") {
  for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
    for (int d : {1, 2, 3}) {
      const NormSpec n(k, d);
      for (double eps : {0.05, 0.3, 1.5}) {
        const auto t = choose_tolerances(eps, d, n);
        CHECK(t.C == n.c_constant());
        CHECK(t.c_conv == n.euclidean_bound());
        CHECK(t.shrink * t.c_conv * t.kappa == doctest::Approx(eps / 4));
      }
    }
  }
}

TEST_CASE("problem validation") {
  auto p = builtin("abs-shift", NormKind::L1, 1, 0.1);
  CHECK_NOTHROW(validate_problem(p));
  p.L = 0.5;
  CHECK_THROWS_AS(validate_problem(p), ArgumentError);
  auto q = builtin("abs-shift", NormKind::L1, 1, -0.1);
  CHECK_THROWS_AS(validate_problem(q), ArgumentError);
  auto r = builtin("abs-shift", NormKind::L1, 1, 0.1);
  r.K = BoxDomain::unit(2);
  CHECK_THROWS_AS(validate_problem(r), ArgumentError);
}

TEST_CASE("canonicalization examples") {
  const auto id = canonicalize(builtin("abs-shift", NormKind::L1, 1, 0.1));
  CHECK(id.rescale.M == 1.0);
  CHECK(id.rescale.l == vec({0}));
  CHECK(id.epsilon == 0.1);
  CHECK(id.target(vec({0.3})) == doctest::Approx(std::abs(0.3 - 0.5) - 0.5));

  const auto two = canonicalize(builtin("abs-shift", NormKind::L1, 1, 0.1, 2.0));
  CHECK(two.epsilon == doctest::Approx(0.05));
  for (double x : {0.0, 0.2, 0.5, 0.9}) {
    CHECK(two.target(vec({x})) == doctest::Approx(std::abs(x - 0.5) - 0.5).epsilon(1e-14));
  }

  const NormSpec n(NormKind::L2, 2);
  ApproximationProblem moved{[](const Vector& x) { return std::sin(x(0)) * 0.5 + 0.3 * x(1); }, 1.0,
                             BoxDomain(vec({2, 2}), vec({4, 4})), 0.2, n};
  const auto c = canonicalize(moved);
  CHECK(c.rescale.M == 2.0);
  CHECK(c.epsilon == doctest::Approx(0.1));
  CHECK(c.domain == BoxDomain::unit(2));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(2.0, 4.0);
  for (int t = 0; t < 100; ++t) {
    const Vector y = vec({u(rng), u(rng)});
    CHECK(std::abs(c.restore_value(c.target(c.rescale.inverse(y))) - moved.target(y)) <= 1e-9);
  }
}

TEST_CASE("restoring a canonical net inverts the reduction and keeps the width") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] { return g(rng); };
  for (int t = 0; t < 20; ++t) {
    const int d = 1 + t % 2;
    const double L = 0.5 + 3 * u(rng);
    Vector lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
      lo(i) = -2 + 4 * u(rng);
      hi(i) = lo(i) + 0.5 + 2 * u(rng);
    }
    const NormSpec n(NormKind::Linf, d);
    ApproximationProblem p{random_mcshane(L, BoxDomain(lo, hi), n, t), L, BoxDomain(lo, hi), 0.1, n};
    const auto c = canonicalize(p);
    const ShallowNet net(Activation::Relu, draw(), Vector::NullaryExpr(5, draw), Matrix::NullaryExpr(5, d, draw),
                         Vector::NullaryExpr(5, draw));
    const ShallowNet back = c.restore(net);
    CHECK(back.width() == net.width());
    for (int s = 0; s < 50; ++s) {
      Vector x(d);
      for (int i = 0; i < d; ++i) x(i) = lo(i) + u(rng) * (hi(i) - lo(i));
      const double expect = c.restore_value(net(c.rescale.inverse(x)));
      CHECK(std::abs(back(x) - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST_CASE("zero target gives the zero net") {
  for (double eps : {0.05, 0.5, 3.0}) {
    const auto rep = approximate(builtin("zero", NormKind::L1, 1, eps), 64);
    CHECK(rep.success);
    CHECK(rep.net.width() == 0);
    CHECK(rep.sup_error == 0.0);
    CHECK(rep.certificate.verdict == Verdict::Certified);
  }
}

TEST_CASE("abs-shift at epsilon 0.1") {
  const auto p = builtin("abs-shift", NormKind::L1, 1, 0.1);
  const auto rep = approximate(p, 1024);
  REQUIRE(rep.success);
  CHECK(rep.certificate.certified_bound <= 1.0 * (1 + kLipschitzSlack));
  CHECK(rep.sup_error <= 0.1);
  CHECK(random_sup_error(rep.net, p.target, p.K, 10000, 99) <= 0.1);
  CHECK(rep.log.budget_ok);
  CHECK(rep.log.budget_shrink + rep.log.budget_mollify + rep.log.budget_fit <= 0.1);
  // independent oracle for the Lipschitz claim
  CHECK(relu_exact_lipschitz(rep.net, p.K, p.norm, 100000) <= 1.0 * (1 + kLipschitzSlack));
  CHECK(empirical_lipschitz([&](const Vector& x) { return rep.net(x); }, p.K, p.norm, 5000, 3) <= 1.0);
}

TEST_CASE("min2d under linf at epsilon 0.2") {
  const auto p = builtin("min2d", NormKind::Linf, 2, 0.2);
  const auto rep = approximate(p, 256);
  REQUIRE(rep.success);
  CHECK(rep.net.width() <= 256);
  CHECK(random_sup_error(rep.net, p.target, p.K, 10000, 5) <= 0.2);
  CHECK(relu_exact_lipschitz(rep.net, p.K, p.norm, 1000000) <= 1.0 * (1 + kLipschitzSlack));
  MESSAGE("min2d width " << rep.net.width());
}

TEST_CASE("certification holds for the original constant and box") {
  const NormSpec n(NormKind::L2, 1);
  const BoxDomain K(vec({2}), vec({5}));
  ApproximationProblem p{[](const Vector& x) { return 1.5 * std::sin(x(0)) + 4.0; }, 1.5, K, 0.3, n};
  const auto rep = approximate(p, 1024);
  REQUIRE(rep.success);
  const auto again = certify(rep.net, 1.5, K, n);
  CHECK(again.verdict == Verdict::Certified);
  CHECK(rep.certificate.target_L == 1.5);
  CHECK(rep.log.M == 3.0);
  CHECK(random_sup_error(rep.net, p.target, K, 10000, 8) <= 0.3);
  // the same net is not 1.5-Lipschitz-certified with a smaller constant
  CHECK(certify(rep.net, 1.0, K, n).verdict == Verdict::Refuted);
}

TEST_CASE("without the shrink step the certified bound exceeds L for some target") {
  PipelineOptions off;
  off.shrink_enabled = false;
  double worst = 0.0;
  for (const char* name : {"abs-shift", "sin-scaled"}) {
    const auto rep = approximate(builtin(name, NormKind::L1, 1, 0.2), 1024, off);
    worst = std::max(worst, rep.certificate.certified_bound);
  }
  CHECK(worst > 1.0);
}

TEST_CASE("success implies the declared conditions") {
  for (double eps : {0.4, 0.2}) {
    for (const char* name : {"abs-shift", "sin-scaled", "randomized-mcshane"}) {
      const auto p = builtin(name, NormKind::L2, 1, eps);
      const auto rep = approximate(p, 1024);
      CHECK(rep.success == (rep.failure.empty()));
      if (rep.success) {
        CHECK(rep.certificate.verdict == Verdict::Certified);
        CHECK(rep.sup_error <= eps);
        CHECK(rep.log.fit_converged);
      }
    }
  }
}

TEST_CASE("approximate is deterministic") {
  const auto p = builtin("sin-scaled", NormKind::L1, 1, 0.2);
  const auto a = approximate(p, 1024);
  const auto b = approximate(p, 1024);
  CHECK(a.net == b.net);
  CHECK(a.sup_error == b.sup_error);
  CHECK(a.certificate.certified_bound == b.certificate.certified_bound);
}
