#include <doctest.h>

#include <random>

#include "lipnet/network.hpp"
#include "lipnet/serialization.hpp"

using namespace lipnet;

namespace {

Vector scalar(double x) { return Vector::Constant(1, x); }

ShallowNet random_net(std::mt19937_64& rng, Activation act, int d, int m) {
  std::normal_distribution<double> g;
  auto draw = [&] { return g(rng); };
  return ShallowNet(act, draw(), Vector::NullaryExpr(m, draw), Matrix::NullaryExpr(m, d, draw),
                    Vector::NullaryExpr(m, draw));
}

}  // namespace

TEST_CASE("evaluation examples") {
  const ShallowNet constant(Activation::Relu, 2.5, Vector::Ones(3), Matrix::Zero(3, 2), Vector::Zero(3));
  CHECK(constant(Vector::Constant(2, 0.7)) == 2.5);

  const ShallowNet hat = hat_net();
  CHECK(hat.width() == 3);
  CHECK(hat.a() == (Vector(3) << 1, -2, 1).finished());
  CHECK(hat.c() == (Vector(3) << 0, 1, 2).finished());
  CHECK(hat(scalar(-1)) == 1.0);

  const ShallowNet unit(Activation::Tanh, 0, Vector::Ones(1), Matrix::Ones(1, 1), Vector::Zero(1));
  CHECK(unit(scalar(0)) == 0.0);
  CHECK_THROWS_AS(hat(Vector::Zero(2)), ArgumentError);
  CHECK(ShallowNet::constant(3, -1.0)(Vector::Zero(3)) == -1.0);
}

TEST_CASE("gradient examples") {
  const ShallowNet hat = hat_net();
  CHECK(hat.gradient(scalar(-1.5))(0) == 1.0);
  CHECK(hat.gradient(scalar(0.5))(0) == 0.0);
  CHECK(hat.gradient(scalar(-0.5))(0) == -1.0);
  // phi'(0) = 0 drops the first unit at x = 0
  CHECK(hat.gradient(scalar(0.0))(0) == -1.0);
  CHECK_THROWS_AS(hat.gradient(Vector::Zero(2)), ArgumentError);
}

TEST_CASE("hat function on a 401-point grid") {
  const ShallowNet hat = hat_net();
  for (int i = 0; i <= 400; ++i) {
    const double x = -4.0 + i * 0.01;
    const double expect = std::max(0.0, 1.0 - std::abs(x + 1.0));
    CHECK(std::abs(hat(scalar(x)) - expect) <= 1e-12);
  }
}

TEST_CASE("smooth gradients match finite differences") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (Activation act : {Activation::Tanh, Activation::Softplus, Activation::Sigmoid}) {
    for (int t = 0; t < 300; ++t) {
      const int d = 1 + t % 3;
      const ShallowNet net = random_net(rng, act, d, 1 + t % 5);
      const Vector x = Vector::NullaryExpr(d, [&] { return g(rng); });
      const Vector grad = net.gradient(x);
      for (int i = 0; i < d; ++i) {
        const double h = 1e-5;
        Vector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const double fd = (net(xp) - net(xm)) / (2 * h);
        CHECK(std::abs(fd - grad(i)) <= 1e-6 * std::max(1.0, std::abs(grad(i))));
      }
    }
  }
}

TEST_CASE("activation specs") {
  for (Activation act : {Activation::Tanh, Activation::Softplus, Activation::Sigmoid, Activation::Relu}) {
    const auto& s = activation_spec(act);
    CHECK(parse_activation(to_string(act)) == act);
    double worst = 0.0;
    for (int i = -2000; i <= 2000; ++i) {
      const double z = i / 100.0 + 0.005;
      worst = std::max(worst, std::abs(s.derivative(z)));
      const double h = 1e-6;
      CHECK(std::abs((s.value(z + h) - s.value(z - h)) / (2 * h) - s.derivative(z)) <= 1e-6);
      if (s.smooth()) {
        CHECK(std::abs((s.derivative(z + h) - s.derivative(z - h)) / (2 * h) - s.second_derivative(z)) <= 1e-6);
      }
    }
    CHECK(worst <= s.lipschitz + 1e-12);
  }
  CHECK(activation_spec(Activation::Sigmoid).lipschitz == 0.25);
  CHECK(activation_spec(Activation::Tanh).lipschitz == 1.0);
  CHECK_THROWS_AS(parse_activation("gelu"), ArgumentError);
}

TEST_CASE("scale and shift") {
  const ShallowNet hat = hat_net();
  CHECK(net_scale_shift(hat, 3, 1)(scalar(-1)) == 4.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4, 2);
  const ShallowNet id = net_scale_shift(hat, 1, 0);
  const ShallowNet zero = net_scale_shift(hat, 0, -0.75);
  const ShallowNet s = net_scale_shift(hat, -2.5, 0.125);
  CHECK(id.width() == 3);
  CHECK(zero.width() == 3);
  for (int t = 0; t < 100; ++t) {
    const Vector x = scalar(u(rng));
    CHECK(id(x) == hat(x));
    CHECK(zero(x) == -0.75);
    CHECK(std::abs(s(x) - (-2.5 * hat(x) + 0.125)) <= 1e-12);
  }
}

TEST_CASE("affine precomposition") {
  const ShallowNet hat = hat_net();
  const ShallowNet same = net_precompose_affine(hat, 1.0, Vector::Zero(1));
  const ShallowNet twice = net_precompose_affine(hat, 2.0, Vector::Zero(1));
  CHECK(twice.width() == 3);
  CHECK(twice(scalar(-2)) == doctest::Approx(2.0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 100; ++t) {
    const Vector x = scalar(u(rng));
    CHECK(same(x) == hat(x));
  }
  const ShallowNet shifted = net_precompose_affine(random_net(rng, Activation::Tanh, 2, 4), 3.0, Vector::Ones(2));
  const ShallowNet base = random_net(rng, Activation::Tanh, 2, 4);
  const ShallowNet moved = net_precompose_affine(base, 3.0, (Vector(2) << 2, -1).finished());
  for (int t = 0; t < 100; ++t) {
    const Vector x = Vector::NullaryExpr(2, [&] { return u(rng); });
    const Vector y = (x - (Vector(2) << 2, -1).finished()) / 3.0;
    CHECK(std::abs(moved(x) - 3.0 * base(y)) <= 1e-12);
  }
  CHECK(shifted.width() == 4);
  CHECK_THROWS_AS(net_precompose_affine(hat, 0.0, Vector::Zero(1)), ArgumentError);
}

TEST_CASE("pruning") {
  const ShallowNet n(Activation::Relu, 0.5, (Vector(3) << 1, 0, 2).finished(), Matrix::Ones(3, 1),
                     Vector::Zero(3));
  const ShallowNet p = prune_zero_units(n);
  CHECK(p.width() == 2);
  CHECK(p(scalar(0.3)) == n(scalar(0.3)));
}

TEST_CASE("net json round trip is bit exact") {
  std::mt19937_64 rng(9);
  for (Activation act : {Activation::Tanh, Activation::Relu, Activation::Softplus, Activation::Sigmoid}) {
    const ShallowNet net = random_net(rng, act, 2, 5);
    const Json j = to_json(net);
    CHECK(j["m"] == 5);
    CHECK(j["d"] == 2);
    const ShallowNet back = net_from_json(Json::parse(dump(j)));
    CHECK(back == net);
  }
  const ShallowNet empty = ShallowNet::constant(2, 0.3);
  CHECK(net_from_json(Json::parse(dump(to_json(empty)))) == empty);
  CHECK_THROWS_AS(net_from_json(Json::parse("{\"activation\":\"relu\"}")), ArgumentError);
}

TEST_CASE("coincident ReLU units are merged or snapped") {
  Matrix W(4, 2);
  W << 1, 1, 2, 2.000000001, -1, -1.0000000005, 0, 1;
  const Vector c = (Vector(4) << -1, -2, 1.0000000001, 0.5).finished();
  const Vector a = (Vector(4) << 0.5, 0.25, -0.75, 1).finished();
  const ShallowNet net(Activation::Relu, 0.1, a, W, c);
  const ShallowNet merged = merge_coincident_units(net, 1e-6);
  // the second unit joins the first, the third is snapped onto the same line
  CHECK(merged.width() == 3);
  CHECK(merged.a()(0) == doctest::Approx(0.5 + 0.25 * 2));
  CHECK(merged.W().row(1) == -merged.W().row(0) * (merged.W().row(1).norm() / merged.W().row(0).norm()));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 200; ++t) {
    const Vector x = Vector::NullaryExpr(2, [&] { return u(rng); });
    CHECK(std::abs(merged(x) - net(x)) <= 1e-8);
  }
  const ShallowNet smooth(Activation::Tanh, 0.1, a, W, c);
  CHECK(merge_coincident_units(smooth, 1e-6) == smooth);
}
