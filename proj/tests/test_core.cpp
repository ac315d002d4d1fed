#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sympack/flow.hpp"
#include "sympack/maps.hpp"
#include "sympack/profiles.hpp"
#include "sympack/rng.hpp"

using namespace sympack;

namespace {
Vec pt2(double x, double y) {
  Vec z(2);
  z << x, y;
  return z;
}

class Poly : public Profile {
 public:
  // f(x) = x^2
  double value(double t) const override { return t * t; }
  double d1(double t) const override { return 2.0 * t; }
  double d2(double t) const override { return 2.0; }
};
}  // namespace

TEST_CASE("gstep is an exact-plateau smooth step") {
  CHECK(gstep(-1.0) == 0.0);
  CHECK(gstep(0.0) == 0.0);
  CHECK(gstep(1.0) == 1.0);
  CHECK(gstep(2.0) == 1.0);
  CHECK(gstep(0.5) == doctest::Approx(0.5));
  for (double s : {0.1, 0.3, 0.7, 0.9}) CHECK(gstep(s) + gstep(1.0 - s) == doctest::Approx(1.0).epsilon(1e-14));
  // derivative consistency via finite differences
  for (double s : {0.2, 0.5, 0.8}) {
    const double h = 1e-6;
    CHECK(gstep_d1(s) == doctest::Approx((gstep(s + h) - gstep(s - h)) / (2 * h)).epsilon(1e-6));
    CHECK(gstep_d2(s) ==
          doctest::Approx((gstep_d1(s + h) - gstep_d1(s - h)) / (2 * h)).epsilon(1e-5));
  }
  CHECK(gstep_integral(1.0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("shear examples and jacobian") {
  Shear S(2, 0, std::make_shared<Poly>());
  // S_f with f(x)=x^2 at (1,0) -> (1,1)
  CHECK((S.eval(pt2(1, 0)) - pt2(1, 1)).norm() == 0.0);
  // jacobian at (3,0): [[1,0],[6,1]]
  const Mat J = S.jacobian(pt2(3, 0));
  CHECK(J(0, 0) == 1.0);
  CHECK(J(0, 1) == 0.0);
  CHECK(J(1, 0) == 6.0);
  CHECK(J(1, 1) == 1.0);
  CHECK(symplecticity_defect(S, pt2(0.3, -0.7)) <= 1e-12);
  Vec back;
  CHECK(S.try_invert(S.eval(pt2(0.4, 0.9)), back));
  CHECK((back - pt2(0.4, 0.9)).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("translation is exact") {
  Translation T(pt2(1, 2));
  CHECK((T.eval(pt2(0, 0)) - pt2(1, 2)).norm() == 0.0);
  CHECK(symplecticity_defect(T, pt2(5, -3)) == 0.0);
}

namespace {
// phi(x) = 2x so that the smear is (x, y) -> (2x, y/2); this is Theta_g for
// the constant profile g == 2 read through h(x) = x/2 ... i.e. the example
// smear maps (x, y) to (x/2, 2y) when phi(x) = x/2.
class HalfFn : public MonotoneFn {
 public:
  double value(double t) const override { return 0.5 * t; }
  double d1(double) const override { return 0.5; }
  double d2(double) const override { return 0.0; }
  double inverse(double w) const override { return 2.0 * w; }
};
}  // namespace

TEST_CASE("smear with constant profile g = 2") {
  // Theta_g(x,y) = (h(x), g(x) y) with h(x) = x/2: realized as the smear with
  // phi(x) = x/2 (so y scales by 1/phi' = 2).
  Smear Th(2, 0, std::make_shared<HalfFn>());
  const Vec w = Th.eval(pt2(1.0, 0.25));
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(0.5));
  CHECK(symplecticity_defect(Th, pt2(0.7, 0.1)) <= 1e-12);
  Vec back;
  CHECK(Th.try_invert(w, back));
  CHECK((back - pt2(1.0, 0.25)).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("composition soundness is exact") {
  auto S = std::make_shared<Shear>(2, 0, std::make_shared<Poly>());
  auto T = std::make_shared<Translation>(pt2(1, 2));
  Composition C({S, T});
  const Vec z = pt2(0.3, 0.8);
  CHECK((C.eval(z) - T->eval(S->eval(z))).norm() == 0.0);
}

TEST_CASE("poisson bracket: canonical pair, involutive actions, hand check") {
  SeqRng rng(7);
  Vec z4(4);
  for (int i = 0; i < 4; ++i) z4[i] = rng.uniform(-1, 1);
  // {x1, y1} = 1
  auto x1 = [](const Vec& z) { return z[0]; };
  auto y1 = [](const Vec& z) { return z[1]; };
  CHECK(poisson_bracket_fd(x1, y1, z4, 1e-4) == doctest::Approx(1.0).epsilon(1e-8));
  // {|z1|^2, |z2|^2} = 0 on R^4
  auto a1 = [](const Vec& z) { return z[0] * z[0] + z[1] * z[1]; };
  auto a2 = [](const Vec& z) { return z[2] * z[2] + z[3] * z[3]; };
  CHECK(std::abs(poisson_bracket_fd(a1, a2, z4, 1e-4)) <= 1e-10);
  // {x1 y2, x2} = -x1
  auto f = [](const Vec& z) { return z[0] * z[3]; };
  auto g = [](const Vec& z) { return z[2]; };
  CHECK(poisson_bracket_fd(f, g, z4, 1e-4) == doctest::Approx(-z4[0]).epsilon(1e-8));
  // antisymmetry on random polynomials
  for (int trial = 0; trial < 20; ++trial) {
    Vec c1(4), c2(4);
    for (int i = 0; i < 4; ++i) {
      c1[i] = rng.uniform(-1, 1);
      c2[i] = rng.uniform(-1, 1);
    }
    auto p = [&](const Vec& z) { return c1.dot(z) + z[0] * z[2] * c2[0]; };
    auto q = [&](const Vec& z) { return c2.dot(z) + z[1] * z[3] * c1[1]; };
    Vec zz(4);
    for (int i = 0; i < 4; ++i) zz[i] = rng.uniform(-1, 1);
    CHECK(std::abs(poisson_bracket_fd(p, q, zz, 1e-4) + poisson_bracket_fd(q, p, zz, 1e-4)) <=
          2e-10);
  }
}

namespace {
class LinearH : public Hamiltonian {
 public:
  // H = x1
  double value(const Vec& z) const override { return z[0]; }
  Vec grad(const Vec& z) const override {
    Vec g = Vec::Zero(z.size());
    g[0] = 1.0;
    return g;
  }
};
class QuadH : public Hamiltonian {
 public:
  // H = (x^2 + y^2) / 2: flow = rotation at unit speed
  double value(const Vec& z) const override { return 0.5 * z.squaredNorm(); }
  Vec grad(const Vec& z) const override { return z; }
  Mat hess(const Vec& z) const override { return Mat::Identity(z.size(), z.size()); }
};
}  // namespace

TEST_CASE("hamiltonian flows: zero, linear, rotation") {
  // H == 0: identity
  auto zero = std::make_shared<FnHamiltonian>([](const Vec&) { return 0.0; },
                                              [](const Vec& z) { return Vec::Zero(z.size()); });
  FlowMap F0(2, zero, 1.0, 1e-2);
  CHECK((F0.eval(pt2(0.3, 0.4)) - pt2(0.3, 0.4)).norm() == 0.0);

  // H = x: per the calibrated convention ydot = +1, so time-1 flow shifts y by +1.
  FlowMap F1(2, std::make_shared<LinearH>(), 1.0, 1e-2);
  CHECK((F1.eval(pt2(0.2, 0.5)) - pt2(0.2, 1.5)).lpNorm<Eigen::Infinity>() <= 1e-12);

  // rotation flow preserves H and is symplectic to integrator order
  FlowMap FR(2, std::make_shared<QuadH>(), 1.0, 1e-3);
  const Vec z0 = pt2(0.8, -0.1);
  const Vec z1 = FR.eval(z0);
  CHECK(std::abs(z1.squaredNorm() - z0.squaredNorm()) <= 1e-10);
  CHECK(symplecticity_defect(FR, z0) <= 1e-6);
  Vec back;
  CHECK(FR.try_invert(z1, back));
  CHECK((back - z0).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("lift maps match their flows and invert exactly") {
  // G+ family on R^4 with ell = 0 and ramp rho
  auto rho = std::make_shared<SlopedStep>(-0.75, -0.25, 0.09);
  CHECK(rho->value(-0.75) == 0.0);
  CHECK(rho->value(-0.25) == 1.0);
  CHECK(rho->value(0.5) == 1.0);
  LiftMap L(4, 1, 0, LiftMap::Family::GPlus, 0.0, rho);
  SeqRng rng(3);
  for (int t = 0; t < 50; ++t) {
    Vec z(4);
    z[0] = rng.uniform(-1.2, 0.5);
    z[1] = rng.uniform(0, 1);
    z[2] = rng.uniform(0, 1);
    z[3] = rng.uniform(0, 1);
    CHECK(symplecticity_defect(L, z) <= 1e-10);
    Vec back;
    CHECK(L.try_invert(L.eval(z), back));
    CHECK((back - z).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(std::abs(L.hamiltonian(L.eval(z)) - L.hamiltonian(z)) <= 1e-8);
  }
  // flow agreement: integrate the lift Hamiltonian numerically and compare
  auto H = std::make_shared<FnHamiltonian>(
      [&](const Vec& z) { return L.hamiltonian(z); },
      [&](const Vec& z) {
        Vec g = Vec::Zero(4);
        g[0] = rho->d1(z[0]) * (1.0 - z[3]);
        g[3] = -rho->value(z[0]);
        return g;
      });
  FlowMap FH(4, H, 1.0, 1e-3);
  for (int t = 0; t < 10; ++t) {
    Vec z(4);
    z[0] = rng.uniform(-1.2, 0.5);
    z[1] = rng.uniform(0, 1);
    z[2] = rng.uniform(0, 1);
    z[3] = rng.uniform(0, 1);
    CHECK((FH.eval(z) - L.eval(z)).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("symplecticity of random analytic pieces at many points") {
  SeqRng rng(11);
  auto rho = std::make_shared<SlopedStep>(-0.75, -0.25, 0.09);
  Shear S(4, 1, std::make_shared<Poly>());
  LiftMap L(4, 1, 2, LiftMap::Family::HMinus, 3.0, rho);
  for (int t = 0; t < 10000; ++t) {
    Vec z(4);
    for (int i = 0; i < 4; ++i) z[i] = rng.uniform(-2, 6);
    CHECK(symplecticity_defect(S, z) <= 1e-10);
    CHECK(symplecticity_defect(L, z) <= 1e-10);
  }
}
