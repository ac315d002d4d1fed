#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "sympack/folding.hpp"
#include "sympack/rng.hpp"

using namespace sympack;

TEST_CASE("boustrophedon enumeration invariants") {
  for (int d : {2, 4}) {
    const auto e = enumerate_cubes(5, d);
    CHECK(e.check_invariants());
    std::set<std::vector<int>> seen;
    for (long i = 1; i <= e.count; ++i) {
      const auto c = e.cube(i);
      CHECK(e.index_of(c) == i);
      seen.insert(c);
    }
    CHECK(static_cast<long>(seen.size()) == e.count);
  }
  const auto e = enumerate_cubes(5, 2);
  int x_moves = 0, y_moves = 0;
  for (long i = 1; i < e.count; ++i) {
    const auto m = e.classify(i);
    (m.coord % 2 == 0 ? x_moves : y_moves) += 1;
    CHECK(m.ell >= 0);
    CHECK(m.ell <= 4);
  }
  CHECK(x_moves + y_moves == e.count - 1);  // the classification is a partition
  CHECK(e.cube(1) == std::vector<int>{0, 0});
  const auto m1 = e.classify(1);
  CHECK(m1.coord == 0);
  CHECK(m1.dir == 1);
  CHECK(m1.ell == 0);
}

TEST_CASE("base preparation: plateau identities and area") {
  const auto bp = prepare_base(5, 2);
  CHECK(bp.A == doctest::Approx(13.0).epsilon(1e-14));  // k^2 - 3k + 3 at k = 5
  CHECK(bp.alpha == doctest::Approx(25.0 * 13.0).epsilon(1e-14));
  double acc = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) acc += bp.h->value(5.0 * (i + 0.5) / N) * 5.0 / N;
  CHECK(acc == doctest::Approx(13.0).epsilon(1e-6));

  SeqRng rng(5);
  for (int t = 0; t < 200; ++t) {
    Vec z(4);
    z[0] = rng.uniform(1e-9, 1.0 - 1e-9);
    z[1] = rng.uniform(1e-9, 1.0 - 1e-9);
    z[2] = rng.uniform(0, 1);
    z[3] = rng.uniform(0, 1);
    CHECK((bp.theta->eval(z) - z).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  for (int t = 0; t < 200; ++t) {
    Vec z(4);
    z[0] = rng.uniform(bp.alpha - 0.5, bp.alpha - 1e-9);
    z[1] = rng.uniform(1e-9, 1.0 - 1e-9);
    z[2] = 0.5;
    z[3] = 0.5;
    const Vec w = bp.theta->eval(z);
    CHECK(w[1] > 4.0);
    CHECK(w[1] < 5.0);
    CHECK(w[0] == doctest::Approx(z[0] + bp.band_len - bp.alpha).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(z[1] + 4.0).epsilon(1e-12));
  }
  SeqRng mc(17);
  int inside = 0;
  const int M = 200000;
  for (int t = 0; t < M; ++t) {
    const double u = mc.uniform(0.0, bp.band_len);
    const double v = mc.uniform(0.0, 5.0);
    const double top = (u >= bp.band_len - 2.0) ? 5.0 : bp.h->value(u);
    const double bot = bp.g->value(u);
    if (v > bot && v < top) ++inside;
  }
  const double area = 5.0 * bp.band_len * inside / M;
  CHECK(area == doctest::Approx(bp.alpha).epsilon(0.01));
}

TEST_CASE("gamma_plus: four-bullet audit") {
  const auto gp = build_gamma_plus(5, 2);
  audit_gamma_plus(*gp, 5, 2000, 42);
  CHECK(true);
}

TEST_CASE("gamma_plus: symplectic and invertible across the strip") {
  const auto gp = build_gamma_plus(5, 2);
  SeqRng rng(9);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    Vec z(4);
    z[0] = rng.uniform(-0.25 + 1e-4, 0.25 - 1e-4);
    z[1] = rng.uniform(1e-4, 1.0 - 1e-4);
    z[2] = 0.5;
    z[3] = 0.5;
    worst = std::max(worst, symplecticity_defect(*gp, z));
    Vec back;
    REQUIRE(gp->try_invert(gp->eval(z), back));
    CHECK((back - z).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("lift chief property for every block (k=5, n=2)") {
  const int k = 5, n = 2;
  const auto e = enumerate_cubes(k, 2 * n - 2);
  const auto psi = build_lift(k, n, e, lift_ramp_profile());
  SeqRng rng(23);
  for (long i = 1; i <= e.count; ++i) {
    const auto cell = e.cube(i);
    for (int s = 0; s < 100; ++s) {
      Vec z(4);
      z[0] = rng.uniform((i - 1.0) * k + 1e-9, i * static_cast<double>(k) - 1.0 - 1e-9);
      z[1] = rng.uniform(0.0, k);
      z[2] = rng.uniform(1e-9, 1.0 - 1e-9);
      z[3] = rng.uniform(1e-9, 1.0 - 1e-9);
      const Vec w = psi->eval(z);
      CHECK(w[2] > cell[0] - 1e-12);
      CHECK(w[2] < cell[0] + 1.0 + 1e-12);
      CHECK(w[3] > cell[1] - 1e-12);
      CHECK(w[3] < cell[1] + 1.0 + 1e-12);
      CHECK(w[0] == z[0]);
      CHECK(w[1] == doctest::Approx(z[1]).epsilon(1e-14));
    }
  }
  for (int s = 0; s < 100; ++s) {
    Vec z(4);
    z[0] = rng.uniform(1e-6, k - 0.75 - 1e-6);
    z[1] = rng.uniform(0.0, k);
    z[2] = rng.uniform(0, 1);
    z[3] = rng.uniform(0, 1);
    CHECK((psi->eval(z) - z).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("fast lift equals the explicit composition (k=5, n=2)") {
  const int k = 5, n = 2;
  const auto e = enumerate_cubes(k, 2 * n - 2);
  const auto rho = lift_ramp_profile();
  const auto fast = build_lift(k, n, e, rho);
  std::vector<MapPtr> factors;
  for (long i = 1; i < e.count; ++i) {
    const auto m = e.classify(i);
    const int pair = m.coord / 2 + 1;
    LiftMap::Family fam;
    if (m.coord % 2 == 0)
      fam = m.dir > 0 ? LiftMap::Family::GPlus : LiftMap::Family::GMinus;
    else
      fam = m.dir > 0 ? LiftMap::Family::HPlus : LiftMap::Family::HMinus;
    factors.push_back(std::make_shared<LiftMap>(4, pair, m.ell, fam, i * 5.0, rho));
  }
  Composition slow(factors);
  SeqRng rng(31);
  for (int t = 0; t < 2000; ++t) {
    Vec z(4);
    z[0] = rng.uniform(0.0, 125.0);
    z[1] = rng.uniform(0.0, 5.0);
    z[2] = rng.uniform(0, 1);
    z[3] = rng.uniform(0, 1);
    CHECK((fast->eval(z) - slow.eval(z)).lpNorm<Eigen::Infinity>() <= 1e-12);
    Vec zf;
    REQUIRE(fast->try_invert(fast->eval(z), zf));
    CHECK((zf - z).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("composed embedding: entry and exit slabs") {
  const auto fe = build_polydisk_embedding(5, 2);
  SeqRng rng(77);
  double worst_ii = 0.0, worst_iii = 0.0;
  Vec shift(4);
  shift << 5.0 - fe.alpha, 4.0, 4.0, 4.0;
  for (int t = 0; t < 1000; ++t) {
    Vec z(4);
    for (int d = 0; d < 4; ++d) z[d] = rng.uniform(1e-6, 1.0 - 1e-6);
    worst_ii = std::max(worst_ii, (fe.eval(z) - z).lpNorm<Eigen::Infinity>());
    Vec w = z;
    w[0] = rng.uniform(fe.alpha - 1.0 + 1e-6, fe.alpha - 1e-6);
    worst_iii = std::max(worst_iii, (fe.eval(w) - w - shift).lpNorm<Eigen::Infinity>());
  }
  CHECK(worst_ii <= 1e-12);
  CHECK(worst_iii <= 1e-9);
}

TEST_CASE("membership: round trips, lattice points, out points") {
  const auto fe = build_polydisk_embedding(5, 2);
  SeqRng rng(101);
  int in_count = 0;
  for (int t = 0; t < 300; ++t) {
    Vec z(4);
    z[0] = rng.uniform(1e-3, fe.alpha - 1e-3);
    for (int d = 1; d < 4; ++d) z[d] = rng.uniform(1e-3, 1.0 - 1e-3);
    const Vec p = fe.eval(z);
    const auto m = fe.membership(p);
    if (m.verdict == Membership::In) {
      ++in_count;
      CHECK(m.residual <= 1e-8);
    }
  }
  CHECK(in_count > 200);  // transition-band images may come back unknown

  int certified = 0, total = 0, false_in = 0;
  for (int t = 0; t < 1000; ++t) {
    Vec p(4);
    p[0] = rng.uniform(2.0, 3.0);
    for (int d = 1; d < 4; ++d) p[d] = rng.uniform(0.0, 5.0);
    bool clear = true;
    for (int d = 0; d < 4; ++d)
      if (std::abs(p[d] - std::round(p[d])) < 0.05) clear = false;
    if (!clear) continue;
    ++total;
    const auto m = fe.membership(p);
    if (m.verdict == Membership::In) {
      ++certified;
      const Vec fwd = fe.eval(*m.witness);
      if ((fwd - p).lpNorm<Eigen::Infinity>() > 1e-8) ++false_in;
    }
  }
  CHECK(false_in == 0);
  CHECK(static_cast<double>(certified) / total >= 0.99);

  Vec far = Vec::Constant(4, 7.0);
  CHECK(fe.membership(far).verdict == Membership::Out);
  Vec lat(4);
  lat << 2.5, 2.5, 3.0, 2.25;  // x_2 on an integer plane
  CHECK(fe.membership(lat).verdict != Membership::In);
}

TEST_CASE("image bound, injectivity, symplecticity sampling") {
  const auto fe = build_polydisk_embedding(5, 2);
  SeqRng rng(2027);
  std::vector<Vec> zs, ws;
  for (int t = 0; t < 4000; ++t) {
    Vec z(4);
    z[0] = rng.uniform(1e-4, fe.alpha - 1e-4);
    for (int d = 1; d < 4; ++d) z[d] = rng.uniform(1e-4, 1.0 - 1e-4);
    const Vec w = fe.eval(z);
    for (int d = 0; d < 4; ++d) {
      CHECK(w[d] > 0.0);
      CHECK(w[d] < 5.0);
    }
    zs.push_back(z);
    ws.push_back(w);
  }
  int collisions = 0;
  for (size_t i = 0; i < zs.size(); ++i)
    for (size_t j = i + 1; j < zs.size(); ++j)
      if ((zs[i] - zs[j]).lpNorm<Eigen::Infinity>() > 1e-3 &&
          (ws[i] - ws[j]).lpNorm<Eigen::Infinity>() < 1e-6)
        ++collisions;
  CHECK(collisions == 0);

  double worst_flat = 0.0;
  int flat_n = 0;
  for (int t = 0; t < 500; ++t) {
    Vec z(4);
    z[0] = rng.uniform(1e-3, fe.alpha - 1e-3);
    for (int d = 1; d < 4; ++d) z[d] = rng.uniform(1e-3, 1.0 - 1e-3);
    const Vec mid = fe.base.theta->eval(z);
    const double um = std::fmod(mid[0], 5.0);
    const bool near_turn = um < 0.3 || um > 5.0 - 0.3;
    const double d = symplecticity_defect(*fe.iota, z);
    if (!near_turn) {
      worst_flat = std::max(worst_flat, d);
      ++flat_n;
    } else {
      CHECK(d <= 1e-6);
    }
  }
  CHECK(flat_n > 100);
  CHECK(worst_flat <= 1e-10);
}
