#include "sympack/fibers.hpp"

#include <cmath>

#include "sympack/rng.hpp"

namespace sympack {

namespace {
const ChiProfile& chi() {
  static ChiProfile c;
  return c;
}
}  // namespace

double chi_scaled(double r, double t) { return chi().value(t / r); }

Vec phi_std(const Vec& z) {
  const int n = static_cast<int>(z.size()) / 2;
  Vec out(n);
  for (int j = 0; j < n; ++j) out[j] = z[2 * j] * z[2 * j] + z[2 * j + 1] * z[2 * j + 1];
  return out;
}

Vec rho_a(const Vec& a, const Vec& t) {
  const int n = static_cast<int>(a.size());
  double prod = 1.0;
  for (int j = 0; j < n; ++j) {
    prod *= chi_scaled(a[j], t[j]);
    if (prod == 0.0) break;
  }
  Vec out(n);
  for (int j = 0; j < n; ++j) out[j] = prod == 0.0 ? 0.0 : prod * (a[j] * a[j] - t[j] * t[j]);
  return out;
}

FiberSolution rho_fiber_solve(const Vec& a, const Vec& c) {
  const int n = static_cast<int>(a.size());
  FiberSolution sol;
  if (c.lpNorm<Eigen::Infinity>() == 0.0) {
    sol.kind = FiberSolution::Kind::ComplementOfBox;
    return sol;
  }
  for (int j = 0; j < n; ++j) {
    if (c[j] <= 0.0) {
      sol.kind = FiberSolution::Kind::Empty;
      sol.reason = "NotInImage: component " + std::to_string(j) + " nonpositive";
      return sol;
    }
  }
  // Residual function of t1 >= 0 on the domain where all radicands are
  // nonnegative; strictly decreasing until it vanishes.
  Vec d(n);
  for (int j = 0; j < n; ++j) d[j] = c[j] / c[0];
  double t_lo = 0.0;
  for (int j = 1; j < n; ++j) {
    const double r2 = a[0] * a[0] - a[j] * a[j] / d[j];
    if (r2 > 0.0) t_lo = std::max(t_lo, std::sqrt(r2));
  }
  if (t_lo >= a[0]) {
    sol.kind = FiberSolution::Kind::Empty;
    sol.reason = "NotInImage: empty t1 bracket";
    return sol;
  }
  auto lhs = [&](double t1) -> double {
    double prod = chi_scaled(a[0], t1);
    for (int j = 1; j < n; ++j) {
      const double rad = a[j] * a[j] - d[j] * (a[0] * a[0] - t1 * t1);
      if (rad < 0.0) return std::numeric_limits<double>::quiet_NaN();
      prod *= chi_scaled(a[j], std::sqrt(rad));
    }
    return prod * (a[0] * a[0] - t1 * t1);
  };
  double lo = t_lo, hi = a[0];
  const double flo = lhs(lo);
  if (std::isnan(flo) || flo < c[0]) {
    if (std::abs(flo - c[0]) <= 1e-12) {
      sol.kind = FiberSolution::Kind::Empty;
      sol.reason = "BisectionStall: c on the image boundary";
      throw BisectionStall(sol.reason);
    }
    sol.kind = FiberSolution::Kind::Empty;
    sol.reason = "NotInImage: c above the monotone branch";
    return sol;
  }
  // lhs(hi) -> 0 < c[0]; bisect the sign change of lhs - c0.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = lhs(mid);
    if (std::isnan(f) || f >= c[0])
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * (1.0 + a[0])) break;
  }
  const double t1 = 0.5 * (lo + hi);
  Vec alpha(n);
  alpha[0] = std::abs(t1);
  for (int j = 1; j < n; ++j) {
    const double rad = a[j] * a[j] - d[j] * (a[0] * a[0] - t1 * t1);
    alpha[j] = rad > 0.0 ? std::sqrt(rad) : 0.0;
  }
  // round-trip residual over the positive sign choice (signs are symmetric)
  const Vec back = rho_a(a, alpha);
  sol.residual = (back - c).lpNorm<Eigen::Infinity>();
  if (sol.residual > 1e-8) {
    sol.kind = FiberSolution::Kind::Empty;
    sol.reason = "NotInImage: residual " + std::to_string(sol.residual);
    return sol;
  }
  sol.kind = FiberSolution::Kind::Product;
  sol.alpha = alpha;
  return sol;
}

std::vector<Vec> torus_points(const Vec& alpha, int n_samples, std::uint64_t seed) {
  const int n = static_cast<int>(alpha.size());
  CounterRng rng{seed};
  std::vector<Vec> pts;
  pts.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    Vec z(2 * n);
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * M_PI * rng.uniform(s, j);
      const double r = std::sqrt(alpha[j]);
      z[2 * j] = r * std::cos(th);
      z[2 * j + 1] = r * std::sin(th);
    }
    pts.push_back(z);
  }
  return pts;
}

double involutivity_certify(const VectorField& Phi, int m, const std::vector<Vec>& points,
                            double step) {
  double worst = 0.0;
  int skipped = 0;
  for (const auto& z : points) {
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        try {
          auto fi = [&](const Vec& w) { return Phi(w)[i]; };
          auto fj = [&](const Vec& w) { return Phi(w)[j]; };
          worst = std::max(worst, std::abs(poisson_bracket_fd(fi, fj, z, step)));
        } catch (const MembershipUnknown&) {
          ++skipped;
        }
      }
    }
  }
  (void)skipped;
  return worst;
}

PhiIotaA::PhiIotaA(Vec a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
  for (int j = 0; j < a_.size(); ++j)
    if (!(a_[j] < b_[j])) throw std::invalid_argument("PhiIotaA: need a_j < b_j");
}

PhiIotaA::PhiIotaA(Vec a, Vec b, std::function<MembershipResult(const Vec&)> membership,
                   MapPtr forward)
    : a_(std::move(a)), b_(std::move(b)), membership_(std::move(membership)),
      forward_(std::move(forward)) {
  for (int j = 0; j < a_.size(); ++j)
    if (!(a_[j] < b_[j])) throw std::invalid_argument("PhiIotaA: need a_j < b_j");
}

Vec PhiIotaA::eval(const Vec& z) const {
  const int nn = n();
  if (!membership_) {
    // identity inclusion of the polydisk P(b); rho_a takes the action values
    // |z_j|^2 and already vanishes outside prod (-a_j, a_j).
    const Vec act = phi_std(z);
    bool inside = true;
    for (int j = 0; j < nn; ++j)
      if (act[j] >= b_[j]) inside = false;
    if (!inside) return Vec::Zero(nn);
    return rho_a(a_, act);
  }
  const MembershipResult m = membership_(z);
  if (m.verdict == Membership::Out) return Vec::Zero(nn);
  if (m.verdict == Membership::Unknown) throw MembershipUnknown("membership oracle unknown");
  return rho_a(a_, phi_std(*m.witness));
}

}  // namespace sympack
