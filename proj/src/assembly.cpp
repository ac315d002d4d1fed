#include "sympack/assembly.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace sympack {

namespace {

// Uniform scaling building block; symplectic only inside conjugations.
class UniformScale : public SymplecticMap {
 public:
  UniformScale(int dim, double c) : dim_(dim), c_(c) {}
  int dim() const override { return dim_; }
  Vec eval(const Vec& z) const override { return c_ * z; }
  Mat jacobian(const Vec& z) const override {
    (void)z;
    return c_ * Mat::Identity(dim_, dim_);
  }
  bool try_invert(const Vec& w, Vec& z) const override {
    z = w / c_;
    return true;
  }
  std::string kind() const override { return "scale"; }

 private:
  int dim_;
  double c_;
};

// Cutoff linear Hamiltonian generating T_xi inside the cubes C_i and fading
// to zero outside C_i'; the product bump is 1 on [lo1,hi1] and 0 outside
// [lo2,hi2] per axis.
class CutoffTranslationHamiltonian : public Hamiltonian {
 public:
  struct CubeWindows {
    Vec center;
    Vec inner_r, outer_r;
  };
  CutoffTranslationHamiltonian(Vec xi, std::vector<CubeWindows> cubes)
      : xi_(std::move(xi)), cubes_(std::move(cubes)) {}

  double value(const Vec& z) const override {
    double lin = 0.0;
    for (int p = 0; p < z.size() / 2; ++p)
      lin += xi_[2 * p + 1] * z[2 * p] - xi_[2 * p] * z[2 * p + 1];
    return cutoff(z) * lin;
  }

  Vec grad(const Vec& z) const override {
    const int dd = static_cast<int>(z.size());
    double lin = 0.0;
    Vec glin = Vec::Zero(dd);
    for (int p = 0; p < dd / 2; ++p) {
      lin += xi_[2 * p + 1] * z[2 * p] - xi_[2 * p] * z[2 * p + 1];
      glin[2 * p] = xi_[2 * p + 1];
      glin[2 * p + 1] = -xi_[2 * p];
    }
    Vec gcut;
    const double cut = cutoff_grad(z, gcut);
    return cut * glin + lin * gcut;
  }

 private:
  // per-axis C-infinity window: 1 on [c-ri, c+ri], 0 outside [c-ro, c+ro]
  static double axis_window(double x, double c, double ri, double ro, double& dval) {
    const double s = std::abs(x - c);
    if (s <= ri) {
      dval = 0.0;
      return 1.0;
    }
    if (s >= ro) {
      dval = 0.0;
      return 0.0;
    }
    const double t = (s - ri) / (ro - ri);
    const double v = 1.0 - gstep(t);
    dval = -gstep_d1(t) / (ro - ri) * (x >= c ? 1.0 : -1.0);
    return v;
  }

  double cutoff(const Vec& z) const {
    double total = 0.0;
    for (const auto& cw : cubes_) {
      double prod = 1.0;
      for (int d = 0; d < z.size() && prod > 0.0; ++d) {
        double dv;
        prod *= axis_window(z[d], cw.center[d], cw.inner_r[d], cw.outer_r[d], dv);
      }
      total += prod;
    }
    return total;
  }

  double cutoff_grad(const Vec& z, Vec& g) const {
    const int dd = static_cast<int>(z.size());
    g = Vec::Zero(dd);
    double total = 0.0;
    std::vector<double> vals(dd), dvals(dd);
    for (const auto& cw : cubes_) {
      double prod = 1.0;
      for (int d = 0; d < dd; ++d) {
        vals[d] = axis_window(z[d], cw.center[d], cw.inner_r[d], cw.outer_r[d], dvals[d]);
        prod *= vals[d];
      }
      total += prod;
      if (prod != 0.0) {
        for (int d = 0; d < dd; ++d)
          if (vals[d] > 0.0) g[d] += prod / vals[d] * dvals[d];
      }
    }
    return total;
  }

  Vec xi_;
  std::vector<CubeWindows> cubes_;
};

double axis_residue_avoid(const std::vector<double>& values, double pitch, double lo, double hi) {
  if (values.empty()) return 0.5 * (lo + hi);
  const int cands = 2 * static_cast<int>(values.size()) + 3;
  double best = -1.0, best_x = lo;
  for (int c = 1; c <= cands; ++c) {
    const double cand = lo + (hi - lo) * c / (cands + 1);
    double dmin = std::numeric_limits<double>::infinity();
    for (double v : values) dmin = std::min(dmin, std::abs(std::remainder(cand - v, pitch)));
    if (dmin > best) {
      best = dmin;
      best_x = cand;
    }
  }
  if (best <= 1e-12) throw ShiftBoundUnsatisfiable("no admissible correction shift on an axis");
  return best_x;
}

}  // namespace

Vec EmbeddingPlan::avatar(const Vec& p, int cube_index) const {
  return p + w[cube_index] - cover.centers[cube_index];
}

int EmbeddingPlan::cube_of(const Vec& p) const {
  for (int i = 0; i < r; ++i) {
    if ((p - cover.centers[i]).lpNorm<Eigen::Infinity>() < a) return i;
  }
  return -1;
}

void EmbeddingPlan::check_invariants() const {
  if (!(a2 < a1 && a1 < a)) throw std::logic_error("plan: need a'' < a' < a");
  if (!(a1 > a - a1)) throw std::logic_error("plan: need a' > a - a'");
  if (!(delta > 0.0 && delta < a - a1)) throw std::logic_error("plan: delta out of range");
  if (r >= 2) {
    const double lim =
        std::min({(a1 - a2) / (r - 1), (a1 - a2) / 2.0, delta / (r - 1)});
    if (!(eta < lim)) throw std::logic_error("plan: eta bound violated");
    if (!(xi.lpNorm<Eigen::Infinity>() < xi_bound)) throw std::logic_error("plan: xi bound violated");
  }
  // target cubes pairwise disjoint
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if ((w[i] - w[j]).lpNorm<Eigen::Infinity>() < 2.0 * a - 1e-12)
        throw std::logic_error("plan: target cubes intersect");
  const double beta_expect = r * alpha + (r - 1) * 2.0 * a1;
  if (std::abs(beta - beta_expect) > 1e-9 * (1.0 + beta_expect))
    throw std::logic_error("plan: beta formula violated");
}

nlohmann::json EmbeddingPlan::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["r"] = r;
  j["a"] = a;
  j["a_prime"] = a1;
  j["a_dprime"] = a2;
  j["delta"] = delta;
  j["k"] = k;
  j["eta"] = eta;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["xi"] = std::vector<double>(xi.data(), xi.data() + xi.size());
  j["exact_inner_mass"] = exact_inner_mass;
  return j;
}

EmbeddingPlan plan_embedding(const MeasureSpec& mu, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("plan_embedding: eps in (0,1)");
  if (mu.dim % 2 != 0 || mu.dim < 4)
    throw std::invalid_argument("plan_embedding: need even dimension >= 4");
  EmbeddingPlan plan;
  plan.dim = mu.dim;
  plan.n = mu.dim / 2;
  plan.eps = eps;
  plan.cover = cube_cover(mu, eps);
  plan.a = 0.5 * plan.cover.side;
  plan.r = static_cast<int>(plan.cover.centers.size());

  // a'': smallest candidate >= a/2 whose closed-cube union still certifies
  // mass > 1 - eps (smaller a'' leaves more room for eta).
  const int steps = 64;
  bool found = false;
  for (int jstep = 0; jstep <= steps; ++jstep) {
    const double cand = plan.a * (0.5 + 0.5 * jstep / (steps + 1.0));
    double mass = 0.0;
    for (const auto& z : plan.cover.centers) {
      mass += measure_of_box(mu, QueryBox::closed_box(z.array() - cand, z.array() + cand));
    }
    if (mass > 1.0 - eps) {
      plan.a2 = cand;
      plan.exact_inner_mass = mass;
      found = true;
      break;
    }
  }
  if (!found) throw EpsilonTooSmall("no a'' with certified mass > 1 - eps");
  plan.a1 = 0.5 * (plan.a + plan.a2);
  plan.delta = 0.5 * (plan.a - plan.a1);

  // Step 2 positions w^(i) = ((4i-3)a', (2i-1)a', ..., (2i-1)a').
  for (int i = 1; i <= plan.r; ++i) {
    Vec wi = Vec::Constant(plan.dim, (2.0 * i - 1.0) * plan.a1);
    wi[0] = (4.0 * i - 3.0) * plan.a1;
    plan.w.push_back(wi);
  }

  // Step 4: smallest odd k >= 5 with eta = 2a'/k below the bound.
  plan.k = 5;
  if (plan.r >= 2) {
    const double lim =
        std::min({(plan.a1 - plan.a2) / (plan.r - 1), (plan.a1 - plan.a2) / 2.0,
                  plan.delta / (plan.r - 1)});
    while (!(2.0 * plan.a1 / plan.k < lim)) plan.k += 2;
  }
  plan.eta = 2.0 * plan.a1 / plan.k;

  // Step 5 shifts.
  for (int i = 1; i <= plan.r; ++i) {
    Vec si = Vec::Constant(plan.dim, -(i - 1.0) * plan.eta);
    si[0] = 0.0;
    plan.s.push_back(si);
  }

  // alpha and beta come from the fold at this k (A = k^2 - 3k + 3).
  const double A = static_cast<double>(plan.k) * plan.k - 3.0 * plan.k + 3.0;
  const double alpha_fold = std::pow(static_cast<double>(plan.k), 2 * plan.n - 2) * A;
  plan.alpha = plan.eta * alpha_fold;
  plan.beta = plan.r * plan.alpha + (plan.r - 1) * 2.0 * plan.a1;

  // Step 6 shift bound and residue-avoiding xi for the avatar atoms.
  plan.xi = Vec::Zero(plan.dim);
  if (plan.r >= 2) {
    plan.xi_bound = std::min({plan.a1 - plan.a2 - (plan.r - 1) * plan.eta,
                              plan.a1 - plan.a2 - 2.0 * plan.eta,
                              plan.delta - (plan.r - 1) * plan.eta});
    if (!(plan.xi_bound > 0.0)) throw ShiftBoundUnsatisfiable("empty xi bound window");
  } else {
    plan.xi_bound = std::min(plan.a1 - plan.a2, plan.delta);
  }
  // Avatar atom coordinates per axis; hyperplanes are null for boxes.
  bool need_shift = false;
  std::vector<std::vector<double>> coords(plan.dim);
  for (const auto& atom : mu.atoms) {
    const int ci = plan.cube_of(atom.point);
    if (ci < 0) continue;
    const Vec q = plan.avatar(atom.point, ci);
    for (int d = 0; d < plan.dim; ++d) {
      // on the eta-lattice (integer multiples of eta)?
      if (std::abs(std::remainder(q[d], plan.eta)) <= 1e-12) need_shift = true;
      coords[d].push_back(q[d]);
    }
  }
  if (need_shift) {
    const double b = 0.45 * plan.xi_bound;
    for (int d = 0; d < plan.dim; ++d)
      plan.xi[d] = axis_residue_avoid(coords[d], plan.eta, -b, b);
  }
  plan.check_invariants();
  return plan;
}

MapPtr assemble_hat_iota(const EmbeddingPlan& plan, const FoldingEmbedding& fold) {
  const int dim = plan.dim;
  auto scale_dn = std::make_shared<UniformScale>(dim, 1.0 / plan.eta);
  auto scale_up = std::make_shared<UniformScale>(dim, plan.eta);
  std::vector<PiecewiseBaseMap::Piece> pieces;
  const double period = plan.alpha + 2.0 * plan.a1;
  for (int i = 1; i <= plan.r; ++i) {
    const double lo = (i - 1.0) * period;
    Vec pre = Vec::Zero(dim);
    pre[0] = -lo;
    Vec post = plan.w[i - 1] - plan.w[0] + plan.s[i - 1];
    std::vector<MapPtr> chain;
    if (lo != 0.0) chain.push_back(std::make_shared<Translation>(pre));
    chain.push_back(scale_dn);
    chain.push_back(fold.iota);
    chain.push_back(scale_up);
    if (post.lpNorm<Eigen::Infinity>() != 0.0) chain.push_back(std::make_shared<Translation>(post));
    MapPtr piece = chain.size() == 1 ? chain[0] : compose(std::move(chain));
    pieces.push_back({lo, lo + plan.alpha, piece});
    if (i <= plan.r - 1) {
      Vec t = Vec::Constant(dim, i * (2.0 * plan.a1 - plan.eta));
      t[0] = i * (2.0 * plan.a1 - plan.alpha);
      pieces.push_back({i * plan.alpha + (i - 1) * 2.0 * plan.a1 - plan.eta,
                        i * plan.alpha + i * 2.0 * plan.a1 + plan.eta,
                        std::make_shared<Translation>(t)});
    }
  }
  return std::make_shared<PiecewiseBaseMap>(dim, std::move(pieces));
}

CorrectionShift correction_shift(const EmbeddingPlan& plan, const MeasureSpec& mu) {
  (void)mu;
  CorrectionShift cs;
  cs.xi = plan.xi;
  if (plan.xi.lpNorm<Eigen::Infinity>() == 0.0) {
    cs.trivial = true;
    cs.phi = std::make_shared<Translation>(Vec::Zero(plan.dim));
    return cs;
  }
  std::vector<CutoffTranslationHamiltonian::CubeWindows> windows;
  const double xin = plan.xi.lpNorm<Eigen::Infinity>();
  for (int i = 0; i < plan.r; ++i) {
    CutoffTranslationHamiltonian::CubeWindows cw;
    cw.center = plan.w[i] + plan.s[i] + 0.5 * plan.xi;
    cw.inner_r = Vec(plan.dim);
    cw.outer_r = Vec(plan.dim);
    for (int d = 0; d < plan.dim; ++d) {
      const double base = plan.a1 + 0.5 * std::abs(plan.xi[d]);
      const double room =
          plan.a - (std::abs(plan.s[i][d] + 0.5 * plan.xi[d]) + plan.a1 + 0.5 * std::abs(plan.xi[d]) + xin);
      if (room <= 0.0) throw ShiftBoundUnsatisfiable("cutoff windows do not fit inside B(a)");
      cw.inner_r[d] = base + xin + 0.25 * room;
      cw.outer_r[d] = base + xin + 0.75 * room;
    }
    windows.push_back(cw);
  }
  auto H = std::make_shared<CutoffTranslationHamiltonian>(plan.xi, std::move(windows));
  cs.phi = std::make_shared<FlowMap>(plan.dim, H, 1.0, 5e-3, 1e-5);
  return cs;
}

AssembledEmbedding embed_measure_map(const MeasureSpec& mu, double eps) {
  AssembledEmbedding emb;
  emb.plan = plan_embedding(mu, eps);
  emb.fold = build_polydisk_embedding(emb.plan.k, emb.plan.n);
  emb.hat_iota = assemble_hat_iota(emb.plan, emb.fold);
  emb.corr = correction_shift(emb.plan, mu);
  emb.iota_total = emb.corr.trivial ? emb.hat_iota : compose({emb.hat_iota, emb.corr.phi});
  return emb;
}

MembershipResult AssembledEmbedding::membership(const Vec& q) const {
  MembershipResult res;
  // Undo the correction shift (honest backward flow; exactly -xi on B_i').
  Vec p;
  if (corr.trivial) {
    p = q;
  } else if (!corr.phi->try_invert(q, p)) {
    res.verdict = Membership::Unknown;
    return res;
  }
  // Locate the cube whose shifted a'-box contains p and pull back through
  // the placed, scaled fold of that piece.
  for (int i = 0; i < plan.r; ++i) {
    const Vec center = plan.w[i] + plan.s[i];
    if ((p - center).lpNorm<Eigen::Infinity>() >= plan.a1) continue;
    Vec local = (p - (plan.w[i] - plan.w[0] + plan.s[i])) / plan.eta;
    const MembershipResult inner = fold.membership(local);
    if (inner.verdict != Membership::In) {
      res.verdict = inner.verdict;
      return res;
    }
    // The (i+1)-st fold piece lives over u in (i*(alpha + 2a'), ... + alpha).
    Vec witness = plan.eta * (*inner.witness);
    witness[0] += i * (plan.alpha + 2.0 * plan.a1);
    const Vec fwd = iota_total->eval(witness);
    const double resid = (fwd - q).lpNorm<Eigen::Infinity>();
    if (resid <= 1e-8) {
      res.verdict = Membership::In;
      res.witness = witness;
      res.residual = resid;
      return res;
    }
    res.verdict = Membership::Unknown;
    return res;
  }
  res.verdict = Membership::Out;
  return res;
}

CoverageReport coverage_report(const AssembledEmbedding& emb, const MeasureSpec& mu, int n_samples,
                               std::uint64_t seed) {
  CoverageReport rep;
  rep.eps = emb.plan.eps;
  rep.exact_lower_bound = emb.plan.exact_inner_mass;
  rep.exact_bound_ok = rep.exact_lower_bound > 1.0 - emb.plan.eps;
  const auto samples = sample_measure(mu, n_samples, seed);
  rep.mc_samples = n_samples;
  for (const auto& pt : samples) {
    const int ci = emb.plan.cube_of(pt);
    if (ci < 0) continue;
    const Vec q = emb.plan.avatar(pt, ci);
    const MembershipResult m = emb.membership(q);
    if (m.verdict == Membership::In)
      ++rep.mc_covered;
    else if (m.verdict == Membership::Unknown)
      ++rep.mc_unknown;
  }
  rep.mc_fraction = static_cast<double>(rep.mc_covered) / n_samples;
  for (const auto& atom : mu.atoms) {
    const int ci = emb.plan.cube_of(atom.point);
    int ok = 0;
    if (ci >= 0) {
      const Vec q = emb.plan.avatar(atom.point, ci);
      ok = emb.membership(q).verdict == Membership::In ? 1 : 0;
    }
    rep.atom_confirmed.push_back(ok);
  }
  return rep;
}

nlohmann::json CoverageReport::to_json() const {
  nlohmann::json j;
  j["exact_lower_bound"] = exact_lower_bound;
  j["exact_bound_ok"] = exact_bound_ok;
  j["mc_fraction"] = mc_fraction;
  j["mc_samples"] = mc_samples;
  j["mc_covered"] = mc_covered;
  j["mc_unknown"] = mc_unknown;
  j["eps"] = eps;
  j["atoms_confirmed"] = atom_confirmed;
  return j;
}

namespace {

// Planar polar map: (s,t) in (0,L) x (0,w) -> disk of area L*w, with
// |z|^2 = L t / pi and angle -2 pi s / L (area-preserving).
class RectToDisk : public SymplecticMap {
 public:
  RectToDisk(int dim, int pair, double L) : dim_(dim), p_(pair), L_(L) {}
  int dim() const override { return dim_; }
  std::string kind() const override { return "rect_to_disk"; }

  Vec eval(const Vec& z) const override {
    Vec out = z;
    const double s = z[2 * p_], t = z[2 * p_ + 1];
    const double m = L_ * t / M_PI;
    const double r = std::sqrt(m);
    const double th = -2.0 * M_PI * s / L_;
    out[2 * p_] = r * std::cos(th);
    out[2 * p_ + 1] = r * std::sin(th);
    return out;
  }

  Mat jacobian(const Vec& z) const override {
    Mat J = Mat::Identity(dim_, dim_);
    const double s = z[2 * p_], t = z[2 * p_ + 1];
    const double m = L_ * t / M_PI;
    const double r = std::sqrt(m);
    const double th = -2.0 * M_PI * s / L_;
    const double drdt = 0.5 * L_ / (M_PI * r);
    const double dthds = -2.0 * M_PI / L_;
    J(2 * p_, 2 * p_) = -r * std::sin(th) * dthds;
    J(2 * p_, 2 * p_ + 1) = drdt * std::cos(th);
    J(2 * p_ + 1, 2 * p_) = r * std::cos(th) * dthds;
    J(2 * p_ + 1, 2 * p_ + 1) = drdt * std::sin(th);
    return J;
  }

  bool try_invert(const Vec& w, Vec& z) const override {
    z = w;
    const double x = w[2 * p_], y = w[2 * p_ + 1];
    const double m = x * x + y * y;
    double th = std::atan2(y, x);
    if (th > 0.0) th -= 2.0 * M_PI;  // s in (0, L)
    z[2 * p_] = -th * L_ / (2.0 * M_PI);
    z[2 * p_ + 1] = M_PI * m / L_;
    return true;
  }

 private:
  int dim_, p_;
  double L_;
};

}  // namespace

MapPtr box_to_polydisk(double beta, double eta, int n) {
  const int dim = 2 * n;
  std::vector<MapPtr> factors;
  factors.push_back(std::make_shared<RectToDisk>(dim, 0, beta));
  for (int p = 1; p < n; ++p) factors.push_back(std::make_shared<RectToDisk>(dim, p, eta));
  return compose(std::move(factors));
}

}  // namespace sympack
