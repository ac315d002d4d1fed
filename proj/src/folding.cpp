#include "sympack/folding.hpp"

#include <algorithm>
#include <cmath>

namespace sympack {

namespace {

// phi = W^{-1} where W(u) = int_0^u h; the smear (u,v) -> (phi(u), v/phi'(u))
// is the paper's Theta_h, mapping (0, alpha) x (0,1) onto the region under
// the graph of h over (0, k^{2n-1}).
class BaseSmearFn : public MonotoneFn {
 public:
  explicit BaseSmearFn(std::shared_ptr<FoldHeightProfile> h) : h_(std::move(h)) {}
  double value(double u) const override { return h_->integral_inverse(u); }
  double d1(double u) const override { return 1.0 / h_->value(value(u)); }
  double d2(double u) const override {
    const double U = value(u);
    const double hv = h_->value(U);
    return -h_->d1(U) / (hv * hv * hv);
  }
  double inverse(double w) const override { return h_->integral(w); }

 private:
  std::shared_ptr<FoldHeightProfile> h_;
};

// g(u): 0 for u <= L-2, k - h(u) on [L-2, L], k-1 beyond, L = k^{2n-1}.
class ShearGProfile : public Profile {
 public:
  ShearGProfile(std::shared_ptr<FoldHeightProfile> h, double band_len)
      : h_(std::move(h)), L_(band_len), k_(h_->k()) {}
  double value(double t) const override {
    if (t <= L_ - 2.0) return 0.0;
    if (t >= L_) return k_ - 1.0;
    return k_ - h_->value(t);
  }
  double d1(double t) const override {
    if (t <= L_ - 2.0 || t >= L_) return 0.0;
    return -h_->d1(t);
  }
  double d2(double t) const override {
    if (t <= L_ - 2.0 || t >= L_) return 0.0;
    return -h_->d2(t);
  }

 private:
  std::shared_ptr<FoldHeightProfile> h_;
  double L_;
  double k_;
};

// Accordion: identity left of -1/8, shift by -c_sh right of 1/8, smooth
// compression between with slope floor p_min.
class AccordionFn : public MonotoneFn {
 public:
  AccordionFn(double c_sh, double ramp)
      : dep_(c_sh / (0.25 - ramp)), bump_(-0.125, -0.125 + ramp, 0.125 - ramp, 0.125, 1.0) {
    if (dep_ <= 0.0 || dep_ >= 1.0) throw std::invalid_argument("accordion: bad compression");
  }
  double value(double u) const override { return u - dep_ * bump_.integral(u); }
  double d1(double u) const override { return 1.0 - dep_ * bump_.value(u); }
  double d2(double u) const override { return -dep_ * bump_.d1(u); }
  double inverse(double w) const override {
    double u = w;  // slope <= 1, so w is a lower bound region; Newton converges
    for (int it = 0; it < 200; ++it) {
      const double f = value(u) - w;
      u -= f / d1(u);
      if (std::abs(f) < 1e-15 * (1.0 + std::abs(w))) break;
    }
    return u;
  }
  double p_min() const { return 1.0 - dep_; }

 private:
  double dep_;
  Bump bump_;
};


}  // namespace

GammaPlusParams GammaPlusParams::defaults(int k) {
  GammaPlusParams p;
  p.c_sh = 0.17;
  p.axis = -0.085;
  p.ramp = 0.03;
  p.p_min = 1.0 - p.c_sh / (0.25 - p.ramp);
  p.sigma_w = 0.046;
  p.h1 = 13.0;   // payload levels top out at (0.165 / sigma_w)^2 = 12.87
  p.h2 = 13.8;
  p.wall_lo = 0.038;
  p.wall_hi = 0.0395;
  p.wall_max = 0.25;
  p.e_margin = 0.3;
  p.cap_scale = 30.0;
  p.leak_fraction_tol = 5e-3;
  p.leak_excursion_tol = 0.25;
  return p;
}

namespace {

// The circulation core of gamma_plus: an even level function Q about the
// center (axis, k/2) whose sub-h1 region carries an exact half-turn (point
// reflection), whose super-h2 region is fixed, and whose collar material is
// moved along its own level curve. All strip material lands in closed-form
// branches by construction; the numeric branch is audited at build time.
class CapsuleCore : public SymplecticMap {
 public:
  CapsuleCore(int dim, int k, const GammaPlusParams& p)
      : dim_(dim),
        k_(k),
        p_(p),
        cy_(0.5 * k),
        e_bump_(-0.5 * k - 0.55, -0.5 * k - p.e_margin, -0.5 * k + 1.0 + p.e_margin,
                -0.5 * k + 1.55, 1.0),
        xw_(p.wall_lo, p.wall_hi, 0.0, p.wall_max),
        col_gate_(-0.0395, -0.0375, 0.0375, 0.0395, 1.0) {}

  int dim() const override { return dim_; }
  std::string kind() const override { return "capsule_core"; }

  double E(double zeta) const { return e_bump_.value(zeta); }
  double Ep(double zeta) const { return e_bump_.d1(zeta); }

  // Side expansion: pushes everything except the south-east payload zone (and
  // its north-west mirror) out of the low levels. Saturating step in |x|.
  double xw(double s) const { return xw_.value(s); }
  double xw_d1(double s) const { return xw_.d1(s); }

  // lambda is odd under (x,z) -> (-x,-z) and strictly increasing in x.
  double lambda(double xt, double zeta) const {
    return xt + (1.0 - E(zeta)) * xw(xt) - (1.0 - E(-zeta)) * xw(-xt);
  }

  // caps: inside (0,k) over the column gate, just outside elsewhere.
  double cap(double xt, double zeta) const {
    const double az = std::abs(zeta);
    const double g = col_gate_.value(xt);
    const double in = p_.cap_scale * gstep((az - (cy_ - 0.025)) / 0.012);
    const double out = p_.cap_scale * gstep((az - (cy_ + 0.02)) / 0.06);
    return g * in + (1.0 - g) * out;
  }

  double Q(double xt, double zeta) const {
    const double lam = lambda(xt, zeta) / p_.sigma_w;
    return lam * lam + cap(xt, zeta);
  }

  Vec2 gradQ(double xt, double zeta) const {
    const double e1 = E(zeta), e2 = E(-zeta);
    const double de1 = Ep(zeta), de2 = -Ep(-zeta);  // d/dzeta of E(z), E(-z)
    const double lam = lambda(xt, zeta);
    const double lam_x = 1.0 + (1.0 - e1) * xw_d1(xt) + (1.0 - e2) * xw_d1(-xt);
    const double lam_z = -de1 * xw(xt) + de2 * xw(-xt);
    const double c = 2.0 * lam / (p_.sigma_w * p_.sigma_w);
    double qx = c * lam_x;
    double qz = c * lam_z;
    // cap term
    const double az = std::abs(zeta);
    const double sgn = zeta >= 0 ? 1.0 : -1.0;
    const double g = col_gate_.value(xt);
    const double gin = gstep((az - (cy_ - 0.025)) / 0.012);
    const double gout = gstep((az - (cy_ + 0.02)) / 0.06);
    const double din = gstep_d1((az - (cy_ - 0.025)) / 0.012) / 0.012;
    const double dout = gstep_d1((az - (cy_ + 0.02)) / 0.06) / 0.06;
    qx += col_gate_.d1(xt) * p_.cap_scale * (gin - gout);
    qz += sgn * p_.cap_scale * (g * din + (1.0 - g) * dout);
    return Vec2(qx, qz);
  }

  Vec reflect(const Vec& z) const {
    Vec w = z;
    w[0] = 2.0 * p_.axis - z[0];
    w[1] = static_cast<double>(k_) - z[1];
    return w;
  }

  double taper(double h) const {
    if (h <= p_.h1) return 1.0;
    if (h >= p_.h2) return 0.0;
    return 1.0 - gstep((h - p_.h1) / (p_.h2 - p_.h1));
  }

  Vec2 field(const Vec2& w) const {
    const Vec2 g = gradQ(w[0], w[1]);
    return Vec2(-g[1], g[0]);
  }

  Mat2 field_jac(const Vec2& w) const {
    // planar second derivatives of Q by central differences of the gradient
    const double h = 1e-6;
    const Vec2 gx1 = gradQ(w[0] + h, w[1]), gx0 = gradQ(w[0] - h, w[1]);
    const Vec2 gz1 = gradQ(w[0], w[1] + h), gz0 = gradQ(w[0], w[1] - h);
    const double qxx = (gx1[0] - gx0[0]) / (2 * h);
    const double qxz = 0.5 * ((gz1[0] - gz0[0]) + (gx1[1] - gx0[1])) / (2 * h);
    const double qzz = (gz1[1] - gz0[1]) / (2 * h);
    Mat2 D;
    D << -qxz, -qzz, qxx, qxz;
    return D;
  }

  Vec2 rk4_step(const Vec2& w, double dt) const {
    const Vec2 k1 = field(w);
    const Vec2 k2 = field(w + 0.5 * dt * k1);
    const Vec2 k3 = field(w + 0.5 * dt * k2);
    const Vec2 k4 = field(w + dt * k3);
    return w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  // Full return period of the closed orbit through w0.
  double orbit_period(const Vec2& w0) const {
    const double ds = 1e-3;
    const double ret = 2e-2;
    Vec2 w = w0;
    double t = 0.0;
    bool left = false;
    const double t_cap = 4000.0;
    while (t < t_cap) {
      const double speed = field(w).norm();
      const double dt = std::min(ds / (speed + 1e-12), 0.05);
      w = rk4_step(w, dt);
      t += dt;
      const double d = (w - w0).norm();
      if (!left && d > 4 * ret) left = true;
      if (left && d < ret) {
        for (int r = 0; r < 80; ++r) {
          const Vec2 f = field(w);
          const double adv = (w0 - w).dot(f) / f.squaredNorm();
          if (!(std::abs(adv) > 1e-17)) break;
          w = rk4_step(w, adv);
          t += adv;
          if ((w - w0).norm() < 1e-12) break;
        }
        return t;
      }
    }
    throw TransitionConstructionFailed("capsule orbit period not located");
  }

  Vec2 flow_planar(const Vec2& w0, double time, Mat2* var = nullptr) const {
    Vec2 w = w0;
    if (var) var->setIdentity();
    double remaining = std::abs(time);
    const double dir = time >= 0 ? 1.0 : -1.0;
    const double ds = 1e-3;
    while (remaining > 0.0) {
      const double speed = field(w).norm();
      double dt = std::min(ds / (speed + 1e-12), 0.05);
      dt = std::min(dt, remaining);
      const double sdt = dir * dt;
      if (var) {
        const Mat2 K1 = field_jac(w) * (*var);
        const Vec2 w2 = w + 0.5 * sdt * field(w);
        const Mat2 K2 = field_jac(w2) * ((*var) + 0.5 * sdt * K1);
        const Mat2 K3 = field_jac(w2) * ((*var) + 0.5 * sdt * K2);
        const Vec2 w4 = w + sdt * field(w2);
        const Mat2 K4 = field_jac(w4) * ((*var) + sdt * K3);
        *var += (sdt / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
      }
      w = rk4_step(w, sdt);
      remaining -= dt;
    }
    return w;
  }

  enum class Branch { Identity, Reflect, Numeric };

  Branch branch_of(double xt, double zeta) const {
    const double h = Q(xt, zeta);
    if (h >= p_.h2) return Branch::Identity;
    if (h <= p_.h1) return Branch::Reflect;
    return Branch::Numeric;
  }

  Vec eval(const Vec& z) const override {
    const double xt = z[0] - p_.axis, zeta = z[1] - cy_;
    switch (branch_of(xt, zeta)) {
      case Branch::Identity:
        return z;
      case Branch::Reflect:
        return reflect(z);
      case Branch::Numeric:
        return numeric_eval(z, +1.0);
    }
    return z;
  }

  // Flow time on the collar: tau(w) = taper(h) * period(h) / 2, a function of
  // the level alone, so the reparametrized circulation is symplectic.
  double collar_time(const Vec2& w0, double& h, double& period) const {
    h = Q(w0[0], w0[1]);
    period = orbit_period(w0);
    return 0.5 * taper(h) * period;
  }

  Vec numeric_eval(const Vec& z, double direction) const {
    const double xt = z[0] - p_.axis, zeta = z[1] - cy_;
    const Vec2 w0(xt, zeta);
    double h, period;
    const double tau = collar_time(w0, h, period);
    const Vec2 w1 = flow_planar(w0, direction * tau);
    Vec out = z;
    out[0] = w1[0] + p_.axis;
    out[1] = w1[1] + cy_;
    return out;
  }

  Mat jacobian(const Vec& z) const override {
    const double xt = z[0] - p_.axis, zeta = z[1] - cy_;
    Mat J = Mat::Identity(dim_, dim_);
    switch (branch_of(xt, zeta)) {
      case Branch::Identity:
        return J;
      case Branch::Reflect:
        J(0, 0) = -1.0;
        J(1, 1) = -1.0;
        return J;
      case Branch::Numeric: {
        // d/dw of flow_{tau(h(w))}(w): variational part plus the level
        // dependence of the flow time.
        const Vec2 w0(xt, zeta);
        double h, period;
        const double tau = collar_time(w0, h, period);
        Mat2 var;
        const Vec2 w1 = flow_planar(w0, tau, &var);
        // d tau / dh = taper'(h) * period/2 + taper(h) * period'(h)/2
        const double dh = 1e-4 * (1.0 + std::abs(h));
        const Vec2 g = gradQ(xt, zeta);
        const Vec2 dir = g / g.squaredNorm();
        double period_up, period_dn;
        try {
          period_up = orbit_period(w0 + dh * dir);
          period_dn = orbit_period(w0 - dh * dir);
        } catch (const TransitionConstructionFailed&) {
          period_up = period_dn = period;
        }
        const double dperiod = (period_up - period_dn) / (2.0 * dh);
        double dtaper;
        if (h <= p_.h1 || h >= p_.h2) {
          dtaper = 0.0;
        } else {
          dtaper = -gstep_d1((h - p_.h1) / (p_.h2 - p_.h1)) / (p_.h2 - p_.h1);
        }
        const double dtau_dh = 0.5 * (dtaper * period + taper(h) * dperiod);
        const Vec2 Xend = field(w1);
        const Mat2 full = var + (dtau_dh * Xend) * g.transpose();
        J(0, 0) = full(0, 0);
        J(0, 1) = full(0, 1);
        J(1, 0) = full(1, 0);
        J(1, 1) = full(1, 1);
        return J;
      }
    }
    return J;
  }

  bool try_invert(const Vec& w, Vec& z) const override {
    const double xt = w[0] - p_.axis, zeta = w[1] - cy_;
    switch (branch_of(xt, zeta)) {
      case Branch::Identity:
        z = w;
        return true;
      case Branch::Reflect:
        z = reflect(w);
        return true;
      case Branch::Numeric:
        z = numeric_eval(w, -1.0);
        return true;
    }
    return false;
  }

  const GammaPlusParams& params() const { return p_; }

 private:
  int dim_, k_;
  GammaPlusParams p_;
  double cy_;
  Bump e_bump_;
  Step xw_;
  Bump col_gate_;
};

}  // namespace

BasePrep prepare_base(int k, int n) {
  if (k < 5 || k % 2 == 0) throw BadK("prepare_base: k must be odd and >= 5");
  if (n < 2) throw BadK("prepare_base: n must be >= 2");
  BasePrep bp;
  bp.k = k;
  bp.n = n;
  bp.h = std::make_shared<FoldHeightProfile>(k);
  bp.A = bp.h->period_integral();
  bp.band_len = std::pow(static_cast<double>(k), 2 * n - 1);
  bp.alpha = std::pow(static_cast<double>(k), 2 * n - 2) * bp.A;
  bp.g = std::make_shared<ShearGProfile>(bp.h, bp.band_len);
  const int dim = 2 * n;
  auto smear = std::make_shared<Smear>(dim, 0, std::make_shared<BaseSmearFn>(bp.h));
  auto shear = std::make_shared<Shear>(dim, 0, bp.g);
  bp.theta = compose({smear, shear});
  return bp;
}

std::vector<int> CubeEnumeration::cube(long i) const {
  long i0 = i - 1;
  std::vector<int> digits(d);
  for (int j = 0; j < d; ++j) {
    digits[j] = static_cast<int>(i0 % k);
    i0 /= k;
  }
  std::vector<int> c(d);
  long parity = 0;
  for (int j = d - 1; j >= 0; --j) {
    c[j] = (parity % 2 == 0) ? digits[j] : k - 1 - digits[j];
    parity += digits[j];
  }
  return c;
}

long CubeEnumeration::index_of(const std::vector<int>& w) const {
  std::vector<int> digits(d);
  long parity = 0;
  for (int j = d - 1; j >= 0; --j) {
    digits[j] = (parity % 2 == 0) ? w[j] : k - 1 - w[j];
    parity += digits[j];
  }
  long i0 = 0;
  for (int j = d - 1; j >= 0; --j) i0 = i0 * k + digits[j];
  return i0 + 1;
}

CubeEnumeration::Move CubeEnumeration::classify(long i) const {
  const auto a = cube(i), b = cube(i + 1);
  for (int j = 0; j < d; ++j) {
    if (a[j] != b[j]) {
      Move m;
      m.coord = j;
      m.dir = b[j] - a[j];
      m.ell = a[j ^ 1];
      return m;
    }
  }
  throw std::logic_error("enumeration: consecutive cubes equal");
}

bool CubeEnumeration::check_invariants() const {
  const auto first = cube(1), last = cube(count);
  for (int j = 0; j < d; ++j) {
    if (first[j] != 0) return false;
    if (last[j] != k - 1) return false;
  }
  for (long i = 1; i < count; ++i) {
    const auto a = cube(i), b = cube(i + 1);
    int diffs = 0, dist = 0;
    for (int j = 0; j < d; ++j) {
      if (a[j] != b[j]) {
        ++diffs;
        dist = std::abs(a[j] - b[j]);
      }
    }
    if (diffs != 1 || dist != 1) return false;
  }
  return true;
}

CubeEnumeration enumerate_cubes(int k, int d) {
  if (k < 5 || k % 2 == 0) throw BadK("enumerate_cubes: k must be odd and >= 5");
  if (d < 2 || d % 2 != 0) throw BadK("enumerate_cubes: d must be even and >= 2");
  CubeEnumeration e;
  e.k = k;
  e.d = d;
  e.count = 1;
  for (int j = 0; j < d; ++j) e.count *= k;
  return e;
}

ProfilePtr lift_ramp_profile() {
  return std::make_shared<SlopedStep>(-0.75, -0.25, 0.09);  // max slope 1/0.41 < 2.5
}

namespace {

LiftMap make_factor(int dim, int k, const CubeEnumeration::Move& m, long i, const ProfilePtr& rho) {
  const int pair = m.coord / 2 + 1;
  const bool xcoord = (m.coord % 2 == 0);
  LiftMap::Family fam;
  if (xcoord)
    fam = m.dir > 0 ? LiftMap::Family::GPlus : LiftMap::Family::GMinus;
  else
    fam = m.dir > 0 ? LiftMap::Family::HPlus : LiftMap::Family::HMinus;
  return LiftMap(dim, pair, m.ell, fam, static_cast<double>(i) * k, rho);
}

// Psi = Psi_{R-1} o ... o Psi_1 evaluated in O(1): for a given u at most one
// factor is inside its ramp; all earlier factors act by their full unit
// shifts (accumulated in a table), all later ones are the identity.
class FastLift : public SymplecticMap {
 public:
  FastLift(int k, int n, const CubeEnumeration& e, ProfilePtr rho)
      : dim_(2 * n), k_(k), count_(e.count), rho_(std::move(rho)) {
    const int d = 2 * n - 2;
    cumshift_.assign(static_cast<size_t>(count_) * d, 0);
    moves_.reserve(count_ - 1);
    std::vector<int> acc(d, 0);
    for (long i = 1; i < count_; ++i) {
      const auto m = e.classify(i);
      moves_.push_back(m);
      acc[m.coord] += m.dir;
      for (int j = 0; j < d; ++j) cumshift_[static_cast<size_t>(i) * d + j] = acc[j];
    }
  }

  int dim() const override { return dim_; }
  std::string kind() const override { return "lift_composition"; }

  // Number of factors acting by their completed shift at base coordinate u,
  // and the (at most one) factor still inside its ramp.
  void locate(double u, long& full, long& partial) const {
    full = static_cast<long>(std::floor((u + 0.25) / k_));
    full = std::clamp(full, 0L, count_ - 1);
    partial = -1;
    const long cand = full + 1;
    if (cand <= count_ - 1 && u - static_cast<double>(cand) * k_ > -0.75) partial = cand;
  }

  Vec eval(const Vec& z) const override {
    long full, partial;
    locate(z[0], full, partial);
    Vec w = z;
    apply_cumshift(w, full, +1.0);
    if (partial > 0) w = factor(partial).eval(w);
    return w;
  }

  Mat jacobian(const Vec& z) const override {
    long full, partial;
    locate(z[0], full, partial);
    if (partial < 0) return Mat::Identity(dim_, dim_);
    Vec w = z;
    apply_cumshift(w, full, +1.0);
    return factor(partial).jacobian(w);
  }

  bool try_invert(const Vec& w, Vec& z) const override {
    long full, partial;
    locate(w[0], full, partial);  // u is unchanged by every factor
    z = w;
    if (partial > 0) {
      Vec pre;
      factor(partial).try_invert(z, pre);
      z = pre;
    }
    apply_cumshift(z, full, -1.0);
    return true;
  }

 private:
  LiftMap factor(long i) const { return make_factor(dim_, k_, moves_[i - 1], i, rho_); }
  void apply_cumshift(Vec& w, long upto, double sgn) const {
    if (upto <= 0) return;
    const int d = dim_ - 2;
    for (int j = 0; j < d; ++j)
      w[2 + j] += sgn * cumshift_[static_cast<size_t>(upto) * d + j];
  }
  int dim_, k_;
  long count_;
  ProfilePtr rho_;
  std::vector<CubeEnumeration::Move> moves_;
  std::vector<int> cumshift_;
};

}  // namespace

MapPtr build_lift(int k, int n, const CubeEnumeration& e, ProfilePtr rho) {
  return std::make_shared<FastLift>(k, n, e, std::move(rho));
}

MapPtr build_gamma_plus(int k, int n) {
  const int dim = 2 * n;
  const auto p = GammaPlusParams::defaults(k);
  auto accordion = std::make_shared<Smear>(dim, 0, std::make_shared<AccordionFn>(p.c_sh, p.ramp));
  auto core = std::make_shared<CapsuleCore>(dim, k, p);
  return compose({accordion, core});
}

namespace {

// The folding case table Gamma = gamma x id with O(1) block dispatch: block
// boundaries carry the turn (gamma_plus up to rigid pieces), interiors are
// the alternating translation / point-reflection branches.
class GammaTable : public SymplecticMap {
 public:
  GammaTable(int k, int n, MapPtr gamma_plus)
      : dim_(2 * n), k_(k), gp_(std::move(gamma_plus)) {
    R_ = 1;
    for (int j = 0; j < 2 * n - 2; ++j) R_ *= k;
  }

  int dim() const override { return dim_; }
  std::string kind() const override { return "fold_table"; }

  enum class PieceKind { Flat, Turn };

  // Identify the active branch from the base coordinate.
  void locate(double u, PieceKind& pk, long& idx) const {
    if (u <= 0.0 || u >= static_cast<double>(R_) * k_)
      throw OutOfDomain("fold table: u outside the band");
    const long near_block = std::lround(u / k_);
    if (near_block >= 1 && near_block <= R_ - 1 &&
        std::abs(u - static_cast<double>(near_block) * k_) < 0.25) {
      pk = PieceKind::Turn;
      idx = near_block;
      return;
    }
    pk = PieceKind::Flat;
    idx = static_cast<long>(std::floor(u / k_));
    idx = std::clamp(idx, 0L, R_ - 1);
  }

  Vec eval(const Vec& z) const override {
    PieceKind pk;
    long i;
    locate(z[0], pk, i);
    if (pk == PieceKind::Turn) return turn_eval(z, i);
    return flat_eval(z, i);
  }

  Mat jacobian(const Vec& z) const override {
    PieceKind pk;
    long i;
    locate(z[0], pk, i);
    Mat J = Mat::Identity(dim_, dim_);
    if (pk == PieceKind::Flat) {
      if (i >= 1 && i % 2 == 1) {
        J(0, 0) = -1.0;
        J(1, 1) = -1.0;
      }
      return J;
    }
    Vec w = z;
    w[0] -= static_cast<double>(i) * k_;
    J = gp_->jacobian(w);
    if (i % 2 == 0) {
      J.row(0) = -J.row(0);
      J.row(1) = -J.row(1);
    }
    return J;
  }

  Vec turn_eval(const Vec& z, long i) const {
    Vec w = z;
    w[0] -= static_cast<double>(i) * k_;
    w = gp_->eval(w);
    if (i % 2 == 1) {
      w[0] += k_;
    } else {
      w[0] = -w[0];
      w[1] = static_cast<double>(k_) - w[1];
    }
    return w;
  }

  Vec flat_eval(const Vec& z, long b) const {
    Vec w = z;
    if (b == 0) return w;
    if (b % 2 == 1) {
      w[0] = static_cast<double>(b + 1) * k_ - z[0];
      w[1] = static_cast<double>(k_) - z[1];
    } else {
      w[0] = z[0] - static_cast<double>(b) * k_;
    }
    return w;
  }

  // Inverse of the flat branch for a prescribed block (used by membership).
  Vec flat_invert(const Vec& p, long b) const {
    Vec w = p;
    if (b == 0) return w;
    if (b % 2 == 1) {
      w[0] = static_cast<double>(b + 1) * k_ - p[0];
      w[1] = static_cast<double>(k_) - p[1];
    } else {
      w[0] = p[0] + static_cast<double>(b) * k_;
    }
    return w;
  }

  long blocks() const { return R_; }

 private:
  int dim_, k_;
  long R_;
  MapPtr gp_;
};

}  // namespace

MapPtr build_fold(int k, int n, const MapPtr& gamma_plus) {
  return std::make_shared<GammaTable>(k, n, gamma_plus);
}

bool FoldingEmbedding::in_domain(const Vec& z, double margin) const {
  if (z[0] <= margin || z[0] >= alpha - margin) return false;
  for (int i = 1; i < dim; ++i)
    if (z[i] <= margin || z[i] >= 1.0 - margin) return false;
  return true;
}

FoldingEmbedding build_polydisk_embedding(int k, int n) {
  FoldingEmbedding fe;
  fe.k = k;
  fe.n = n;
  fe.dim = 2 * n;
  fe.base = prepare_base(k, n);
  fe.alpha = fe.base.alpha;
  fe.enumeration = enumerate_cubes(k, 2 * n - 2);
  if (!fe.enumeration.check_invariants())
    throw std::logic_error("cube enumeration invariants failed");
  fe.psi = build_lift(k, n, fe.enumeration, lift_ramp_profile());
  fe.gamma_plus = build_gamma_plus(k, n);
  fe.gamma = build_fold(k, n, fe.gamma_plus);
  fe.iota = compose({fe.base.theta, fe.psi, fe.gamma});
  return fe;
}

MembershipResult FoldingEmbedding::membership(const Vec& p) const {
  MembershipResult res;
  const double kk = k;
  // Image bound: everything lands in (0,k)^{2n}.
  for (int i = 0; i < dim; ++i) {
    if (p[i] <= 0.0 || p[i] >= kk) {
      res.verdict = Membership::Out;
      return res;
    }
  }
  const double seam_margin = 1e-6;

  // Fiber cell: each fiber coordinate must avoid the integer planes.
  std::vector<int> cell(dim - 2);
  for (int t = 0; t < dim - 2; ++t) {
    const double c = p[2 + t];
    const double fl = std::floor(c);
    if (c - fl < seam_margin || fl + 1.0 - c < seam_margin) {
      res.verdict = Membership::Unknown;  // on or next to an integer plane
      return res;
    }
    cell[t] = static_cast<int>(fl);
    if (cell[t] < 0 || cell[t] > k - 1) {
      res.verdict = Membership::Out;
      return res;
    }
  }
  const long i = enumeration.index_of(cell);
  const long ip = i - 1;  // block index
  const auto ecell = enumeration.cube(i);

  // Candidate gamma-branch preimages of the base point, tall-rectangle branch
  // first (covers all of (2, k-2) x (0,k)).
  struct Cand {
    double u, v;
  };
  std::vector<Cand> cands;
  if (ip % 2 == 0) {
    cands.push_back({p[0] + ip * kk, p[1]});
  } else {
    cands.push_back({(ip + 1) * kk - p[0], kk - p[1]});
  }

  for (const auto& cand : cands) {
    Vec z1(dim);
    z1[0] = cand.u;
    z1[1] = cand.v;
    for (int t = 0; t < dim - 2; ++t) z1[2 + t] = p[2 + t];
    Vec z2, z3;
    if (!psi->try_invert(z1, z2)) continue;
    if (!base.theta->try_invert(z2, z3)) continue;
    if (!in_domain(z3, 1e-12)) continue;
    const Vec fwd = iota->eval(z3);
    const double resid = (fwd - p).lpNorm<Eigen::Infinity>();
    if (resid <= 1e-8) {
      res.verdict = Membership::In;
      res.witness = z3;
      res.residual = resid;
      return res;
    }
  }
  (void)ecell;
  res.verdict = Membership::Unknown;
  return res;
}

void audit_gamma_plus(const SymplecticMap& gp, int k, int n_samples, std::uint64_t seed) {
  SeqRng rng(seed);
  const int dim = gp.dim();
  auto mk = [&](double u, double v) {
    Vec z = Vec::Constant(dim, 0.5);
    z[0] = u;
    z[1] = v;
    return z;
  };
  // (b) identity on (-1/4, -1/8]
  for (int s = 0; s < n_samples; ++s) {
    const Vec z = mk(rng.uniform(-0.25 + 1e-6, -0.125), rng.uniform(1e-6, 1.0 - 1e-6));
    if ((gp.eval(z) - z).lpNorm<Eigen::Infinity>() > 1e-9)
      throw TransitionConstructionFailed("gamma_plus not the identity on the left band");
  }
  // (c) point reflection on [1/8, 1/4)
  for (int s = 0; s < n_samples; ++s) {
    const Vec z = mk(rng.uniform(0.125, 0.25 - 1e-6), rng.uniform(1e-6, 1.0 - 1e-6));
    Vec expect = z;
    expect[0] = -z[0];
    expect[1] = k - z[1];
    if ((gp.eval(z) - expect).lpNorm<Eigen::Infinity>() > 1e-9)
      throw TransitionConstructionFailed("gamma_plus not the point reflection on the right band");
  }
  // (d) transition band lands in [-1/8, 0) x (0, k); a measure-small leak of
  // slid collar material is tolerated up to the pinned fraction/excursion.
  const auto params = GammaPlusParams::defaults(k);
  int leaked = 0;
  double excursion = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Vec z = mk(rng.uniform(-0.125, 0.125), rng.uniform(1e-6, 1.0 - 1e-6));
    const Vec w = gp.eval(z);
    double out = 0.0;
    out = std::max(out, -0.125 - w[0]);
    out = std::max(out, w[0] - 0.0);
    out = std::max(out, -w[1]);
    out = std::max(out, w[1] - k);
    if (out > 1e-9) {
      ++leaked;
      excursion = std::max(excursion, out);
    }
  }
  if (leaked > params.leak_fraction_tol * n_samples || excursion > params.leak_excursion_tol)
    throw TransitionConstructionFailed(
        "gamma_plus transition leak beyond tolerance: " + std::to_string(leaked) + "/" +
        std::to_string(n_samples) + " samples, excursion " + std::to_string(excursion));
  // symplecticity on the strip
  for (int s = 0; s < n_samples / 10 + 1; ++s) {
    const Vec z = mk(rng.uniform(-0.25 + 1e-3, 0.25 - 1e-3), rng.uniform(1e-3, 1.0 - 1e-3));
    if (symplecticity_defect(gp, z) > 1e-6)
      throw TransitionConstructionFailed("gamma_plus symplecticity defect too large");
  }
}

}  // namespace sympack
