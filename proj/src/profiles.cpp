#include "sympack/profiles.hpp"

#include <array>
#include <cmath>

namespace sympack {

namespace {

// exp(-1/s) and its first two derivatives, zero for s <= 0.
double moll(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double moll_d1(double s) { return s > 0.0 ? moll(s) / (s * s) : 0.0; }
double moll_d2(double s) {
  if (s <= 0.0) return 0.0;
  const double m = moll(s);
  return m * (1.0 - 2.0 * s) / (s * s * s * s);
}

// 7-point Gauss-Legendre on [a,b].
template <typename F>
double gauss7(F f, double a, double b) {
  static const std::array<double, 7> xs = {-0.9491079123427585, -0.7415311855993945,
                                           -0.4058451513773972, 0.0,
                                           0.4058451513773972,  0.7415311855993945,
                                           0.9491079123427585};
  static const std::array<double, 7> ws = {0.1294849661688697, 0.2797053914892767,
                                           0.3818300505051189, 0.4179591836734694,
                                           0.3818300505051189, 0.2797053914892767,
                                           0.1294849661688697};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 7; ++i) s += ws[i] * f(c + h * xs[i]);
  return s * h;
}

template <typename F>
double adaptive_quad(F f, double a, double b, double tol, int depth = 0) {
  const double whole = gauss7(f, a, b);
  const double m = 0.5 * (a + b);
  const double split = gauss7(f, a, m) + gauss7(f, m, b);
  if (depth > 48 || std::abs(whole - split) < tol) return split;
  return adaptive_quad(f, a, m, 0.5 * tol, depth + 1) + adaptive_quad(f, m, b, 0.5 * tol, depth + 1);
}

struct GstepIntegralTable {
  static constexpr int kNodes = 257;
  std::array<double, kNodes> prefix{};
  GstepIntegralTable() {
    prefix[0] = 0.0;
    for (int i = 1; i < kNodes; ++i) {
      double a = static_cast<double>(i - 1) / (kNodes - 1);
      double b = static_cast<double>(i) / (kNodes - 1);
      prefix[i] = prefix[i - 1] + adaptive_quad([](double s) { return gstep(s); }, a, b, 1e-16);
    }
  }
  double eval(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 0.5 + (s - 1.0);  // gstep == 1 beyond
    int i = static_cast<int>(s * (kNodes - 1));
    if (i >= kNodes - 1) i = kNodes - 2;
    double a = static_cast<double>(i) / (kNodes - 1);
    return prefix[i] + adaptive_quad([](double t) { return gstep(t); }, a, s, 1e-16);
  }
};

const GstepIntegralTable& gstep_table() {
  static GstepIntegralTable t;
  return t;
}

}  // namespace

double gstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = moll(s), b = moll(1.0 - s);
  return a / (a + b);
}

double gstep_d1(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = moll(s), b = moll(1.0 - s);
  const double da = moll_d1(s), db = -moll_d1(1.0 - s);
  const double denom = a + b;
  return (da * denom - a * (da + db)) / (denom * denom);
}

double gstep_d2(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = moll(s), b = moll(1.0 - s);
  const double da = moll_d1(s), db = -moll_d1(1.0 - s);
  const double d2a = moll_d2(s), d2b = moll_d2(1.0 - s);
  const double denom = a + b;
  const double n1 = da * b - a * db;  // numerator of d1*(denom^2)
  const double dn1 = d2a * b - a * d2b;
  return (dn1 * denom - 2.0 * n1 * (da + db)) / (denom * denom * denom);
}

double gstep_integral(double s) { return gstep_table().eval(s); }

SlopedStep::SlopedStep(double t0, double t1, double ramp)
    : bump_(t0, t0 + ramp, t1 - ramp, t1, 1.0 / (t1 - t0 - ramp)),
      t0_(t0),
      t1_(t1),
      m_(ramp),
      slope_(1.0 / (t1 - t0 - ramp)) {
  if (!(t1 > t0) || !(ramp > 0.0) || !(2.0 * ramp < t1 - t0))
    throw std::invalid_argument("SlopedStep: bad ramp geometry");
}

double SlopedStep::value(double t) const {
  if (t <= t0_) return 0.0;
  if (t >= t1_) return 1.0;
  // integral of the bump from t0 to t
  double acc = 0.0;
  const double b = t0_ + m_, c = t1_ - m_;
  if (t <= b) return slope_ * m_ * gstep_integral((t - t0_) / m_);
  acc = slope_ * m_ * 0.5;
  if (t <= c) return acc + slope_ * (t - b);
  acc += slope_ * (c - b);
  // tail ramp: slope_ * gstep((t1-t)/m): integral from c to t
  acc += slope_ * m_ * (0.5 - gstep_integral((t1_ - t) / m_));
  return acc;
}

double ChiProfile::value(double t) const {
  const double s = 1.0 - t * t;
  if (s <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / s);
}

double ChiProfile::d1(double t) const {
  const double s = 1.0 - t * t;
  if (s <= 0.0) return 0.0;
  return value(t) * (-2.0 * t / (s * s));
}

double ChiProfile::d2(double t) const {
  const double s = 1.0 - t * t;
  if (s <= 0.0) return 0.0;
  const double g = -2.0 * t / (s * s);                       // (log chi)'
  const double gp = -2.0 / (s * s) - 8.0 * t * t / (s * s * s);  // (log chi)''
  return value(t) * (g * g + gp);
}

FoldHeightProfile::FoldHeightProfile(int k) : k_(k) {
  if (k < 5 || k % 2 == 0) throw BadK("k must be odd and >= 5");
  kA_ = static_cast<double>(k) * k - 3.0 * k + 3.0;
}

double FoldHeightProfile::value_in_period(double t) const {
  const double k = k_;
  if (t <= 1.0) return 1.0;
  if (t < 2.0) return 1.0 + (k - 1.0) * gstep(t - 1.0);
  if (t <= k - 2.0) return k;
  if (t < k - 1.0) return 1.0 + (k - 1.0) * gstep(k - 1.0 - t);
  return 1.0;
}

double FoldHeightProfile::value(double t) const {
  double s = std::fmod(t, static_cast<double>(k_));
  if (s < 0) s += k_;
  return value_in_period(s);
}

double FoldHeightProfile::d1(double t) const {
  double s = std::fmod(t, static_cast<double>(k_));
  if (s < 0) s += k_;
  const double k = k_;
  if (s > 1.0 && s < 2.0) return (k - 1.0) * gstep_d1(s - 1.0);
  if (s > k - 2.0 && s < k - 1.0) return -(k - 1.0) * gstep_d1(k - 1.0 - s);
  return 0.0;
}

double FoldHeightProfile::d2(double t) const {
  double s = std::fmod(t, static_cast<double>(k_));
  if (s < 0) s += k_;
  const double k = k_;
  if (s > 1.0 && s < 2.0) return (k - 1.0) * gstep_d2(s - 1.0);
  if (s > k - 2.0 && s < k - 1.0) return (k - 1.0) * gstep_d2(k - 1.0 - s);
  return 0.0;
}

double FoldHeightProfile::integral_in_period(double t) const {
  const double k = k_;
  if (t <= 0.0) return 0.0;
  if (t <= 1.0) return t;
  double acc = 1.0;
  if (t <= 2.0) return acc + (t - 1.0) + (k - 1.0) * gstep_integral(t - 1.0);
  acc += 1.0 + (k - 1.0) * 0.5;
  if (t <= k - 2.0) return acc + k * (t - 2.0);
  acc += k * (k - 4.0);
  if (t <= k - 1.0) {
    // int_{k-2}^t [1 + (k-1) gstep(k-1-s)] ds
    const double len = t - (k - 2.0);
    return acc + len + (k - 1.0) * (0.5 - gstep_integral(k - 1.0 - t));
  }
  acc += 1.0 + (k - 1.0) * 0.5;
  return acc + (t - (k - 1.0));
}

double FoldHeightProfile::integral(double u) const {
  const double k = k_;
  double periods = std::floor(u / k);
  double rem = u - periods * k;
  return periods * kA_ + integral_in_period(rem);
}

double FoldHeightProfile::integral_inverse(double w) const {
  const double k = k_;
  // initial guess by whole periods, then Newton (W' = h in [1,k])
  double periods = std::floor(w / kA_);
  double u = periods * k + (w - periods * kA_) / (kA_ / k);
  for (int it = 0; it < 100; ++it) {
    const double f = integral(u) - w;
    const double fp = value(u);
    const double du = f / fp;
    u -= du;
    if (std::abs(du) < 1e-15 * (1.0 + std::abs(u))) break;
  }
  return u;
}

bool check_monotone(const Profile& p, double a, double b, int samples, bool increasing) {
  double prev = p.value(a);
  for (int i = 1; i <= samples; ++i) {
    double t = a + (b - a) * i / samples;
    double v = p.value(t);
    if (increasing ? v < prev - 1e-12 : v > prev + 1e-12) return false;
    prev = v;
  }
  return true;
}

bool check_constant(const Profile& p, double a, double b, int samples, double value, double tol) {
  for (int i = 0; i <= samples; ++i) {
    double t = a + (b - a) * i / samples;
    if (std::abs(p.value(t) - value) > tol) return false;
  }
  return true;
}

}  // namespace sympack
