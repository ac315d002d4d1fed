#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "sympack/types.hpp"

namespace sympack {

// exp(-1/s) mollifier half, smooth on all of R.
inline double mollifier_half(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

// C-infinity step: 0 for s<=0, 1 for s>=1, gstep(s)+gstep(1-s)=1.
double gstep(double s);
double gstep_d1(double s);
double gstep_d2(double s);

// Prefix integral of gstep on [0,1]: I(s) = int_0^s gstep. I(1) = 1/2 exactly by symmetry.
double gstep_integral(double s);

// 1-D smooth function with two derivatives.
class Profile {
 public:
  virtual ~Profile() = default;
  virtual double value(double t) const = 0;
  virtual double d1(double t) const = 0;
  virtual double d2(double t) const = 0;
};

using ProfilePtr = std::shared_ptr<const Profile>;

// y0 for t <= t0, y1 for t >= t1, gstep ramp between.
class Step : public Profile {
 public:
  Step(double t0, double t1, double y0, double y1) : t0_(t0), w_(t1 - t0), y0_(y0), dy_(y1 - y0) {}
  double value(double t) const override { return y0_ + dy_ * gstep((t - t0_) / w_); }
  double d1(double t) const override { return dy_ * gstep_d1((t - t0_) / w_) / w_; }
  double d2(double t) const override { return dy_ * gstep_d2((t - t0_) / w_) / (w_ * w_); }

 private:
  double t0_, w_, y0_, dy_;
};

// 0 outside (a,d), ==height on [b,c], gstep ramps on [a,b] and [c,d].
class Bump : public Profile {
 public:
  Bump(double a, double b, double c, double d, double height)
      : a_(a), b_(b), c_(c), d_(d), h_(height) {}
  double value(double t) const override {
    if (t <= a_ || t >= d_) return 0.0;
    if (t < b_) return h_ * gstep((t - a_) / (b_ - a_));
    if (t <= c_) return h_;
    return h_ * gstep((d_ - t) / (d_ - c_));
  }
  double d1(double t) const override {
    if (t <= a_ || t >= d_) return 0.0;
    if (t < b_) return h_ * gstep_d1((t - a_) / (b_ - a_)) / (b_ - a_);
    if (t <= c_) return 0.0;
    return -h_ * gstep_d1((d_ - t) / (d_ - c_)) / (d_ - c_);
  }
  double d2(double t) const override {
    if (t <= a_ || t >= d_) return 0.0;
    double w;
    if (t < b_) {
      w = b_ - a_;
      return h_ * gstep_d2((t - a_) / w) / (w * w);
    }
    if (t <= c_) return 0.0;
    w = d_ - c_;
    return h_ * gstep_d2((d_ - t) / w) / (w * w);
  }
  // Integral from a_ to t (0 below the support, total mass above).
  double integral(double t) const {
    if (t <= a_) return 0.0;
    double acc = 0.0;
    if (t < b_) return h_ * (b_ - a_) * gstep_integral((t - a_) / (b_ - a_));
    acc = h_ * (b_ - a_) * 0.5;
    if (t <= c_) return acc + h_ * (t - b_);
    acc += h_ * (c_ - b_);
    if (t < d_) return acc + h_ * (d_ - c_) * (0.5 - gstep_integral((d_ - t) / (d_ - c_)));
    return acc + h_ * (d_ - c_) * 0.5;
  }
  double total_integral() const { return integral(d_); }
  double lo() const { return a_; }
  double hi() const { return d_; }

 private:
  double a_, b_, c_, d_, h_;
};

// Monotone C-infinity step with bounded slope: value 0 for t<=t0, 1 for t>=t1,
// derivative = c * plateau-bump with ramp width m, so max slope is
// 1/(t1-t0-m) instead of the ~1.92/(t1-t0) of a plain gstep.
class SlopedStep : public Profile {
 public:
  SlopedStep(double t0, double t1, double ramp);
  double value(double t) const override;
  double d1(double t) const override { return bump_.value(t); }
  double d2(double t) const override { return bump_.d1(t); }
  double max_slope() const { return slope_; }

 private:
  Bump bump_;
  double t0_, t1_, m_, slope_;
};

// chi(t) = exp(1 - 1/(1-t^2)) on (-1,1), 0 outside. Even, chi(0)=1,
// strictly decreasing on [0,1), vanishes to infinite order at +-1.
class ChiProfile : public Profile {
 public:
  double value(double t) const override;
  double d1(double t) const override;
  double d2(double t) const override;
};

// The base-preparation height profile h: k-periodic, even, h==1 on [0,1],
// h==k on [2,k-2], monotone gstep ramps on [1,2] and [k-2,k-1].
class FoldHeightProfile : public Profile {
 public:
  explicit FoldHeightProfile(int k);
  double value(double t) const override;
  double d1(double t) const override;
  double d2(double t) const override;
  // Exact integral over one period, int_0^k h = k^2 - 3k + 3.
  double period_integral() const { return kA_; }
  // W(u) = int_0^u h, and its inverse (W is strictly increasing, slope >= 1).
  double integral(double u) const;
  double integral_inverse(double w) const;
  int k() const { return k_; }

 private:
  double value_in_period(double t) const;
  double integral_in_period(double t) const;  // int_0^t h for t in [0,k]
  int k_;
  double kA_;
};

// Dense-sampling certification helpers (the paper fixes only qualitative
// properties; these check them at sample resolution).
bool check_monotone(const Profile& p, double a, double b, int samples, bool increasing);
bool check_constant(const Profile& p, double a, double b, int samples, double value, double tol);

}  // namespace sympack
