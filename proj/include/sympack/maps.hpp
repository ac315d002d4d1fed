#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sympack/profiles.hpp"
#include "sympack/types.hpp"

namespace sympack {

// A smooth symplectic map of R^{2n} (or a piece of one). Evaluation is pure;
// instances are immutable after construction and safe to share across threads.
class SymplecticMap {
 public:
  virtual ~SymplecticMap() = default;
  virtual int dim() const = 0;
  virtual Vec eval(const Vec& z) const = 0;
  virtual Mat jacobian(const Vec& z) const = 0;
  // Analytic (or deterministically convergent) inverse where available.
  virtual bool try_invert(const Vec& w, Vec& z) const {
    (void)w;
    (void)z;
    return false;
  }
  virtual std::string kind() const = 0;
  virtual void describe(nlohmann::json& out) const;
};

using MapPtr = std::shared_ptr<const SymplecticMap>;

// || J^T Omega J - Omega ||_inf at z.
double symplecticity_defect(const SymplecticMap& map, const Vec& z);

class Translation : public SymplecticMap {
 public:
  explicit Translation(Vec t) : t_(std::move(t)) {}
  int dim() const override { return static_cast<int>(t_.size()); }
  Vec eval(const Vec& z) const override { return z + t_; }
  Mat jacobian(const Vec& z) const override { return Mat::Identity(z.size(), z.size()); }
  bool try_invert(const Vec& w, Vec& z) const override {
    z = w - t_;
    return true;
  }
  std::string kind() const override { return "translation"; }
  void describe(nlohmann::json& out) const override;

 private:
  Vec t_;
};

// Shear on one coordinate pair: (x, y) -> (x, y + f(x)).
class Shear : public SymplecticMap {
 public:
  Shear(int dim, int pair, ProfilePtr f) : dim_(dim), p_(pair), f_(std::move(f)) {}
  int dim() const override { return dim_; }
  Vec eval(const Vec& z) const override;
  Mat jacobian(const Vec& z) const override;
  bool try_invert(const Vec& w, Vec& z) const override;
  std::string kind() const override { return "shear"; }

 private:
  int dim_, p_;
  ProfilePtr f_;
};

// Horizontal shear on one pair: (x, y) -> (x + c(y), y).
class HorizontalShear : public SymplecticMap {
 public:
  HorizontalShear(int dim, int pair, ProfilePtr c) : dim_(dim), p_(pair), c_(std::move(c)) {}
  int dim() const override { return dim_; }
  Vec eval(const Vec& z) const override;
  Mat jacobian(const Vec& z) const override;
  bool try_invert(const Vec& w, Vec& z) const override;
  std::string kind() const override { return "hshear"; }

 private:
  int dim_, p_;
  ProfilePtr c_;
};

// Strictly increasing reparametrization of the x-axis for smears.
class MonotoneFn {
 public:
  virtual ~MonotoneFn() = default;
  virtual double value(double t) const = 0;
  virtual double d1(double t) const = 0;
  virtual double d2(double t) const = 0;
  virtual double inverse(double w) const = 0;
};

using MonotoneFnPtr = std::shared_ptr<const MonotoneFn>;

// Smear on one pair: (x, y) -> (phi(x), y / phi'(x)). This covers both the
// paper's Theta_g (phi = antiderivative of 1/g) and its inverse direction.
class Smear : public SymplecticMap {
 public:
  Smear(int dim, int pair, MonotoneFnPtr phi) : dim_(dim), p_(pair), phi_(std::move(phi)) {}
  int dim() const override { return dim_; }
  Vec eval(const Vec& z) const override;
  Mat jacobian(const Vec& z) const override;
  bool try_invert(const Vec& w, Vec& z) const override;
  std::string kind() const override { return "smear"; }

 private:
  int dim_, p_;
  MonotoneFnPtr phi_;
};

// Affine map on one pair: (x, y) -> M (x, y)^T + b, det M = 1.
class PlanarAffine : public SymplecticMap {
 public:
  PlanarAffine(int dim, int pair, const Mat2& M, const Vec2& b);
  int dim() const override { return dim_; }
  Vec eval(const Vec& z) const override;
  Mat jacobian(const Vec& z) const override;
  bool try_invert(const Vec& w, Vec& z) const override;
  std::string kind() const override { return "planar_affine"; }

 private:
  int dim_, p_;
  Mat2 M_, Minv_;
  Vec2 b_;
};

// Time-1 map of a lifting Hamiltonian rho(u - s) * (wp * c + w0), where c is
// one fiber coordinate and the dual coordinate moves by sign * rho(u - s).
class LiftMap : public SymplecticMap {
 public:
  enum class Family { GPlus, GMinus, HPlus, HMinus };
  LiftMap(int dim, int fiber_pair, int ell, Family fam, double shift, ProfilePtr rho);
  int dim() const override { return dim_; }
  Vec eval(const Vec& z) const override;
  Mat jacobian(const Vec& z) const override;
  bool try_invert(const Vec& w, Vec& z) const override;
  std::string kind() const override { return "lift"; }
  // Hamiltonian value at z (used by flow-agreement and energy tests).
  double hamiltonian(const Vec& z) const;
  Family family() const { return fam_; }

 private:
  int dim_;
  int cIdx_, mIdx_;
  double wp_, w0_, sign_, shift_;
  ProfilePtr rho_;
  Family fam_;
};

// Ordered composition; factors_[0] is applied first.
class Composition : public SymplecticMap {
 public:
  explicit Composition(std::vector<MapPtr> factors_in_application_order);
  int dim() const override { return dim_; }
  Vec eval(const Vec& z) const override;
  Mat jacobian(const Vec& z) const override;
  bool try_invert(const Vec& w, Vec& z) const override;
  std::string kind() const override { return "composition"; }
  void describe(nlohmann::json& out) const override;
  const std::vector<MapPtr>& factors() const { return factors_; }

 private:
  std::vector<MapPtr> factors_;
  int dim_;
};

// Piecewise map selected by the base coordinate u = z[0]; pieces are disjoint
// intervals whose closures meet at seams. Queries within kSeamTol of a seam
// resolve to the first listed piece containing them.
class PiecewiseBaseMap : public SymplecticMap {
 public:
  struct Piece {
    double lo, hi;  // open interval (lo, hi); adjacent closures agree
    MapPtr map;
  };
  PiecewiseBaseMap(int dim, std::vector<Piece> pieces) : dim_(dim), pieces_(std::move(pieces)) {}
  int dim() const override { return dim_; }
  Vec eval(const Vec& z) const override;
  Mat jacobian(const Vec& z) const override;
  std::string kind() const override { return "piecewise"; }
  void describe(nlohmann::json& out) const override;
  const std::vector<Piece>& pieces() const { return pieces_; }
  int piece_index(double u, bool for_jacobian = false) const;

 private:
  int dim_;
  std::vector<Piece> pieces_;
};

inline MapPtr compose(std::vector<MapPtr> fs) { return std::make_shared<Composition>(std::move(fs)); }

}  // namespace sympack
