#include "sympack/maps.hpp"

#include <cmath>

#include <Eigen/Dense>

#include <nlohmann/json.hpp>

namespace sympack {

void SymplecticMap::describe(nlohmann::json& out) const { out["kind"] = kind(); }

double symplecticity_defect(const SymplecticMap& map, const Vec& z) {
  const Mat J = map.jacobian(z);
  const Mat Om = omega_matrix(map.dim());
  return (J.transpose() * Om * J - Om).cwiseAbs().maxCoeff();
}

void Translation::describe(nlohmann::json& out) const {
  out["kind"] = kind();
  out["offset"] = std::vector<double>(t_.data(), t_.data() + t_.size());
}

Vec Shear::eval(const Vec& z) const {
  Vec w = z;
  w[2 * p_ + 1] += f_->value(z[2 * p_]);
  return w;
}

Mat Shear::jacobian(const Vec& z) const {
  Mat J = Mat::Identity(dim_, dim_);
  J(2 * p_ + 1, 2 * p_) = f_->d1(z[2 * p_]);
  return J;
}

bool Shear::try_invert(const Vec& w, Vec& z) const {
  z = w;
  z[2 * p_ + 1] -= f_->value(w[2 * p_]);
  return true;
}

Vec HorizontalShear::eval(const Vec& z) const {
  Vec w = z;
  w[2 * p_] += c_->value(z[2 * p_ + 1]);
  return w;
}

Mat HorizontalShear::jacobian(const Vec& z) const {
  Mat J = Mat::Identity(dim_, dim_);
  J(2 * p_, 2 * p_ + 1) = c_->d1(z[2 * p_ + 1]);
  return J;
}

bool HorizontalShear::try_invert(const Vec& w, Vec& z) const {
  z = w;
  z[2 * p_] -= c_->value(w[2 * p_ + 1]);
  return true;
}

Vec Smear::eval(const Vec& z) const {
  Vec w = z;
  const double x = z[2 * p_];
  w[2 * p_] = phi_->value(x);
  w[2 * p_ + 1] = z[2 * p_ + 1] / phi_->d1(x);
  return w;
}

Mat Smear::jacobian(const Vec& z) const {
  Mat J = Mat::Identity(dim_, dim_);
  const double x = z[2 * p_], y = z[2 * p_ + 1];
  const double d = phi_->d1(x), dd = phi_->d2(x);
  J(2 * p_, 2 * p_) = d;
  J(2 * p_ + 1, 2 * p_) = -y * dd / (d * d);
  J(2 * p_ + 1, 2 * p_ + 1) = 1.0 / d;
  return J;
}

bool Smear::try_invert(const Vec& w, Vec& z) const {
  z = w;
  const double x = phi_->inverse(w[2 * p_]);
  z[2 * p_] = x;
  z[2 * p_ + 1] = w[2 * p_ + 1] * phi_->d1(x);
  return true;
}

PlanarAffine::PlanarAffine(int dim, int pair, const Mat2& M, const Vec2& b)
    : dim_(dim), p_(pair), M_(M), b_(b) {
  if (std::abs(M.determinant() - 1.0) > 1e-12)
    throw std::invalid_argument("PlanarAffine: det != 1");
  Minv_ = M.inverse();
}

Vec PlanarAffine::eval(const Vec& z) const {
  Vec w = z;
  Vec2 xy(z[2 * p_], z[2 * p_ + 1]);
  Vec2 im = M_ * xy + b_;
  w[2 * p_] = im[0];
  w[2 * p_ + 1] = im[1];
  return w;
}

Mat PlanarAffine::jacobian(const Vec& z) const {
  (void)z;
  Mat J = Mat::Identity(dim_, dim_);
  J.block<2, 2>(2 * p_, 2 * p_) = M_;
  return J;
}

bool PlanarAffine::try_invert(const Vec& w, Vec& z) const {
  z = w;
  Vec2 xy(w[2 * p_], w[2 * p_ + 1]);
  Vec2 pre = Minv_ * (xy - b_);
  z[2 * p_] = pre[0];
  z[2 * p_ + 1] = pre[1];
  return true;
}

LiftMap::LiftMap(int dim, int fiber_pair, int ell, Family fam, double shift, ProfilePtr rho)
    : dim_(dim), shift_(shift), rho_(std::move(rho)), fam_(fam) {
  if (fiber_pair < 1 || 2 * fiber_pair + 1 >= dim)
    throw std::invalid_argument("LiftMap: bad fiber pair");
  const int x = 2 * fiber_pair, y = 2 * fiber_pair + 1;
  const double l = ell;
  switch (fam) {
    case Family::GPlus:  // rho(u)(l+1-y_j): moves +x_j
      cIdx_ = y; mIdx_ = x; wp_ = -1.0; w0_ = l + 1.0; break;
    case Family::GMinus:  // rho(u)(y_j-l): moves -x_j
      cIdx_ = y; mIdx_ = x; wp_ = 1.0; w0_ = -l; break;
    case Family::HPlus:  // rho(u)(x_j-l): moves +y_j
      cIdx_ = x; mIdx_ = y; wp_ = 1.0; w0_ = -l; break;
    case Family::HMinus:  // rho(u)(l+1-x_j): moves -y_j
      cIdx_ = x; mIdx_ = y; wp_ = -1.0; w0_ = l + 1.0; break;
  }
  // G families move x_j by -w' * rho, H families move y_j by +w' * rho.
  const bool gfam = (fam == Family::GPlus || fam == Family::GMinus);
  sign_ = gfam ? -wp_ : wp_;
}

double LiftMap::hamiltonian(const Vec& z) const {
  return rho_->value(z[0] - shift_) * (wp_ * z[cIdx_] + w0_);
}

Vec LiftMap::eval(const Vec& z) const {
  Vec w = z;
  const double r = rho_->value(z[0] - shift_);
  const double rp = rho_->d1(z[0] - shift_);
  w[1] += rp * (wp_ * z[cIdx_] + w0_);
  w[mIdx_] += sign_ * r;
  return w;
}

Mat LiftMap::jacobian(const Vec& z) const {
  Mat J = Mat::Identity(dim_, dim_);
  const double rp = rho_->d1(z[0] - shift_);
  const double rpp = rho_->d2(z[0] - shift_);
  J(1, 0) = rpp * (wp_ * z[cIdx_] + w0_);
  J(1, cIdx_) = rp * wp_;
  J(mIdx_, 0) = sign_ * rp;
  return J;
}

bool LiftMap::try_invert(const Vec& w, Vec& z) const {
  // u and the coupling coordinate are unchanged by the map.
  z = w;
  const double r = rho_->value(w[0] - shift_);
  const double rp = rho_->d1(w[0] - shift_);
  z[mIdx_] -= sign_ * r;
  z[1] -= rp * (wp_ * w[cIdx_] + w0_);
  return true;
}

Composition::Composition(std::vector<MapPtr> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("empty composition");
  dim_ = factors_.front()->dim();
  for (const auto& f : factors_)
    if (f->dim() != dim_) throw std::invalid_argument("composition dim mismatch");
}

Vec Composition::eval(const Vec& z) const {
  Vec w = z;
  for (const auto& f : factors_) w = f->eval(w);
  return w;
}

Mat Composition::jacobian(const Vec& z) const {
  Vec w = z;
  Mat J = Mat::Identity(dim_, dim_);
  for (const auto& f : factors_) {
    J = f->jacobian(w) * J;
    w = f->eval(w);
  }
  return J;
}

bool Composition::try_invert(const Vec& w, Vec& z) const {
  Vec cur = w;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    Vec pre;
    if (!(*it)->try_invert(cur, pre)) return false;
    cur = pre;
  }
  z = cur;
  return true;
}

void Composition::describe(nlohmann::json& out) const {
  out["kind"] = kind();
  auto arr = nlohmann::json::array();
  for (const auto& f : factors_) {
    nlohmann::json j;
    f->describe(j);
    arr.push_back(j);
  }
  out["factors"] = arr;
}

int PiecewiseBaseMap::piece_index(double u, bool for_jacobian) const {
  for (size_t i = 0; i < pieces_.size(); ++i) {
    const auto& pc = pieces_[i];
    if (u > pc.lo - kSeamTol && u < pc.hi + kSeamTol) {
      if (for_jacobian && (std::abs(u - pc.lo) < kSeamTol || std::abs(u - pc.hi) < kSeamTol))
        throw OnPieceBoundary("jacobian requested on a piece seam");
      return static_cast<int>(i);
    }
  }
  throw OutOfDomain("no piece covers u = " + std::to_string(u));
}

Vec PiecewiseBaseMap::eval(const Vec& z) const {
  return pieces_[piece_index(z[0])].map->eval(z);
}

Mat PiecewiseBaseMap::jacobian(const Vec& z) const {
  return pieces_[piece_index(z[0], /*for_jacobian=*/true)].map->jacobian(z);
}

void PiecewiseBaseMap::describe(nlohmann::json& out) const {
  out["kind"] = kind();
  auto arr = nlohmann::json::array();
  for (const auto& pc : pieces_) {
    nlohmann::json j;
    pc.map->describe(j);
    j["domain_box"] = {{"u_lo", pc.lo}, {"u_hi", pc.hi}};
    arr.push_back(j);
  }
  out["pieces"] = arr;
}

}  // namespace sympack
