#include "sympack/flow.hpp"

#include <cmath>

namespace sympack {

Mat Hamiltonian::hess(const Vec& z) const {
  const int n = static_cast<int>(z.size());
  Mat H(n, n);
  const double h = 1e-5;
  for (int j = 0; j < n; ++j) {
    Vec zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    H.col(j) = (grad(zp) - grad(zm)) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

Vec hamiltonian_vector_field(const Hamiltonian& H, const Vec& z) {
  const Vec g = H.grad(z);
  Vec X(z.size());
  for (int p = 0; p < z.size() / 2; ++p) {
    X[2 * p] = -g[2 * p + 1];
    X[2 * p + 1] = g[2 * p];
  }
  return X;
}

namespace {
Mat field_jacobian(const Hamiltonian& H, const Vec& z) {
  const Mat hess = H.hess(z);
  Mat D(z.size(), z.size());
  for (int p = 0; p < z.size() / 2; ++p) {
    D.row(2 * p) = -hess.row(2 * p + 1);
    D.row(2 * p + 1) = hess.row(2 * p);
  }
  return D;
}
}  // namespace

Vec flow_rk4(const Hamiltonian& H, double T, Vec z, double step) {
  const double dir = T >= 0 ? 1.0 : -1.0;
  double remaining = std::abs(T);
  while (remaining > 0.0) {
    const double h = dir * std::min(step, remaining);
    const Vec k1 = hamiltonian_vector_field(H, z);
    const Vec k2 = hamiltonian_vector_field(H, z + 0.5 * h * k1);
    const Vec k3 = hamiltonian_vector_field(H, z + 0.5 * h * k2);
    const Vec k4 = hamiltonian_vector_field(H, z + h * k3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    remaining -= std::abs(h);
  }
  return z;
}

void flow_rk4_variational(const Hamiltonian& H, double T, Vec& z, Mat& Jac, double step) {
  const int n = static_cast<int>(z.size());
  Jac = Mat::Identity(n, n);
  const double dir = T >= 0 ? 1.0 : -1.0;
  double remaining = std::abs(T);
  while (remaining > 0.0) {
    const double h = dir * std::min(step, remaining);
    const Vec k1 = hamiltonian_vector_field(H, z);
    const Mat K1 = field_jacobian(H, z) * Jac;
    const Vec z2 = z + 0.5 * h * k1;
    const Vec k2 = hamiltonian_vector_field(H, z2);
    const Mat K2 = field_jacobian(H, z2) * (Jac + 0.5 * h * K1);
    const Vec z3 = z + 0.5 * h * k2;
    const Vec k3 = hamiltonian_vector_field(H, z3);
    const Mat K3 = field_jacobian(H, z3) * (Jac + 0.5 * h * K2);
    const Vec z4 = z + h * k3;
    const Vec k4 = hamiltonian_vector_field(H, z4);
    const Mat K4 = field_jacobian(H, z4) * (Jac + h * K3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    Jac += (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
    remaining -= std::abs(h);
  }
}

Vec FlowMap::eval(const Vec& z) const {
  const double e0 = H_->value(z);
  Vec w = flow_rk4(*H_, T_, z, step_);
  const double e1 = H_->value(w);
  if (std::abs(e1 - e0) > energy_tol_ * (1.0 + std::abs(e0)))
    throw StepTooLarge("hamiltonian flow energy drift " + std::to_string(std::abs(e1 - e0)));
  return w;
}

Mat FlowMap::jacobian(const Vec& z) const {
  Vec w = z;
  Mat J;
  flow_rk4_variational(*H_, T_, w, J, step_);
  return J;
}

bool FlowMap::try_invert(const Vec& w, Vec& z) const {
  z = flow_rk4(*H_, -T_, w, step_);
  return true;
}

double poisson_bracket_fd(const ScalarField& f, const ScalarField& g, const Vec& z, double step) {
  const int pairs = static_cast<int>(z.size()) / 2;
  auto d = [&](const ScalarField& fn, int idx) {
    Vec zp = z, zm = z;
    zp[idx] += step;
    zm[idx] -= step;
    return (fn(zp) - fn(zm)) / (2.0 * step);
  };
  double acc = 0.0;
  for (int p = 0; p < pairs; ++p) {
    acc += d(f, 2 * p) * d(g, 2 * p + 1) - d(f, 2 * p + 1) * d(g, 2 * p);
  }
  return acc;
}

}  // namespace sympack
