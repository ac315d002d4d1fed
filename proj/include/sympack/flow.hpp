#pragma once

#include <functional>
#include <memory>

#include "sympack/maps.hpp"
#include "sympack/types.hpp"

namespace sympack {

using ScalarField = std::function<double(const Vec&)>;

// Smooth Hamiltonian with analytic gradient (and Hessian for variational
// Jacobians). Sign convention: i_{X_H} omega = -dH, i.e. per pair
// xdot = -dH/dy, ydot = +dH/dx; this reproduces the closed-form time-1 maps
// of the lifting Hamiltonians used by the folding construction.
class Hamiltonian {
 public:
  virtual ~Hamiltonian() = default;
  virtual double value(const Vec& z) const = 0;
  virtual Vec grad(const Vec& z) const = 0;
  virtual Mat hess(const Vec& z) const;  // default: central differences of grad
};

using HamiltonianPtr = std::shared_ptr<const Hamiltonian>;

Vec hamiltonian_vector_field(const Hamiltonian& H, const Vec& z);

// Classical RK4 with fixed step on zdot = X_H(z); returns z(T).
Vec flow_rk4(const Hamiltonian& H, double T, Vec z, double step);

// Same, also integrating the variational equation for the Jacobian.
void flow_rk4_variational(const Hamiltonian& H, double T, Vec& z, Mat& Jac, double step);

// Flow time-T map as a SymplecticMap; energy drift is audited on evaluation.
class FlowMap : public SymplecticMap {
 public:
  FlowMap(int dim, HamiltonianPtr H, double T, double step, double energy_tol = 1e-6)
      : dim_(dim), H_(std::move(H)), T_(T), step_(step), energy_tol_(energy_tol) {}
  int dim() const override { return dim_; }
  Vec eval(const Vec& z) const override;
  Mat jacobian(const Vec& z) const override;
  bool try_invert(const Vec& w, Vec& z) const override;  // reverse-time flow
  std::string kind() const override { return "flow"; }

 private:
  int dim_;
  HamiltonianPtr H_;
  double T_, step_, energy_tol_;
};

// Central-difference Poisson bracket with the canonical pairing {x_j, y_j} = +1:
// {f,g} = sum_j (df/dx_j dg/dy_j - df/dy_j dg/dx_j).
double poisson_bracket_fd(const ScalarField& f, const ScalarField& g, const Vec& z, double step);

// Explicit convenience Hamiltonian from a field + analytic gradient.
class FnHamiltonian : public Hamiltonian {
 public:
  FnHamiltonian(ScalarField f, std::function<Vec(const Vec&)> grad)
      : f_(std::move(f)), grad_(std::move(grad)) {}
  double value(const Vec& z) const override { return f_(z); }
  Vec grad(const Vec& z) const override { return grad_(z); }

 private:
  ScalarField f_;
  std::function<Vec(const Vec&)> grad_;
};

}  // namespace sympack
