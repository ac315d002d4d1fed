#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sympack/flow.hpp"
#include "sympack/folding.hpp"
#include "sympack/profiles.hpp"
#include "sympack/types.hpp"

namespace sympack {

struct NotInImage : std::runtime_error {
  explicit NotInImage(const std::string& w) : std::runtime_error(w) {}
};
struct BisectionStall : std::runtime_error {
  explicit BisectionStall(const std::string& w) : std::runtime_error(w) {}
};
struct MembershipUnknown : std::runtime_error {
  explicit MembershipUnknown(const std::string& w) : std::runtime_error(w) {}
};

// Phi_std(z) = (|z_1|^2, ..., |z_n|^2) on R^{2n} = C^n.
Vec phi_std(const Vec& z);

// rho_a(t) = chi_{a_1}(t_1) ... chi_{a_n}(t_n) (a_1^2 - t_1^2, ..., a_n^2 - t_n^2),
// with chi(t) = exp(1 - 1/(1-t^2)) on (-1,1) and 0 outside.
Vec rho_a(const Vec& a, const Vec& t);
double chi_scaled(double r, double t);

struct FiberSolution {
  enum class Kind { Empty, ComplementOfBox, Product };
  Kind kind = Kind::Empty;
  Vec alpha;        // for Product: alpha_j in [0, a_j), fiber = prod {-a_j, +a_j}
  double residual = 0.0;
  std::string reason;  // set for Empty (NotInImage diagnostics)
};

// Solve rho_a(t) = c per the monotone-branch bisection; c = 0 yields the
// complement of the open box, c with a nonpositive component is not in the
// image, boundary values stall rather than round.
FiberSolution rho_fiber_solve(const Vec& a, const Vec& c);

// Uniform angle samples on the torus T(alpha) = Phi_std^{-1}(alpha).
std::vector<Vec> torus_points(const Vec& alpha, int n_samples, std::uint64_t seed);

// Map-valued field Phi: R^{2n} -> R^m for involutivity certification.
using VectorField = std::function<Vec(const Vec&)>;

// max over points and pairs (i<j) of |{Phi_i, Phi_j}| by central differences.
double involutivity_certify(const VectorField& Phi, int m, const std::vector<Vec>& points,
                            double step);

// Phi_{iota;a}: 0 outside im iota, rho_a(Phi_std(iota^{-1}(z))) inside.
// For the identity polydisk inclusion pass iota = nullptr with the polydisk
// radii b; otherwise membership/inversion go through the folding embedding.
class PhiIotaA {
 public:
  // identity inclusion of P(b)
  PhiIotaA(Vec a, Vec b);
  // through an embedding with a certified membership oracle
  PhiIotaA(Vec a, Vec b, std::function<MembershipResult(const Vec&)> membership,
           MapPtr forward);
  Vec eval(const Vec& z) const;  // throws MembershipUnknown
  int n() const { return static_cast<int>(a_.size()); }

 private:
  Vec a_, b_;
  std::function<MembershipResult(const Vec&)> membership_;
  MapPtr forward_;
};

}  // namespace sympack
