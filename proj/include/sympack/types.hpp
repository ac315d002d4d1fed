#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace sympack {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Coordinate convention: (x1,y1,...,xn,yn). Base/fiber split for 2n >= 4:
// (u,v) = (x1,y1), fiber = (x2,y2,...).
inline int pairs_of(int dim) {
  if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("dimension must be even and >= 2");
  return dim / 2;
}

// Matrix of the standard form sum dx_j ^ dy_j in these coordinates.
inline Mat omega_matrix(int dim) {
  Mat J = Mat::Zero(dim, dim);
  for (int p = 0; p < dim / 2; ++p) {
    J(2 * p, 2 * p + 1) = 1.0;
    J(2 * p + 1, 2 * p) = -1.0;
  }
  return J;
}

struct OutOfDomain : std::runtime_error {
  explicit OutOfDomain(const std::string& w) : std::runtime_error(w) {}
};
struct AmbiguousPiece : std::runtime_error {
  explicit AmbiguousPiece(const std::string& w) : std::runtime_error(w) {}
};
struct OnPieceBoundary : std::runtime_error {
  explicit OnPieceBoundary(const std::string& w) : std::runtime_error(w) {}
};
struct StepTooLarge : std::runtime_error {
  explicit StepTooLarge(const std::string& w) : std::runtime_error(w) {}
};
struct BadK : std::invalid_argument {
  explicit BadK(const std::string& w) : std::invalid_argument(w) {}
};
struct TransitionConstructionFailed : std::runtime_error {
  explicit TransitionConstructionFailed(const std::string& w) : std::runtime_error(w) {}
};

constexpr double kSeamTol = 1e-9;      // piece-seam tolerance
constexpr double kSeamMargin = 1e-6;   // samplers keep this distance from seams

}  // namespace sympack
