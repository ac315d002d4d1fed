#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sympack/rng.hpp"
#include "sympack/types.hpp"

namespace sympack {

struct Exhausted : std::runtime_error {
  explicit Exhausted(const std::string& w) : std::runtime_error(w) {}
};
struct EpsilonTooSmall : std::runtime_error {
  explicit EpsilonTooSmall(const std::string& w) : std::runtime_error(w) {}
};

// Axis-aligned query box with per-axis face openness.
struct QueryBox {
  Vec lo, hi;
  std::vector<bool> open_lo, open_hi;
  static QueryBox open_box(const Vec& lo, const Vec& hi);
  static QueryBox closed_box(const Vec& lo, const Vec& hi);
};

// Probability measure on R^N: atoms + uniform boxes (+ optional sample cloud).
// Masses are ingested from decimal strings; all box/atom queries are exact
// arithmetic on the stored coordinates.
struct MeasureSpec {
  struct Atom {
    Vec point;
    double mass;
  };
  struct UBox {
    Vec lo, hi;
    double mass;
    double volume() const;
    double density() const { return mass / volume(); }
  };

  int dim = 0;
  std::vector<Atom> atoms;
  std::vector<UBox> boxes;
  std::vector<Vec> samples;  // optional, equal weights; used for MC only

  void validate() const;  // throws std::invalid_argument on violations
  bool compactly_supported() const { return !atoms.empty() || !boxes.empty(); }
  // Smallest closed box containing all atoms and boxes.
  void support_box(Vec& lo, Vec& hi) const;

  static MeasureSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static MeasureSpec from_file(const std::string& path);
};

// Exact measure of an axis-aligned box with per-face openness.
double measure_of_box(const MeasureSpec& mu, const QueryBox& box);

// Exact measure of the lattice Sigma(y,a) (union over axes of the hyperplane
// families x_i = a/2 + y_i mod a). Uniform boxes contribute zero; an atom
// contributes iff some coordinate is congruent within 1e-12.
double measure_of_lattice(const MeasureSpec& mu, const Vec& y, double a);

// A shift y in the open search box with measure_of_lattice(mu, y, a) == 0.
// Deterministic residue avoidance for atom+box measures; rejection sampling
// (bounded attempts) when only a sample cloud is present.
Vec find_lattice_shift(const MeasureSpec& mu, double a, const Vec& search_lo, const Vec& search_hi,
                       std::uint64_t seed = 12345);

struct CubeCover {
  double side = 0.0;               // common side length of the open cubes
  Vec anchor;                      // lattice anchor y (cube centers are y + side*Z^N)
  std::vector<Vec> centers;        // cubes with positive mass, closures inside U
  double covered_mass = 0.0;       // exact mass of the disjoint union
  Vec u_lo, u_hi;                  // the ambient open box U
};

// Finite disjoint union of congruent open cubes with exact covered mass
// > 1 - eps, via a null lattice shift at pitch r/2 where r is the exact
// l-infinity distance from the support to the complement of U.
CubeCover cube_cover(const MeasureSpec& mu, double eps);

// Deterministic i.i.d. draws (counter-based; parallel-safe by index).
std::vector<Vec> sample_measure(const MeasureSpec& mu, int n, std::uint64_t seed);

}  // namespace sympack
