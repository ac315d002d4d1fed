#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sympack/types.hpp"

namespace sympack {

struct NotSolid : std::runtime_error {
  explicit NotSolid(const std::string& w) : std::runtime_error(w) {}
};
struct MedianAmbiguous : std::runtime_error {
  explicit MedianAmbiguous(const std::string& w) : std::runtime_error(w) {}
};

// Cell complex modeling a closed connected surface with H^1 = 0; the concrete
// model is the cube-sphere with 6 m^2 cells glued along the cube edges.
struct DiscreteSpace {
  int m = 0;
  int n_cells = 0;
  std::vector<std::vector<int>> adj;
  std::vector<Eigen::Vector3d> centers;  // unit-sphere projections
  std::string tag;

  static DiscreteSpace cube_sphere(int m);
};

struct DiscreteMeasure {
  Vec mass;  // per-cell, >= 0, total 1 +- 1e-12
  void validate() const;
  static DiscreteMeasure uniform(const DiscreteSpace& s);
};

using CellFunction = Vec;
using CellSet = std::vector<char>;  // indicator over cells

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n), size_(n, 1), count_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int x) {
    int root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      int nx = parent_[x];
      parent_[x] = root;
      x = nx;
    }
    return root;
  }
  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --count_;
  }
  int count() const { return count_; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int count_;
};

bool subset_connected(const DiscreteSpace& s, const CellSet& subset);
// Solid: the subset and its complement are both connected. The empty set is
// declared non-solid, the full space solid.
bool is_solid(const DiscreteSpace& s, const CellSet& subset);

double set_mass(const DiscreteMeasure& mu, const CellSet& subset);

// Simple Aarnes tau on solid sets; open sets use the <= 1/2 rule, closed sets
// the >= 1/2 rule. Throws NotSolid.
int aarnes_tau(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellSet& A, bool open_set);

// Median quasi-state value: the unique level value whose level component
// leaves only complement components of mass <= 1/2. Ties between equal cell
// values are resolved by cell index (symbolic perturbation).
double zeta_median(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellFunction& f);

// Independent route via the representation integral
//   min f + int tau({f >= t}) dt,
// with tau evaluated from scratch at every distinct value. Cross-checks
// zeta_median exactly on generic functions.
double zeta_integral(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellFunction& f);

// tau(K) = 1 for closed K that is a finite union of solid components: true
// iff exactly one component is solid with mass >= 1/2 and the others carry
// tau = 0.
bool superheavy_check(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellSet& K);

// zeta(h o f) for a 1-D reparametrization h.
double pushforward_eval(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellFunction& f,
                        const std::function<double(double)>& h);

// The median component itself (component of {f = zeta(f)} realizing the
// median condition).
CellSet special_fiber_component(const DiscreteSpace& s, const DiscreteMeasure& mu,
                                const CellFunction& f);

}  // namespace sympack
