#include "sympack/quasistate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace sympack {

DiscreteSpace DiscreteSpace::cube_sphere(int m) {
  if (m < 2) throw std::invalid_argument("cube_sphere: m >= 2 required");
  DiscreteSpace s;
  s.m = m;
  s.n_cells = 6 * m * m;
  s.tag = "cube-sphere:" + std::to_string(m);
  s.adj.resize(s.n_cells);
  s.centers.resize(s.n_cells);

  // Faces of the cube [-1,1]^3; (r, c) parametrize each face.
  auto face_point = [&](int f, double r, double c) -> Eigen::Vector3d {
    const double a = 2.0 * r / m - 1.0, b = 2.0 * c / m - 1.0;
    switch (f) {
      case 0: return {1.0, a, b};
      case 1: return {-1.0, a, b};
      case 2: return {a, 1.0, b};
      case 3: return {a, -1.0, b};
      case 4: return {a, b, 1.0};
      default: return {a, b, -1.0};
    }
  };
  auto cell_id = [&](int f, int r, int c) { return f * m * m + r * m + c; };

  for (int f = 0; f < 6; ++f)
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        s.centers[cell_id(f, r, c)] = face_point(f, r + 0.5, c + 0.5).normalized();

  // Glue cells across shared surface edges: key each cell edge by its two
  // quantized corner points on the cube, then join the (exactly two) cells
  // sharing a key. This covers both in-face adjacency and the 12 cube edges.
  auto quantize = [&](const Eigen::Vector3d& p) {
    const long q = 4L * m;
    return std::array<long, 3>{std::lround(p[0] * q), std::lround(p[1] * q),
                               std::lround(p[2] * q)};
  };
  std::map<std::array<long, 6>, std::vector<int>> edge_cells;
  for (int f = 0; f < 6; ++f)
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        const int id = cell_id(f, r, c);
        const std::array<Eigen::Vector3d, 4> corners = {
            face_point(f, r, c), face_point(f, r + 1, c), face_point(f, r + 1, c + 1),
            face_point(f, r, c + 1)};
        for (int e = 0; e < 4; ++e) {
          auto qa = quantize(corners[e]), qb = quantize(corners[(e + 1) % 4]);
          if (std::lexicographical_compare(qb.begin(), qb.end(), qa.begin(), qa.end()))
            std::swap(qa, qb);
          std::array<long, 6> key{qa[0], qa[1], qa[2], qb[0], qb[1], qb[2]};
          edge_cells[key].push_back(id);
        }
      }
  for (const auto& [key, cells] : edge_cells) {
    (void)key;
    if (cells.size() == 2 && cells[0] != cells[1]) {
      s.adj[cells[0]].push_back(cells[1]);
      s.adj[cells[1]].push_back(cells[0]);
    }
  }
  for (auto& nb : s.adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return s;
}

void DiscreteMeasure::validate() const {
  double total = 0.0;
  for (int i = 0; i < mass.size(); ++i) {
    if (mass[i] < 0.0) throw std::invalid_argument("discrete measure: negative cell mass");
    total += mass[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("discrete measure: total mass differs from 1");
}

DiscreteMeasure DiscreteMeasure::uniform(const DiscreteSpace& s) {
  DiscreteMeasure mu;
  mu.mass = Vec::Constant(s.n_cells, 1.0 / s.n_cells);
  return mu;
}

bool subset_connected(const DiscreteSpace& s, const CellSet& subset) {
  int start = -1, total = 0;
  for (int i = 0; i < s.n_cells; ++i)
    if (subset[i]) {
      if (start < 0) start = i;
      ++total;
    }
  if (total == 0) return false;
  std::vector<int> stack{start};
  std::vector<char> seen(s.n_cells, 0);
  seen[start] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    for (int nb : s.adj[x])
      if (subset[nb] && !seen[nb]) {
        seen[nb] = 1;
        ++visited;
        stack.push_back(nb);
      }
  }
  return visited == total;
}

bool is_solid(const DiscreteSpace& s, const CellSet& subset) {
  int total = 0;
  for (int i = 0; i < s.n_cells; ++i)
    if (subset[i]) ++total;
  if (total == 0) return false;        // declared edge case
  if (total == s.n_cells) return true; // complement empty: declared solid
  CellSet comp(s.n_cells);
  for (int i = 0; i < s.n_cells; ++i) comp[i] = !subset[i];
  return subset_connected(s, subset) && subset_connected(s, comp);
}

double set_mass(const DiscreteMeasure& mu, const CellSet& subset) {
  double total = 0.0;
  for (int i = 0; i < mu.mass.size(); ++i)
    if (subset[i]) total += mu.mass[i];
  return total;
}

int aarnes_tau(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellSet& A,
               bool open_set) {
  if (!is_solid(s, A)) throw NotSolid("aarnes_tau: set is not solid");
  const double m = set_mass(mu, A);
  if (open_set) return m <= 0.5 ? 0 : 1;
  return m >= 0.5 ? 1 : 0;
}

namespace {

// Components of the complement of `hole` with their masses; throws
// MedianAmbiguous when a decision-relevant component sits exactly at 1/2.
bool complement_components_all_light(const DiscreteSpace& s, const DiscreteMeasure& mu,
                                     const CellSet& hole) {
  std::vector<char> seen(s.n_cells, 0);
  for (int i = 0; i < s.n_cells; ++i) {
    if (hole[i] || seen[i]) continue;
    double mass = 0.0;
    std::vector<int> stack{i};
    seen[i] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      mass += mu.mass[x];
      for (int nb : s.adj[x])
        if (!hole[nb] && !seen[nb]) {
          seen[nb] = 1;
          stack.push_back(nb);
        }
    }
    if (std::abs(mass - 0.5) <= 1e-12)
      throw MedianAmbiguous("complement component of mass exactly 1/2");
    if (mass > 0.5) return false;
  }
  return true;
}

// Operational tau of a closed (cell) set: 1 iff some graph component of S
// leaves only complement components of mass <= 1/2.
bool tau_closed_superlevel(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellSet& S) {
  std::vector<char> seen(s.n_cells, 0);
  struct Comp {
    std::vector<int> cells;
    double mass = 0.0;
  };
  std::vector<Comp> comps;
  for (int i = 0; i < s.n_cells; ++i) {
    if (!S[i] || seen[i]) continue;
    Comp comp;
    std::vector<int> stack{i};
    seen[i] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      comp.cells.push_back(x);
      comp.mass += mu.mass[x];
      for (int nb : s.adj[x])
        if (S[nb] && !seen[nb]) {
          seen[nb] = 1;
          stack.push_back(nb);
        }
    }
    comps.push_back(std::move(comp));
  }
  std::sort(comps.begin(), comps.end(), [](const Comp& a, const Comp& b) { return a.mass > b.mass; });
  CellSet hole(s.n_cells, 0);
  for (const auto& comp : comps) {
    std::fill(hole.begin(), hole.end(), 0);
    for (int x : comp.cells) hole[x] = 1;
    if (complement_components_all_light(s, mu, hole)) return true;
  }
  return false;
}

std::vector<int> descending_order(const CellFunction& f) {
  std::vector<int> order(f.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (f[a] != f[b]) return f[a] > f[b];
    return a > b;  // symbolic tie-break by cell index
  });
  return order;
}

}  // namespace

double zeta_median(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellFunction& f) {
  const auto order = descending_order(f);
  const int N = s.n_cells;
  auto tau_at_prefix = [&](int j) {
    CellSet S(N, 0);
    for (int t = 0; t < j; ++t) S[order[t]] = 1;
    return tau_closed_superlevel(s, mu, S);
  };
  // tau is monotone along the descending sweep: locate the first prefix with
  // tau = 1 by bisection.
  int lo = 1, hi = N;
  if (tau_at_prefix(1)) hi = 1;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (tau_at_prefix(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return f[order[hi - 1]];
}

double zeta_integral(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellFunction& f) {
  std::vector<double> values(f.data(), f.data() + f.size());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const double vmin = values.front();
  double acc = vmin;
  // int_{min}^{max} tau({f >= t}) dt with tau constant on (v_i, v_{i+1}].
  for (size_t i = 0; i + 1 < values.size(); ++i) {
    const double thresh = values[i + 1];
    CellSet S(s.n_cells, 0);
    for (int c = 0; c < s.n_cells; ++c)
      if (f[c] >= thresh) S[c] = 1;
    if (tau_closed_superlevel(s, mu, S)) acc += values[i + 1] - values[i];
  }
  return acc;
}

bool superheavy_check(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellSet& K) {
  // Split K into graph components; each must be solid, and exactly one may
  // carry tau = 1 (mass >= 1/2).
  std::vector<char> seen(s.n_cells, 0);
  int heavy = 0;
  bool any = false;
  for (int i = 0; i < s.n_cells; ++i) {
    if (!K[i] || seen[i]) continue;
    any = true;
    CellSet comp(s.n_cells, 0);
    std::vector<int> stack{i};
    seen[i] = 1;
    comp[i] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int nb : s.adj[x])
        if (K[nb] && !seen[nb]) {
          seen[nb] = 1;
          comp[nb] = 1;
          stack.push_back(nb);
        }
    }
    if (!is_solid(s, comp)) throw NotSolid("superheavy_check: component is not solid");
    if (set_mass(mu, comp) >= 0.5) ++heavy;
  }
  return any && heavy == 1;
}

double pushforward_eval(const DiscreteSpace& s, const DiscreteMeasure& mu, const CellFunction& f,
                        const std::function<double(double)>& h) {
  CellFunction g(f.size());
  for (int i = 0; i < f.size(); ++i) g[i] = h(f[i]);
  return zeta_median(s, mu, g);
}

CellSet special_fiber_component(const DiscreteSpace& s, const DiscreteMeasure& mu,
                                const CellFunction& f) {
  const double c = zeta_median(s, mu, f);
  CellSet level(s.n_cells, 0);
  for (int i = 0; i < s.n_cells; ++i)
    if (f[i] == c) level[i] = 1;
  // components of the level region
  std::vector<char> seen(s.n_cells, 0);
  std::vector<CellSet> comps;
  for (int i = 0; i < s.n_cells; ++i) {
    if (!level[i] || seen[i]) continue;
    CellSet comp(s.n_cells, 0);
    std::vector<int> stack{i};
    seen[i] = 1;
    comp[i] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int nb : s.adj[x])
        if (level[nb] && !seen[nb]) {
          seen[nb] = 1;
          comp[nb] = 1;
          stack.push_back(nb);
        }
    }
    comps.push_back(std::move(comp));
  }
  CellSet winner;
  int n_pass = 0;
  for (const auto& comp : comps) {
    if (complement_components_all_light(s, mu, comp)) {
      ++n_pass;
      winner = comp;
    }
  }
  if (n_pass != 1)
    throw MedianAmbiguous("median component count = " + std::to_string(n_pass));
  return winner;
}

}  // namespace sympack
