#include "sympack/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sympack {

QueryBox QueryBox::open_box(const Vec& lo, const Vec& hi) {
  QueryBox b{lo, hi, std::vector<bool>(lo.size(), true), std::vector<bool>(lo.size(), true)};
  return b;
}

QueryBox QueryBox::closed_box(const Vec& lo, const Vec& hi) {
  QueryBox b{lo, hi, std::vector<bool>(lo.size(), false), std::vector<bool>(lo.size(), false)};
  return b;
}

double MeasureSpec::UBox::volume() const {
  double v = 1.0;
  for (int i = 0; i < lo.size(); ++i) v *= (hi[i] - lo[i]);
  return v;
}

void MeasureSpec::validate() const {
  if (dim <= 0) throw std::invalid_argument("measure: dim must be positive");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (a.point.size() != dim) throw std::invalid_argument("measure: atom dim mismatch");
    if (!(a.mass > 0)) throw std::invalid_argument("measure: atom mass must be positive");
    total += a.mass;
  }
  for (size_t i = 0; i < atoms.size(); ++i)
    for (size_t j = i + 1; j < atoms.size(); ++j)
      if ((atoms[i].point - atoms[j].point).lpNorm<Eigen::Infinity>() == 0.0)
        throw std::invalid_argument("measure: atom points must be pairwise distinct");
  for (const auto& b : boxes) {
    if (b.lo.size() != dim || b.hi.size() != dim)
      throw std::invalid_argument("measure: box dim mismatch");
    for (int i = 0; i < dim; ++i)
      if (!(b.hi[i] > b.lo[i])) throw std::invalid_argument("measure: box must have positive volume");
    if (!(b.mass > 0)) throw std::invalid_argument("measure: box mass must be positive");
    total += b.mass;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("measure: total mass differs from 1 by more than 1e-12");
}

void MeasureSpec::support_box(Vec& lo, Vec& hi) const {
  lo = Vec::Constant(dim, std::numeric_limits<double>::infinity());
  hi = Vec::Constant(dim, -std::numeric_limits<double>::infinity());
  for (const auto& a : atoms) {
    lo = lo.cwiseMin(a.point);
    hi = hi.cwiseMax(a.point);
  }
  for (const auto& b : boxes) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  if (!lo.allFinite()) throw std::invalid_argument("measure has empty atom+box support");
}

namespace {
double parse_mass(const nlohmann::json& j) {
  if (j.is_string()) return std::stod(j.get<std::string>());
  return j.get<double>();
}
Vec parse_vec(const nlohmann::json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}
}  // namespace

MeasureSpec MeasureSpec::from_json(const nlohmann::json& j) {
  MeasureSpec mu;
  mu.dim = j.at("dim").get<int>();
  if (j.contains("atoms"))
    for (const auto& a : j["atoms"]) mu.atoms.push_back({parse_vec(a.at("point")), parse_mass(a.at("mass"))});
  if (j.contains("boxes"))
    for (const auto& b : j["boxes"])
      mu.boxes.push_back({parse_vec(b.at("min")), parse_vec(b.at("max")), parse_mass(b.at("mass"))});
  if (j.contains("samples"))
    for (const auto& s : j["samples"]) mu.samples.push_back(parse_vec(s));
  mu.validate();
  return mu;
}

nlohmann::json MeasureSpec::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  auto atoms_j = nlohmann::json::array();
  for (const auto& a : atoms) {
    std::ostringstream m;
    m.precision(17);
    m << a.mass;
    atoms_j.push_back({{"point", std::vector<double>(a.point.data(), a.point.data() + dim)},
                       {"mass", m.str()}});
  }
  j["atoms"] = atoms_j;
  auto boxes_j = nlohmann::json::array();
  for (const auto& b : boxes) {
    std::ostringstream m;
    m.precision(17);
    m << b.mass;
    boxes_j.push_back({{"min", std::vector<double>(b.lo.data(), b.lo.data() + dim)},
                       {"max", std::vector<double>(b.hi.data(), b.hi.data() + dim)},
                       {"mass", m.str()}});
  }
  j["boxes"] = boxes_j;
  return j;
}

MeasureSpec MeasureSpec::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

double measure_of_box(const MeasureSpec& mu, const QueryBox& box) {
  double total = 0.0;
  for (const auto& a : mu.atoms) {
    bool inside = true;
    for (int i = 0; i < mu.dim && inside; ++i) {
      const double p = a.point[i];
      if (box.open_lo[i] ? !(p > box.lo[i]) : !(p >= box.lo[i])) inside = false;
      if (inside && (box.open_hi[i] ? !(p < box.hi[i]) : !(p <= box.hi[i]))) inside = false;
    }
    if (inside) total += a.mass;
  }
  for (const auto& b : mu.boxes) {
    double vol = 1.0;
    for (int i = 0; i < mu.dim && vol > 0.0; ++i) {
      const double w = std::min(b.hi[i], box.hi[i]) - std::max(b.lo[i], box.lo[i]);
      vol *= std::max(0.0, w);
    }
    if (vol > 0.0) total += vol * b.density();
  }
  return total;
}

namespace {
// Distance of x to the residue class (c mod a), as a number in [0, a/2].
double mod_distance(double x, double c, double a) {
  return std::abs(std::remainder(x - c, a));
}
}  // namespace

double measure_of_lattice(const MeasureSpec& mu, const Vec& y, double a) {
  double total = 0.0;
  for (const auto& atom : mu.atoms) {
    bool on = false;
    for (int i = 0; i < mu.dim && !on; ++i)
      if (mod_distance(atom.point[i], 0.5 * a + y[i], a) <= 1e-12) on = true;
    if (on) total += atom.mass;
  }
  return total;  // hyperplanes are Lebesgue-null for the uniform box parts
}

Vec find_lattice_shift(const MeasureSpec& mu, double a, const Vec& search_lo, const Vec& search_hi,
                       std::uint64_t seed) {
  const int N = mu.dim;
  Vec y(N);
  if (mu.atoms.empty() && !mu.boxes.empty()) {
    y = 0.5 * (search_lo + search_hi);
    return y;
  }
  if (!mu.atoms.empty() || !mu.boxes.empty()) {
    // Per axis, avoid the finitely many bad residues (p_i - a/2) mod a by a
    // deterministic scan that maximizes the circular distance to all of them.
    for (int i = 0; i < N; ++i) {
      std::vector<double> bad;
      for (const auto& atom : mu.atoms) bad.push_back(atom.point[i] - 0.5 * a);
      if (bad.empty()) {
        y[i] = 0.5 * (search_lo[i] + search_hi[i]);
        continue;
      }
      const int cands = 2 * static_cast<int>(bad.size()) + 3;
      double best = -1.0, best_y = search_lo[i];
      for (int c = 1; c <= cands; ++c) {
        const double cand = search_lo[i] + (search_hi[i] - search_lo[i]) * c / (cands + 1);
        double d = std::numeric_limits<double>::infinity();
        for (double b : bad) d = std::min(d, mod_distance(cand, b, a));
        if (d > best) {
          best = d;
          best_y = cand;
        }
      }
      if (best <= 1e-12) throw Exhausted("no admissible lattice shift found on axis");
      y[i] = best_y;
    }
  } else {
    // Sample cloud only: rejection sampling against the cloud's coordinates.
    CounterRng rng{seed};
    const int kMaxTries = 10000;
    for (int t = 0; t < kMaxTries; ++t) {
      for (int i = 0; i < N; ++i) y[i] = rng.uniform(t, i, search_lo[i], search_hi[i]);
      bool ok = true;
      for (const auto& s : mu.samples) {
        for (int i = 0; i < N && ok; ++i)
          if (mod_distance(s[i], 0.5 * a + y[i], a) <= 1e-12) ok = false;
        if (!ok) break;
      }
      if (ok) return y;
    }
    throw Exhausted("rejection sampling failed to find a lattice shift");
  }
  if (measure_of_lattice(mu, y, a) != 0.0)
    throw Exhausted("lattice shift recheck failed");
  return y;
}

CubeCover cube_cover(const MeasureSpec& mu, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("cube_cover: eps must be in (0,1)");
  if (!mu.compactly_supported()) throw std::invalid_argument("cube_cover: need atom+box support");
  const int N = mu.dim;

  // Ambient open box U: support box inflated by 1 on each side. The exact
  // l-infinity distance from the support to the complement of U is then the
  // inflation itself.
  Vec slo, shi;
  mu.support_box(slo, shi);
  const double grow = 1.0;
  CubeCover cover;
  cover.u_lo = slo.array() - grow;
  cover.u_hi = shi.array() + grow;
  const double r = grow;      // d(K, R^N \ U) with K the closed support
  const double s = 0.5 * r;   // lattice pitch = cube side

  // Null shift so that atom mass on the cube faces is zero; faces of the
  // pitch-s tiling anchored at y are Sigma(y, s).
  Vec ylo = Vec::Zero(N), yhi = Vec::Constant(N, s);
  cover.anchor = find_lattice_shift(mu, s, ylo, yhi);
  cover.side = s;

  // Enumerate lattice cubes (centers anchor + s*Z^N) whose closures lie in U
  // and which carry positive mass.
  std::vector<long> lo_idx(N), hi_idx(N);
  for (int i = 0; i < N; ++i) {
    lo_idx[i] = static_cast<long>(std::ceil((cover.u_lo[i] + 0.5 * s - cover.anchor[i]) / s));
    hi_idx[i] = static_cast<long>(std::floor((cover.u_hi[i] - 0.5 * s - cover.anchor[i]) / s));
  }
  std::vector<long> idx(lo_idx);
  double total = 0.0;
  while (true) {
    Vec c(N);
    for (int i = 0; i < N; ++i) c[i] = cover.anchor[i] + s * idx[i];
    const QueryBox qb = QueryBox::open_box(c.array() - 0.5 * s, c.array() + 0.5 * s);
    const double m = measure_of_box(mu, qb);
    if (m > 0.0) {
      cover.centers.push_back(c);
      total += m;
    }
    int axis = 0;
    while (axis < N) {
      if (++idx[axis] <= hi_idx[axis]) break;
      idx[axis] = lo_idx[axis];
      ++axis;
    }
    if (axis == N) break;
  }
  cover.covered_mass = total;
  if (!(cover.covered_mass > 1.0 - eps))
    throw EpsilonTooSmall("cube cover mass " + std::to_string(total) + " not > 1 - eps");
  return cover;
}

std::vector<Vec> sample_measure(const MeasureSpec& mu, int n, std::uint64_t seed) {
  std::vector<Vec> out;
  out.reserve(n);
  CounterRng rng{seed};
  const bool cloud_only = mu.atoms.empty() && mu.boxes.empty() && !mu.samples.empty();
  for (int i = 0; i < n; ++i) {
    if (cloud_only) {
      const auto j = static_cast<size_t>(rng.uniform(i, 0) * mu.samples.size());
      out.push_back(mu.samples[std::min(j, mu.samples.size() - 1)]);
      continue;
    }
    double u = rng.uniform(static_cast<std::uint64_t>(i), 0);
    bool placed = false;
    for (const auto& a : mu.atoms) {
      if (u < a.mass) {
        out.push_back(a.point);
        placed = true;
        break;
      }
      u -= a.mass;
    }
    if (placed) continue;
    for (const auto& b : mu.boxes) {
      if (u < b.mass || &b == &mu.boxes.back()) {
        Vec p(mu.dim);
        for (int d = 0; d < mu.dim; ++d)
          p[d] = rng.uniform(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(d + 1),
                             b.lo[d], b.hi[d]);
        out.push_back(p);
        placed = true;
        break;
      }
      u -= b.mass;
    }
  }
  return out;
}

}  // namespace sympack
