// Command-line front end: construct, verify, and report on the embedding and
// quasi-state machinery. JSON reports; CSV point clouds for external plotting.
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sympack/assembly.hpp"
#include "sympack/fibers.hpp"
#include "sympack/folding.hpp"
#include "sympack/measure.hpp"
#include "sympack/quasistate.hpp"
#include "sympack/rng.hpp"

using namespace sympack;
using nlohmann::json;

namespace {

int n_workers() {
  if (const char* env = std::getenv("SYMPACK_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_json(const std::string& path, const json& j) {
  if (path.empty()) {
    std::cout << j.dump(2) << std::endl;
    return;
  }
  std::ofstream out(path);
  out << j.dump(2) << std::endl;
}

struct CheckSet {
  json checks = json::array();
  bool all_ok = true;
  void add(const std::string& name, bool ok, double measured, double threshold) {
    checks.push_back({{"name", name}, {"pass", ok}, {"measured", measured}, {"threshold", threshold}});
    all_ok &= ok;
  }
};

int run_fold(int k, int n, int samples, std::uint64_t seed, const std::string& out,
             const std::string& dump_csv) {
  const auto t0 = std::chrono::steady_clock::now();
  FoldingEmbedding fe = build_polydisk_embedding(k, n);
  CheckSet cs;
  SeqRng rng(seed);
  const int dim = fe.dim;

  // (ii) identity on the entry slab
  double worst_ii = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec z(dim);
    for (int d = 0; d < dim; ++d) z[d] = rng.uniform(1e-6, 1.0 - 1e-6);
    worst_ii = std::max(worst_ii, (fe.eval(z) - z).lpNorm<Eigen::Infinity>());
  }
  cs.add("entry_slab_identity", worst_ii <= 1e-12, worst_ii, 1e-12);

  // (iii) shift on the exit slab
  Vec shift = Vec::Constant(dim, k - 1.0);
  shift[0] = k - fe.alpha;
  double worst_iii = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec z(dim);
    z[0] = rng.uniform(fe.alpha - 1.0 + 1e-6, fe.alpha - 1e-6);
    for (int d = 1; d < dim; ++d) z[d] = rng.uniform(1e-6, 1.0 - 1e-6);
    worst_iii = std::max(worst_iii, (fe.eval(z) - z - shift).lpNorm<Eigen::Infinity>());
  }
  cs.add("exit_slab_shift", worst_iii <= 1e-9, worst_iii, 1e-9);

  // (i) membership on (2, k-2) x (0,k)^{2n-1} away from the integer lattice
  int n_in = 0, n_total = 0, false_in = 0;
  for (int s = 0; s < samples; ++s) {
    Vec p(dim);
    bool clear = true;
    p[0] = rng.uniform(2.0, k - 2.0);
    for (int d = 1; d < dim; ++d) p[d] = rng.uniform(0.0, k);
    for (int d = 0; d < dim; ++d)
      if (std::abs(p[d] - std::round(p[d])) < 0.05) clear = false;
    if (!clear) continue;
    ++n_total;
    const auto m = fe.membership(p);
    if (m.verdict == Membership::In) {
      ++n_in;
      if (m.residual > 1e-8) ++false_in;
    }
  }
  const double frac = n_total ? static_cast<double>(n_in) / n_total : 0.0;
  cs.add("interior_membership_fraction", frac >= 0.99, frac, 0.99);
  cs.add("false_in_count", false_in == 0, false_in, 0);

  // defect histogram + csv dump
  json hist = json::array();
  std::ofstream csv;
  if (!dump_csv.empty()) {
    csv.open(dump_csv);
    csv << "u_in,v_in,image_u,image_v,defect\n";
  }
  double worst_defect = 0.0;
  for (int s = 0; s < std::min(samples, 2000); ++s) {
    Vec z(dim);
    z[0] = rng.uniform(1e-3, fe.alpha - 1e-3);
    for (int d = 1; d < dim; ++d) z[d] = rng.uniform(1e-3, 1.0 - 1e-3);
    const double defect = symplecticity_defect(*fe.iota, z);
    worst_defect = std::max(worst_defect, defect);
    if (csv.is_open()) {
      const Vec w = fe.eval(z);
      csv << z[0] << "," << z[1] << "," << w[0] << "," << w[1] << "," << defect << "\n";
    }
  }
  cs.add("symplecticity_defect", worst_defect <= 1e-6, worst_defect, 1e-6);

  json rep;
  rep["subcommand"] = "fold";
  rep["k"] = k;
  rep["n"] = n;
  rep["alpha"] = fe.alpha;
  rep["samples"] = samples;
  rep["seed"] = seed;
  rep["checks"] = cs.checks;
  rep["elapsed_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(out, rep);
  return cs.all_ok ? 0 : 1;
}

int run_embed(const std::string& measure_path, double eps, std::uint64_t seed, int samples,
              const std::string& out, const std::string& dump_points) {
  const auto t0 = std::chrono::steady_clock::now();
  const MeasureSpec mu = MeasureSpec::from_file(measure_path);
  AssembledEmbedding emb = embed_measure_map(mu, eps);
  const CoverageReport rep = coverage_report(emb, mu, samples, seed);
  json j;
  j["subcommand"] = "embed";
  j["plan"] = emb.plan.to_json();
  j["coverage"] = rep.to_json();
  j["elapsed_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!dump_points.empty()) {
    std::ofstream csv(dump_points);
    csv << "axis0,axis1,covered\n";
    const auto pts = sample_measure(mu, std::min(samples, 20000), seed + 1);
    for (const auto& p : pts) {
      const int ci = emb.plan.cube_of(p);
      int cov = 0;
      if (ci >= 0)
        cov = emb.membership(emb.plan.avatar(p, ci)).verdict == Membership::In ? 1 : 0;
      csv << p[0] << "," << p[1] << "," << cov << "\n";
    }
  }
  write_json(out, j);
  const bool ok = rep.exact_bound_ok && rep.mc_fraction > (1.0 - eps) * 0.98;
  return ok ? 0 : 1;
}

int run_qs(const std::string& space_tag, const std::string& measure_path,
           const std::string& function_path, const std::string& op, const std::string& out) {
  int m = 32;
  if (space_tag.rfind("cube-sphere:", 0) == 0) m = std::stoi(space_tag.substr(12));
  const DiscreteSpace space = DiscreteSpace::cube_sphere(m);
  DiscreteMeasure mu;
  if (measure_path == "uniform" || measure_path.empty()) {
    mu = DiscreteMeasure::uniform(space);
  } else {
    std::ifstream in(measure_path);
    json j;
    in >> j;
    mu.mass = Vec::Zero(space.n_cells);
    if (j.contains("uniform") && j["uniform"].get<bool>())
      mu = DiscreteMeasure::uniform(space);
    for (const auto& cell : j.value("cells", json::array()))
      mu.mass[cell.at("cell").get<int>()] += cell.at("mass").is_string()
                                                 ? std::stod(cell["mass"].get<std::string>())
                                                 : cell["mass"].get<double>();
    if (j.contains("rescale") && j["rescale"].get<bool>()) mu.mass /= mu.mass.sum();
    mu.validate();
  }
  CellFunction f(space.n_cells);
  if (function_path == "z" || function_path.empty()) {
    for (int i = 0; i < space.n_cells; ++i) f[i] = space.centers[i][2];
  } else {
    std::ifstream in(function_path);
    std::string line;
    f.setZero();
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.find("cell") == 0) continue;
      const auto comma = line.find(',');
      f[std::stoi(line.substr(0, comma))] = std::stod(line.substr(comma + 1));
    }
  }
  json j;
  j["subcommand"] = "qs";
  j["space"] = space.tag;
  j["op"] = op;
  if (op == "median") {
    j["value"] = zeta_median(space, mu, f);
  } else if (op == "integral") {
    j["value"] = zeta_integral(space, mu, f);
  } else if (op == "superheavy") {
    const CellSet comp = special_fiber_component(space, mu, f);
    j["component_cells"] = static_cast<int>(std::count(comp.begin(), comp.end(), 1));
    j["superheavy"] = superheavy_check(space, mu, comp);
    j["value"] = zeta_median(space, mu, f);
  } else if (op == "pushforward") {
    j["value"] = pushforward_eval(space, mu, f, [](double t) { return t * t; });
    j["law_rhs"] = std::pow(zeta_median(space, mu, f), 2);
  } else {
    std::cerr << "unknown qs op: " << op << "\n";
    return 2;
  }
  write_json(out, j);
  return 0;
}

int run_fibers(const std::string& a_str, const std::string& c_str, const std::string& out) {
  auto parse_list = [](const std::string& s) {
    std::vector<double> v;
    size_t pos = 0;
    while (pos < s.size()) {
      size_t comma = s.find(',', pos);
      if (comma == std::string::npos) comma = s.size();
      v.push_back(std::stod(s.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    return v;
  };
  const auto av = parse_list(a_str), cv = parse_list(c_str);
  if (av.size() != cv.size()) {
    std::cerr << "fibers: a and c must have equal length\n";
    return 2;
  }
  Vec a(av.size()), c(cv.size());
  for (size_t i = 0; i < av.size(); ++i) {
    a[i] = av[i];
    c[i] = cv[i];
  }
  json j;
  j["subcommand"] = "fibers";
  try {
    const FiberSolution sol = rho_fiber_solve(a, c);
    switch (sol.kind) {
      case FiberSolution::Kind::Empty:
        j["kind"] = "empty";
        j["reason"] = sol.reason;
        break;
      case FiberSolution::Kind::ComplementOfBox:
        j["kind"] = "complement-of-box";
        break;
      case FiberSolution::Kind::Product:
        j["kind"] = "product";
        j["alpha"] = std::vector<double>(sol.alpha.data(), sol.alpha.data() + sol.alpha.size());
        j["residual"] = sol.residual;
        break;
    }
  } catch (const BisectionStall& e) {
    j["kind"] = "stall";
    j["reason"] = e.what();
  }
  write_json(out, j);
  return 0;
}

int run_involutivity(const std::string& which, int n_points, double step, std::uint64_t seed,
                     const std::string& out) {
  json j;
  j["subcommand"] = "involutivity";
  j["map"] = which;
  j["step"] = step;
  SeqRng rng(seed);
  const int n = 3, dim = 2 * n;
  std::vector<Vec> pts;
  for (int s = 0; s < n_points; ++s) {
    Vec z(dim);
    for (int d = 0; d < dim; ++d) z[d] = rng.uniform(-1.2, 1.2);
    pts.push_back(z);
  }
  double bound = 0.0;
  if (which == "std") {
    bound = involutivity_certify([](const Vec& z) { return phi_std(z); }, n, pts, step);
  } else if (which == "rho") {
    const Vec a = Vec::Constant(n, 1.0);
    bound = involutivity_certify([a](const Vec& z) { return rho_a(a, phi_std(z)); }, n, pts, step);
  } else {
    std::cerr << "involutivity: map must be std or rho (embedded runs in the test suite)\n";
    return 2;
  }
  j["max_bracket"] = bound;
  write_json(out, j);
  return 0;
}

int run_verify(const std::string& table_path, int samples, std::uint64_t seed,
               const std::string& out) {
  // Verify a serialized piece table: reconstruct the elementary pieces and
  // check symplecticity on their domain boxes.
  std::ifstream in(table_path);
  if (!in) {
    std::cerr << "verify: cannot open " << table_path << "\n";
    return 2;
  }
  json table;
  in >> table;
  SeqRng rng(seed);
  CheckSet cs;
  int checked = 0;
  std::function<void(const json&)> walk = [&](const json& node) {
    if (node.contains("factors"))
      for (const auto& f : node["factors"]) walk(f);
    if (node.contains("pieces"))
      for (const auto& p : node["pieces"]) walk(p);
    if (!node.contains("kind")) return;
    const std::string kind = node["kind"];
    if (kind == "translation" && node.contains("offset")) {
      const auto off = node["offset"].get<std::vector<double>>();
      Vec t(off.size());
      for (size_t i = 0; i < off.size(); ++i) t[static_cast<int>(i)] = off[i];
      Translation tr(t);
      double worst = 0.0;
      for (int s = 0; s < samples; ++s) {
        Vec z(t.size());
        for (int d = 0; d < t.size(); ++d) z[d] = rng.uniform(-1, 1);
        worst = std::max(worst, symplecticity_defect(tr, z));
      }
      cs.add("translation_defect", worst <= 1e-12, worst, 1e-12);
      ++checked;
    }
  };
  walk(table);
  json j;
  j["subcommand"] = "verify";
  j["pieces_checked"] = checked;
  j["checks"] = cs.checks;
  write_json(out, j);
  return cs.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symplectic folding embeddings, quasi-states, and involutive fibers"};
  app.require_subcommand(1);
  (void)n_workers();

  // fold
  auto* fold = app.add_subcommand("fold", "build the polydisk-into-cube embedding and verify it");
  int k = 5, n = 2, samples = 1000;
  std::uint64_t seed = 1;
  std::string out, dump_csv;
  fold->add_option("--k", k);
  fold->add_option("--n", n);
  fold->add_option("--samples", samples);
  fold->add_option("--seed", seed);
  fold->add_option("--report", out);
  fold->add_option("--dump-points", dump_csv);

  // embed
  auto* embed = app.add_subcommand("embed", "cover a measure by an embedded polydisk");
  std::string measure_path, embed_out, dump_points;
  double eps = 0.1;
  int embed_samples = 100000;
  std::uint64_t embed_seed = 1;
  embed->add_option("--measure", measure_path)->required();
  embed->add_option("--epsilon", eps);
  embed->add_option("--seed", embed_seed);
  embed->add_option("--samples", embed_samples);
  embed->add_option("--out", embed_out);
  embed->add_option("--dump-points", dump_points);

  // qs
  auto* qs = app.add_subcommand("qs", "quasi-state queries on the cube-sphere");
  std::string space_tag = "cube-sphere:32", qs_measure = "uniform", qs_function = "z",
              qs_op = "median", qs_out;
  qs->add_option("--space", space_tag);
  qs->add_option("--measure", qs_measure);
  qs->add_option("--function", qs_function);
  qs->add_option("--op", qs_op);
  qs->add_option("--out", qs_out);

  // fibers
  auto* fibers = app.add_subcommand("fibers", "solve rho_a(t) = c");
  std::string a_str = "1,1,1", c_str = "0.2,0.3,0.1", fibers_out;
  fibers->add_option("--a", a_str);
  fibers->add_option("--c", c_str);
  fibers->add_option("--out", fibers_out);

  // involutivity
  auto* inv = app.add_subcommand("involutivity", "finite-difference bracket certification");
  std::string inv_map = "std", inv_out;
  int inv_points = 100;
  double inv_step = 1e-3;
  std::uint64_t inv_seed = 1;
  inv->add_option("--map", inv_map);
  inv->add_option("--points", inv_points);
  inv->add_option("--step", inv_step);
  inv->add_option("--seed", inv_seed);
  inv->add_option("--out", inv_out);

  // verify
  auto* verify = app.add_subcommand("verify", "verify a serialized piece table");
  std::string table_path, verify_out;
  int verify_samples = 100;
  std::uint64_t verify_seed = 1;
  verify->add_option("--table", table_path)->required();
  verify->add_option("--samples", verify_samples);
  verify->add_option("--seed", verify_seed);
  verify->add_option("--out", verify_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fold->parsed()) return run_fold(k, n, samples, seed, out, dump_csv);
    if (embed->parsed()) return run_embed(measure_path, eps, embed_seed, embed_samples, embed_out, dump_points);
    if (qs->parsed()) return run_qs(space_tag, qs_measure, qs_function, qs_op, qs_out);
    if (fibers->parsed()) return run_fibers(a_str, c_str, fibers_out);
    if (inv->parsed()) return run_involutivity(inv_map, inv_points, inv_step, inv_seed, inv_out);
    if (verify->parsed()) return run_verify(table_path, verify_samples, verify_seed, verify_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
