#pragma once

#include <nlohmann/json_fwd.hpp>

#include "sympack/folding.hpp"
#include "sympack/measure.hpp"

namespace sympack {

struct AlignmentFailure : std::runtime_error {
  explicit AlignmentFailure(const std::string& w) : std::runtime_error(w) {}
};
struct ShiftBoundUnsatisfiable : std::runtime_error {
  explicit ShiftBoundUnsatisfiable(const std::string& w) : std::runtime_error(w) {}
};

// All parameters of the assembled embedding. The ambient model is flat: the
// cubes-plus-tubes region is a subset of R^{2n} at the arranged positions
// w^(i); the measure's mass is carried over by the per-cube translations
// (avatars) from the original cover positions z^(i).
struct EmbeddingPlan {
  int n = 0, dim = 0;
  double eps = 0.0;
  CubeCover cover;             // original cube positions z^(i), side 2a
  double a = 0.0;              // cube radius (half side)
  double a2 = 0.0;             // a'' (certified inner radius)
  double a1 = 0.0;             // a'  (arrangement radius)
  int r = 0;                   // number of cubes
  std::vector<Vec> w;          // target centers w^(i)
  double delta = 0.0;          // tube half-thickness
  int k = 0;                   // folding parameter
  double eta = 0.0;            // 2a'/k
  double alpha = 0.0;          // eta * alpha_fold (u-extent of one scaled fold)
  double beta = 0.0;           // r*alpha + (r-1)*2a'
  std::vector<Vec> s;          // alignment shifts s_i
  Vec xi;                      // correction shift
  double xi_bound = 0.0;
  double exact_inner_mass = 0.0;  // exact mu-mass of the union of closed a''-cubes

  Vec avatar(const Vec& p, int cube_index) const;  // p + w_i - z_i
  int cube_of(const Vec& p) const;                 // index of the open a-cube containing p, or -1
  void check_invariants() const;                   // throws on violation
  nlohmann::json to_json() const;
};

EmbeddingPlan plan_embedding(const MeasureSpec& mu, double eps);

// Step 5: the aligned union of scaled folds and connector shifts on
// (0,beta) x (0,eta)^{2n-1}.
MapPtr assemble_hat_iota(const EmbeddingPlan& plan, const FoldingEmbedding& fold);

// Step 6: the correction shift xi and the cutoff translation phi (time-1 flow
// of the cutoff linear Hamiltonian; exactly T_xi on each B_i').
struct CorrectionShift {
  Vec xi;
  MapPtr phi;       // identity translation when xi == 0
  bool trivial = false;
};
CorrectionShift correction_shift(const EmbeddingPlan& plan, const MeasureSpec& mu);

struct CoverageReport {
  double exact_lower_bound = 0.0;  // from the Step-6 containment set, measure arithmetic only
  double mc_fraction = 0.0;
  int mc_samples = 0;
  int mc_covered = 0;
  int mc_unknown = 0;
  double eps = 0.0;
  bool exact_bound_ok = false;
  std::vector<int> atom_confirmed;  // per-atom membership confirmation (1/0)
  nlohmann::json to_json() const;
};

struct AssembledEmbedding {
  EmbeddingPlan plan;
  FoldingEmbedding fold;
  MapPtr hat_iota;
  CorrectionShift corr;
  MapPtr iota_total;  // phi o hat_iota

  // Membership of an avatar point (in the w-arrangement) with witness.
  MembershipResult membership(const Vec& avatar_point) const;
};

AssembledEmbedding embed_measure_map(const MeasureSpec& mu, double eps);
CoverageReport coverage_report(const AssembledEmbedding& emb, const MeasureSpec& mu, int n_samples,
                               std::uint64_t seed);

// Product of planar area-preserving maps taking (0,beta) x (0,eta)^{2n-1}
// onto the polydisk P(beta*eta/pi, eta^2/pi, ...) minus a radial slit.
MapPtr box_to_polydisk(double beta, double eta, int n);

}  // namespace sympack
