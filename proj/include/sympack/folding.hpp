#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sympack/flow.hpp"
#include "sympack/maps.hpp"
#include "sympack/profiles.hpp"
#include "sympack/rng.hpp"
#include "sympack/types.hpp"

namespace sympack {

// ---------------------------------------------------------------------------
// Base preparation: Theta = S_g o Theta_h on the base pair, mapping
// (0, alpha) x (0,1) onto the band of k^{2n-2} tall rectangles and bridges.
// ---------------------------------------------------------------------------
struct BasePrep {
  int k = 0, n = 0;
  std::shared_ptr<FoldHeightProfile> h;
  double A = 0.0;      // int_0^k h (closed form k^2 - 3k + 3)
  double alpha = 0.0;  // k^{2n-2} * A
  double band_len = 0.0;  // k^{2n-1}, the u-extent of the image band
  MapPtr theta;        // S_g o Theta_h acting on R^{2n}
  ProfilePtr g;        // the shear profile (0 ... k - h ... k-1)
};

BasePrep prepare_base(int k, int n);

// ---------------------------------------------------------------------------
// Boustrophedon enumeration of {0..k-1}^d with consecutive cubes adjacent.
// ---------------------------------------------------------------------------
struct CubeEnumeration {
  int k = 0, d = 0;
  long count = 0;  // k^d
  std::vector<int> cube(long i) const;      // e(i), i in [1, k^d]
  long index_of(const std::vector<int>& w) const;  // e^{-1}(w)
  struct Move {
    int coord;    // fiber coordinate index in [0, d), even = x_j, odd = y_j
    int dir;      // +1 or -1
    int ell;      // dual-coordinate cell of C_{e(i)}
  };
  Move classify(long i) const;  // for i in [1, k^d - 1]
  bool check_invariants() const;
};

CubeEnumeration enumerate_cubes(int k, int d);

// The lifting composition Psi = Psi_{k^{2n-2}-1} o ... o Psi_1; each factor is
// a conjugated closed-form lift time-1 map.
MapPtr build_lift(int k, int n, const CubeEnumeration& e, ProfilePtr rho);

// The lift ramp profile rho: 0 on (-inf,-3/4], 1 on [-1/4,inf), slope <= 2.5.
ProfilePtr lift_ramp_profile();

// ---------------------------------------------------------------------------
// The planar folding turn gamma_plus and the folding immersion gamma.
// ---------------------------------------------------------------------------

// gamma_plus: (-1/4, 1/4) x (0,1) -> R^2 (lifted to R^{2n}, base pair), with
//   - identity on (-1/4, -1/8] x (0,1),
//   - (u,v) |-> (0,k) - (u,v) on [1/8, 1/4) x (0,1),
//   - the middle band mapped into [-1/8, 0) x (0,k).
// Built as an accordion smear followed by a reparametrized circulation along
// the level sets of an even Hamiltonian; both lane behaviors are realized by
// closed-form branches of the circulation (exact point reflection / identity).
struct GammaPlusParams {
  double c_sh;      // accordion shift of the right lane
  double axis;      // reflection center x-coordinate (= -c_sh/2)
  double p_min;     // accordion slope floor
  double ramp;      // accordion bump ramp width
  double sigma_w;   // width scale of the level function
  double h1, h2;    // flip / identity level thresholds
  double wall_lo, wall_hi, wall_max;  // side expansion (onset, full, amount)
  double e_margin;  // height margin of the E bump beyond the lane heights
  double cap_scale; // vertical cap height (must exceed h2)
  // Transition-band conformance tolerances for the audit: the expansion
  // sliver rides the collar circulation, and a measure-small fraction of it
  // may land outside the nominal column; the audit pins what is tolerated.
  double leak_fraction_tol;
  double leak_excursion_tol;
  static GammaPlusParams defaults(int k);
};

class GammaPlus;  // defined in folding.cpp

MapPtr build_gamma_plus(int k, int n);

// The full folding piecewise map Gamma = gamma x id; pieces are the case
// table over u with the turn pieces at block boundaries.
MapPtr build_fold(int k, int n, const MapPtr& gamma_plus);

// ---------------------------------------------------------------------------
// The composed embedding iota = Gamma o Psi o (Theta x id).
// ---------------------------------------------------------------------------
enum class Membership { In, Out, Unknown };

struct MembershipResult {
  Membership verdict = Membership::Unknown;
  std::optional<Vec> witness;  // preimage with |iota(witness) - p| <= 1e-8
  double residual = 0.0;
};

struct FoldingEmbedding {
  int k = 0, n = 0, dim = 0;
  double alpha = 0.0;
  BasePrep base;
  CubeEnumeration enumeration;
  MapPtr psi;
  MapPtr gamma_plus;
  MapPtr gamma;  // piecewise base fold x id
  MapPtr iota;   // total composition

  Vec eval(const Vec& z) const { return iota->eval(z); }
  Mat jacobian(const Vec& z) const { return iota->jacobian(z); }

  // Domain (0,alpha) x (0,1)^{2n-1} membership with margin.
  bool in_domain(const Vec& z, double margin = 1e-9) const;

  // Certified membership of p in the image. "In" always carries a witness
  // whose forward image matches p to 1e-8; points within 0.05 of the
  // transition-image bands may come back Unknown.
  MembershipResult membership(const Vec& p) const;
};

FoldingEmbedding build_polydisk_embedding(int k, int n);

// Four-bullet audit of gamma_plus (throws TransitionConstructionFailed).
void audit_gamma_plus(const SymplecticMap& gp, int k, int n_samples, std::uint64_t seed);

}  // namespace sympack
