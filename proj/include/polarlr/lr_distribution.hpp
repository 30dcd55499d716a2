// Discrete likelihood-ratio distributions: the value type every density
// evolution step in this library acts on. An LRDistribution holds the law of
// L(y) = W(y|1)/W(y|0) for a symmetric binary-input channel conditioned on the
// all-zeros input, as a finite list of (lr, mass) atoms sorted by lr.
//
// LR values are kept on a canonical grid (15 significant decimal digits, with
// a small snap window around 1) so that merging of equal values is exact and
// independent of the order atoms were produced in. Masses are never rounded.
//
// Symmetric laws satisfy mass(1/l) = l * mass(l). Distributions built by the
// channel builders and the exact transforms maintain that relation
// structurally: only the below-1 half (plus the masses at 0 and 1) is ever
// computed, and the above-1 side is synthesized from it. The `symmetric` flag
// records this. Approximate-kernel images are not calibrated ratios, their
// laws are genuinely not mass-symmetric, and they carry the flag as false.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace polarlr {

inline constexpr double kDefaultTolerance = 1e-9;

// Below-1 atoms under this mass are removed during assembly, their mass
// redistributed proportionally over the survivors.
inline constexpr double kMassPruneFloor = 1e-15;

// Largest relative violation of the pair relation tolerated when validating
// an externally supplied distribution as a symmetric channel.
inline constexpr double kSymmetryRepairLimit = 1e-6;

// Atoms within this relative distance are the same value reached through
// different arithmetic routes; assembly coalesces them within one region
// of 1.
inline constexpr double kValueCoalesceTolerance = 1e-13;

struct LRAtom {
  double lr = 0.0;
  double mass = 0.0;
};

struct LRDistribution {
  std::vector<LRAtom> atoms;
  double tolerance = kDefaultTolerance;
  // True when the above-1 side was synthesized from the below-1 half, so the
  // pair relation holds by construction.
  bool symmetric = false;

  std::size_t size() const { return atoms.size(); }
  double mass_sum() const;
};

// Canonical value rounding: 15 significant decimal digits, deterministic and
// idempotent. Values within 1e-13 of 1 are snapped to exactly 1 so that the
// measure-carrying {L = 1} region survives floating-point drift. Requires a
// finite nonnegative argument.
double round_sig(double value);

// Builds a symmetric distribution from raw images. Values that round above 1
// are dropped: for a symmetric law the above-1 side is determined by the
// below-1 half, and it is synthesized here as (1/l, l * mass(l)) per atom.
// Callers that enumerate a complete symmetric image set simply pass
// everything through.
LRDistribution assemble_symmetric(std::vector<LRAtom> raw_images,
                                  double tolerance);

// Plain two-sided assembly (round, merge, prune, coalesce within regions),
// no symmetry synthesis. Used for the approximate kernels.
LRDistribution assemble_plain(std::vector<LRAtom> raw, double tolerance);

// The canonicalization operation: sorts, merges, prunes and re-enforces the
// pair relation by projecting each (l, 1/l) pair onto it (pair totals
// preserved, unmatched atoms get their mirror synthesized). Idempotent;
// throws if the total mass deviates from 1 by more than 10 * tolerance.
LRDistribution canonicalize(const LRDistribution& d);

// Invariant checks. validate_basic: sorted strictly increasing, finite
// nonnegative lr, nonnegative mass, total mass within tolerance of 1.
// validate_symmetric additionally checks the pair relation within
// kSymmetryRepairLimit.
void validate_basic(const LRDistribution& d);
void validate_symmetric(const LRDistribution& d);

// Worst relative violation of mass(1/l) = l * mass(l) over all pairs
// (partners located within the coalesce window).
double symmetry_violation(const LRDistribution& d);

struct RegionMasses {
  double less = 0.0;
  double eq = 0.0;
  double greater = 0.0;
};

RegionMasses region_masses(const LRDistribution& d);

// Tolerant atom-for-atom comparison: walks both sorted atom lists, merging
// runs of atoms whose lr values agree within value_tol (relative above 1,
// absolute below), then compares value and mass pairwise.
bool approx_equal(const LRDistribution& a, const LRDistribution& b,
                  double value_tol, double mass_tol);

std::string to_string(const LRDistribution& d);

}  // namespace polarlr
