#include "polarlr/lr_distribution.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace polarlr {

namespace {

// Exact powers of ten; 10^k is an exact double for k <= 22.
constexpr int kMaxExactPow10 = 22;

double pow10_exact(int k) {
  static const auto table = [] {
    std::array<double, kMaxExactPow10 + 1> t{};
    double v = 1.0;
    for (int i = 0; i <= kMaxExactPow10; ++i) {
      t[static_cast<std::size_t>(i)] = v;
      v *= 10.0;
    }
    return t;
  }();
  return table[static_cast<std::size_t>(k)];
}

// Fallback for extreme magnitudes: glibc printf/strtod are correctly rounded,
// so the round trip through a 15-digit decimal string is deterministic and
// idempotent.
double round_sig_slow(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.14e", v);
  return std::strtod(buf, nullptr);
}

}  // namespace

double round_sig(double v) {
  if (v == 0.0) return 0.0;
  if (!std::isfinite(v) || v < 0.0)
    throw std::domain_error("round_sig: value must be finite and nonnegative");
  if (std::fabs(v - 1.0) <= 1e-13) return 1.0;

  int e = static_cast<int>(std::floor(std::log10(v)));
  // Self-consistent rescale: keep the scaled mantissa in [1e14, 1e15). The
  // loop corrects any off-by-one from log10 at decade boundaries, which also
  // makes the function exactly idempotent.
  for (int iter = 0; iter < 4; ++iter) {
    if (14 - e >= 0 && 14 - e <= kMaxExactPow10) {
      const double scale = pow10_exact(14 - e);
      const double m = std::round(v * scale);
      if (m >= 1e15) {
        ++e;
        continue;
      }
      if (m < 1e14) {
        --e;
        continue;
      }
      return m / scale;
    }
    if (e - 14 > 0 && e - 14 <= kMaxExactPow10) {
      const double div = pow10_exact(e - 14);
      const double m = std::round(v / div);
      if (m >= 1e15) {
        ++e;
        continue;
      }
      if (m < 1e14) {
        --e;
        continue;
      }
      return m * div;
    }
    break;
  }
  return round_sig_slow(v);
}

double LRDistribution::mass_sum() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  return s;
}

namespace {

int region_index(double lr) { return lr < 1.0 ? 0 : (lr == 1.0 ? 1 : 2); }

std::vector<LRAtom> sorted_merged(const std::vector<LRAtom>& raw,
                                  bool keep_above) {
  std::unordered_map<std::uint64_t, double> acc;
  acc.reserve(raw.size());
  for (const auto& atom : raw) {
    if (atom.mass == 0.0) continue;
    if (atom.mass < 0.0)
      throw std::invalid_argument("LRDistribution: negative mass");
    if (!std::isfinite(atom.lr)) {
      // Overflowed image (a product of enormous ratios); its mass is far
      // below the prune floor and is folded into redistribution.
      continue;
    }
    const double r = round_sig(atom.lr);
    if (!keep_above && r > 1.0) continue;
    acc[std::bit_cast<std::uint64_t>(r)] += atom.mass;
  }
  std::vector<LRAtom> atoms;
  atoms.reserve(acc.size());
  for (const auto& [bits, mass] : acc)
    atoms.push_back({std::bit_cast<double>(bits), mass});
  std::sort(atoms.begin(), atoms.end(),
            [](const LRAtom& a, const LRAtom& b) { return a.lr < b.lr; });
  return atoms;
}

std::vector<LRAtom> prune_dust(std::vector<LRAtom> atoms) {
  double total = 0.0, pruned = 0.0;
  for (const auto& a : atoms) total += a.mass;
  std::vector<LRAtom> kept;
  kept.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (a.mass < kMassPruneFloor)
      pruned += a.mass;
    else
      kept.push_back(a);
  }
  if (pruned > 0.0 && !kept.empty() && total > pruned) {
    const double scale = total / (total - pruned);
    for (auto& a : kept) a.mass *= scale;
  }
  return kept;
}

// Coalesces sorted atoms whose values agree within the route-noise window,
// never across a region boundary. The representative is the mass-weighted
// mean, re-rounded; if the snap window around 1 would pull it out of its
// region, the run member nearest 1 is used instead.
std::vector<LRAtom> coalesce_neighbors(std::vector<LRAtom> atoms) {
  std::vector<LRAtom> out;
  out.reserve(atoms.size());
  std::size_t i = 0;
  while (i < atoms.size()) {
    std::size_t j = i + 1;
    while (j < atoms.size() &&
           region_index(atoms[j].lr) == region_index(atoms[i].lr) &&
           atoms[j].lr - atoms[j - 1].lr <=
               kValueCoalesceTolerance * atoms[j].lr)
      ++j;
    if (j == i + 1) {
      out.push_back(atoms[i]);
    } else {
      double mass = 0.0, moment = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        mass += atoms[k].mass;
        moment += atoms[k].lr * atoms[k].mass;
      }
      double rep = round_sig(moment / mass);
      const int region = region_index(atoms[i].lr);
      if (region == 0 && rep >= 1.0) rep = atoms[j - 1].lr;
      if (region == 2 && rep <= 1.0) rep = atoms[i].lr;
      out.push_back({rep, mass});
    }
    i = j;
  }
  return out;
}

// Appends the synthesized above-1 side: one atom (1/l, l * mass) per below-1
// atom with l > 0, largest values first so the result stays sorted. Mirrors
// below the prune floor are dropped like any other dust; as a consequence
// every stored ratio satisfies lr <= 1/kMassPruneFloor and pair images can
// never overflow.
void materialize_mirror(std::vector<LRAtom>& atoms) {
  const std::size_t n = atoms.size();
  for (std::size_t k = n; k-- > 0;) {
    const auto& a = atoms[k];
    if (a.lr <= 0.0 || a.lr >= 1.0) continue;
    const double mass = a.lr * a.mass;
    if (mass >= kMassPruneFloor) atoms.push_back({round_sig(1.0 / a.lr), mass});
  }
}

// Pins the total mass at 1 (within half an ulp): rescales, then recomputes
// the largest atom as the complement of the others. Without this the tiny
// per-step rounding of the total compounds through the transforms (a product
// step squares the total, doubling any deviation every level). The skip
// window keeps the operation exactly idempotent; totals farther than the
// sanity bound from 1 are left for the caller's validation to reject.
void renormalize_compensated(std::vector<LRAtom>& atoms) {
  if (atoms.empty()) return;
  double total = 0.0;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    total += atoms[i].mass;
    if (atoms[i].mass > atoms[largest].mass) largest = i;
  }
  const double dev = std::fabs(total - 1.0);
  if (dev <= 4.0 * std::numeric_limits<double>::epsilon() || dev > 1e-6) return;
  const double scale = 1.0 / total;
  double others = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i == largest) continue;
    atoms[i].mass *= scale;
    others += atoms[i].mass;
  }
  atoms[largest].mass = 1.0 - others;
}

constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

// Index of the atom whose value matches `value` within the coalesce window,
// or npos.
std::size_t find_near(const std::vector<LRAtom>& atoms, double value) {
  auto it = std::lower_bound(
      atoms.begin(), atoms.end(), value,
      [](const LRAtom& a, double v) { return a.lr < v; });
  const auto close = [&](std::size_t idx) {
    return idx < atoms.size() &&
           std::fabs(atoms[idx].lr - value) <=
               kValueCoalesceTolerance * std::max(atoms[idx].lr, value);
  };
  std::size_t idx = static_cast<std::size_t>(it - atoms.begin());
  if (close(idx)) return idx;
  if (idx > 0 && close(idx - 1)) return idx - 1;
  return kNpos;
}

}  // namespace

LRDistribution assemble_symmetric(std::vector<LRAtom> raw_images,
                                  double tolerance) {
  auto atoms = sorted_merged(raw_images, /*keep_above=*/false);
  atoms = prune_dust(std::move(atoms));
  atoms = coalesce_neighbors(std::move(atoms));
  materialize_mirror(atoms);
  renormalize_compensated(atoms);
  LRDistribution out;
  out.atoms = std::move(atoms);
  out.tolerance = tolerance;
  out.symmetric = true;
  return out;
}

LRDistribution assemble_plain(std::vector<LRAtom> raw, double tolerance) {
  auto atoms = sorted_merged(raw, /*keep_above=*/true);
  atoms = prune_dust(std::move(atoms));
  atoms = coalesce_neighbors(std::move(atoms));
  renormalize_compensated(atoms);
  LRDistribution out;
  out.atoms = std::move(atoms);
  out.tolerance = tolerance;
  out.symmetric = false;
  return out;
}

LRDistribution canonicalize(const LRDistribution& d) {
  const double total = d.mass_sum();
  if (std::fabs(total - 1.0) > 10.0 * d.tolerance) {
    std::ostringstream os;
    os << "canonicalize: total mass " << total
       << " deviates from 1 by more than " << 10.0 * d.tolerance;
    throw std::invalid_argument(os.str());
  }

  auto atoms = sorted_merged(d.atoms, /*keep_above=*/true);
  atoms = prune_dust(std::move(atoms));
  atoms = coalesce_neighbors(std::move(atoms));

  // Pair projection: place each (l, 1/l) pair exactly on the relation
  // mass(1/l) = l * mass(l), preserving the pair total; synthesize missing
  // partners. Pairs already on the relation are kept bit-for-bit, which makes
  // the operation idempotent.
  std::vector<LRAtom> result;
  result.reserve(atoms.size() + 4);
  std::vector<bool> used(atoms.size(), false);
  const auto emit_pair = [&](double c, double ml, double g_value, double mg) {
    if (mg == c * ml) {
      if (ml > 0.0) result.push_back({c, ml});
      if (mg > 0.0) result.push_back({g_value, mg});
      return;
    }
    const double ml2 = (ml + mg) / (1.0 + c);
    const double mg2 = c * ml2;
    if (ml2 >= kMassPruneFloor) result.push_back({c, ml2});
    if (mg2 >= kMassPruneFloor) result.push_back({g_value, mg2});
  };
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].lr == 0.0 || atoms[i].lr == 1.0) {
      used[i] = true;
      result.push_back(atoms[i]);
    }
  }
  for (std::size_t i = 0; i < atoms.size() && atoms[i].lr < 1.0; ++i) {
    if (used[i]) continue;
    used[i] = true;
    const double c = atoms[i].lr;
    double mg = 0.0;
    double g_value = round_sig(1.0 / c);
    const std::size_t partner = find_near(atoms, 1.0 / c);
    if (partner != kNpos && !used[partner] && atoms[partner].lr > 1.0) {
      used[partner] = true;
      mg = atoms[partner].mass;
      g_value = atoms[partner].lr;
    }
    emit_pair(c, atoms[i].mass, g_value, mg);
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (used[i]) continue;
    emit_pair(round_sig(1.0 / atoms[i].lr), 0.0, atoms[i].lr, atoms[i].mass);
  }
  std::sort(result.begin(), result.end(),
            [](const LRAtom& a, const LRAtom& b) { return a.lr < b.lr; });
  renormalize_compensated(result);

  LRDistribution out;
  out.atoms = std::move(result);
  out.tolerance = d.tolerance;
  out.symmetric = true;
  return out;
}

void validate_basic(const LRDistribution& d) {
  double total = 0.0;
  double prev = -1.0;
  for (const auto& a : d.atoms) {
    if (!std::isfinite(a.lr) || a.lr < 0.0)
      throw std::invalid_argument(
          "LRDistribution: lr must be finite and nonnegative");
    if (a.mass < 0.0)
      throw std::invalid_argument("LRDistribution: negative mass");
    if (a.lr <= prev)
      throw std::invalid_argument(
          "LRDistribution: atoms not strictly increasing");
    prev = a.lr;
    total += a.mass;
  }
  if (std::fabs(total - 1.0) > d.tolerance)
    throw std::invalid_argument("LRDistribution: total mass is not 1");
}

double symmetry_violation(const LRDistribution& d) {
  double worst = 0.0;
  for (const auto& a : d.atoms) {
    if (a.lr == 0.0 || a.lr >= 1.0) continue;
    const std::size_t partner = find_near(d.atoms, 1.0 / a.lr);
    const double partner_mass =
        partner != kNpos && d.atoms[partner].lr > 1.0 ? d.atoms[partner].mass
                                                      : 0.0;
    const double want = a.lr * a.mass;
    const double denom = partner_mass + want;
    if (denom >= 10.0 * kMassPruneFloor)
      worst = std::max(worst, std::fabs(partner_mass - want) / denom);
  }
  for (const auto& a : d.atoms) {
    if (a.lr <= 1.0 || a.mass < 10.0 * kMassPruneFloor) continue;
    const std::size_t partner = find_near(d.atoms, 1.0 / a.lr);
    if (partner == kNpos || d.atoms[partner].lr >= 1.0)
      worst = std::max(worst, 1.0);
  }
  return worst;
}

void validate_symmetric(const LRDistribution& d) {
  validate_basic(d);
  const double viol = symmetry_violation(d);
  if (viol > kSymmetryRepairLimit) {
    std::ostringstream os;
    os << "LRDistribution: symmetry relation violated (relative violation "
       << viol << ")";
    throw std::invalid_argument(os.str());
  }
}

RegionMasses region_masses(const LRDistribution& d) {
  RegionMasses r;
  for (const auto& a : d.atoms) {
    if (a.lr < 1.0)
      r.less += a.mass;
    else if (a.lr == 1.0)
      r.eq += a.mass;
    else
      r.greater += a.mass;
  }
  return r;
}

bool approx_equal(const LRDistribution& a, const LRDistribution& b,
                  double value_tol, double mass_tol) {
  // Collapse runs of nearly-equal values so a boundary tie in the canonical
  // rounding on one side cannot break the comparison.
  const auto collapse = [value_tol](const LRDistribution& d) {
    std::vector<LRAtom> out;
    for (const auto& atom : d.atoms) {
      const double tol = value_tol * std::max(1.0, std::fabs(atom.lr));
      if (!out.empty() && atom.lr - out.back().lr <= tol) {
        const double m = out.back().mass + atom.mass;
        out.back().lr =
            (out.back().lr * out.back().mass + atom.lr * atom.mass) / m;
        out.back().mass = m;
      } else {
        out.push_back(atom);
      }
    }
    return out;
  };
  const auto xa = collapse(a);
  const auto xb = collapse(b);
  if (xa.size() != xb.size()) return false;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    const double tol = value_tol * std::max(1.0, std::fabs(xa[i].lr));
    if (std::fabs(xa[i].lr - xb[i].lr) > tol) return false;
    if (std::fabs(xa[i].mass - xb[i].mass) > mass_tol) return false;
  }
  return true;
}

std::string to_string(const LRDistribution& d) {
  std::ostringstream os;
  os.precision(17);
  os << "{";
  for (std::size_t i = 0; i < d.atoms.size(); ++i) {
    if (i) os << ", ";
    os << "(" << d.atoms[i].lr << ", " << d.atoms[i].mass << ")";
  }
  os << "}";
  return os.str();
}

}  // namespace polarlr
