#include "polarlr/approximation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <future>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace polarlr {

double JointLRDistribution::mass_sum() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  return s;
}

JointLRDistribution lift(const LRDistribution& d) {
  JointLRDistribution j;
  j.tolerance = d.tolerance;
  j.atoms.reserve(d.size());
  for (const auto& a : d.atoms) j.atoms.push_back({a.lr, a.lr, a.mass});
  return j;
}

namespace {

LRDistribution marginal(const JointLRDistribution& j, bool exact_side) {
  std::vector<LRAtom> raw;
  raw.reserve(j.size());
  for (const auto& a : j.atoms)
    raw.push_back({exact_side ? a.lr_exact : a.lr_approx, a.mass});
  // Values are already canonical; a plain merge keeps the observed masses.
  return assemble_plain(std::move(raw), j.tolerance);
}

struct PairKey {
  std::uint64_t e, a;
  bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const {
    std::uint64_t h = k.e * 0x9E3779B97F4A7C15ULL;
    h ^= k.a + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
  }
};

JointLRDistribution merge_joint(std::vector<JointLRAtom> raw, double tolerance) {
  std::unordered_map<PairKey, double, PairKeyHash> acc;
  acc.reserve(raw.size());
  double total = 0.0, pruned = 0.0;
  for (const auto& atom : raw) {
    if (atom.mass == 0.0) continue;
    total += atom.mass;
    if (std::isinf(atom.lr_exact) || std::isinf(atom.lr_approx)) {
      pruned += atom.mass;  // overflowed image, mass below any tolerance
      continue;
    }
    const PairKey key{
        std::bit_cast<std::uint64_t>(round_sig(atom.lr_exact)),
        std::bit_cast<std::uint64_t>(round_sig(atom.lr_approx))};
    acc[key] += atom.mass;
  }

  std::vector<JointLRAtom> atoms;
  atoms.reserve(acc.size());
  for (const auto& [key, mass] : acc) {
    if (mass < kMassPruneFloor) {
      pruned += mass;
      continue;
    }
    atoms.push_back({std::bit_cast<double>(key.e), std::bit_cast<double>(key.a),
                     mass});
  }
  if (pruned > 0.0 && !atoms.empty() && total > pruned) {
    const double scale = total / (total - pruned);
    for (auto& a : atoms) a.mass *= scale;
  }
  std::sort(atoms.begin(), atoms.end(), [](const JointLRAtom& x, const JointLRAtom& y) {
    if (x.lr_exact != y.lr_exact) return x.lr_exact < y.lr_exact;
    return x.lr_approx < y.lr_approx;
  });

  // Route-noise twins (the same pair of real values reached through different
  // arithmetic) coalesce onto mass-weighted representatives, never across a
  // region boundary on either coordinate. Runs are found per coordinate:
  // first consecutive exact values within the window, then approx values
  // within each such run.
  const auto region = [](double lr) { return lr < 1.0 ? 0 : (lr == 1.0 ? 1 : 2); };
  const auto close = [](double a, double b) {
    return std::fabs(a - b) <= kValueCoalesceTolerance * std::max(a, b);
  };
  std::vector<JointLRAtom> merged;
  merged.reserve(atoms.size());
  std::size_t i = 0;
  while (i < atoms.size()) {
    std::size_t j = i + 1;
    while (j < atoms.size() &&
           close(atoms[j].lr_exact, atoms[j - 1].lr_exact) &&
           region(atoms[j].lr_exact) == region(atoms[i].lr_exact))
      ++j;
    std::sort(atoms.begin() + static_cast<std::ptrdiff_t>(i),
              atoms.begin() + static_cast<std::ptrdiff_t>(j),
              [](const JointLRAtom& x, const JointLRAtom& y) {
                return x.lr_approx < y.lr_approx;
              });
    std::size_t p = i;
    while (p < j) {
      std::size_t q = p + 1;
      while (q < j && close(atoms[q].lr_approx, atoms[q - 1].lr_approx) &&
             region(atoms[q].lr_approx) == region(atoms[p].lr_approx))
        ++q;
      if (q == p + 1) {
        merged.push_back(atoms[p]);
      } else {
        double mass = 0.0, me = 0.0, ma = 0.0;
        for (std::size_t k = p; k < q; ++k) {
          mass += atoms[k].mass;
          me += atoms[k].lr_exact * atoms[k].mass;
          ma += atoms[k].lr_approx * atoms[k].mass;
        }
        double re = round_sig(me / mass);
        double ra = round_sig(ma / mass);
        if (region(re) != region(atoms[p].lr_exact)) re = atoms[p].lr_exact;
        if (region(ra) != region(atoms[p].lr_approx)) ra = atoms[p].lr_approx;
        merged.push_back({re, ra, mass});
      }
      p = q;
    }
    i = j;
  }
  std::sort(merged.begin(), merged.end(),
            [](const JointLRAtom& x, const JointLRAtom& y) {
              if (x.lr_exact != y.lr_exact) return x.lr_exact < y.lr_exact;
              return x.lr_approx < y.lr_approx;
            });

  // Same total-mass pinning as the scalar assembler: the product step squares
  // the total, so a drifting deviation would double every level.
  if (!merged.empty()) {
    double t = 0.0;
    std::size_t largest = 0;
    for (std::size_t k = 0; k < merged.size(); ++k) {
      t += merged[k].mass;
      if (merged[k].mass > merged[largest].mass) largest = k;
    }
    const double dev = std::fabs(t - 1.0);
    if (dev > 4.0 * std::numeric_limits<double>::epsilon() && dev <= 1e-6) {
      double others = 0.0;
      for (std::size_t k = 0; k < merged.size(); ++k) {
        if (k == largest) continue;
        merged[k].mass /= t;
        others += merged[k].mass;
      }
      merged[largest].mass = 1.0 - others;
    }
  }

  JointLRDistribution out;
  out.atoms = std::move(merged);
  out.tolerance = tolerance;
  return out;
}

}  // namespace

LRDistribution marginal_exact(const JointLRDistribution& j) {
  return marginal(j, true);
}

LRDistribution marginal_approx(const JointLRDistribution& j) {
  return marginal(j, false);
}

JointLRDistribution joint_step(const JointLRDistribution& j, Branch branch,
                               const KernelId& approx) {
  if (approx.tag == KernelId::Tag::kExact)
    throw std::invalid_argument(
        "joint_step: the approximate kernel must be minsum or perturbed");

  const std::size_t n = j.size();
  std::vector<JointLRAtom> raw;
  raw.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ai = j.atoms[i];
    for (std::size_t k = i; k < n; ++k) {
      const auto& ak = j.atoms[k];
      double e, a;
      if (branch == Branch::kMinus) {
        e = minus_exact_image(ai.lr_exact, ak.lr_exact);
        a = approx.tag == KernelId::Tag::kMinsum
                ? minus_minsum_image(ai.lr_approx, ak.lr_approx)
                : minus_perturbed_image(ai.lr_approx, ak.lr_approx, approx.gamma);
      } else {
        e = ai.lr_exact * ak.lr_exact;
        a = ai.lr_approx * ak.lr_approx;
      }
      const double mass = (i == k ? 1.0 : 2.0) * ai.mass * ak.mass;
      raw.push_back({e, a, mass});
    }
  }
  return merge_joint(std::move(raw), j.tolerance);
}

namespace {

int region_of(double lr) { return lr < 1.0 ? 0 : (lr == 1.0 ? 1 : 2); }

}  // namespace

SignAgreementReport sign_agreement(const JointLRDistribution& j) {
  SignAgreementReport rep;
  for (const auto& a : j.atoms) {
    const int re = region_of(a.lr_exact);
    const int ra = region_of(a.lr_approx);
    rep.per_region_mass[static_cast<std::size_t>(re)][static_cast<std::size_t>(ra)] +=
        a.mass;
    if (re != ra) rep.mismatch_mass += a.mass;
    if (ra == 1 && re != 1) rep.trapped_mass += a.mass;
  }
  return rep;
}

JointLRDistribution quantize_joint(const JointLRDistribution& j,
                                   const QuantizationBudget& b) {
  if (b.mode == QuantizationBudget::Mode::kNone ||
      static_cast<int>(j.size()) <= b.max_atoms)
    return j;

  // Exact-coordinate grid cells crossed with the approximate coordinate's
  // region. Both marginals keep their region masses exactly; the atom count
  // only approximately respects the budget (it is bounded by three times the
  // exact-side cell count plus specials).
  const int n_cells = std::max(1, b.max_atoms / 6);
  double xmin = 0.0, xmax = 0.0;
  bool first = true;
  for (const auto& a : j.atoms) {
    if (a.lr_exact == 0.0 || a.lr_exact == 1.0) continue;
    const double x = std::fabs(std::log(a.lr_exact));
    if (first) {
      xmin = xmax = x;
      first = false;
    } else {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
  }
  const double width = (xmax - xmin) / n_cells;

  struct Bucket {
    double mass = 0.0;
    double moment_e = 0.0;
    double moment_a = 0.0;
  };
  // key: exact region (0..2 with 0/1 special-cased), exact cell, approx region
  std::unordered_map<std::uint64_t, Bucket> buckets;
  const auto key_of = [&](const JointLRAtom& a) -> std::uint64_t {
    std::uint64_t cell;
    if (a.lr_exact == 0.0)
      cell = 1u << 20;
    else if (a.lr_exact == 1.0)
      cell = 2u << 20;
    else if (width <= 0.0)
      cell = 0;
    else
      cell = static_cast<std::uint64_t>(std::clamp(
          static_cast<int>((std::fabs(std::log(a.lr_exact)) - xmin) / width), 0,
          n_cells - 1));
    const std::uint64_t side = a.lr_exact < 1.0 ? 0 : (a.lr_exact == 1.0 ? 1 : 2);
    const std::uint64_t ra = static_cast<std::uint64_t>(region_of(a.lr_approx));
    return (cell << 4) | (side << 2) | ra;
  };
  for (const auto& a : j.atoms) {
    auto& bkt = buckets[key_of(a)];
    bkt.mass += a.mass;
    bkt.moment_e += a.lr_exact * a.mass;
    bkt.moment_a += a.lr_approx * a.mass;
  }

  std::vector<JointLRAtom> atoms;
  atoms.reserve(buckets.size());
  for (const auto& [key, bkt] : buckets) {
    const std::uint64_t side = (key >> 2) & 3u;
    const std::uint64_t ra = key & 3u;
    double e = bkt.moment_e / bkt.mass;
    double a = bkt.moment_a / bkt.mass;
    if (side == 1) e = 1.0;
    e = round_sig(e);
    a = round_sig(a);
    // Representatives must stay inside their regions.
    if (side == 0 && e >= 1.0) e = std::nextafter(1.0, 0.0);
    if (side == 2 && e <= 1.0) e = std::nextafter(1.0, 2.0);
    if (ra == 1) a = 1.0;
    if (ra == 0 && a >= 1.0) a = std::nextafter(1.0, 0.0);
    if (ra == 2 && a <= 1.0) a = std::nextafter(1.0, 2.0);
    atoms.push_back({e, a, bkt.mass});
  }
  std::sort(atoms.begin(), atoms.end(), [](const JointLRAtom& x, const JointLRAtom& y) {
    if (x.lr_exact != y.lr_exact) return x.lr_exact < y.lr_exact;
    return x.lr_approx < y.lr_approx;
  });

  JointLRDistribution out;
  out.atoms = std::move(atoms);
  out.tolerance = j.tolerance;
  return out;
}

namespace {

struct JointContext {
  const KernelId* approx;
  const QuantizationBudget* budget;
  TrappedTrajectory* out;
  int depth;
  int spawn_levels;
};

JointNodeReport make_joint_report(const JointLRDistribution& j, int level,
                                  std::uint32_t index, bool quantized) {
  JointNodeReport rep;
  rep.path = PathIndex{level, index};
  rep.agreement = sign_agreement(j);
  const RegionMasses re = region_masses(marginal_exact(j));
  const RegionMasses ra = region_masses(marginal_approx(j));
  rep.p_eq_exact = re.eq;
  rep.p_eq_approx = ra.eq;
  rep.q_exact = re.less - re.greater;
  rep.q_approx = ra.less - ra.greater;
  rep.atom_count = static_cast<int>(j.size());
  rep.quantized = quantized;
  return rep;
}

void joint_node(const JointContext& ctx, const JointLRDistribution& j, int level,
                std::uint32_t index, bool quantized) {
  ctx.out->levels[static_cast<std::size_t>(level)][index] =
      make_joint_report(j, level, index, quantized);
  if (level == ctx.depth) return;

  const auto child = [&](Branch b) {
    JointLRDistribution c = joint_step(j, b, *ctx.approx);
    const std::size_t before = c.size();
    JointLRDistribution q = quantize_joint(c, *ctx.budget);
    const bool changed = q.size() != before;
    return std::make_pair(std::move(q), changed);
  };

  if (level < ctx.spawn_levels) {
    auto minus_task = std::async(std::launch::async, [&] {
      auto [cm, qm] = child(Branch::kMinus);
      joint_node(ctx, cm, level + 1, index << 1, qm);
    });
    auto [cp, qp] = child(Branch::kPlus);
    joint_node(ctx, cp, level + 1, (index << 1) | 1u, qp);
    minus_task.get();
  } else {
    auto [cm, qm] = child(Branch::kMinus);
    joint_node(ctx, cm, level + 1, index << 1, qm);
    auto [cp, qp] = child(Branch::kPlus);
    joint_node(ctx, cp, level + 1, (index << 1) | 1u, qp);
  }
}

}  // namespace

TrappedTrajectory trapped_mass_trajectory(const LRDistribution& root, int depth,
                                          const KernelId& approx,
                                          const QuantizationBudget& budget,
                                          int threads) {
  if (depth < 0) throw std::domain_error("trapped_mass_trajectory: negative depth");
  TrappedTrajectory out;
  out.depth = depth;
  out.levels.resize(static_cast<std::size_t>(depth) + 1);
  for (int k = 0; k <= depth; ++k)
    out.levels[static_cast<std::size_t>(k)].resize(1ull << k);

  int spawn_levels = 0;
  while ((1 << spawn_levels) < std::max(1, threads) && spawn_levels < depth)
    ++spawn_levels;

  JointContext ctx{&approx, &budget, &out, depth, spawn_levels};
  joint_node(ctx, lift(root), 0, 0, false);

  out.summary.resize(static_cast<std::size_t>(depth) + 1);
  for (int k = 0; k <= depth; ++k) {
    auto& s = out.summary[static_cast<std::size_t>(k)];
    s.level = k;
    const auto& recs = out.levels[static_cast<std::size_t>(k)];
    for (const auto& r : recs) {
      s.max_trapped = std::max(s.max_trapped, r.agreement.trapped_mass);
      s.mean_trapped += r.agreement.trapped_mass;
      s.max_mismatch = std::max(s.max_mismatch, r.agreement.mismatch_mass);
      s.mean_mismatch += r.agreement.mismatch_mass;
    }
    s.mean_trapped /= static_cast<double>(recs.size());
    s.mean_mismatch /= static_cast<double>(recs.size());
  }
  return out;
}

}  // namespace polarlr
