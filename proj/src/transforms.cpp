#include "polarlr/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "polarlr/simd/kernels.hpp"

namespace polarlr {

KernelId KernelId::perturbed(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::domain_error("KernelId: perturbation gamma must lie in (0, 1]");
  return {Tag::kPerturbed, gamma};
}

std::string to_string(const KernelId& k) {
  switch (k.tag) {
    case KernelId::Tag::kExact:
      return "exact";
    case KernelId::Tag::kMinsum:
      return "minsum";
    case KernelId::Tag::kPerturbed: {
      std::ostringstream os;
      os.precision(17);
      os << "perturbed:" << k.gamma;
      return os.str();
    }
  }
  return "exact";
}

KernelId parse_kernel(const std::string& text) {
  if (text == "exact") return KernelId::exact();
  if (text == "minsum") return KernelId::minsum();
  if (text.rfind("perturbed:", 0) == 0) {
    std::size_t pos = 0;
    const std::string arg = text.substr(10);
    double gamma = 0.0;
    try {
      gamma = std::stod(arg, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("parse_kernel: bad gamma in '" + text + "'");
    }
    if (pos != arg.size())
      throw std::invalid_argument("parse_kernel: bad gamma in '" + text + "'");
    return KernelId::perturbed(gamma);
  }
  throw std::invalid_argument(
      "parse_kernel: expected exact, minsum or perturbed:<gamma>, got '" + text +
      "'");
}

QuantizationBudget QuantizationBudget::grid(int max_atoms) {
  if (max_atoms < 3)
    throw std::domain_error("QuantizationBudget: grid budget needs max_atoms >= 3");
  return {Mode::kGrid, max_atoms};
}

namespace {

struct PairArrays {
  std::vector<double> lr;
  std::vector<double> mass;
};

PairArrays split_columns(const LRDistribution& d) {
  PairArrays a;
  a.lr.reserve(d.size());
  a.mass.reserve(d.size());
  for (const auto& atom : d.atoms) {
    a.lr.push_back(atom.lr);
    a.mass.push_back(atom.mass);
  }
  return a;
}

// Shared unordered-pair enumeration: images for (i, j >= i) with mass
// m_i * m_j doubled off the diagonal.
template <typename ImageRow>
std::vector<LRAtom> enumerate_pairs(const LRDistribution& d, ImageRow&& row) {
  const auto cols = split_columns(d);
  const std::size_t n = d.size();
  std::vector<LRAtom> raw;
  raw.reserve(n * (n + 1) / 2);
  std::vector<double> img(n), w(n);
  const auto& kern = simd::active_kernels();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cnt = n - i;
    row(i, cols, img.data(), cnt);
    kern.scaled_mul(2.0 * cols.mass[i], cols.mass.data() + i, w.data(), cnt);
    w[0] = cols.mass[i] * cols.mass[i];
    for (std::size_t j = 0; j < cnt; ++j) raw.push_back({img[j], w[j]});
  }
  return raw;
}

}  // namespace

LRDistribution minus_exact(const LRDistribution& d) {
  const auto& kern = simd::active_kernels();
  auto raw = enumerate_pairs(
      d, [&](std::size_t i, const PairArrays& cols, double* img, std::size_t cnt) {
        kern.check_combine_lr(cols.lr[i], cols.lr.data() + i, img, cnt);
      });
  return d.symmetric ? assemble_symmetric(std::move(raw), d.tolerance)
                     : assemble_plain(std::move(raw), d.tolerance);
}

LRDistribution plus_exact(const LRDistribution& d) {
  const auto& kern = simd::active_kernels();
  auto raw = enumerate_pairs(
      d, [&](std::size_t i, const PairArrays& cols, double* img, std::size_t cnt) {
        kern.scaled_mul(cols.lr[i], cols.lr.data() + i, img, cnt);
      });
  return d.symmetric ? assemble_symmetric(std::move(raw), d.tolerance)
                     : assemble_plain(std::move(raw), d.tolerance);
}

LRDistribution minus_minsum(const LRDistribution& d) {
  const auto& kern = simd::active_kernels();
  const auto cols = split_columns(d);
  const std::size_t n = d.size();
  std::vector<double> inv(n);
  kern.reciprocal(cols.lr.data(), inv.data(), n);
  auto raw = enumerate_pairs(
      d, [&](std::size_t i, const PairArrays& c, double* img, std::size_t cnt) {
        kern.minsum_image_lr(c.lr[i], inv[i], c.lr.data() + i, inv.data() + i,
                             img, cnt);
      });
  // The min-sum values are not calibrated posterior ratios, so their law is
  // not mass-symmetric; observed side masses are kept as they are.
  return assemble_plain(std::move(raw), d.tolerance);
}

double minus_exact_image(double l1, double l2) {
  return (l1 + l2) / (1.0 + l1 * l2);
}

double minus_minsum_image(double l1, double l2) {
  double out;
  const double inv1 = 1.0 / l1;
  const double inv2 = 1.0 / l2;
  simd::scalar_kernels().minsum_image_lr(l1, inv1, &l2, &inv2, &out, 1);
  return out;
}

double minus_perturbed_image(double l1, double l2, double gamma) {
  const double exact = minus_exact_image(l1, l2);
  if (gamma == 1.0) return exact;
  const double ms = minus_minsum_image(l1, l2);
  if (exact == ms) return exact;  // covers 0, 1 and the erasure-like cases
  return std::exp((1.0 - gamma) * std::log(ms) + gamma * std::log(exact));
}

LRDistribution minus_perturbed(const LRDistribution& d, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::domain_error("minus_perturbed: gamma must lie in (0, 1]");
  if (gamma == 1.0) return minus_exact(d);  // correction fully restored

  const std::size_t n = d.size();
  std::vector<LRAtom> raw;
  raw.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double l1 = d.atoms[i].lr;
    for (std::size_t j = i; j < n; ++j) {
      const double l2 = d.atoms[j].lr;
      const double img = minus_perturbed_image(l1, l2, gamma);
      const double mass = (i == j ? 1.0 : 2.0) * d.atoms[i].mass * d.atoms[j].mass;
      raw.push_back({img, mass});
    }
  }
  return assemble_plain(std::move(raw), d.tolerance);
}

LRDistribution apply_minus(const LRDistribution& d, const KernelId& kernel) {
  switch (kernel.tag) {
    case KernelId::Tag::kExact:
      return minus_exact(d);
    case KernelId::Tag::kMinsum:
      return minus_minsum(d);
    case KernelId::Tag::kPerturbed:
      return minus_perturbed(d, kernel.gamma);
  }
  return minus_exact(d);
}

LRDistribution apply_plus(const LRDistribution& d, const KernelId& kernel) {
  // The approximate recursion keeps the exact product on the variable side.
  (void)kernel;
  return plus_exact(d);
}

namespace {

struct GridCell {
  double mass = 0.0;
  double moment = 0.0;  // sum of lr * mass
  double lo = 0.0, hi = 0.0;
  bool seen = false;
};

// Magnitude grid over one group of atoms from the same region.
class MagnitudeGrid {
 public:
  MagnitudeGrid(double xmin, double xmax, int n_cells)
      : xmin_(xmin), width_((xmax - xmin) / n_cells), n_cells_(n_cells) {}

  int cell_of(double lr) const {
    if (width_ <= 0.0) return 0;
    const int c =
        static_cast<int>((std::fabs(std::log(lr)) - xmin_) / width_);
    return std::clamp(c, 0, n_cells_ - 1);
  }

 private:
  double xmin_;
  double width_;
  int n_cells_;
};

}  // namespace

QuantizeReport quantize_with_report(const LRDistribution& d,
                                    const QuantizationBudget& b) {
  QuantizeReport report;
  report.result = d;
  if (b.mode == QuantizationBudget::Mode::kNone ||
      static_cast<int>(d.size()) <= b.max_atoms)
    return report;

  double mass_zero = 0.0, mass_one = 0.0;
  std::vector<LRAtom> less, greater;
  for (const auto& a : d.atoms) {
    if (a.lr == 0.0)
      mass_zero += a.mass;
    else if (a.lr == 1.0)
      mass_one += a.mass;
    else if (a.lr < 1.0)
      less.push_back(a);
    else
      greater.push_back(a);
  }
  const int specials = (mass_zero > 0.0 ? 1 : 0) + (mass_one > 0.0 ? 1 : 0);
  const bool both_sides = !less.empty() && !greater.empty();
  const int needed =
      specials + (less.empty() ? 0 : 1) + (greater.empty() ? 0 : 1);
  if (b.max_atoms < needed) {
    std::ostringstream os;
    os << "quantize: budget of " << b.max_atoms << " atoms cannot cover "
       << needed << " nonempty regions";
    throw std::invalid_argument(os.str());
  }
  const int n_cells = std::max(
      1, both_sides ? (b.max_atoms - specials) / 2 : b.max_atoms - specials);

  double xmin = 0.0, xmax = 0.0;
  bool first = true;
  for (const auto* side : {&less, &greater})
    for (const auto& a : *side) {
      const double x = std::fabs(std::log(a.lr));
      if (first) {
        xmin = xmax = x;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
      }
    }
  const MagnitudeGrid grid(xmin, xmax, n_cells);

  // Merges one side onto the grid; accumulates the metric-movement bounds,
  // with the mirrored contribution included when the mirror of this side is
  // synthesized rather than merged itself.
  const auto merge_side = [&](const std::vector<LRAtom>& side, bool below_one,
                              bool bound_mirror, std::vector<LRAtom>& out) {
    std::vector<GridCell> cells(static_cast<std::size_t>(n_cells));
    for (const auto& a : side) {
      auto& c = cells[static_cast<std::size_t>(grid.cell_of(a.lr))];
      c.mass += a.mass;
      c.moment += a.lr * a.mass;
      c.lo = c.seen ? std::min(c.lo, a.lr) : a.lr;
      c.hi = c.seen ? std::max(c.hi, a.lr) : a.lr;
      c.seen = true;
    }
    std::vector<double> reps(cells.size(), -1.0);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const auto& c = cells[k];
      if (!c.seen) continue;
      double rep = round_sig(c.moment / c.mass);
      // The snap window around 1 must not pull a representative across it.
      if (below_one && rep >= 1.0) rep = c.hi;
      if (!below_one && rep <= 1.0) rep = c.lo;
      reps[k] = rep;
      out.push_back({rep, c.mass});
    }
    for (const auto& a : side) {
      const double rep = reps[static_cast<std::size_t>(grid.cell_of(a.lr))];
      report.bound_i +=
          a.mass * std::fabs(std::log2(1.0 + a.lr) - std::log2(1.0 + rep));
      report.bound_z += a.mass * std::fabs(std::sqrt(a.lr) - std::sqrt(rep));
      if (bound_mirror) {
        report.bound_i += a.lr * a.mass *
                          std::fabs(std::log2(1.0 + 1.0 / a.lr) -
                                    std::log2(1.0 + 1.0 / rep));
        report.bound_z += a.lr * a.mass *
                          std::fabs(std::sqrt(1.0 / a.lr) - std::sqrt(1.0 / rep));
      }
    }
  };

  std::vector<LRAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(b.max_atoms));
  if (mass_zero > 0.0) atoms.push_back({0.0, mass_zero});

  if (d.symmetric) {
    // Merge the below-1 half only and synthesize the mirror, so the pair
    // relation survives quantization by construction.
    std::vector<LRAtom> merged_less;
    merge_side(less, true, /*bound_mirror=*/true, merged_less);
    for (const auto& a : merged_less) atoms.push_back(a);
    if (mass_one > 0.0) atoms.push_back({1.0, mass_one});
    for (std::size_t k = merged_less.size(); k-- > 0;) {
      const auto& a = merged_less[k];
      const double mass = a.lr * a.mass;
      if (mass >= kMassPruneFloor) atoms.push_back({round_sig(1.0 / a.lr), mass});
    }
  } else {
    merge_side(less, true, /*bound_mirror=*/false, atoms);
    if (mass_one > 0.0) atoms.push_back({1.0, mass_one});
    merge_side(greater, false, /*bound_mirror=*/false, atoms);
  }

  std::sort(atoms.begin(), atoms.end(),
            [](const LRAtom& a, const LRAtom& b2) { return a.lr < b2.lr; });
  std::vector<LRAtom> merged;
  merged.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().lr == a.lr)
      merged.back().mass += a.mass;
    else
      merged.push_back(a);
  }

  LRDistribution out;
  out.atoms = std::move(merged);
  out.tolerance = d.tolerance;
  out.symmetric = d.symmetric;
  report.result = std::move(out);
  report.changed = true;
  return report;
}

LRDistribution quantize(const LRDistribution& d, const QuantizationBudget& b) {
  return quantize_with_report(d, b).result;
}

TransitionMatrix oracle_combine(const TransitionMatrix& w, Branch branch) {
  validate_transition_matrix(w);
  const std::size_t n = w.rows.size();
  TransitionMatrix out;
  out.tolerance = std::max(w.tolerance, 1e-12 * static_cast<double>(n * n));
  if (branch == Branch::kMinus) {
    out.rows.reserve(n * n);
    for (std::size_t y1 = 0; y1 < n; ++y1)
      for (std::size_t y2 = 0; y2 < n; ++y2) {
        const double w0 = 0.5 * (w.rows[y1].first * w.rows[y2].first +
                                 w.rows[y1].second * w.rows[y2].second);
        const double w1 = 0.5 * (w.rows[y1].second * w.rows[y2].first +
                                 w.rows[y1].first * w.rows[y2].second);
        out.rows.emplace_back(w0, w1);
      }
  } else {
    out.rows.reserve(2 * n * n);
    for (std::size_t y1 = 0; y1 < n; ++y1)
      for (std::size_t y2 = 0; y2 < n; ++y2)
        for (int u1 = 0; u1 < 2; ++u1) {
          const double wy1_u1 = u1 ? w.rows[y1].second : w.rows[y1].first;
          const double wy1_u1x = u1 ? w.rows[y1].first : w.rows[y1].second;
          const double w0 = 0.5 * wy1_u1 * w.rows[y2].first;    // u2 = 0
          const double w1 = 0.5 * wy1_u1x * w.rows[y2].second;  // u2 = 1
          out.rows.emplace_back(w0, w1);
        }
  }
  // Degenerate (0, 0) outputs of the product alphabet carry no information;
  // drop them so the result satisfies the matrix invariants.
  std::erase_if(out.rows, [](const std::pair<double, double>& r) {
    return r.first == 0.0 && r.second == 0.0;
  });
  return out;
}

LRDistribution oracle_combine_lr(const TransitionMatrix& w, Branch branch) {
  return from_transition_matrix(oracle_combine(w, branch));
}

}  // namespace polarlr
