#include "polarlr/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "polarlr/rng.hpp"

namespace polarlr {

double Rng::next_normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = next_double();
  while (u1 <= 0.0) u1 = next_double();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

void validate_transition_matrix(const TransitionMatrix& w) {
  if (w.rows.empty())
    throw std::invalid_argument("TransitionMatrix: no outputs");
  double sum0 = 0.0, sum1 = 0.0;
  for (std::size_t i = 0; i < w.rows.size(); ++i) {
    const auto& [w0, w1] = w.rows[i];
    if (w0 < 0.0 || w1 < 0.0)
      throw std::invalid_argument("TransitionMatrix: negative probability");
    if (w0 == 0.0 && w1 == 0.0) {
      std::ostringstream os;
      os << "TransitionMatrix: degenerate output row " << i;
      throw std::invalid_argument(os.str());
    }
    sum0 += w0;
    sum1 += w1;
  }
  if (std::fabs(sum0 - 1.0) > w.tolerance || std::fabs(sum1 - 1.0) > w.tolerance) {
    std::ostringstream os;
    os << "TransitionMatrix: columns sum to (" << sum0 << ", " << sum1
       << "), expected 1";
    throw std::invalid_argument(os.str());
  }

  // Greedy involution search: each row must find a partner (possibly itself)
  // whose entries are its own swapped.
  const std::size_t n = w.rows.size();
  std::vector<bool> used(n, false);
  double worst = 0.0;
  std::size_t worst_a = 0, worst_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    double best = -1.0;
    std::size_t best_j = i;
    for (std::size_t j = i; j < n; ++j) {
      if (used[j] && j != i) continue;
      const double dev = std::max(std::fabs(w.rows[j].first - w.rows[i].second),
                                  std::fabs(w.rows[j].second - w.rows[i].first));
      if (best < 0.0 || dev < best) {
        best = dev;
        best_j = j;
      }
    }
    used[i] = true;
    used[best_j] = true;
    if (best > worst) {
      worst = best;
      worst_a = i;
      worst_b = best_j;
    }
  }
  if (worst > w.tolerance) {
    std::ostringstream os;
    os << "TransitionMatrix: not symmetric, worst row pair (" << worst_a << ", "
       << worst_b << ") deviates by " << worst;
    throw std::invalid_argument(os.str());
  }
}

LRDistribution make_bsc(double p) {
  if (!(p >= 0.0 && p <= 0.5))
    throw std::domain_error("make_bsc: p must lie in [0, 0.5]");
  std::vector<LRAtom> atoms;
  if (p == 0.0) {
    atoms.push_back({0.0, 1.0});
  } else {
    atoms.push_back({p / (1.0 - p), 1.0 - p});
    atoms.push_back({(1.0 - p) / p, p});
  }
  return assemble_symmetric(std::move(atoms), kDefaultTolerance);
}

LRDistribution make_bec(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::domain_error("make_bec: eps must lie in [0, 1]");
  std::vector<LRAtom> atoms;
  if (eps < 1.0) atoms.push_back({0.0, 1.0 - eps});
  if (eps > 0.0) atoms.push_back({1.0, eps});
  return assemble_symmetric(std::move(atoms), kDefaultTolerance);
}

namespace {

// P[za < Z <= zb] for Z ~ N(0, 1), от whichever tail keeps full relative
// precision for far-out bins.
double normal_slice(double za, double zb) {
  const double rt2 = std::sqrt(2.0);
  if (za + zb >= 0.0)
    return 0.5 * (std::erfc(za / rt2) - std::erfc(zb / rt2));
  return 0.5 * (std::erfc(-zb / rt2) - std::erfc(-za / rt2));
}

}  // namespace

LRDistribution make_awgn_quantized(double sigma, int levels) {
  if (!(sigma > 0.0)) throw std::domain_error("make_awgn_quantized: sigma <= 0");
  if (levels < 1) throw std::domain_error("make_awgn_quantized: levels < 1");

  // All-zeros input sends +1; with t = 2y/sigma^2 the log ratio
  // log(W(y|0)/W(y|1)), t ~ N(mu, s^2), mu = 2/sigma^2, s = 2/sigma, and the
  // likelihood ratio is exp(-t). The axis is cut at |t| <= T with the tails
  // folded into the outer bins.
  const double mu = 2.0 / (sigma * sigma);
  const double s = 2.0 / sigma;
  const double T = std::max(mu + 6.0 * s, 8.0 * s);

  // E[exp(-t); a < t <= b] = e^{-mu + s^2/2} P[a < N(mu - s^2, s^2) <= b]
  const double shift = std::exp(-mu + 0.5 * s * s);
  const double zmu = mu - s * s;
  const auto exp_slice = [&](double a, double b) {
    return shift * normal_slice((a - zmu) / s, (b - zmu) / s);
  };

  std::vector<LRAtom> atoms;
  atoms.reserve(2 * static_cast<std::size_t>(levels));
  const double step = T / levels;
  for (int k = 0; k < levels; ++k) {
    const double a = k * step;
    const double b = (k + 1 == levels) ? std::numeric_limits<double>::infinity()
                                       : (k + 1) * step;
    const double mass = normal_slice((a - mu) / s, (b - mu) / s);
    if (mass <= 0.0) continue;
    // Mass-weighted mean ratio of the bin; a bin so deep that the mean
    // underflows holds certainty beyond double resolution, i.e. ratio 0.
    const double mean_lr = std::min(exp_slice(a, b) / mass, 1.0);
    atoms.push_back({mean_lr > 0.0 ? mean_lr : 0.0, mass});
    if (mean_lr > 0.0) {
      // mirror bin (-b, -a]
      atoms.push_back({1.0 / mean_lr, mean_lr * mass});
    }
  }
  return assemble_symmetric(std::move(atoms), kDefaultTolerance);
}

LRDistribution from_transition_matrix(const TransitionMatrix& w) {
  validate_transition_matrix(w);
  std::vector<LRAtom> atoms;
  atoms.reserve(w.rows.size());
  for (const auto& [w0, w1] : w.rows) {
    if (w0 == 0.0) continue;  // unreachable under the all-zeros input
    atoms.push_back({w1 / w0, w0});
  }
  // The involution check above established symmetry; the below-1 half of the
  // grouped outputs determines the rest.
  return assemble_symmetric(std::move(atoms), w.tolerance);
}

TransitionMatrix render_transition_matrix(const LRDistribution& d) {
  TransitionMatrix w;
  w.tolerance = std::max(d.tolerance, kDefaultTolerance);
  for (const auto& a : d.atoms) {
    w.rows.emplace_back(a.mass, a.lr * a.mass);
    if (a.lr == 0.0) w.rows.emplace_back(0.0, a.mass);
  }
  return w;
}

LRDistribution ChannelSpec::to_distribution() const {
  switch (type) {
    case Type::kBsc:
      return make_bsc(p);
    case Type::kBec:
      return make_bec(eps);
    case Type::kAwgn:
      return make_awgn_quantized(sigma, levels);
    case Type::kCustom:
      return from_transition_matrix(rows);
    case Type::kLr: {
      LRDistribution raw;
      raw.atoms = atoms;
      raw.tolerance = kDefaultTolerance;
      LRDistribution d = canonicalize(raw);
      validate_symmetric(d);
      return d;
    }
  }
  throw std::logic_error("ChannelSpec: unknown type");
}

LRDistribution random_symmetric_distribution(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x5ca1ab1e));
  const int n_less = 1 + static_cast<int>(rng.next_below(4));
  const bool with_one = rng.next_bool();
  const bool with_zero = rng.next_below(10) < 3;

  std::vector<LRAtom> atoms;
  double total = 0.0;
  for (int i = 0; i < n_less; ++i) {
    // Log-uniform in (e^-8, e^-0.05): keeps values clear of both 0 and 1.
    const double lr = std::exp(-rng.uniform(0.05, 8.0));
    const double m = rng.uniform(0.05, 1.0);
    atoms.push_back({lr, m});
    atoms.push_back({1.0 / lr, lr * m});
    total += m * (1.0 + lr);
  }
  if (with_one) {
    const double m = rng.uniform(0.05, 1.0);
    atoms.push_back({1.0, m});
    total += m;
  }
  if (with_zero) {
    const double m = rng.uniform(0.05, 1.0);
    atoms.push_back({0.0, m});
    total += m;
  }
  for (auto& a : atoms) a.mass /= total;
  return assemble_symmetric(std::move(atoms), kDefaultTolerance);
}

TransitionMatrix random_symmetric_matrix(std::uint64_t seed, int max_outputs) {
  if (max_outputs < 2)
    throw std::domain_error("random_symmetric_matrix: need at least 2 outputs");
  Rng rng(mix_seed(seed, 0x7ea15eed));
  const int max_pairs = max_outputs / 2;
  const int n_pairs = 1 + static_cast<int>(rng.next_below(
                              static_cast<std::uint64_t>(max_pairs)));
  const bool self_row = (2 * n_pairs + 1 <= max_outputs) && rng.next_bool();

  TransitionMatrix w;
  double col = 0.0;
  for (int i = 0; i < n_pairs; ++i) {
    const double a = rng.uniform(0.05, 1.0);
    const double b = rng.uniform(0.0, a);  // w0 >= w1 keeps most mass below 1
    w.rows.emplace_back(a, b);
    w.rows.emplace_back(b, a);
    col += a + b;
  }
  if (self_row) {
    const double c = rng.uniform(0.05, 1.0);
    w.rows.emplace_back(c, c);
    col += c;
  }
  for (auto& [w0, w1] : w.rows) {
    w0 /= col;
    w1 /= col;
  }
  return w;
}

}  // namespace polarlr
