#include "polarlr/polarization.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "polarlr/rng.hpp"

namespace polarlr {

std::string PathIndex::bit_string() const {
  std::string s;
  s.reserve(static_cast<std::size_t>(depth));
  for (int k = 0; k < depth; ++k)
    s.push_back(bit(k) == Branch::kPlus ? '1' : '0');
  return s;
}

namespace {

void check_standing_assumption(const ProbPartition& p) {
  if (p.p_greater > p.p_less + 1e-12) {
    std::ostringstream os;
    os << "verify_propositions: parent violates P[L>1] <= P[L<1] (" << p.p_greater
       << " > " << p.p_less << ")";
    throw std::invalid_argument(os.str());
  }
}

struct MarginTracker {
  double worst = std::numeric_limits<double>::infinity();
  std::vector<std::string>* details;
  const char* prop;

  void check(const char* name, double margin, double tol) {
    // Normalize so that every check passes iff margin >= -1e-10 on the
    // common scale reported in the margin fields.
    const double normalized = margin - tol + kPropositionTolerance;
    worst = std::min(worst, normalized);
    if (margin < -tol && details) {
      std::ostringstream os;
      os.precision(17);
      os << prop << ": " << name << " violated by " << -margin;
      details->push_back(os.str());
    }
  }
  bool ok() const { return worst >= -kPropositionTolerance; }
};

}  // namespace

PropositionReport verify_propositions(const LRDistribution& parent,
                                      const KernelId& kernel) {
  const ProbPartition p = prob_partition(parent);
  check_standing_assumption(p);

  const LRDistribution dm = apply_minus(parent, kernel);
  const LRDistribution dp = apply_plus(parent, kernel);
  const ProbPartition pm = prob_partition(dm);
  const ProbPartition pp = prob_partition(dp);

  PropositionReport rep;

  MarginTracker t1{.details = &rep.details, .prop = "prop1"};
  t1.check("P[plus >=~ 1] <= P[parent >=~ 1]", p.p_geq_half - pp.p_geq_half,
           kPropositionTolerance);
  t1.check("P[parent >=~ 1] <= P[minus >=~ 1]", pm.p_geq_half - p.p_geq_half,
           kPropositionTolerance);
  t1.check("P[minus <=~ 1] <= P[parent <=~ 1]", p.p_leq_half - pm.p_leq_half,
           kPropositionTolerance);
  t1.check("P[parent <=~ 1] <= P[plus <=~ 1]", pp.p_leq_half - p.p_leq_half,
           kPropositionTolerance);
  rep.prop1_ok = t1.ok();
  rep.margin1 = t1.worst;

  MarginTracker t2{.details = &rep.details, .prop = "prop2"};
  t2.check("P[minus > 1] <= P[minus < 1]", pm.p_less - pm.p_greater,
           kPropositionTolerance);
  t2.check("P[plus > 1] <= P[plus < 1]", pp.p_less - pp.p_greater,
           kPropositionTolerance);
  rep.prop2_ok = t2.ok();
  rep.margin2 = t2.worst;

  MarginTracker t3{.details = &rep.details, .prop = "prop3"};
  t3.check("sum P[child >=~ 1] >= 2 P[parent >=~ 1]",
           pm.p_geq_half + pp.p_geq_half - 2.0 * p.p_geq_half,
           kPropositionTolerance);
  t3.check("sum P[child <=~ 1] <= 2 P[parent <=~ 1]",
           2.0 * p.p_leq_half - (pm.p_leq_half + pp.p_leq_half),
           kPropositionTolerance);
  t3.check("sum P[child = 1] >= 2 P[parent = 1]",
           pm.p_eq + pp.p_eq - 2.0 * p.p_eq, kPropositionTolerance);
  t3.check("sum P[child < 1] <= 2 P[parent < 1]",
           2.0 * p.p_less - (pm.p_less + pp.p_less), kPropositionTolerance);
  t3.check("sum P[child >= 1] >= 2 P[parent >= 1]",
           (pm.p_eq + pm.p_greater) + (pp.p_eq + pp.p_greater) -
               2.0 * (p.p_eq + p.p_greater),
           kPropositionTolerance);
  rep.prop3_ok = t3.ok();
  rep.margin3 = t3.worst;

  const double q = p.p_less - p.p_greater;
  const double qm = pm.p_less - pm.p_greater;
  const double qp = pp.p_less - pp.p_greater;
  MarginTracker t4{.details = &rep.details, .prop = "prop4"};
  t4.check("Q_minus = Q^2", -std::fabs(qm - q * q), kQSquareTolerance);
  t4.check("Q_plus >= Q", qp - q, kPropositionTolerance);
  t4.check("Q_plus <= 2Q - Q^2", (2.0 * q - q * q) - qp, kPropositionTolerance);
  rep.prop4_ok = t4.ok();
  rep.margin4 = t4.worst;

  return rep;
}

namespace {

struct EvolveContext {
  const EvolveOptions* options;
  TreeResult* out;
  int depth;
  int spawn_levels;
};

SyntheticChannelRecord make_record(const LRDistribution& d, int level,
                                   std::uint32_t index, bool quantized) {
  SyntheticChannelRecord rec;
  rec.path = PathIndex{level, index};
  rec.metrics = channel_metrics(d);
  rec.atom_count = static_cast<int>(d.size());
  rec.quantized = quantized;
  return rec;
}

void evolve_node(const EvolveContext& ctx, const LRDistribution& d, int level,
                 std::uint32_t index, bool quantized) {
  ctx.out->levels[static_cast<std::size_t>(level)][index] =
      make_record(d, level, index, quantized);
  if (level == ctx.depth) {
    if (ctx.options->keep_leaf_distributions)
      ctx.out->leaf_distributions[index] = d;
    return;
  }

  const auto child = [&](Branch b) {
    LRDistribution c = b == Branch::kMinus
                           ? apply_minus(d, ctx.options->kernel)
                           : apply_plus(d, ctx.options->kernel);
    QuantizeReport q = quantize_with_report(c, ctx.options->budget);
    return std::make_pair(std::move(q.result), q.changed);
  };

  if (level < ctx.spawn_levels) {
    auto minus_task = std::async(std::launch::async, [&] {
      auto [cm, qm] = child(Branch::kMinus);
      evolve_node(ctx, cm, level + 1, index << 1, qm);
    });
    auto [cp, qp] = child(Branch::kPlus);
    evolve_node(ctx, cp, level + 1, (index << 1) | 1u, qp);
    minus_task.get();
  } else {
    auto [cm, qm] = child(Branch::kMinus);
    evolve_node(ctx, cm, level + 1, index << 1, qm);
    auto [cp, qp] = child(Branch::kPlus);
    evolve_node(ctx, cp, level + 1, (index << 1) | 1u, qp);
  }
}

}  // namespace

TreeResult evolve_tree(const LRDistribution& root, int depth,
                       const EvolveOptions& options) {
  if (depth < 0) throw std::domain_error("evolve_tree: negative depth");
  if (depth > 26) throw std::domain_error("evolve_tree: depth too large for full enumeration");
  const ProbPartition p = prob_partition(root);
  if (p.p_greater > p.p_less + 1e-12)
    throw std::invalid_argument("evolve_tree: root violates P[L>1] <= P[L<1]");

  TreeResult out;
  out.depth = depth;
  out.levels.resize(static_cast<std::size_t>(depth) + 1);
  for (int k = 0; k <= depth; ++k)
    out.levels[static_cast<std::size_t>(k)].resize(1ull << k);
  if (options.keep_leaf_distributions)
    out.leaf_distributions.resize(1ull << depth);

  int spawn_levels = 0;
  while ((1 << spawn_levels) < std::max(1, options.threads) &&
         spawn_levels < depth)
    ++spawn_levels;

  EvolveContext ctx{&options, &out, depth, spawn_levels};
  evolve_node(ctx, root, 0, 0, false);
  return out;
}

std::vector<PathSample> sample_path(const LRDistribution& root, int depth,
                                    const KernelId& kernel,
                                    const QuantizationBudget& budget,
                                    std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0xB17C0153));
  std::vector<PathSample> samples;
  samples.reserve(static_cast<std::size_t>(depth) + 1);
  LRDistribution d = root;
  std::uint32_t index = 0;
  samples.push_back({PathIndex{0, 0}, channel_metrics(d)});
  for (int k = 0; k < depth; ++k) {
    const bool plus = rng.next_bool();
    d = plus ? apply_plus(d, kernel) : apply_minus(d, kernel);
    d = quantize(d, budget);
    index = (index << 1) | (plus ? 1u : 0u);
    samples.push_back({PathIndex{k + 1, index}, channel_metrics(d)});
  }
  return samples;
}

MartingaleReport aggregate_levels(const TreeResult& tree) {
  MartingaleReport rep;
  const int depth = tree.depth;
  rep.levels.resize(static_cast<std::size_t>(depth) + 1);
  for (int k = 0; k <= depth; ++k) {
    const auto& recs = tree.levels[static_cast<std::size_t>(k)];
    LevelAggregate& agg = rep.levels[static_cast<std::size_t>(k)];
    agg.level = k;
    const double scale = 1.0 / static_cast<double>(recs.size());
    for (const auto& r : recs) {
      agg.mean_q += r.metrics.q;
      agg.mean_p_geq += r.metrics.p_geq_half;
      agg.mean_p_leq += r.metrics.p_leq_half;
      agg.mean_p_eq += r.metrics.p_eq;
      agg.mean_i += r.metrics.i;
      agg.mean_z += r.metrics.z;
      agg.mean_q_one_minus_q += r.metrics.q * (1.0 - r.metrics.q);
      constexpr double delta = 0.01;
      if (r.metrics.q >= 1.0 - delta)
        agg.fraction_perfect += 1.0;
      else if (r.metrics.p_eq < 1.0 - delta && r.metrics.q <= delta &&
               r.metrics.p_eq <= delta)
        agg.fraction_moderate += 1.0;
    }
    agg.mean_q *= scale;
    agg.mean_p_geq *= scale;
    agg.mean_p_leq *= scale;
    agg.mean_p_eq *= scale;
    agg.mean_i *= scale;
    agg.mean_z *= scale;
    agg.mean_q_one_minus_q *= scale;
    agg.fraction_perfect *= scale;
    agg.fraction_moderate *= scale;
    if (k > 0) {
      const auto& parents = tree.levels[static_cast<std::size_t>(k - 1)];
      double s = 0.0;
      for (std::size_t i = 0; i < recs.size(); ++i)
        s += std::fabs(recs[i].metrics.q - parents[i >> 1].metrics.q);
      agg.mean_abs_dq = s / static_cast<double>(recs.size());
    }
  }

  rep.mean_q_non_increasing = true;
  rep.mean_p_geq_non_decreasing = true;
  rep.mean_p_eq_non_decreasing = true;
  rep.mean_p_leq_non_increasing = true;
  constexpr double slack = 1e-12;
  for (int k = 1; k <= depth; ++k) {
    const auto& prev = rep.levels[static_cast<std::size_t>(k - 1)];
    const auto& cur = rep.levels[static_cast<std::size_t>(k)];
    const auto note = [&](bool& flag, double violation) {
      if (violation > slack) {
        flag = false;
        rep.worst_monotonicity_violation =
            std::max(rep.worst_monotonicity_violation, violation);
      }
    };
    note(rep.mean_q_non_increasing, cur.mean_q - prev.mean_q);
    note(rep.mean_p_geq_non_decreasing, prev.mean_p_geq - cur.mean_p_geq);
    note(rep.mean_p_eq_non_decreasing, prev.mean_p_eq - cur.mean_p_eq);
    note(rep.mean_p_leq_non_increasing, cur.mean_p_leq - prev.mean_p_leq);
    rep.worst_i_drift = std::max(
        rep.worst_i_drift, std::fabs(cur.mean_i - rep.levels[0].mean_i));
  }
  return rep;
}

MartingaleReport martingale_report(const LRDistribution& root, int depth,
                                   const EvolveOptions& options) {
  return aggregate_levels(evolve_tree(root, depth, options));
}

}  // namespace polarlr
