#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <vector>

#include "discrimkit/errors.hpp"
#include "discrimkit/rng.hpp"
#include "discrimkit/state_set.hpp"
#include "discrimkit/strategy.hpp"
#include "discrimkit/synthesis.hpp"

namespace discrimkit {

struct ShotConfig {
  std::uint64_t shots = 1;
  std::uint64_t seed = 0;
  std::uint64_t shards = 1;
};

// Per-state tallies and their comparison against the analytic model.
// A z-score cell with analytic p in {0, 1} is reported as 0 when the
// empirical frequency matches exactly; a mismatch there is flagged and
// the z-score set to signed infinity.
struct StateTally {
  std::uint64_t shots = 0;
  std::uint64_t n_d = 0;
  std::uint64_t n_e = 0;
  std::uint64_t n_i = 0;
  double freq_d = 0.0, freq_e = 0.0, freq_i = 0.0;
  double z_d = 0.0, z_e = 0.0, z_i = 0.0;
  bool flag_d = false, flag_e = false, flag_i = false;
};

struct EmpiricalReport {
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::uint64_t shards = 1;
  std::vector<StateTally> per_state;
  double agg_d = 0.0, agg_e = 0.0, agg_i = 0.0;
  double max_abs_z = 0.0;
  bool any_flag = false;
};

namespace detail {

struct ShardCounts {
  std::vector<std::uint64_t> shots, n_d, n_e, n_i;
  explicit ShardCounts(std::size_t n)
      : shots(n, 0), n_d(n, 0), n_e(n, 0), n_i(n, 0) {}
  void merge(const ShardCounts& o) {
    for (std::size_t i = 0; i < shots.size(); ++i) {
      shots[i] += o.shots[i];
      n_d[i] += o.n_d[i];
      n_e[i] += o.n_e[i];
      n_i[i] += o.n_i[i];
    }
  }
};

// Smallest index whose cumulative weight exceeds the draw; the last
// index absorbs rounding overflow.
inline std::size_t inverse_cdf(const std::vector<double>& cdf, double u) {
  for (std::size_t k = 0; k + 1 < cdf.size(); ++k)
    if (u < cdf[k]) return k;
  return cdf.size() - 1;
}

inline void tally_z(double freq, double p, std::uint64_t m, double& z,
                    bool& flag) {
  if (p <= 0.0 || p >= 1.0) {
    const double target = p <= 0.0 ? 0.0 : 1.0;
    if (freq == target || m == 0) {
      z = 0.0;
    } else {
      z = freq > target ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
      flag = true;
    }
    return;
  }
  if (m == 0) {
    z = 0.0;
    return;
  }
  z = (freq - p) / std::sqrt(p * (1.0 - p) / static_cast<double>(m));
}

}  // namespace detail

// Samples cfg.shots measurement runs: state by prior, outcome by the
// realization's distribution, both via inverse CDF on counter-based
// draws (shot t uses counters 2t and 2t+1). Tallies are therefore
// independent of the shard partition.
inline EmpiricalReport run_shots(const Realization& r, const StateSet& states,
                                 const ShotConfig& cfg) {
  const std::size_t n = r.n;
  if (states.n() != n)
    throw invalid_input("run_shots: realization covers " + std::to_string(n) +
                        " states, state set has " +
                        std::to_string(states.n()));
  if (cfg.shots < 1) throw invalid_input("run_shots: shots must be >= 1");
  if (cfg.shards < 1) throw invalid_input("run_shots: shards must be >= 1");

  std::vector<double> prior_cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += states.prior(i);
    prior_cdf[i] = acc;
  }
  std::vector<std::vector<double>> outcome_cdf(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto dist = outcome_distribution(r, i);
    outcome_cdf[i].resize(dist.size());
    double c = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
      c += dist[k];
      outcome_cdf[i][k] = c;
    }
  }

  const auto run_range = [&](std::uint64_t begin,
                             std::uint64_t end) -> detail::ShardCounts {
    detail::ShardCounts c(n);
    for (std::uint64_t t = begin; t < end; ++t) {
      const double u_state = rng::unit_at(cfg.seed, 2 * t);
      const double u_out = rng::unit_at(cfg.seed, 2 * t + 1);
      const std::size_t i = detail::inverse_cdf(prior_cdf, u_state);
      const std::size_t k = detail::inverse_cdf(outcome_cdf[i], u_out);
      ++c.shots[i];
      const OutcomeVerdict v = outcome_verdict(n, k);
      if (!v.determined)
        ++c.n_i[i];
      else if (v.state == i)
        ++c.n_d[i];
      else
        ++c.n_e[i];
    }
    return c;
  };

  detail::ShardCounts total(n);
  if (cfg.shards == 1) {
    total = run_range(0, cfg.shots);
  } else {
    const std::uint64_t shards = std::min<std::uint64_t>(cfg.shards, cfg.shots);
    const std::uint64_t q = cfg.shots / shards;
    const std::uint64_t rem = cfg.shots % shards;
    std::vector<std::future<detail::ShardCounts>> futures;
    std::uint64_t begin = 0;
    for (std::uint64_t j = 0; j < shards; ++j) {
      const std::uint64_t len = q + (j < rem ? 1 : 0);
      futures.push_back(
          std::async(std::launch::async, run_range, begin, begin + len));
      begin += len;
    }
    for (auto& f : futures) total.merge(f.get());
  }

  EmpiricalReport rep;
  rep.shots = cfg.shots;
  rep.seed = cfg.seed;
  rep.shards = cfg.shards;
  rep.per_state.resize(n);
  std::uint64_t agg_d = 0, agg_e = 0, agg_i = 0;
  for (std::size_t i = 0; i < n; ++i) {
    StateTally& t = rep.per_state[i];
    t.shots = total.shots[i];
    t.n_d = total.n_d[i];
    t.n_e = total.n_e[i];
    t.n_i = total.n_i[i];
    if (t.shots > 0) {
      const double m = static_cast<double>(t.shots);
      t.freq_d = static_cast<double>(t.n_d) / m;
      t.freq_e = static_cast<double>(t.n_e) / m;
      t.freq_i = static_cast<double>(t.n_i) / m;
    }
    // the sampled model itself provides the analytic cell probabilities
    const OutcomeMarginals p = outcome_marginals(outcome_distribution(r, i), n, i);
    detail::tally_z(t.freq_d, p.detected, t.shots, t.z_d, t.flag_d);
    detail::tally_z(t.freq_e, p.misidentified, t.shots, t.z_e, t.flag_e);
    detail::tally_z(t.freq_i, p.inconclusive, t.shots, t.z_i, t.flag_i);
    rep.any_flag = rep.any_flag || t.flag_d || t.flag_e || t.flag_i;
    for (double z : {t.z_d, t.z_e, t.z_i})
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
    agg_d += t.n_d;
    agg_e += t.n_e;
    agg_i += t.n_i;
  }
  const double m_all = static_cast<double>(cfg.shots);
  rep.agg_d = static_cast<double>(agg_d) / m_all;
  rep.agg_e = static_cast<double>(agg_e) / m_all;
  rep.agg_i = static_cast<double>(agg_i) / m_all;
  return rep;
}

namespace detail {

// regularized upper incomplete gamma Q(a, x): series below a + 1,
// Lentz continued fraction above
inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw numerical_error("gamma_q: domain requires a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  const double log_front = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int k = 0; k < 500; ++k) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(log_front);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k <= 500; ++k) {
    const double an = -static_cast<double>(k) * (static_cast<double>(k) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(log_front);
}

}  // namespace detail

inline constexpr double kGofSignificance = 1e-3;
inline constexpr double kGofMinExpected = 5.0;

struct GofResult {
  double statistic = 0.0;
  std::size_t degrees = 0;
  double p_value = 1.0;
  bool pass = true;
  bool degenerate = false;  // no usable category pairs after merging
};

// Pearson test of the tallied (D, E, I) counts against analytic cell
// probabilities. Cells with expected count below kGofMinExpected are
// merged (smallest expected into the next smallest) per state; a state
// left with a single cell contributes nothing.
inline GofResult chi_square_gof(const EmpiricalReport& rep,
                                const ProbabilityReport& analytic) {
  const std::size_t n = rep.per_state.size();
  if (analytic.p_d.size() != n)
    throw invalid_input("chi_square_gof: report covers " + std::to_string(n) +
                        " states, analytic model " +
                        std::to_string(analytic.p_d.size()));
  GofResult g;
  for (std::size_t i = 0; i < n; ++i) {
    const StateTally& t = rep.per_state[i];
    const double m = static_cast<double>(t.shots);
    struct Cell {
      double obs, exp;
    };
    std::vector<Cell> cells{{static_cast<double>(t.n_d), m * analytic.p_d[i]},
                            {static_cast<double>(t.n_e), m * analytic.p_e[i]},
                            {static_cast<double>(t.n_i), m * analytic.p_i[i]}};
    while (cells.size() > 1) {
      std::size_t lo = 0;
      for (std::size_t k = 1; k < cells.size(); ++k)
        if (cells[k].exp < cells[lo].exp) lo = k;
      if (cells[lo].exp >= kGofMinExpected) break;
      std::size_t second = lo == 0 ? 1 : 0;
      for (std::size_t k = 0; k < cells.size(); ++k)
        if (k != lo && cells[k].exp < cells[second].exp) second = k;
      cells[second].obs += cells[lo].obs;
      cells[second].exp += cells[lo].exp;
      cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(lo));
    }
    if (cells.size() < 2) continue;  // all cells >= threshold otherwise
    for (const Cell& c : cells)
      g.statistic += (c.obs - c.exp) * (c.obs - c.exp) / c.exp;
    g.degrees += cells.size() - 1;
  }
  if (g.degrees == 0) {
    g.degenerate = true;
    g.p_value = 1.0;
    g.pass = true;
    return g;
  }
  g.p_value = detail::gamma_q(static_cast<double>(g.degrees) / 2.0,
                              g.statistic / 2.0);
  g.pass = g.p_value >= kGofSignificance;
  return g;
}

}  // namespace discrimkit
