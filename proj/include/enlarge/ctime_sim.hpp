#ifndef ENLARGE_CTIME_SIM_HPP_
#define ENLARGE_CTIME_SIM_HPP_

// Monte Carlo checks of the three continuous-time examples against closed
// forms. Doubles only. Trial i draws from its own generator seeded by
// (seed, i), so a report is a pure function of the config; statistics are
// accumulated in trial order, which keeps reports bit-identical across runs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "enlarge/error.hpp"

namespace enlarge::sim {

struct SimConfig {
  std::string example = "poisson_insider";  // exp_time | discrete_time | poisson_insider
  double lambda = 1.0;
  double horizon = 1.0;
  double step = 0.25;
  std::size_t paths = 100000;
  std::uint64_t seed = 42;
  double ratio = 0.5;  // discrete_time: p_k = (1 - ratio) ratio^(k-1)
};

inline void validate(const SimConfig& cfg) {
  if (cfg.example != "exp_time" && cfg.example != "discrete_time" && cfg.example != "poisson_insider")
    throw InputError("unknown example \"" + cfg.example + "\"");
  if (cfg.paths < 1) throw InputError("paths must be >= 1");
  if (!(cfg.step > 0) || !std::isfinite(cfg.step)) throw InputError("step must be > 0");
  if (!(cfg.horizon > 0) || !std::isfinite(cfg.horizon)) throw InputError("T must be > 0");
  if (!(cfg.lambda > 0) || !std::isfinite(cfg.lambda)) throw InputError("lambda must be > 0");
  if (cfg.example == "exp_time" && cfg.lambda != 1.0)
    throw InputError("exp_time has unit rate (P[zeta > t] = exp(-t)); lambda must be 1");
  if (cfg.example == "discrete_time" && !(cfg.ratio > 0 && cfg.ratio < 1))
    throw InputError("ratio must lie in (0, 1); otherwise p_k = (1 - r) r^(k-1) is not a probability law");
}

struct StatRow {
  std::string statistic;
  double estimate = 0;
  double se = 0;
  double oracle = 0;
  double z = 0;

  bool within(double k = 3.0) const { return std::abs(z) <= k; }
};

struct Gate {
  enum class Kind { all, any };
  std::string name;
  std::size_t count = 0;
  std::size_t total = 0;
  Kind kind = Kind::all;

  bool pass() const { return kind == Kind::all ? count == total : count > 0; }
};

struct MCReport {
  SimConfig config;
  std::vector<StatRow> rows;
  std::vector<Gate> gates;

  const StatRow& row(const std::string& name) const {
    for (const auto& r : rows)
      if (r.statistic == name) return r;
    throw Error("no statistic " + name);
  }
  const Gate& gate(const std::string& name) const {
    for (const auto& g : gates)
      if (g.name == name) return g;
    throw Error("no gate " + name);
  }
  bool passed() const {
    for (const auto& r : rows)
      if (!r.within()) return false;
    for (const auto& g : gates)
      if (!g.pass()) return false;
    return true;
  }

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["example"] = config.example;
    j["config"] = {{"lambda", config.lambda}, {"T", config.horizon}, {"step", config.step},
                   {"paths", config.paths},   {"seed", config.seed},  {"ratio", config.ratio}};
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      j["rows"].push_back({{"statistic", r.statistic}, {"estimate", r.estimate}, {"se", r.se},
                           {"oracle", r.oracle}, {"z", r.z}, {"within_3se", r.within()}});
    j["gates"] = nlohmann::ordered_json::array();
    for (const auto& g : gates)
      j["gates"].push_back({{"name", g.name}, {"count", g.count}, {"total", g.total},
                            {"kind", g.kind == Gate::Kind::all ? "all" : "any"}, {"pass", g.pass()}});
    j["passed"] = passed();
    return j.dump(2) + "\n";
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << std::setprecision(17) << "statistic,estimate,se,oracle,z\n";
    for (const auto& r : rows)
      out << '"' << r.statistic << "\"," << r.estimate << ',' << r.se << ',' << r.oracle << ',' << r.z << '\n';
    return out.str();
  }
};

/// Generator for trial i: a pure function of (seed, i).
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t i) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(i), std::uint32_t(i >> 32)};
  return std::mt19937_64(seq);
}

/// Running sums for a sample mean and its standard error.
class Moments {
 public:
  void add(double x) {
    ++n_;
    sum_ += x;
    sq_ += x * x;
  }
  std::size_t count() const { return n_; }
  double mean() const { return n_ ? sum_ / double(n_) : 0.0; }
  double se() const {
    if (n_ < 2) return 0.0;
    const double m = mean();
    const double var = (sq_ - double(n_) * m * m) / double(n_ - 1);
    return var > 0 ? std::sqrt(var / double(n_)) : 0.0;
  }
  StatRow row(std::string name, double oracle) const {
    StatRow r{std::move(name), mean(), se(), oracle, 0.0};
    if (r.se > 0)
      r.z = (r.estimate - oracle) / r.se;
    else
      r.z = r.estimate == oracle ? 0.0 : std::numeric_limits<double>::infinity();
    return r;
  }

 private:
  std::size_t n_ = 0;
  double sum_ = 0, sq_ = 0;
};

inline std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

/// Reporting times step, 2 step, ... up to and including T (within rounding).
inline std::vector<double> grid(const SimConfig& cfg) {
  std::vector<double> g;
  for (std::size_t k = 1;; ++k) {
    const double t = double(k) * cfg.step;
    if (t > cfg.horizon * (1 + 1e-12)) break;
    g.push_back(std::min(t, cfg.horizon));
  }
  return g;
}

// Unit-rate exponential time zeta, tau = zeta / 2, S_t = e^t 1{t < zeta}, D_t = zeta ^ t.
struct ExpTimePath {
  double zeta = 0;
  double tau = 0;
};

inline ExpTimePath exp_time_path(std::uint64_t seed, std::uint64_t i) {
  auto rng = trial_rng(seed, i);
  const double zeta = std::exponential_distribution<double>(1.0)(rng);
  return {zeta, zeta / 2};
}

inline double exp_time_s(double zeta, double t) { return t < zeta ? std::exp(t) : 0.0; }

inline MCReport sim_exp_time(const SimConfig& cfg) {
  validate(cfg);
  if (cfg.example != "exp_time") throw InputError("config is not for exp_time");
  const auto times = grid(cfg);
  std::vector<Moments> s_t(times.size());
  Moments s_tau, d_tau;
  Gate increasing{"S^tau strictly increasing before tau", 0, cfg.paths, Gate::Kind::all};
  for (std::size_t i = 0; i < cfg.paths; ++i) {
    const ExpTimePath p = exp_time_path(cfg.seed, i);
    for (std::size_t k = 0; k < times.size(); ++k) s_t[k].add(exp_time_s(p.zeta, times[k]));
    s_tau.add(exp_time_s(p.zeta, p.tau));
    d_tau.add(std::min(p.zeta, p.tau));
    // S along the reporting grid below tau, then at tau itself.
    bool ok = true;
    double prev = exp_time_s(p.zeta, 0.0);
    for (double t : times) {
      if (t >= p.tau) break;
      const double v = exp_time_s(p.zeta, t);
      ok = ok && v > prev;
      prev = v;
    }
    ok = ok && (p.tau == 0 || exp_time_s(p.zeta, p.tau) > prev);
    increasing.count += ok;
  }
  MCReport rep{cfg, {}, {}};
  for (std::size_t k = 0; k < times.size(); ++k) rep.rows.push_back(s_t[k].row("E[S_t] t=" + fmt(times[k]), 1.0));
  rep.rows.push_back(s_tau.row("E[S_tau]", 2.0));
  rep.rows.push_back(d_tau.row("E[D_tau]", 0.5));
  rep.gates.push_back(increasing);
  return rep;
}

// zeta on {1, 2, ...} with P[zeta = k] = (1 - r) r^(k-1), so q_k = P[zeta > k] = r^k;
// tau = zeta - 1 and Z_t = q_{k+1} / q_k = r on {t < zeta} for t in [k, k + 1).
inline std::uint64_t discrete_zeta(std::uint64_t seed, std::uint64_t i, double ratio) {
  auto rng = trial_rng(seed, i);
  return std::geometric_distribution<std::uint64_t>(1.0 - ratio)(rng) + 1;
}

inline MCReport sim_discrete_time(const SimConfig& cfg) {
  validate(cfg);
  if (cfg.example != "discrete_time") throw InputError("config is not for discrete_time");
  const std::size_t k_max = static_cast<std::size_t>(std::floor(cfg.horizon));
  std::vector<Moments> z(k_max + 1);
  Gate integer{"eta = zeta lands on an integer", 0, cfg.paths, Gate::Kind::all};
  for (std::size_t i = 0; i < cfg.paths; ++i) {
    const std::uint64_t zeta = discrete_zeta(cfg.seed, i, cfg.ratio);
    // Estimator of Z_k on {k < zeta}: the indicator of tau > k among those trials.
    for (std::size_t k = 0; k <= k_max; ++k)
      if (zeta > k) z[k].add(zeta - 1 > k ? 1.0 : 0.0);
    const double eta = double(zeta);
    integer.count += std::floor(eta) == eta;
  }
  MCReport rep{cfg, {}, {}};
  for (std::size_t k = 0; k <= k_max; ++k) rep.rows.push_back(z[k].row("Z_t t=" + std::to_string(k), cfg.ratio));
  rep.gates.push_back(integer);
  return rep;
}

// Poisson process N with rate lambda on [0, T], J = N_T.
struct PoissonPath {
  std::vector<double> jumps;  // event times in (0, T]

  std::size_t count(double t) const {
    std::size_t n = 0;
    while (n < jumps.size() && jumps[n] <= t) ++n;
    return n;
  }
  /// sigma = inf{t : N_t = N_T}: the last event time, 0 without events.
  double sigma() const { return jumps.empty() ? 0.0 : jumps.back(); }
};

inline PoissonPath poisson_path(std::uint64_t seed, std::uint64_t i, double lambda, double horizon) {
  auto rng = trial_rng(seed, i);
  std::exponential_distribution<double> gap(lambda);
  PoissonPath p;
  for (double t = gap(rng); t <= horizon; t += gap(rng)) p.jumps.push_back(t);
  return p;
}

/// p^x_t = P[N_T = x | N_t = n] / P[N_T = x]
///       = e^{lambda t} (lambda (T - t))^{x - n} / (lambda T)^x * x! / (x - n)! on {n <= x}.
/// At t = T this reduces to e^{lambda T} x! / (lambda T)^x 1{n = x}. The exponent
/// is +lambda t: with -lambda t the mean would be e^{-2 lambda t}, not 1.
inline double poisson_density(std::size_t x, std::size_t n, double t, double lambda, double horizon) {
  if (n > x) return 0.0;
  const double log_ratio = std::lgamma(double(x) + 1) - std::lgamma(double(x - n) + 1);
  const double rest = std::pow(lambda * (horizon - t), double(x - n)) / std::pow(lambda * horizon, double(x));
  return std::exp(lambda * t + log_ratio) * rest;
}

inline double poisson_s(std::size_t n, double t, double lambda) {
  return std::exp(double(n) - lambda * t * (std::exp(1.0) - 1.0));
}

/// Insider wealth (-1_{(sigma, T]} . S)_t = S_sigma - S_t for t > sigma, else 0.
inline double insider_wealth(const PoissonPath& p, double t, double lambda) {
  const double sigma = p.sigma();
  if (t <= sigma) return 0.0;
  return poisson_s(p.jumps.size(), sigma, lambda) - poisson_s(p.count(t), t, lambda);
}

inline MCReport sim_poisson_insider(const SimConfig& cfg, const std::vector<std::size_t>& labels = {0, 1, 2}) {
  validate(cfg);
  if (cfg.example != "poisson_insider") throw InputError("config is not for poisson_insider");
  const double lambda = cfg.lambda, horizon = cfg.horizon;
  const auto times = grid(cfg);
  std::vector<std::vector<Moments>> p(labels.size(), std::vector<Moments>(times.size()));
  std::vector<Moments> s(times.size());
  Gate monotone{"insider wealth nondecreasing", 0, cfg.paths, Gate::Kind::all};
  Gate before_t{"sigma < T", 0, cfg.paths, Gate::Kind::all};
  std::vector<Gate> hits;
  for (std::size_t x : labels)
    hits.push_back({"eta^x at a jump of N, x=" + std::to_string(x), 0, cfg.paths, Gate::Kind::any});
  for (std::size_t i = 0; i < cfg.paths; ++i) {
    const PoissonPath path = poisson_path(cfg.seed, i, lambda, horizon);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const std::size_t n = path.count(times[k]);
      for (std::size_t j = 0; j < labels.size(); ++j) p[j][k].add(poisson_density(labels[j], n, times[k], lambda, horizon));
      s[k].add(poisson_s(n, times[k], lambda));
    }
    // Wealth on the reporting grid merged with sigma and T.
    std::vector<double> when = times;
    when.push_back(path.sigma());
    when.push_back(horizon);
    std::sort(when.begin(), when.end());
    bool ok = true;
    double prev = insider_wealth(path, 0.0, lambda);
    for (double t : when) {
      const double w = insider_wealth(path, t, lambda);
      ok = ok && w >= prev;
      prev = w;
    }
    monotone.count += ok;
    before_t.count += path.sigma() < horizon;
    // p^x drops to 0 exactly when N passes x, which happens at an event time.
    for (std::size_t j = 0; j < labels.size(); ++j) hits[j].count += path.jumps.size() > labels[j];
  }
  MCReport rep{cfg, {}, {}};
  for (std::size_t j = 0; j < labels.size(); ++j)
    for (std::size_t k = 0; k < times.size(); ++k)
      rep.rows.push_back(p[j][k].row("E[p^x_t] x=" + std::to_string(labels[j]) + " t=" + fmt(times[k]), 1.0));
  for (std::size_t k = 0; k < times.size(); ++k) rep.rows.push_back(s[k].row("E[S_t] t=" + fmt(times[k]), 1.0));
  rep.gates.push_back(monotone);
  rep.gates.push_back(before_t);
  for (auto& g : hits) rep.gates.push_back(std::move(g));
  return rep;
}

inline MCReport simulate(const SimConfig& cfg) {
  validate(cfg);
  if (cfg.example == "exp_time") return sim_exp_time(cfg);
  if (cfg.example == "discrete_time") return sim_discrete_time(cfg);
  return sim_poisson_insider(cfg);
}

}  // namespace enlarge::sim

#endif  // ENLARGE_CTIME_SIM_HPP_
