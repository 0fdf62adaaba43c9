#ifndef ENLARGE_PROGRESSIVE_HPP_
#define ENLARGE_PROGRESSIVE_HPP_

// Progressive enlargement of F by a random time tau with P[tau <= T] = 1.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "enlarge/error.hpp"
#include "enlarge/market.hpp"
#include "enlarge/prob_core.hpp"
#include "enlarge/process.hpp"
#include "enlarge/rational.hpp"
#include "enlarge/space.hpp"

namespace enlarge {

struct AzemaBundle {
  ProcessPath z;        // P[tau > t | F_t]
  ProcessPath z_tilde;  // P[tau >= t | F_t]
  ProcessPath a;        // dual optional projection of 1[[tau, oo[[
  ProcessPath jump_a;   // P[tau = t | F_t]
  ProcessPath mu;       // A + Z
};

struct OptionalPair {
  ProcessPath k;
  ProcessPath l;
};

/// inf{t : Z_t < 1/n} for the level n.
struct ZetaLevel {
  mpz_class n;
  StoppingMap time;
};

struct EtaData {
  StoppingMap zeta;
  std::vector<ZetaLevel> zeta_levels;
  std::vector<bool> lambda;
  StoppingMap eta;
  ProcessPath compensator;
  ProcessPath arbitrage_asset;
};

namespace detail {

inline void require_random_time(const FinSpace& space, const StoppingMap& tau) {
  if (tau.size() != space.atom_count()) throw InputError("tau has wrong atom count");
  for (std::size_t a = 0; a < tau.size(); ++a)
    if (tau[a] > space.horizon())
      throw InputError("tau must be finite and <= T on every atom (atom " + space.id(a) + ")");
  if (!space.ambient().is_measurable<Time>(tau.values()))
    throw InputError("tau is not measurable with respect to the ambient partition");
}

/// X_{t-} with the given value at 0-.
inline const Rational& left_limit(const ProcessPath& x, Time t, std::size_t a,
                                  const Rational& at_zero_minus) {
  return t == 0 ? at_zero_minus : x.at(t - 1, a);
}

}  // namespace detail

inline AzemaBundle azema(const FinSpace& space, const StoppingMap& tau) {
  detail::require_random_time(space, tau);
  const Time horizon = space.horizon();
  const std::size_t n = space.atom_count();
  std::vector<std::vector<Rational>> z(horizon + 1), jump(horizon + 1);
  std::vector<Rational> indicator(n);
  for (Time t = 0; t <= horizon; ++t) {
    for (std::size_t a = 0; a < n; ++a) indicator[a] = tau[a] > t ? 1 : 0;
    z[t] = cond_exp(indicator, t, space);
    for (std::size_t a = 0; a < n; ++a) indicator[a] = tau[a] == t ? 1 : 0;
    jump[t] = cond_exp(indicator, t, space);
  }
  AzemaBundle out;
  out.z = ProcessPath(Measurability::adapted, std::move(z));
  out.jump_a = ProcessPath(Measurability::adapted, std::move(jump));
  out.z_tilde = out.z + out.jump_a;
  out.a = ProcessPath::generate(Measurability::adapted, horizon, n, [&](Time t, std::size_t a) {
    Rational sum = 0;
    for (Time s = 0; s <= t; ++s) sum += out.jump_a.at(s, a);
    return sum;
  });
  out.mu = out.a + out.z;
  return out;
}

/// (K, L) with Z = L(1 - K), built forward from K_{0-} = 0.
inline OptionalPair optional_decomposition(const AzemaBundle& bundle) {
  const Time horizon = bundle.z.horizon();
  const std::size_t n = bundle.z.atom_count();
  std::vector<std::vector<Rational>> k(horizon + 1, std::vector<Rational>(n));
  std::vector<std::vector<Rational>> l(horizon + 1, std::vector<Rational>(n));
  for (std::size_t a = 0; a < n; ++a) {
    Rational k_prev = 0;
    Rational l_prev = 1;
    for (Time t = 0; t <= horizon; ++t) {
      l[t][a] = k_prev < 1 ? Rational(bundle.z_tilde.at(t, a) / (1 - k_prev)) : l_prev;
      k[t][a] = sgn(l[t][a]) > 0 ? Rational(k_prev + bundle.jump_a.at(t, a) / l[t][a]) : k_prev;
      k_prev = k[t][a];
      l_prev = l[t][a];
    }
  }
  return {ProcessPath(Measurability::adapted, std::move(k)),
          ProcessPath(Measurability::adapted, std::move(l))};
}

/// First time Z hits 0 (kInfinity if never).
inline StoppingMap first_zero(const ProcessPath& z) {
  std::vector<Time> out(z.atom_count(), kInfinity);
  for (std::size_t a = 0; a < z.atom_count(); ++a)
    for (Time t = 0; t <= z.horizon(); ++t)
      if (sgn(z.at(t, a)) == 0) {
        out[a] = t;
        break;
      }
  return StoppingMap(std::move(out));
}

/// The distinct maps n -> inf{t : Z_t < 1/n}. The map only changes at n = 1
/// and at n = ceil(1/v) for the positive values v taken by Z.
inline std::vector<ZetaLevel> zeta_levels(const ProcessPath& z) {
  std::set<mpz_class> candidates{mpz_class(1)};
  for (const auto& row : z.values())
    for (const auto& v : row)
      if (sgn(v) > 0) {
        mpz_class c;
        const mpq_class inv = 1 / v;
        mpz_cdiv_q(c.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
        candidates.insert(c);
      }
  std::vector<ZetaLevel> out;
  for (const auto& n : candidates) {
    const Rational threshold(mpq_class(1, 1) / mpq_class(n));
    std::vector<Time> times(z.atom_count(), kInfinity);
    for (std::size_t a = 0; a < z.atom_count(); ++a)
      for (Time t = 0; t <= z.horizon(); ++t)
        if (z.at(t, a) < threshold) {
          times[a] = t;
          break;
        }
    StoppingMap m(std::move(times));
    if (out.empty() || !(out.back().time == m)) out.push_back({n, std::move(m)});
  }
  return out;
}

/// S^{sigma-}: frozen at its left limit from sigma on (X_{0-} = X_0).
inline ProcessPath truncate_before(const ProcessPath& s, const StoppingMap& sigma) {
  return ProcessPath::generate(s.tag(), s.horizon(), s.atom_count(), [&](Time t, std::size_t a) {
    if (t < sigma[a]) return s.at(t, a);
    return s.at(sigma[a] == 0 ? 0 : sigma[a] - 1, a);
  });
}

inline EtaData eta_analysis(const AzemaBundle& bundle, const FinSpace& space) {
  EtaData out;
  const std::size_t n = space.atom_count();
  out.zeta = first_zero(bundle.z);
  out.zeta_levels = zeta_levels(bundle.z);
  out.lambda.assign(n, false);
  std::vector<Time> eta(n, kInfinity);
  const Rational one = 1;
  for (std::size_t a = 0; a < n; ++a) {
    const Time zt = out.zeta[a];
    if (zt == kInfinity) continue;
    const bool lambda = sgn(detail::left_limit(bundle.z, zt, a, one)) > 0 &&
                        sgn(bundle.jump_a.at(zt, a)) == 0;
    out.lambda[a] = lambda;
    if (lambda) eta[a] = zt;
  }
  out.eta = StoppingMap(std::move(eta));
  out.compensator = compensator(indicator_path(out.eta, space.horizon()), space);
  out.arbitrage_asset = stoch_exp_inverse_killed(out.compensator, out.eta);
  return out;
}

/// G_t: the F_t-cell cut by {tau > t} before tau, the ambient cell from tau on.
inline FinSpace progressive_filtration(const FinSpace& space, const StoppingMap& tau) {
  detail::require_random_time(space, tau);
  std::vector<Partition> g;
  std::vector<std::pair<std::size_t, std::size_t>> keys(space.atom_count());
  for (Time t = 0; t <= space.horizon(); ++t) {
    for (std::size_t a = 0; a < keys.size(); ++a)
      keys[a] = tau[a] > t ? std::pair{std::size_t{0}, space.partition(t).cell_of(a)}
                           : std::pair{std::size_t{1}, space.ambient().cell_of(a)};
    g.push_back(Partition::from_keys<std::pair<std::size_t, std::size_t>>(keys));
  }
  return space.with_filtration(std::move(g));
}

inline GMarket enlarge_progressive(const FinSpace& space, const StoppingMap& tau,
                                   const std::vector<Asset>& assets) {
  for (const auto& s : assets) require_adapted(s.path, space, "asset " + s.name);
  GMarket gm{Enlargement::progressive, space, progressive_filtration(space, tau), assets, {}, tau,
             std::nullopt};
  for (const auto& s : assets) gm.traded.push_back({s.name, stopped(s.path, tau)});
  return gm;
}

/// X^tau / L^tau. L is positive on [[0, tau]]; a zero there is an inconsistent pair.
inline ProcessPath lift_at_random_time(const ProcessPath& x, const StoppingMap& tau,
                                       const ProcessPath& l) {
  detail::require_same_shape(x, l);
  return ProcessPath::generate(Measurability::adapted, x.horizon(), x.atom_count(),
                               [&](Time t, std::size_t a) {
                                 const Time s = std::min(t, tau[a]);
                                 if (sgn(l.at(s, a)) == 0)
                                   throw HypothesisError("L vanishes before tau",
                                                         Witness{s, {a}, std::nullopt});
                                 return Rational(x.at(s, a) / l.at(s, a));
                               });
}

/// Checks that Y is a deflator for `assets` on `space`; the first failure is
/// described in the returned string.
inline std::optional<std::string> deflator_defect(const ProcessPath& y,
                                                  const std::vector<Asset>& assets,
                                                  const FinSpace& space) {
  if (!is_adapted(y, space)) return "deflator is not adapted";
  for (const auto& row : y.values())
    for (const auto& v : row)
      if (sgn(v) <= 0) return "deflator is not strictly positive";
  for (const auto& v : y.row(0))
    if (v != 1) return "deflator does not start at 1";
  if (!classify(y, space).is_martingale()) return "deflator is not a martingale";
  for (const auto& s : assets) {
    if (!is_adapted(s.path, space)) return "asset " + s.name + " is not adapted";
    if (!classify(y * s.path, space).is_martingale())
      return "deflated asset " + s.name + " is not a martingale";
  }
  return std::nullopt;
}

/// W = M^tau / L^tau with M = Y * S_arb. Requires dS_eta = 0 and dY_eta = 0 on {eta < oo}.
inline ProcessPath lift_deflator(const ProcessPath& y, const GMarket& gm, const OptionalPair& pair,
                                 const EtaData& eta) {
  if (gm.kind != Enlargement::progressive || !gm.tau)
    throw InputError("lift_deflator needs a progressively enlarged market");
  if (auto defect = deflator_defect(y, gm.assets, gm.base))
    throw InputError("Y is not a deflator on F: " + *defect);
  for (std::size_t a = 0; a < gm.base.atom_count(); ++a) {
    const Time e = eta.eta[a];
    if (e == kInfinity) continue;
    for (const auto& s : gm.assets)
      if (sgn(s.path.increment(e, a)) != 0)
        throw HypothesisError("asset " + s.name + " jumps at eta on atom " + gm.base.id(a),
                              Witness{e, {a}, s.name});
    if (sgn(y.increment(e, a)) != 0)
      throw HypothesisError("deflator jumps at eta on atom " + gm.base.id(a),
                            Witness{e, {a}, std::string("Y")});
  }
  const ProcessPath m = y * eta.arbitrage_asset;
  return lift_at_random_time(m, *gm.tau, pair.l);
}

/// Whether X^tau / L^tau is a G-supermartingale for the nonnegative F-supermartingale X.
inline bool supermartingale_lift_check(const ProcessPath& x, const GMarket& gm,
                                       const OptionalPair& pair) {
  if (!is_nonnegative(x) || !classify(x, gm.base).is_supermartingale())
    throw InputError("X must be a nonnegative F-supermartingale");
  return classify(lift_at_random_time(x, *gm.tau, pair.l), gm.enlarged).is_supermartingale();
}

/// Indicator martingales E[1_C | F_t] for the cells C of F_T. Every
/// nonnegative F-martingale is a nonnegative combination of these.
inline std::vector<ProcessPath> martingale_basis(const FinSpace& space) {
  std::vector<ProcessPath> out;
  const Partition& last = space.partition(space.horizon());
  std::vector<Rational> indicator(space.atom_count());
  for (const auto& cell : last.cells()) {
    std::fill(indicator.begin(), indicator.end(), Rational(0));
    for (std::size_t a : cell) indicator[a] = 1;
    std::vector<std::vector<Rational>> v(space.horizon() + 1);
    for (Time t = 0; t <= space.horizon(); ++t) v[t] = cond_exp(indicator, t, space);
    out.emplace_back(Measurability::adapted, std::move(v));
  }
  return out;
}

struct ProgressiveEquivalence {
  Rational eta_finite_prob;
  bool one_over_l_tau_is_g_martingale = false;
  bool all_lifts_are_g_martingales = false;

  bool agree() const {
    const bool eta_null = sgn(eta_finite_prob) == 0;
    return eta_null == one_over_l_tau_is_g_martingale && eta_null == all_lifts_are_g_martingales;
  }
};

inline ProgressiveEquivalence equivalence_report(const FinSpace& space, const StoppingMap& tau) {
  const AzemaBundle bundle = azema(space, tau);
  const OptionalPair pair = optional_decomposition(bundle);
  const EtaData eta = eta_analysis(bundle, space);
  const FinSpace g = progressive_filtration(space, tau);
  ProgressiveEquivalence out;
  out.eta_finite_prob = probability(space, [&](std::size_t a) { return eta.eta.is_finite(a); });
  const ProcessPath one = ProcessPath::constant(Measurability::adapted, space.horizon(),
                                                space.atom_count(), Rational(1));
  out.one_over_l_tau_is_g_martingale = classify(lift_at_random_time(one, tau, pair.l), g).is_martingale();
  out.all_lifts_are_g_martingales = true;
  for (const auto& x : martingale_basis(space))
    if (!classify(lift_at_random_time(x, tau, pair.l), g).is_martingale()) {
      out.all_lifts_are_g_martingales = false;
      break;
    }
  return out;
}

/// Weights P * q, after checking q > 0 and E[q] = 1.
inline std::vector<Rational> reweighted(const FinSpace& space, const std::vector<Rational>& q) {
  if (q.size() != space.atom_count()) throw InputError("density has wrong atom count");
  std::vector<Rational> w(q.size());
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (sgn(q[a]) <= 0) throw InputError("density must be strictly positive");
    w[a] = space.prob(a) * q[a];
  }
  return w;
}

inline StoppingMap eta_under_measure(const FinSpace& space, const StoppingMap& tau,
                                     const std::vector<Rational>& q) {
  const FinSpace qspace = space.with_probabilities(reweighted(space, q));
  return eta_analysis(azema(qspace, tau), qspace).eta;
}

}  // namespace enlarge

#endif  // ENLARGE_PROGRESSIVE_HPP_
