#ifndef ENLARGE_CHECKS_HPP_
#define ENLARGE_CHECKS_HPP_

// Identity ledgers: every structural identity of the progressive and initial
// analytics evaluated on one model. Scalar identities report both sides;
// pointwise identities report (points checked, points agreeing).

#include <functional>
#include <string>
#include <vector>

#include "enlarge/initial.hpp"
#include "enlarge/prob_core.hpp"
#include "enlarge/progressive.hpp"

namespace enlarge {

struct IdentityRow {
  std::string name;
  std::string lhs;
  std::string rhs;
  bool pass = false;
};

inline bool all_pass(const std::vector<IdentityRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

namespace detail {

class Ledger {
 public:
  void scalar(std::string name, const Rational& lhs, const Rational& rhs) {
    rows_.push_back({std::move(name), to_string(lhs), to_string(rhs), lhs == rhs});
  }
  void counts(std::string name, std::size_t checked, std::size_t agreeing) {
    rows_.push_back({std::move(name), std::to_string(checked), std::to_string(agreeing), checked == agreeing});
  }
  void flag(std::string name, bool lhs, bool rhs) {
    rows_.push_back({std::move(name), lhs ? "true" : "false", rhs ? "true" : "false", lhs == rhs});
  }
  void kind(std::string name, MartingaleKind expected, MartingaleKind actual) {
    rows_.push_back({std::move(name), to_string(expected), to_string(actual), expected == actual});
  }
  void failed(std::string name, const std::string& why) {
    rows_.push_back({std::move(name), "ok", why, false});
  }
  std::vector<IdentityRow> take() { return std::move(rows_); }

 private:
  std::vector<IdentityRow> rows_;
};

template <class Pred>
std::size_t count_points(Time horizon, std::size_t atoms, Pred&& pred) {
  std::size_t ok = 0;
  for (Time t = 0; t <= horizon; ++t)
    for (std::size_t a = 0; a < atoms; ++a) ok += pred(t, a) ? 1 : 0;
  return ok;
}

/// E[R | F_sigma] on {sigma < oo}, computed cell by cell of F_t on {sigma = t}.
inline std::vector<Rational> cond_exp_at_stopping_time(const std::vector<Rational>& r,
                                                       const StoppingMap& sigma,
                                                       const FinSpace& space) {
  std::vector<Rational> out(r.size());
  for (Time t = 0; t <= space.horizon(); ++t) {
    const auto& part = space.partition(t);
    for (const auto& cell : part.cells()) {
      if (sigma[cell.front()] != t) continue;
      Rational mass = 0, sum = 0;
      for (std::size_t a : cell) {
        mass += space.prob(a);
        sum += space.prob(a) * r[a];
      }
      for (std::size_t a : cell) out[a] = sum / mass;
    }
  }
  return out;
}

inline Rational jump(const ProcessPath& x, Time t, std::size_t a) {
  return t == 0 ? x.at(0, a) : Rational(x.at(t, a) - x.at(t - 1, a));
}

}  // namespace detail

using Decomposition = std::function<OptionalPair(const AzemaBundle&)>;

inline std::vector<IdentityRow> progressive_identities(
    const FinSpace& space, const StoppingMap& tau,
    const Decomposition& decompose = [](const AzemaBundle& b) { return optional_decomposition(b); }) {
  detail::Ledger led;
  const Time horizon = space.horizon();
  const std::size_t n = space.atom_count();
  const AzemaBundle bundle = azema(space, tau);
  const OptionalPair pair = decompose(bundle);
  const ProcessPath& z = bundle.z;
  const ProcessPath& k = pair.k;
  const ProcessPath& l = pair.l;
  const std::size_t points = (horizon + 1) * n;

  // Azema quantities against direct conditional probabilities.
  {
    std::vector<Rational> ind(n);
    std::size_t ok = 0;
    for (Time t = 0; t <= horizon; ++t) {
      for (std::size_t a = 0; a < n; ++a) ind[a] = tau[a] >= t ? 1 : 0;
      const auto direct = cond_exp(ind, t, space);
      for (std::size_t a = 0; a < n; ++a) ok += direct[a] == bundle.z_tilde.at(t, a);
    }
    led.counts("Ztilde = P[tau >= t | F_t] = Z + dA", points, ok);
  }
  led.kind("mu = A + Z is an F-martingale", MartingaleKind::martingale, classify(bundle.mu, space).kind);
  led.counts("0 <= Z <= 1", points, detail::count_points(horizon, n, [&](Time t, std::size_t a) {
               return sgn(z.at(t, a)) >= 0 && z.at(t, a) <= 1;
             }));
  led.counts("A nondecreasing", points, detail::count_points(horizon, n, [&](Time t, std::size_t a) {
               return t == 0 || bundle.a.at(t, a) >= bundle.a.at(t - 1, a);
             }));
  led.counts("Z_T = 0", n, detail::count_points(0, n, [&](Time, std::size_t a) {
               return sgn(z.at(horizon, a)) == 0;
             }));

  // Decomposition.
  led.counts("Z = L(1 - K)", points, detail::count_points(horizon, n, [&](Time t, std::size_t a) {
               return z.at(t, a) == l.at(t, a) * (1 - k.at(t, a));
             }));
  led.kind("L is an F-martingale", MartingaleKind::martingale,
           is_adapted(l, space) ? classify(l, space).kind : MartingaleKind::none);
  led.counts("L_0 = 1", n, detail::count_points(0, n, [&](Time, std::size_t a) { return l.at(0, a) == 1; }));
  led.counts("L_t dK_t = dA_t", points, detail::count_points(horizon, n, [&](Time t, std::size_t a) {
               return l.at(t, a) * detail::jump(k, t, a) == bundle.jump_a.at(t, a);
             }));
  led.counts("0 <= K <= 1, K nondecreasing, L >= 0", points,
             detail::count_points(horizon, n, [&](Time t, std::size_t a) {
               return sgn(k.at(t, a)) >= 0 && k.at(t, a) <= 1 && sgn(detail::jump(k, t, a)) >= 0 &&
                      sgn(l.at(t, a)) >= 0;
             }));
  {
    std::size_t dl_ok = 0, dk_ok = 0;
    for (std::size_t a = 0; a < n; ++a) {
      Rational dl = 0, dk = 0;
      for (Time t = 0; t <= horizon; ++t) {
        if (t > 0 && k.at(t - 1, a) == 1) dl += l.at(t, a) - l.at(t - 1, a);
        if (sgn(l.at(t, a)) == 0) dk += detail::jump(k, t, a);
      }
      dl_ok += sgn(dl) == 0;
      dk_ok += sgn(dk) == 0;
    }
    led.counts("sum 1{K_{t-} = 1} dL_t = 0", n, dl_ok);
    led.counts("sum 1{L_t = 0} dK_t = 0", n, dk_ok);
  }
  {
    // E[V_tau] = E[sum_t V_t L_t dK_t] on the basis V = 1_C 1{s = t}, C an F_t-cell.
    std::size_t basis = 0, ok = 0;
    for (Time t = 0; t <= horizon; ++t)
      for (const auto& cell : space.partition(t).cells()) {
        Rational lhs = 0, rhs = 0;
        for (std::size_t a : cell) {
          if (tau[a] == t) lhs += space.prob(a);
          rhs += space.prob(a) * l.at(t, a) * detail::jump(k, t, a);
        }
        ++basis;
        ok += lhs == rhs;
      }
    led.counts("E[V_tau] = E[sum V_t L_t dK_t] over an adapted basis", basis, ok);
  }

  EtaData eta;
  try {
    eta = eta_analysis(bundle, space);
  } catch (const Error& e) {
    led.failed("eta analysis", e.what());
    return led.take();
  }
  {
    // L_s(1 - K_s) = E[sum_{t > s} L_t dK_t | F_s] at deterministic times, each zeta_n and zeta.
    std::vector<StoppingMap> levels;
    for (Time t = 0; t <= horizon; ++t) levels.push_back(StoppingMap::constant(n, t));
    for (const auto& lv : eta.zeta_levels) levels.push_back(lv.time);
    levels.push_back(eta.zeta);
    std::size_t checked = 0, ok = 0;
    for (const auto& sigma : levels) {
      std::vector<Rational> tail(n);
      for (std::size_t a = 0; a < n; ++a)
        if (sigma.is_finite(a))
          for (Time t = sigma[a] + 1; t <= horizon; ++t) tail[a] += l.at(t, a) * detail::jump(k, t, a);
      const auto rhs = detail::cond_exp_at_stopping_time(tail, sigma, space);
      for (std::size_t a = 0; a < n; ++a) {
        if (!sigma.is_finite(a)) continue;
        ++checked;
        ok += l.at(sigma[a], a) * (1 - k.at(sigma[a], a)) == rhs[a];
      }
    }
    led.counts("L_s(1 - K_s) = E[sum_{t>s} L_t dK_t | F_s] at stopping levels", checked, ok);
  }
  {
    std::size_t checked = 0, ok = 0;
    Rational l_tau_zero = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (Time t = 0; t <= tau[a]; ++t) {
        ++checked;
        ok += sgn(l.at(t, a)) > 0;
      }
      if (sgn(l.at(tau[a], a)) == 0) l_tau_zero += space.prob(a);
    }
    led.counts("L > 0 on [[0, tau]]", checked, ok);
    led.scalar("P[L_tau = 0] = 0", l_tau_zero, 0);
  }
  {
    std::size_t event_ok = 0, lz_checked = 0, lz_ok = 0;
    for (std::size_t a = 0; a < n; ++a) {
      const Time zt = eta.zeta[a];
      bool other = false;
      if (zt != kInfinity) {
        const Rational k_minus = zt == 0 ? Rational(0) : k.at(zt - 1, a);
        const Rational& l_minus = l.at(zt == 0 ? 0 : zt - 1, a);
        other = k_minus < 1 && sgn(l_minus) > 0 && sgn(detail::jump(k, zt, a)) == 0;
      }
      event_ok += other == eta.lambda[a];
      if (eta.lambda[a]) {
        ++lz_checked;
        lz_ok += sgn(l.at(zt, a)) == 0;
      }
    }
    led.counts("Lambda = {zeta < oo, K_{zeta-} < 1, L_{zeta-} > 0, dK_zeta = 0}", n, event_ok);
    led.counts("L_zeta = 0 on Lambda", lz_checked, lz_ok);
  }
  led.scalar("P[eta > tau] = 1", probability(space, [&](std::size_t a) { return eta.eta[a] > tau[a]; }), 1);
  led.counts("eta >= 1", n, detail::count_points(0, n, [&](Time, std::size_t a) { return eta.eta[a] >= 1; }));
  led.flag("eta is an F-stopping time", true, is_stopping_time(eta.eta, space));
  led.counts("dD < 1", points, detail::count_points(horizon, n, [&](Time t, std::size_t a) {
               return detail::jump(eta.compensator, t, a) < 1;
             }));
  led.kind("1[[eta, oo[[ - D is an F-martingale", MartingaleKind::martingale,
           classify(indicator_path(eta.eta, horizon) - eta.compensator.with_tag(Measurability::adapted),
                    space)
               .kind);
  const ProcessPath& s = eta.arbitrage_asset;
  led.kind("S_arb is an F-martingale", MartingaleKind::martingale, classify(s, space).kind);
  const ProcessPath s_tau = stopped(s, tau);
  led.counts("S_arb^tau nondecreasing", points, detail::count_points(horizon, n, [&](Time t, std::size_t a) {
               return t == 0 || s_tau.at(t, a) >= s_tau.at(t - 1, a);
             }));
  const Rational eta_finite = probability(space, [&](std::size_t a) { return eta.eta.is_finite(a); });
  led.flag("P[S_arb_tau > 1] > 0 iff P[eta < oo] > 0", sgn(eta_finite) > 0,
           sgn(probability(space, [&](std::size_t a) { return s.at(tau[a], a) > 1; })) > 0);
  {
    Rational lhs = 0, rhs = 0;
    const Rational one = 1;
    for (std::size_t a = 0; a < n; ++a) {
      lhs += space.prob(a) * eta.compensator.at(tau[a], a);
      if (eta.eta.is_finite(a)) rhs += space.prob(a) * detail::left_limit(z, eta.eta[a], a, one);
    }
    led.scalar("E[D_tau] = E[Z_{eta-} 1{eta < oo}]", lhs, rhs);
  }

  // Enlarged filtration.
  const FinSpace g = progressive_filtration(space, tau);
  {
    bool refines = true;
    for (Time t = 0; t <= horizon; ++t) refines = refines && g.partition(t).refines(space.partition(t));
    led.flag("G_t refines F_t", true, refines);
    led.flag("tau is a G-stopping time", true, is_stopping_time(tau, g));
  }
  try {
    const ProcessPath one = ProcessPath::constant(Measurability::adapted, horizon, n, Rational(1));
    const ProcessPath inv_l = lift_at_random_time(one, tau, l);
    led.flag("1/L^tau is a G-supermartingale", true, classify(inv_l, g).is_supermartingale());
    led.kind("S_arb^tau / L^tau is a G-martingale", MartingaleKind::martingale,
             classify(lift_at_random_time(s, tau, l), g).kind);
    const ProgressiveEquivalence eq = equivalence_report(space, tau);
    const bool eta_null = sgn(eq.eta_finite_prob) == 0;
    led.flag("P[eta < oo] = 0 iff 1/L^tau is a G-martingale", eta_null, eq.one_over_l_tau_is_g_martingale);
    led.flag("P[eta < oo] = 0 iff every lift X^tau/L^tau is a G-martingale", eta_null,
             eq.all_lifts_are_g_martingales);
  } catch (const Error& e) {
    led.failed("lifts to G", e.what());
  }
  return led.take();
}

inline std::vector<IdentityRow> initial_identities(const FinSpace& space, const Signal& signal) {
  detail::Ledger led;
  const Time horizon = space.horizon();
  const std::size_t n = space.atom_count();
  const std::size_t points = (horizon + 1) * n;
  const DensitySystem ds = density_system(space, signal);
  const std::size_t labels = ds.p.size();

  led.counts("sum_x gamma(x) p^x = 1", points, detail::count_points(horizon, n, [&](Time t, std::size_t a) {
               Rational sum = 0;
               for (std::size_t x = 0; x < labels; ++x) sum += ds.gamma[x] * ds.p[x].at(t, a);
               return sum == 1;
             }));
  {
    std::size_t ok = 0;
    for (const auto& p : ds.p) ok += classify(p, space).is_martingale();
    led.counts("each p^x is an F-martingale", labels, ok);
  }
  led.counts("p^J > 0", points, detail::count_points(horizon, n, [&](Time t, std::size_t a) {
               return sgn(ds.p[signal.label_of[a]].at(t, a)) > 0;
             }));
  {
    // exp-init over f = 1_C on one label, 0 on the others, for every F_t-cell C.
    std::size_t basis = 0, ok = 0;
    std::vector<std::vector<Rational>> f(labels, std::vector<Rational>(n));
    for (Time t = 0; t <= horizon; ++t)
      for (const auto& cell : space.partition(t).cells())
        for (std::size_t x = 0; x < labels; ++x) {
          for (auto& row : f) std::fill(row.begin(), row.end(), Rational(0));
          for (std::size_t a : cell) f[x][a] = 1;
          const auto [lhs, rhs] = exp_init_check(ds, space, signal.label_of, f, t);
          ++basis;
          ok += lhs == rhs;
        }
    led.counts("E[f^J_t] = sum_x gamma(x) E[f^x_t p^x_t] over a basis", basis, ok);
  }

  std::vector<StoppingMap> etas;
  for (const auto& p : ds.p) etas.push_back(jump_to_zero(p));
  {
    std::size_t ok = 0;
    for (const auto& e : etas) {
      const ProcessPath d = compensator(indicator_path(e, horizon), space);
      ok += detail::count_points(horizon, n, [&](Time t, std::size_t a) { return detail::jump(d, t, a) < 1; });
    }
    led.counts("dD^x < 1", points * labels, ok);
  }
  EtaFamily fam;
  try {
    fam = eta_family(ds, space, signal.label_of);
  } catch (const Error& e) {
    led.failed("eta family", e.what());
    return led.take();
  }
  {
    std::size_t ok = 0;
    for (const auto& le : fam.per_label) ok += classify(le.asset, space).is_martingale();
    led.counts("each S^x is an F-martingale", labels, ok);
  }
  led.counts("S^J nondecreasing", points, detail::count_points(horizon, n, [&](Time t, std::size_t a) {
               return t == 0 || fam.composed.at(t, a) >= fam.composed.at(t - 1, a);
             }));
  Rational weighted = 0;
  for (std::size_t x = 0; x < labels; ++x)
    weighted += ds.gamma[x] * probability(space, [&](std::size_t a) { return etas[x].is_finite(a); });
  {
    const Rational nonconstant = probability(space, [&](std::size_t a) {
      for (Time t = 1; t <= horizon; ++t)
        if (fam.composed.at(t, a) != fam.composed.at(0, a)) return true;
      return false;
    });
    led.flag("P[S^J nonconstant] > 0 iff sum_x gamma(x) P[eta^x < oo] > 0", sgn(weighted) > 0,
             sgn(nonconstant) > 0);
  }
  {
    Rational lhs = 0, rhs = 0;
    for (std::size_t a = 0; a < n; ++a)
      lhs += space.prob(a) * fam.per_label[signal.label_of[a]].compensator.at(horizon, a);
    for (std::size_t x = 0; x < labels; ++x) {
      Rational inner = 0;
      for (std::size_t a = 0; a < n; ++a) {
        const Time e = etas[x][a];
        if (e <= horizon) inner += space.prob(a) * ds.p[x].at(e == 0 ? 0 : e - 1, a);
      }
      rhs += ds.gamma[x] * inner;
    }
    led.scalar("E[D^J_T] = sum_x gamma(x) E[p^x_{eta^x-} 1{eta^x <= T}]", lhs, rhs);
  }
  {
    const EtaBResult all = eta_B(ds, space, signal.label_of, std::vector<bool>(labels, true));
    led.counts("eta^E = oo", n, detail::count_points(0, n, [&](Time, std::size_t a) { return !all.eta.is_finite(a); }));
  }
  {
    const FinSpace g = initial_filtration(space, signal);
    const ProcessPath inv_pj = ProcessPath::generate(
        Measurability::ambient, horizon, n,
        [&](Time t, std::size_t a) { return Rational(1 / ds.p[signal.label_of[a]].at(t, a)); });
    led.flag("1/p^J is a G-supermartingale", true, classify(inv_pj, g).is_supermartingale());
    const InitialEquivalence eq = equivalence_report_initial(space, signal);
    const bool eta_null = sgn(eq.gamma_weighted_eta_prob) == 0;
    led.scalar("sum_x gamma(x) P[eta^x < oo] (two computations)", weighted, eq.gamma_weighted_eta_prob);
    led.flag("eta^x null for all x iff 1/p^J is a G-martingale", eta_null, eq.one_over_pj_is_g_martingale);
    led.flag("eta^x null for all x iff every lift X^J/p^J is a G-martingale", eta_null,
             eq.all_lifts_are_g_martingales);
  }
  return led.take();
}

}  // namespace enlarge

#endif  // ENLARGE_CHECKS_HPP_
