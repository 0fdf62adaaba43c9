#ifndef ENLARGE_INITIAL_HPP_
#define ENLARGE_INITIAL_HPP_

// Initial enlargement G_t = F_t v sigma(J) by a signal J with finitely many labels.

#include <optional>
#include <string>
#include <vector>

#include "enlarge/error.hpp"
#include "enlarge/market.hpp"
#include "enlarge/prob_core.hpp"
#include "enlarge/process.hpp"
#include "enlarge/progressive.hpp"
#include "enlarge/rational.hpp"
#include "enlarge/space.hpp"

namespace enlarge {

struct Signal {
  std::vector<std::string> labels;
  std::vector<std::size_t> label_of;  // per atom, index into labels
  std::vector<Rational> gamma;        // per label, P[J = x]
};

/// Builds J with gamma = law of J under the space's weights. A supplied gamma
/// must agree with that law exactly.
inline Signal make_signal(const FinSpace& space, std::vector<std::string> labels,
                          std::vector<std::size_t> label_of,
                          const std::optional<std::vector<Rational>>& gamma = std::nullopt) {
  if (label_of.size() != space.atom_count()) throw InputError("signal has wrong atom count");
  std::vector<Rational> law(labels.size());
  for (std::size_t a = 0; a < label_of.size(); ++a) {
    if (label_of[a] >= labels.size()) throw InputError("signal refers to an unknown label");
    law[label_of[a]] += space.prob(a);
  }
  for (std::size_t x = 0; x < labels.size(); ++x)
    if (sgn(law[x]) == 0) throw InputError("signal label " + labels[x] + " is never taken");
  if (gamma) {
    if (gamma->size() != labels.size()) throw InputError("gamma has wrong label count");
    for (std::size_t x = 0; x < labels.size(); ++x)
      if ((*gamma)[x] != law[x])
        throw InputError("inconsistent signal: gamma(" + labels[x] + ") = " + to_string((*gamma)[x]) +
                         " but P[J = " + labels[x] + "] = " + to_string(law[x]));
  }
  return {std::move(labels), std::move(label_of), std::move(law)};
}

/// p^x_t = P[J = x | F_t] / gamma(x), one path per label.
struct DensitySystem {
  std::vector<ProcessPath> p;
  std::vector<Rational> gamma;
};

inline DensitySystem density_system(const FinSpace& space, const Signal& signal) {
  if (signal.label_of.size() != space.atom_count()) throw InputError("signal has wrong atom count");
  DensitySystem ds;
  ds.gamma = signal.gamma;
  std::vector<Rational> indicator(space.atom_count());
  for (std::size_t x = 0; x < signal.labels.size(); ++x) {
    if (sgn(signal.gamma[x]) <= 0)
      throw InputError("inconsistent signal: gamma(" + signal.labels[x] + ") must be > 0");
    for (std::size_t a = 0; a < indicator.size(); ++a) indicator[a] = signal.label_of[a] == x ? 1 : 0;
    std::vector<std::vector<Rational>> v(space.horizon() + 1);
    for (Time t = 0; t <= space.horizon(); ++t) {
      v[t] = cond_exp(indicator, t, space);
      for (auto& value : v[t]) value /= signal.gamma[x];
    }
    ds.p.emplace_back(Measurability::adapted, std::move(v));
  }
  return ds;
}

/// X^{J(w)}_t(w) from one path per label.
inline ProcessPath compose_by_label(const std::vector<ProcessPath>& per_label,
                                    const std::vector<std::size_t>& label_of) {
  if (per_label.empty()) throw InputError("no labels to compose");
  return ProcessPath::generate(Measurability::ambient, per_label.front().horizon(), label_of.size(),
                               [&](Time t, std::size_t a) { return per_label.at(label_of[a]).at(t, a); });
}

struct LabelEta {
  StoppingMap zeta;
  StoppingMap eta;
  ProcessPath compensator;
  ProcessPath asset;
};

struct EtaFamily {
  std::vector<LabelEta> per_label;
  ProcessPath composed;  // S^J
};

/// Jump-to-zero time of a nonnegative martingale: its first zero, kept only
/// where the left limit is positive (X_{0-} = X_0).
inline StoppingMap jump_to_zero(const ProcessPath& x, StoppingMap* zeta_out = nullptr) {
  StoppingMap zeta = first_zero(x);
  std::vector<Time> eta(x.atom_count(), kInfinity);
  for (std::size_t a = 0; a < eta.size(); ++a) {
    const Time z = zeta[a];
    if (z != kInfinity && sgn(x.at(z == 0 ? 0 : z - 1, a)) > 0) eta[a] = z;
  }
  if (zeta_out) *zeta_out = std::move(zeta);
  return StoppingMap(std::move(eta));
}

inline LabelEta label_eta(const ProcessPath& density, const FinSpace& space) {
  LabelEta out;
  out.eta = jump_to_zero(density, &out.zeta);
  out.compensator = compensator(indicator_path(out.eta, space.horizon()), space);
  out.asset = stoch_exp_inverse_killed(out.compensator, out.eta);
  return out;
}

inline EtaFamily eta_family(const DensitySystem& ds, const FinSpace& space,
                            const std::vector<std::size_t>& label_of) {
  EtaFamily fam;
  std::vector<ProcessPath> assets;
  for (const auto& p : ds.p) {
    fam.per_label.push_back(label_eta(p, space));
    assets.push_back(fam.per_label.back().asset);
  }
  fam.composed = compose_by_label(assets, label_of);
  return fam;
}

inline FinSpace initial_filtration(const FinSpace& space, const Signal& signal) {
  const Partition j = Partition::from_keys<std::size_t>(signal.label_of);
  if (!space.ambient().refines(j))
    throw InputError("signal is not measurable with respect to the ambient partition");
  std::vector<Partition> g;
  for (const auto& part : space.filtration()) g.push_back(part.join(j));
  return space.with_filtration(std::move(g));
}

inline GMarket enlarge_initial(const FinSpace& space, const Signal& signal,
                               const std::vector<Asset>& assets) {
  for (const auto& s : assets) require_adapted(s.path, space, "asset " + s.name);
  return GMarket{Enlargement::initial, space, initial_filtration(space, signal), assets, assets,
                 std::nullopt, signal.label_of};
}

/// W = M^J / p^J with M^x = Y * S^x. Requires dS_{eta^x} = 0 and dY_{eta^x} = 0
/// on {eta^x < oo} for every label.
inline ProcessPath lift_deflator_initial(const ProcessPath& y, const DensitySystem& ds,
                                         const EtaFamily& fam, const GMarket& gm,
                                         const std::vector<std::string>& labels) {
  if (gm.kind != Enlargement::initial || !gm.label_of)
    throw InputError("lift_deflator_initial needs an initially enlarged market");
  if (auto defect = deflator_defect(y, gm.assets, gm.base))
    throw InputError("Y is not a deflator on F: " + *defect);
  for (std::size_t x = 0; x < fam.per_label.size(); ++x) {
    const StoppingMap& eta = fam.per_label[x].eta;
    for (std::size_t a = 0; a < gm.base.atom_count(); ++a) {
      const Time e = eta[a];
      if (e == kInfinity) continue;
      for (const auto& s : gm.assets)
        if (sgn(s.path.increment(e, a)) != 0)
          throw HypothesisError("asset " + s.name + " jumps at eta^" + labels[x] + " on atom " +
                                    gm.base.id(a),
                                Witness{e, {a}, labels[x]});
      if (sgn(y.increment(e, a)) != 0)
        throw HypothesisError("deflator jumps at eta^" + labels[x] + " on atom " + gm.base.id(a),
                              Witness{e, {a}, labels[x]});
    }
  }
  const auto& label_of = *gm.label_of;
  return ProcessPath::generate(Measurability::ambient, y.horizon(), y.atom_count(),
                               [&](Time t, std::size_t a) {
                                 const std::size_t x = label_of[a];
                                 return Rational(y.at(t, a) * fam.per_label[x].asset.at(t, a) /
                                                 ds.p[x].at(t, a));
                               });
}

/// Both sides of E[f^J_t] = sum_x gamma(x) E[f^x_t p^x_t]; f[x][atom] must be
/// F_t-measurable for each label.
inline std::pair<Rational, Rational> exp_init_check(const DensitySystem& ds, const FinSpace& space,
                                                    const std::vector<std::size_t>& label_of,
                                                    const std::vector<std::vector<Rational>>& f,
                                                    Time t) {
  if (t > space.horizon()) throw InputError("time outside 0..T");
  if (f.size() != ds.p.size()) throw InputError("f needs one row per label");
  Rational lhs = 0, rhs = 0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (f[x].size() != space.atom_count()) throw InputError("f row has wrong atom count");
    if (!space.partition(t).is_measurable<Rational>(f[x]))
      throw InputError("f is not F_t-measurable for a label");
    Rational inner = 0;
    for (std::size_t a = 0; a < space.atom_count(); ++a) inner += space.prob(a) * f[x][a] * ds.p[x].at(t, a);
    rhs += ds.gamma[x] * inner;
  }
  for (std::size_t a = 0; a < space.atom_count(); ++a) lhs += space.prob(a) * f[label_of[a]][a];
  return {lhs, rhs};
}

struct EtaBResult {
  ProcessPath martingale;  // P[J in B | F_t] / gamma(B)
  StoppingMap eta;
  ProcessPath compensator;
  ProcessPath asset;
  ProcessPath wealth;  // 1{J in B} (S - S_0)
  Rational nonconstant_prob;
};

inline EtaBResult eta_B(const DensitySystem& ds, const FinSpace& space,
                        const std::vector<std::size_t>& label_of, const std::vector<bool>& in_b) {
  if (in_b.size() != ds.p.size()) throw InputError("label subset has wrong size");
  Rational gamma_b = 0;
  for (std::size_t x = 0; x < in_b.size(); ++x)
    if (in_b[x]) gamma_b += ds.gamma[x];
  if (sgn(gamma_b) == 0) throw InputError("label subset has gamma(B) = 0");
  EtaBResult out;
  out.martingale = ProcessPath::generate(Measurability::adapted, space.horizon(), space.atom_count(),
                                         [&](Time t, std::size_t a) {
                                           Rational sum = 0;
                                           for (std::size_t x = 0; x < in_b.size(); ++x)
                                             if (in_b[x]) sum += ds.gamma[x] * ds.p[x].at(t, a);
                                           return Rational(sum / gamma_b);
                                         });
  out.eta = jump_to_zero(out.martingale);
  out.compensator = compensator(indicator_path(out.eta, space.horizon()), space);
  out.asset = stoch_exp_inverse_killed(out.compensator, out.eta);
  out.wealth = ProcessPath::generate(Measurability::ambient, space.horizon(), space.atom_count(),
                                     [&](Time t, std::size_t a) {
                                       return in_b[label_of[a]] ? Rational(out.asset.at(t, a) - out.asset.at(0, a))
                                                                : Rational(0);
                                     });
  out.nonconstant_prob = probability(space, [&](std::size_t a) {
    for (Time t = 0; t <= space.horizon(); ++t)
      if (sgn(out.wealth.at(t, a)) != 0) return true;
    return false;
  });
  return out;
}

struct InitialEquivalence {
  Rational gamma_weighted_eta_prob;
  bool one_over_pj_is_g_martingale = false;
  bool all_lifts_are_g_martingales = false;

  bool agree() const {
    const bool eta_null = sgn(gamma_weighted_eta_prob) == 0;
    return eta_null == one_over_pj_is_g_martingale && eta_null == all_lifts_are_g_martingales;
  }
};

/// The "all lifts" flag ranges over label-indexed families of nonnegative
/// F-martingales without a vanishing condition after eta^x; the extremal
/// families put E[1_C | F] on one label and 0 on the others.
inline InitialEquivalence equivalence_report_initial(const FinSpace& space, const Signal& signal) {
  const DensitySystem ds = density_system(space, signal);
  const FinSpace g = initial_filtration(space, signal);
  InitialEquivalence out;
  out.gamma_weighted_eta_prob = 0;
  for (std::size_t x = 0; x < ds.p.size(); ++x) {
    const StoppingMap eta = jump_to_zero(ds.p[x]);
    out.gamma_weighted_eta_prob +=
        ds.gamma[x] * probability(space, [&](std::size_t a) { return eta.is_finite(a); });
  }
  const ProcessPath inv_pj = ProcessPath::generate(
      Measurability::ambient, space.horizon(), space.atom_count(),
      [&](Time t, std::size_t a) { return Rational(1 / ds.p[signal.label_of[a]].at(t, a)); });
  out.one_over_pj_is_g_martingale = classify(inv_pj, g).is_martingale();
  out.all_lifts_are_g_martingales = true;
  const auto basis = martingale_basis(space);
  for (std::size_t x = 0; x < ds.p.size() && out.all_lifts_are_g_martingales; ++x)
    for (const auto& m : basis) {
      const ProcessPath lift = ProcessPath::generate(
          Measurability::ambient, space.horizon(), space.atom_count(), [&](Time t, std::size_t a) {
            return signal.label_of[a] == x ? Rational(m.at(t, a) / ds.p[x].at(t, a)) : Rational(0);
          });
      if (!classify(lift, g).is_martingale()) {
        out.all_lifts_are_g_martingales = false;
        break;
      }
    }
  return out;
}

inline std::vector<StoppingMap> eta_family_under_measure(const FinSpace& space, const Signal& signal,
                                                         const std::vector<Rational>& q) {
  const FinSpace qspace = space.with_probabilities(reweighted(space, q));
  const Signal qsignal = make_signal(qspace, signal.labels, signal.label_of);
  const DensitySystem ds = density_system(qspace, qsignal);
  std::vector<StoppingMap> out;
  for (const auto& p : ds.p) out.push_back(jump_to_zero(p));
  return out;
}

}  // namespace enlarge

#endif  // ENLARGE_INITIAL_HPP_
