#ifndef ENLARGE_PROB_CORE_HPP_
#define ENLARGE_PROB_CORE_HPP_

// Exact calculus on finite filtered probability spaces.
//
// On a finite space with a finite horizon every discrete local martingale is
// a true martingale (it is bounded), so all "local martingale" statements are
// checked with `classify(...) == martingale`.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "enlarge/error.hpp"
#include "enlarge/process.hpp"
#include "enlarge/rational.hpp"
#include "enlarge/space.hpp"

namespace enlarge {

/// E[X | partition] as a per-atom vector.
inline std::vector<Rational> cond_exp(std::span<const Rational> x, const Partition& part,
                                      std::span<const Rational> prob) {
  if (x.size() != part.atom_count() || prob.size() != part.atom_count())
    throw InputError("conditional expectation: size mismatch");
  std::vector<Rational> out(x.size());
  Rational mass, weighted;
  for (const auto& cell : part.cells()) {
    mass = 0;
    weighted = 0;
    for (std::size_t a : cell) {
      mass += prob[a];
      weighted += prob[a] * x[a];
    }
    weighted /= mass;
    for (std::size_t a : cell) out[a] = weighted;
  }
  return out;
}

/// E[X | F_t].
inline std::vector<Rational> cond_exp(std::span<const Rational> x, Time t, const FinSpace& space) {
  if (t > space.horizon())
    throw InputError("conditional expectation: time " + std::to_string(t) + " outside 0.." +
                     std::to_string(space.horizon()));
  return cond_exp(x, space.partition(t), space.probabilities());
}

inline Rational expectation(std::span<const Rational> x, std::span<const Rational> prob) {
  Rational sum = 0;
  for (std::size_t a = 0; a < x.size(); ++a) sum += prob[a] * x[a];
  return sum;
}

inline Rational expectation(std::span<const Rational> x, const FinSpace& space) {
  return expectation(x, space.probabilities());
}

template <class Pred>
Rational probability(const FinSpace& space, Pred&& pred) {
  Rational sum = 0;
  for (std::size_t a = 0; a < space.atom_count(); ++a)
    if (pred(a)) sum += space.prob(a);
  return sum;
}

enum class MartingaleKind { martingale, supermartingale, submartingale, none };

inline const char* to_string(MartingaleKind k) {
  switch (k) {
    case MartingaleKind::martingale: return "martingale";
    case MartingaleKind::supermartingale: return "supermartingale";
    case MartingaleKind::submartingale: return "submartingale";
    case MartingaleKind::none: return "none";
  }
  return "?";
}

/// A cell of the partition at `time`.
struct CellRef {
  Time time = 0;
  std::size_t cell = 0;
  friend bool operator==(const CellRef&, const CellRef&) = default;
};

/// Outcome of comparing E[X_{t+1} | F_t] with X_t on every cell. Each
/// optional holds the first (time-major, cell-minor) cell breaking the
/// corresponding property.
struct Classification {
  MartingaleKind kind = MartingaleKind::martingale;
  std::optional<CellRef> first_non_martingale;
  std::optional<CellRef> first_non_supermartingale;
  std::optional<CellRef> first_non_submartingale;

  bool is_martingale() const { return kind == MartingaleKind::martingale; }
  bool is_supermartingale() const {
    return kind == MartingaleKind::martingale || kind == MartingaleKind::supermartingale;
  }
};

inline Classification classify(const ProcessPath& x, const FinSpace& space) {
  require_adapted(x, space, "classified process");
  Classification out;
  Rational mass, next;
  for (Time t = 0; t < space.horizon(); ++t) {
    const auto& part = space.partition(t);
    for (std::size_t c = 0; c < part.cell_count(); ++c) {
      mass = 0;
      next = 0;
      for (std::size_t a : part.cell(c)) {
        mass += space.prob(a);
        next += space.prob(a) * x.at(t + 1, a);
      }
      next /= mass;
      const Rational& now = x.at(t, part.cell(c).front());
      const CellRef here{t, c};
      if (next != now && !out.first_non_martingale) out.first_non_martingale = here;
      if (next > now && !out.first_non_supermartingale) out.first_non_supermartingale = here;
      if (next < now && !out.first_non_submartingale) out.first_non_submartingale = here;
    }
  }
  if (!out.first_non_martingale)
    out.kind = MartingaleKind::martingale;
  else if (!out.first_non_supermartingale)
    out.kind = MartingaleKind::supermartingale;
  else if (!out.first_non_submartingale)
    out.kind = MartingaleKind::submartingale;
  else
    out.kind = MartingaleKind::none;
  return out;
}

inline bool is_stopping_time(const StoppingMap& sigma, const FinSpace& space) {
  if (sigma.size() != space.atom_count()) return false;
  std::vector<int> stopped(space.atom_count());
  for (Time t = 0; t <= space.horizon(); ++t) {
    for (std::size_t a = 0; a < stopped.size(); ++a) stopped[a] = sigma[a] <= t;
    if (!space.partition(t).is_measurable<int>(stopped)) return false;
  }
  return true;
}

/// The path 1{sigma <= t}.
inline ProcessPath indicator_path(const StoppingMap& sigma, Time horizon) {
  return ProcessPath::generate(Measurability::adapted, horizon, sigma.size(),
                               [&](Time t, std::size_t a) { return Rational(sigma[a] <= t ? 1 : 0); });
}

/// X_{sigma ^ t}.
inline ProcessPath stopped(const ProcessPath& x, const StoppingMap& sigma) {
  return ProcessPath::generate(x.tag(), x.horizon(), x.atom_count(), [&](Time t, std::size_t a) {
    return x.at(std::min(t, sigma[a]), a);
  });
}

/// X_{t-1} with X_{0-} = X_0; predictable whenever X is adapted.
inline ProcessPath lagged(const ProcessPath& x) {
  return ProcessPath::generate(Measurability::predictable, x.horizon(), x.atom_count(),
                               [&](Time t, std::size_t a) { return x.at(t == 0 ? 0 : t - 1, a); });
}

/// [X, Y]_t = sum_{1 <= s <= t} dX_s dY_s.
inline ProcessPath covariation(const ProcessPath& x, const ProcessPath& y) {
  detail::require_same_shape(x, y);
  std::vector<std::vector<Rational>> v(x.horizon() + 1, std::vector<Rational>(x.atom_count()));
  for (Time t = 1; t <= x.horizon(); ++t)
    for (std::size_t a = 0; a < x.atom_count(); ++a)
      v[t][a] = v[t - 1][a] + x.increment(t, a) * y.increment(t, a);
  return ProcessPath(Measurability::adapted, std::move(v));
}

/// Predictable compensator of an adapted 0/1 nondecreasing path H = 1[[sigma, oo[[:
/// dD_t = E[dH_t | F_{t-1}], D_0 = E[H_0] (F_{0-} trivial).
inline ProcessPath compensator(const ProcessPath& h, const FinSpace& space) {
  require_adapted(h, space, "compensated indicator");
  for (Time t = 0; t <= h.horizon(); ++t)
    for (std::size_t a = 0; a < h.atom_count(); ++a) {
      const auto& v = h.at(t, a);
      if ((v != 0 && v != 1) || (t > 0 && v < h.at(t - 1, a)))
        throw InputError("compensator: H is not of indicator form 1[[sigma, oo[[");
    }
  std::vector<std::vector<Rational>> d(h.horizon() + 1, std::vector<Rational>(h.atom_count()));
  const Rational d0 = expectation(h.row(0), space);
  for (auto& v : d[0]) v = d0;
  std::vector<Rational> jump(h.atom_count());
  for (Time t = 1; t <= h.horizon(); ++t) {
    for (std::size_t a = 0; a < jump.size(); ++a) jump[a] = h.at(t, a) - h.at(t - 1, a);
    const auto inc = cond_exp(jump, t - 1, space);
    for (std::size_t a = 0; a < jump.size(); ++a) d[t][a] = d[t - 1][a] + inc[a];
  }
  return ProcessPath(Measurability::predictable, std::move(d));
}

/// E(-D)^{-1} 1[[0, sigma[[ = prod_{s<=t} (1 - dD_s)^{-1} before sigma, 0 from sigma on.
/// dD_0 = D_0 (D_{0-} = 0). Throws HypothesisError if some dD_t >= 1.
inline ProcessPath stoch_exp_inverse_killed(const ProcessPath& d, const StoppingMap& sigma) {
  if (sigma.size() != d.atom_count()) throw InputError("stopping map has wrong atom count");
  for (Time t = 0; t <= d.horizon(); ++t)
    for (std::size_t a = 0; a < d.atom_count(); ++a) {
      const Rational jump = t == 0 ? d.at(0, a) : Rational(d.at(t, a) - d.at(t - 1, a));
      if (jump >= 1)
        throw HypothesisError("compensator jump dD_" + std::to_string(t) + " = " +
                                  to_string(jump) + " >= 1 (predictable jump to certainty)",
                              Witness{t, {a}, std::nullopt});
    }
  std::vector<std::vector<Rational>> out(d.horizon() + 1, std::vector<Rational>(d.atom_count()));
  for (std::size_t a = 0; a < d.atom_count(); ++a) {
    Rational inverse = 1;
    for (Time t = 0; t <= d.horizon(); ++t) {
      const Rational jump = t == 0 ? d.at(0, a) : Rational(d.at(t, a) - d.at(t - 1, a));
      inverse /= (1 - jump);
      out[t][a] = t < sigma[a] ? inverse : Rational(0);
    }
  }
  return ProcessPath(Measurability::adapted, std::move(out));
}

/// Discrete vector integral (H . X)_t = sum_{1 <= s <= t} sum_i H^i_s dX^i_s.
inline ProcessPath stoch_integral(std::span<const ProcessPath> h, std::span<const ProcessPath> x) {
  if (h.size() != x.size() || h.empty())
    throw InputError("stochastic integral: strategy and asset dimensions differ");
  for (std::size_t i = 0; i < h.size(); ++i) {
    detail::require_same_shape(h[i], x[i]);
    detail::require_same_shape(h[i], h[0]);
  }
  const Time horizon = x[0].horizon();
  const std::size_t n = x[0].atom_count();
  std::vector<std::vector<Rational>> v(horizon + 1, std::vector<Rational>(n));
  for (Time t = 1; t <= horizon; ++t)
    for (std::size_t a = 0; a < n; ++a) {
      v[t][a] = v[t - 1][a];
      for (std::size_t i = 0; i < h.size(); ++i) v[t][a] += h[i].at(t, a) * x[i].increment(t, a);
    }
  return ProcessPath(Measurability::adapted, std::move(v));
}

inline ProcessPath stoch_integral(const ProcessPath& h, const ProcessPath& x) {
  return stoch_integral(std::span<const ProcessPath>(&h, 1), std::span<const ProcessPath>(&x, 1));
}

/// Projection of a process adapted to the finer filtration of `fine` onto the
/// filtration of `coarse` (same atoms and weights).
inline ProcessPath optional_projection(const ProcessPath& x, const FinSpace& fine,
                                       const FinSpace& coarse) {
  if (fine.atom_count() != coarse.atom_count() || fine.horizon() != coarse.horizon() ||
      fine.probabilities() != coarse.probabilities())
    throw InputError("optional projection: spaces differ");
  for (Time t = 0; t <= fine.horizon(); ++t)
    if (!fine.partition(t).refines(coarse.partition(t)))
      throw InputError("optional projection: filtration at t=" + std::to_string(t) +
                       " does not refine the target filtration");
  require_adapted(x, fine, "projected process");
  std::vector<std::vector<Rational>> v(x.horizon() + 1);
  for (Time t = 0; t <= x.horizon(); ++t) v[t] = cond_exp(x.row(t), t, coarse);
  return ProcessPath(Measurability::adapted, std::move(v));
}

}  // namespace enlarge

#endif  // ENLARGE_PROB_CORE_HPP_
