#ifndef ENLARGE_TESTING_RANDOM_HPP_
#define ENLARGE_TESTING_RANDOM_HPP_

// Random finite models for property tests and the self-test runner.

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "enlarge/initial.hpp"
#include "enlarge/prob_core.hpp"
#include "enlarge/process.hpp"
#include "enlarge/space.hpp"

namespace enlarge::testkit {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Weights 1..max_weight normalized to 1; small weights keep denominators small.
inline std::vector<Rational> random_weights(Rng& rng, std::size_t n, std::size_t max_weight = 9) {
  std::vector<Rational> w(n);
  Rational total = 0;
  for (auto& v : w) {
    v = static_cast<long>(uniform(rng, 1, max_weight));
    total += v;
  }
  for (auto& v : w) v /= total;
  return w;
}

/// Each step splits every cell into up to `max_split` random blocks.
inline FinSpace random_space(Rng& rng, std::size_t atoms, Time horizon, std::size_t max_split = 3) {
  std::vector<std::string> ids(atoms);
  for (std::size_t a = 0; a < atoms; ++a) ids[a] = "w" + std::to_string(a + 1);
  std::vector<Partition> filtration{Partition::trivial(atoms)};
  for (Time t = 1; t <= horizon; ++t) {
    const Partition& prev = filtration.back();
    std::vector<std::pair<std::size_t, std::size_t>> keys(atoms);
    for (std::size_t c = 0; c < prev.cell_count(); ++c) {
      const std::size_t blocks = uniform(rng, 1, max_split);
      for (std::size_t a : prev.cell(c)) keys[a] = {c, uniform(rng, 0, blocks - 1)};
    }
    filtration.push_back(Partition::from_keys<std::pair<std::size_t, std::size_t>>(keys));
  }
  return FinSpace(std::move(ids), random_weights(rng, atoms), std::move(filtration));
}

inline FinSpace random_space(Rng& rng, std::size_t max_atoms, Time max_horizon,
                             std::size_t min_atoms, Time min_horizon) {
  return random_space(rng, uniform(rng, min_atoms, max_atoms), uniform(rng, min_horizon, max_horizon));
}

/// A random time with values in 0..T. Mixes uniform draws with times that
/// sit just before the F-information that reveals them, which makes Z jump
/// to zero often.
inline StoppingMap random_tau(Rng& rng, const FinSpace& space) {
  const Time horizon = space.horizon();
  std::vector<Time> tau(space.atom_count());
  const std::size_t style = uniform(rng, 0, 2);
  if (style == 0) {
    for (auto& v : tau) v = uniform(rng, 0, horizon);
  } else {
    // tau = (first time the F-cell leaves a random target set) - lag, clamped.
    std::vector<bool> target(space.partition(horizon).cell_count());
    for (std::size_t c = 0; c < target.size(); ++c) target[c] = uniform(rng, 0, 1) == 1;
    for (std::size_t a = 0; a < tau.size(); ++a) {
      Time hit = horizon;
      for (Time t = 0; t <= horizon; ++t) {
        const auto& part = space.partition(t);
        bool all_target = true;
        for (std::size_t b : part.cell(part.cell_of(a)))
          if (!target[space.partition(horizon).cell_of(b)]) {
            all_target = false;
            break;
          }
        if (all_target) {
          hit = t;
          break;
        }
      }
      const Time lag = uniform(rng, 0, style);
      tau[a] = hit >= lag ? hit - lag : 0;
      if (uniform(rng, 0, 5) == 0) tau[a] = uniform(rng, 0, horizon);
    }
  }
  return StoppingMap(std::move(tau));
}

/// A stopping time: each F_t-cell not yet stopped stops with probability
/// about 1/3; survivors keep the value oo.
inline StoppingMap random_stopping_time(Rng& rng, const FinSpace& space) {
  std::vector<Time> sigma(space.atom_count(), kInfinity);
  for (Time t = 0; t <= space.horizon(); ++t)
    for (const auto& cell : space.partition(t).cells()) {
      if (sigma[cell.front()] != kInfinity || uniform(rng, 0, 2) != 0) continue;
      for (std::size_t a : cell) sigma[a] = t;
    }
  return StoppingMap(std::move(sigma));
}

/// The space with its ambient partition enlarged by the level sets of `keys`.
template <class Key>
FinSpace with_ambient_keys(const FinSpace& space, const std::vector<Key>& keys) {
  return space.with_ambient(space.ambient().join(Partition::from_keys<Key>(keys)));
}

/// Strictly positive density with E_P[q] = 1.
inline std::vector<Rational> random_density(Rng& rng, const FinSpace& space) {
  std::vector<Rational> q(space.atom_count());
  Rational mean = 0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    q[a] = static_cast<long>(uniform(rng, 1, 9));
    mean += space.prob(a) * q[a];
  }
  for (auto& v : q) v /= mean;
  return q;
}

/// Adapted process with small integer values.
inline ProcessPath random_adapted(Rng& rng, const FinSpace& space, long lo = -3, long hi = 3) {
  std::vector<std::vector<Rational>> v(space.horizon() + 1, std::vector<Rational>(space.atom_count()));
  for (Time t = 0; t <= space.horizon(); ++t) {
    const auto& part = space.partition(t);
    for (const auto& cell : part.cells()) {
      const Rational x = std::uniform_int_distribution<long>(lo, hi)(rng);
      for (std::size_t a : cell) v[t][a] = x;
    }
  }
  return ProcessPath(Measurability::adapted, std::move(v));
}

/// Forward-built positive martingale. Increments at nodes where `frozen`
/// takes the value t are forced to 0 on those children, so the result does
/// not jump at the stopping time `frozen`.
inline ProcessPath random_martingale(Rng& rng, const FinSpace& space,
                                     const std::optional<StoppingMap>& frozen = std::nullopt) {
  const Time horizon = space.horizon();
  const std::size_t n = space.atom_count();
  std::vector<std::vector<Rational>> v(horizon + 1, std::vector<Rational>(n));
  const Rational start = static_cast<long>(2 * horizon + 2);
  for (auto& x : v[0]) x = start;
  for (Time t = 1; t <= horizon; ++t) {
    const auto& parent = space.partition(t - 1);
    const auto& child = space.partition(t);
    for (const auto& pcell : parent.cells()) {
      std::vector<std::size_t> kids;
      for (std::size_t a : pcell)
        if (std::find(kids.begin(), kids.end(), child.cell_of(a)) == kids.end())
          kids.push_back(child.cell_of(a));
      std::vector<Rational> inc(kids.size()), mass(kids.size());
      std::vector<bool> free(kids.size());
      Rational free_mass = 0, weighted = 0;
      for (std::size_t k = 0; k < kids.size(); ++k) {
        const auto& cell = child.cell(kids[k]);
        for (std::size_t a : cell) mass[k] += space.prob(a);
        free[k] = !(frozen && (*frozen)[cell.front()] == t);
        if (free[k]) {
          inc[k] = static_cast<long>(uniform(rng, 0, 2)) - 1;
          free_mass += mass[k];
          weighted += mass[k] * inc[k];
        }
      }
      for (std::size_t k = 0; k < kids.size(); ++k) {
        if (free[k]) inc[k] -= weighted / free_mass;
        for (std::size_t a : child.cell(kids[k])) v[t][a] = v[t - 1][a] + inc[k];
      }
    }
  }
  return ProcessPath(Measurability::adapted, std::move(v));
}

/// Positive supermartingale: a random martingale minus a predictable
/// nondecreasing drift of at most 1/2 per step, which keeps it above 0.
inline ProcessPath random_supermartingale(Rng& rng, const FinSpace& space) {
  const ProcessPath m = random_martingale(rng, space);
  std::vector<std::vector<Rational>> v = m.values();
  std::vector<Rational> drift(space.atom_count());
  for (Time t = 1; t <= space.horizon(); ++t) {
    const auto& parent = space.partition(t - 1);
    for (const auto& cell : parent.cells()) {
      const Rational d = Rational(static_cast<long>(uniform(rng, 0, 2)), 4);
      for (std::size_t a : cell) drift[a] += d;
    }
    for (std::size_t a = 0; a < drift.size(); ++a) v[t][a] -= drift[a];
  }
  return ProcessPath(Measurability::adapted, std::move(v));
}

/// Random signal with 1..max_labels labels, each label present.
inline Signal random_signal(Rng& rng, const FinSpace& space, std::size_t max_labels = 4) {
  const std::size_t k = std::min<std::size_t>(uniform(rng, 1, max_labels), space.atom_count());
  std::vector<std::size_t> label_of(space.atom_count());
  for (std::size_t a = 0; a < label_of.size(); ++a) label_of[a] = a < k ? a : uniform(rng, 0, k - 1);
  std::shuffle(label_of.begin(), label_of.end(), rng);
  std::vector<std::string> labels(k);
  for (std::size_t x = 0; x < k; ++x) labels[x] = "x" + std::to_string(x);
  return make_signal(space, std::move(labels), std::move(label_of));
}

}  // namespace enlarge::testkit

#endif  // ENLARGE_TESTING_RANDOM_HPP_
