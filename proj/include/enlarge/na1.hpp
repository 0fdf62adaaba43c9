#ifndef ENLARGE_NA1_HPP_
#define ENLARGE_NA1_HPP_

// NA1 on a finite tree. A strictly positive deflator exists iff every
// one-period conditional market admits strictly positive state weights; the
// deflator Y then gives an equivalent martingale measure dQ = Y_T dP and vice
// versa, so NA1 and classical no-arbitrage coincide here. A failing node
// yields a buy-and-hold position with nonnegative, nonzero gain, which is an
// arbitrage of the first kind from any initial capital x > 0.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
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

/// One-period market at a node: conditional child probabilities and the
/// per-asset price increments, increments[child][asset].
struct OneStepMarket {
  std::vector<Rational> q;
  std::vector<std::vector<Rational>> increments;

  std::size_t children() const { return q.size(); }
  std::size_t assets() const { return increments.empty() ? 0 : increments.front().size(); }
};

/// Exactly one of the branches is filled: weights (viable) or position.
struct OneStepResult {
  bool viable = false;
  std::vector<Rational> weights;   // y_c > 0, sum q_c y_c = 1, sum q_c y_c dS_c = 0
  std::vector<Rational> position;  // H with H.dS_c >= 0 for all c, > 0 for some c
};

namespace detail {

/// Phase-1 simplex with Bland's rule for {w >= 0 : A w = b}. Returns w if
/// feasible; otherwise fills `farkas` with p such that p^T A <= 0 and p^T b > 0.
class FeasibilitySolver {
 public:
  FeasibilitySolver(std::vector<std::vector<Rational>> a, std::vector<Rational> b)
      : rows_(a.size()), cols_(rows_ == 0 ? 0 : a.front().size()), sign_(rows_, 1) {
    tableau_.assign(rows_, std::vector<Rational>(cols_ + rows_ + 1));
    for (std::size_t i = 0; i < rows_; ++i) {
      if (sgn(b[i]) < 0) sign_[i] = -1;
      for (std::size_t j = 0; j < cols_; ++j) tableau_[i][j] = sign_[i] * a[i][j];
      tableau_[i][cols_ + i] = 1;
      tableau_[i][cols_ + rows_] = sign_[i] * b[i];
      basis_.push_back(cols_ + i);
    }
  }

  std::optional<std::vector<Rational>> solve(std::vector<Rational>& farkas) {
    const std::size_t rhs = cols_ + rows_;
    std::vector<Rational> reduced(cols_ + rows_);
    for (;;) {
      // Phase-1 costs: 0 on w, 1 on artificials.
      for (std::size_t j = 0; j < rhs; ++j) {
        reduced[j] = j >= cols_ ? 1 : 0;
        for (std::size_t i = 0; i < rows_; ++i)
          if (basis_[i] >= cols_) reduced[j] -= tableau_[i][j];
      }
      std::size_t entering = rhs;
      for (std::size_t j = 0; j < rhs; ++j)
        if (sgn(reduced[j]) < 0) {
          entering = j;
          break;
        }
      if (entering == rhs) break;
      std::size_t leaving = rows_;
      Rational best;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (sgn(tableau_[i][entering]) <= 0) continue;
        Rational ratio = tableau_[i][rhs] / tableau_[i][entering];
        if (leaving == rows_ || ratio < best || (ratio == best && basis_[i] < basis_[leaving])) {
          leaving = i;
          best = std::move(ratio);
        }
      }
      if (leaving == rows_) throw std::logic_error("phase-1 simplex is bounded below by 0");
      pivot(leaving, entering);
    }
    Rational objective = 0;
    for (std::size_t i = 0; i < rows_; ++i)
      if (basis_[i] >= cols_) objective += tableau_[i][rhs];
    if (sgn(objective) == 0) {
      std::vector<Rational> w(cols_);
      for (std::size_t i = 0; i < rows_; ++i)
        if (basis_[i] < cols_) w[basis_[i]] = tableau_[i][rhs];
      return w;
    }
    // Dual of the phase-1 problem: pi_i = c_B^T B^{-1} e_i, read from the
    // artificial columns. Then pi^T A' <= 0 and pi^T b' > 0; undo the row flips.
    farkas.assign(rows_, Rational(0));
    for (std::size_t r = 0; r < rows_; ++r) {
      Rational pi = 0;
      for (std::size_t i = 0; i < rows_; ++i)
        if (basis_[i] >= cols_) pi += tableau_[i][cols_ + r];
      farkas[r] = sign_[r] * pi;
    }
    return std::nullopt;
  }

 private:
  void pivot(std::size_t row, std::size_t col) {
    const Rational p = tableau_[row][col];
    for (auto& v : tableau_[row]) v /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row || sgn(tableau_[i][col]) == 0) continue;
      const Rational factor = tableau_[i][col];
      for (std::size_t j = 0; j < tableau_[i].size(); ++j) tableau_[i][j] -= factor * tableau_[row][j];
    }
    basis_[row] = col;
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<int> sign_;
  std::vector<std::vector<Rational>> tableau_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Stiemke alternative for one node: weights z >= 1 with sum_c z_c dS_c = 0,
/// or a position H with H.dS_c >= 0 everywhere and > 0 somewhere.
inline OneStepResult check_one_step(const OneStepMarket& m) {
  const std::size_t n = m.children();
  const std::size_t d = m.assets();
  if (n == 0) throw InputError("one-step market has no children");
  Rational qsum = 0;
  for (const auto& q : m.q) {
    if (sgn(q) <= 0) throw InputError("one-step market has a nonpositive child probability");
    qsum += q;
  }
  if (qsum != 1) throw InputError("one-step child probabilities do not sum to 1");
  for (const auto& row : m.increments)
    if (row.size() != d) throw InputError("one-step increments are ragged");

  OneStepResult out;
  // Fast path: already a martingale step.
  bool martingale = true;
  for (std::size_t i = 0; i < d && martingale; ++i) {
    Rational drift = 0;
    for (std::size_t c = 0; c < n; ++c) drift += m.q[c] * m.increments[c][i];
    martingale = sgn(drift) == 0;
  }
  if (martingale) {
    out.viable = true;
    out.weights.assign(n, Rational(1));
    return out;
  }

  // z = 1 + w, w >= 0: A w = -A 1 with A[i][c] = dS^i_c.
  std::vector<std::vector<Rational>> a(d, std::vector<Rational>(n));
  std::vector<Rational> b(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t c = 0; c < n; ++c) {
      a[i][c] = m.increments[c][i];
      b[i] -= m.increments[c][i];
    }
  std::vector<Rational> farkas;
  detail::FeasibilitySolver solver(a, b);
  if (auto w = solver.solve(farkas)) {
    std::vector<Rational> z(n);
    Rational total = 0;
    for (std::size_t c = 0; c < n; ++c) {
      z[c] = 1 + (*w)[c];
      total += z[c];
    }
    for (std::size_t i = 0; i < d; ++i) {
      Rational check = 0;
      for (std::size_t c = 0; c < n; ++c) check += z[c] * m.increments[c][i];
      if (sgn(check) != 0) throw std::logic_error("one-step weights fail verification");
    }
    out.viable = true;
    out.weights.resize(n);
    for (std::size_t c = 0; c < n; ++c) out.weights[c] = z[c] / (m.q[c] * total);
    return out;
  }
  // farkas^T A <= 0 and farkas^T b > 0. With H = -farkas, H.dS_c >= 0 for
  // every child and sum_c H.dS_c = -H^T b > 0 because b = -A 1.
  out.position.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.position[i] = -farkas[i];
  Rational total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    Rational gain = 0;
    for (std::size_t i = 0; i < d; ++i) gain += out.position[i] * m.increments[c][i];
    if (sgn(gain) < 0) throw std::logic_error("one-step position fails verification");
    total += gain;
  }
  if (sgn(total) <= 0) throw std::logic_error("one-step position has no gain");
  return out;
}

/// One-period arbitrage at a node, packaged as an arbitrage of the first kind:
/// from capital x, hold `position` over (time, time + 1] on `atoms`.
struct ArbitrageCertificate {
  Time time = 0;
  std::size_t cell = 0;
  std::vector<std::size_t> atoms;
  std::vector<std::string> asset_names;
  std::vector<Rational> position;
  std::vector<std::vector<std::size_t>> child_cells;
  std::vector<Rational> wealth_increment;  // per child
  std::vector<Rational> claim;             // chi per atom

  /// X^x = x + H.(S_{t+1} - S_t) on the cell from time + 1 on.
  ProcessPath wealth(const Rational& x, Time horizon) const {
    return ProcessPath::generate(Measurability::adapted, horizon, claim.size(),
                                 [&](Time s, std::size_t a) {
                                   return s > time ? Rational(x + claim[a]) : x;
                                 });
  }
};

struct Na1Verdict {
  bool holds = true;
  std::optional<ProcessPath> deflator;
  std::vector<ArbitrageCertificate> certificates;

  const ArbitrageCertificate* certificate() const {
    return certificates.empty() ? nullptr : &certificates.front();
  }
};

/// Walks nodes time-major then cell-minor. With `stop`, increments after the
/// stopping time are zero.
inline Na1Verdict check_na1(const FinSpace& space, const std::vector<Asset>& assets,
                            const std::optional<StoppingMap>& stop = std::nullopt) {
  std::vector<ProcessPath> paths;
  for (const auto& s : assets) {
    require_adapted(s.path, space, "asset " + s.name);
    paths.push_back(s.path);
  }
  if (stop) {
    if (!is_stopping_time(*stop, space)) throw InputError("stop is not a stopping time");
    for (auto& p : paths) p = stopped(p, *stop);
  }
  const Time horizon = space.horizon();
  const std::size_t n = space.atom_count();
  std::vector<std::vector<Rational>> y(horizon + 1, std::vector<Rational>(n, Rational(1)));
  Na1Verdict verdict;
  for (Time t = 0; t < horizon; ++t) {
    const Partition& parent = space.partition(t);
    const Partition& child = space.partition(t + 1);
    for (std::size_t c = 0; c < parent.cell_count(); ++c) {
      const auto& cell = parent.cell(c);
      std::vector<std::size_t> kids;
      for (std::size_t a : cell)
        if (std::find(kids.begin(), kids.end(), child.cell_of(a)) == kids.end())
          kids.push_back(child.cell_of(a));
      const Rational mass = space.cell_prob(t, c);
      OneStepMarket m;
      for (std::size_t k : kids) {
        m.q.push_back(space.cell_prob(t + 1, k) / mass);
        std::vector<Rational> inc(paths.size());
        const std::size_t rep = child.cell(k).front();
        for (std::size_t i = 0; i < paths.size(); ++i) inc[i] = paths[i].at(t + 1, rep) - paths[i].at(t, rep);
        m.increments.push_back(std::move(inc));
      }
      const OneStepResult r = check_one_step(m);
      if (r.viable) {
        for (std::size_t k = 0; k < kids.size(); ++k)
          for (std::size_t a : child.cell(kids[k])) y[t + 1][a] = y[t][a] * r.weights[k];
        continue;
      }
      verdict.holds = false;
      ArbitrageCertificate cert;
      cert.time = t;
      cert.cell = c;
      cert.atoms = cell;
      for (const auto& s : assets) cert.asset_names.push_back(s.name);
      cert.position = r.position;
      cert.claim.assign(n, Rational(0));
      for (std::size_t k = 0; k < kids.size(); ++k) {
        cert.child_cells.push_back(child.cell(kids[k]));
        Rational gain = 0;
        for (std::size_t i = 0; i < paths.size(); ++i) gain += r.position[i] * m.increments[k][i];
        for (std::size_t a : child.cell(kids[k])) cert.claim[a] = gain;
        cert.wealth_increment.push_back(std::move(gain));
      }
      verdict.certificates.push_back(std::move(cert));
      for (std::size_t k = 0; k < kids.size(); ++k)
        for (std::size_t a : child.cell(kids[k])) y[t + 1][a] = y[t][a];
    }
  }
  if (verdict.holds) verdict.deflator = ProcessPath(Measurability::adapted, std::move(y));
  return verdict;
}

/// NA1 of the market as traded in G.
inline Na1Verdict check_na1(const GMarket& gm) { return check_na1(gm.enlarged, gm.traded); }

/// True iff Y > 0, Y_0 = 1, and Y and Y S^i are martingales on `space`.
inline bool verify_deflator(const ProcessPath& y, const std::vector<Asset>& assets,
                            const FinSpace& space) {
  return !deflator_defect(y, assets, space).has_value();
}

struct LocalizedLevel {
  mpz_class n;
  StoppingMap zeta_n;
  Na1Verdict verdict;
};

struct LocalizedVerdict {
  std::vector<Asset> truncated;  // S^{eta-}
  std::vector<LocalizedLevel> levels;
  bool all_hold = true;
};

/// NA1(F, S~^{zeta_n}) for S~ = S^{eta-} at every distinct level zeta_n.
inline LocalizedVerdict check_na1_localized(const FinSpace& space, const std::vector<Asset>& assets,
                                            const EtaData& eta) {
  LocalizedVerdict out;
  for (const auto& s : assets) out.truncated.push_back({s.name, truncate_before(s.path, eta.eta)});
  for (const auto& level : eta.zeta_levels) {
    Na1Verdict v = check_na1(space, out.truncated, level.time);
    out.all_hold = out.all_hold && v.holds;
    out.levels.push_back({level.n, level.time, std::move(v)});
  }
  return out;
}

}  // namespace enlarge

#endif  // ENLARGE_NA1_HPP_
