#ifndef ENLARGE_SPACE_HPP_
#define ENLARGE_SPACE_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "enlarge/error.hpp"
#include "enlarge/rational.hpp"

namespace enlarge {

using Time = std::size_t;

/// Sentinel for a time that never occurs; compares greater than every horizon.
inline constexpr Time kInfinity = std::numeric_limits<Time>::max();

/// A partition of the atom set {0, ..., n-1}. Cells are kept in canonical
/// order (atoms sorted inside a cell, cells sorted by their smallest atom) so
/// that cell indices are reproducible.
class Partition {
 public:
  Partition() = default;

  static Partition from_cells(std::vector<std::vector<std::size_t>> cells,
                              std::size_t atom_count) {
    std::vector<std::size_t> owner(atom_count, kUnassigned);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) throw InputError("partition has an empty cell");
      for (std::size_t a : cells[c]) {
        if (a >= atom_count) throw InputError("partition refers to an unknown atom");
        if (owner[a] != kUnassigned) throw InputError("partition cells overlap");
        owner[a] = c;
      }
    }
    if (std::find(owner.begin(), owner.end(), kUnassigned) != owner.end())
      throw InputError("partition does not cover every atom");
    return from_owner(owner);
  }

  /// Level sets of an arbitrary key per atom.
  template <class Key>
  static Partition from_keys(std::span<const Key> keys) {
    std::map<Key, std::size_t> index;
    std::vector<std::size_t> owner(keys.size());
    for (std::size_t a = 0; a < keys.size(); ++a)
      owner[a] = index.try_emplace(keys[a], index.size()).first->second;
    return from_owner(owner);
  }

  static Partition trivial(std::size_t atom_count) {
    return from_owner(std::vector<std::size_t>(atom_count, 0));
  }

  static Partition discrete(std::size_t atom_count) {
    std::vector<std::size_t> owner(atom_count);
    std::iota(owner.begin(), owner.end(), std::size_t{0});
    return from_owner(owner);
  }

  std::size_t atom_count() const noexcept { return cell_of_.size(); }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  std::size_t cell_of(std::size_t atom) const { return cell_of_.at(atom); }
  const std::vector<std::size_t>& cell(std::size_t c) const { return cells_.at(c); }
  const std::vector<std::vector<std::size_t>>& cells() const noexcept { return cells_; }

  /// True when every cell of *this lies inside one cell of `coarser`.
  bool refines(const Partition& coarser) const {
    if (coarser.atom_count() != atom_count()) return false;
    for (const auto& cell : cells_) {
      const std::size_t target = coarser.cell_of(cell.front());
      for (std::size_t a : cell)
        if (coarser.cell_of(a) != target) return false;
    }
    return true;
  }

  /// Coarsest common refinement (the partition generating the joined sigma-field).
  Partition join(const Partition& other) const {
    if (other.atom_count() != atom_count())
      throw InputError("cannot join partitions of different atom sets");
    std::vector<std::pair<std::size_t, std::size_t>> keys(atom_count());
    for (std::size_t a = 0; a < atom_count(); ++a) keys[a] = {cell_of_[a], other.cell_of_[a]};
    return from_keys<std::pair<std::size_t, std::size_t>>(keys);
  }

  /// True when `values` is constant on every cell.
  template <class T>
  bool is_measurable(std::span<const T> values) const {
    for (const auto& cell : cells_)
      for (std::size_t a : cell)
        if (!(values[a] == values[cell.front()])) return false;
    return true;
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.cell_of_ == b.cell_of_;
  }

 private:
  static constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

  static Partition from_owner(const std::vector<std::size_t>& owner) {
    // Renumber cells by first appearance, which is the smallest atom.
    Partition p;
    std::unordered_map<std::size_t, std::size_t> renumber;
    p.cell_of_.resize(owner.size());
    for (std::size_t a = 0; a < owner.size(); ++a) {
      auto [it, inserted] = renumber.try_emplace(owner[a], p.cells_.size());
      if (inserted) p.cells_.emplace_back();
      p.cells_[it->second].push_back(a);
      p.cell_of_[a] = it->second;
    }
    return p;
  }

  std::vector<std::size_t> cell_of_;
  std::vector<std::vector<std::size_t>> cells_;
};

/// Per-atom time in {0, ..., T} or kInfinity. Used both for stopping times
/// and for random times such as tau, which need only be ambient-measurable.
class StoppingMap {
 public:
  StoppingMap() = default;
  explicit StoppingMap(std::vector<Time> values) : values_(std::move(values)) {}

  static StoppingMap constant(std::size_t atom_count, Time t) {
    return StoppingMap(std::vector<Time>(atom_count, t));
  }

  std::size_t size() const noexcept { return values_.size(); }
  Time operator[](std::size_t atom) const { return values_.at(atom); }
  bool is_finite(std::size_t atom) const { return values_.at(atom) != kInfinity; }
  const std::vector<Time>& values() const noexcept { return values_; }

  friend bool operator==(const StoppingMap&, const StoppingMap&) = default;

 private:
  std::vector<Time> values_;
};

/// Finite sample space with strictly positive rational weights, a refining
/// filtration F_0, ..., F_T and an ambient partition at least as fine as F_T.
class FinSpace {
 public:
  FinSpace(std::vector<std::string> ids, std::vector<Rational> probabilities,
           std::vector<Partition> filtration, std::optional<Partition> ambient = std::nullopt)
      : ids_(std::move(ids)),
        prob_(std::move(probabilities)),
        filtration_(std::move(filtration)),
        ambient_(ambient ? std::move(*ambient) : Partition{}) {
    if (!ambient) ambient_ = filtration_.empty() ? Partition{} : filtration_.back();
    validate();
  }

  std::size_t atom_count() const noexcept { return prob_.size(); }
  Time horizon() const noexcept { return filtration_.size() - 1; }
  const std::string& id(std::size_t atom) const { return ids_.at(atom); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const Rational& prob(std::size_t atom) const { return prob_.at(atom); }
  const std::vector<Rational>& probabilities() const noexcept { return prob_; }
  const Partition& partition(Time t) const { return filtration_.at(t); }
  const std::vector<Partition>& filtration() const noexcept { return filtration_; }
  const Partition& ambient() const noexcept { return ambient_; }

  std::optional<std::size_t> index_of(const std::string& id) const {
    auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - ids_.begin());
  }

  Rational cell_prob(Time t, std::size_t cell) const {
    Rational sum = 0;
    for (std::size_t a : partition(t).cell(cell)) sum += prob_[a];
    return sum;
  }

  FinSpace with_filtration(std::vector<Partition> filtration) const {
    return FinSpace(ids_, prob_, std::move(filtration), ambient_);
  }

  FinSpace with_probabilities(std::vector<Rational> probabilities) const {
    return FinSpace(ids_, std::move(probabilities), filtration_, ambient_);
  }

  FinSpace with_ambient(Partition ambient) const {
    return FinSpace(ids_, prob_, filtration_, std::move(ambient));
  }

 private:
  void validate() const {
    const std::size_t n = prob_.size();
    if (n == 0) throw InputError("sample space has no atoms");
    if (ids_.size() != n) throw InputError("atom ids and probabilities differ in length");
    {
      std::vector<std::string> sorted = ids_;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InputError("duplicate atom id");
    }
    Rational total = 0;
    for (const auto& p : prob_) {
      if (sgn(p) <= 0) throw InputError("invariant violated: atom probabilities must be > 0");
      total += p;
    }
    if (total != 1)
      throw InputError("invariant violated: probabilities sum to " + to_string(total) +
                       ", not 1");
    if (filtration_.size() < 2) throw InputError("invariant violated: horizon T must be >= 1");
    for (const auto& part : filtration_)
      if (part.atom_count() != n) throw InputError("filtration partition has wrong atom count");
    for (std::size_t t = 0; t + 1 < filtration_.size(); ++t)
      if (!filtration_[t + 1].refines(filtration_[t]))
        throw InputError("invariant violated: partition at t=" + std::to_string(t + 1) +
                         " does not refine t=" + std::to_string(t));
    if (ambient_.atom_count() != n || !ambient_.refines(filtration_.back()))
      throw InputError("invariant violated: ambient partition does not refine F_T");
  }

  std::vector<std::string> ids_;
  std::vector<Rational> prob_;
  std::vector<Partition> filtration_;
  Partition ambient_;
};

}  // namespace enlarge

#endif  // ENLARGE_SPACE_HPP_
