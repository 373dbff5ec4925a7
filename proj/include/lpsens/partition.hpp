#pragma once

#include "lpsens/rational.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lpsens {

/// A function on the real line that is constant on each open cell between
/// finitely many exact breakpoints, with an independent value at every
/// breakpoint. Cells extend to -inf and +inf at the ends.
///
/// Layout: cells[0], points[0], cells[1], points[1], ..., cells[n], where
/// n = breakpoints.size(). Breakpoints are strictly increasing.
template <class T>
class Partition {
 public:
  Partition() : cells_{T{}} {}
  explicit Partition(T constant) : cells_{std::move(constant)} {}

  Partition(std::vector<Rational> breakpoints, std::vector<T> cells, std::vector<T> points)
      : breaks_(std::move(breakpoints)), cells_(std::move(cells)), points_(std::move(points)) {
    if (cells_.size() != breaks_.size() + 1 || points_.size() != breaks_.size()) {
      throw std::invalid_argument("partition layout mismatch");
    }
    for (std::size_t i = 1; i < breaks_.size(); ++i) {
      if (!(breaks_[i - 1] < breaks_[i])) {
        throw std::invalid_argument("partition breakpoints must strictly increase");
      }
    }
  }

  const std::vector<Rational>& breakpoints() const { return breaks_; }
  const std::vector<T>& cells() const { return cells_; }
  const std::vector<T>& points() const { return points_; }

  T at(const Rational& x) const {
    auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
    const auto k = static_cast<std::size_t>(it - breaks_.begin());
    if (it != breaks_.end() && *it == x) return points_[k];
    return cells_[k];
  }

  template <class F>
  auto map(F f) const -> Partition<decltype(f(std::declval<const T&>()))> {
    using R = decltype(f(std::declval<const T&>()));
    std::vector<R> cells;
    std::vector<R> points;
    cells.reserve(cells_.size());
    points.reserve(points_.size());
    for (const auto& c : cells_) cells.push_back(f(c));
    for (const auto& p : points_) points.push_back(f(p));
    return Partition<R>(breaks_, std::move(cells), std::move(points)).simplified();
  }

  /// Drops breakpoints at which the function is locally constant.
  Partition simplified() const {
    std::vector<Rational> breaks;
    std::vector<T> cells;
    std::vector<T> points;
    cells.push_back(cells_[0]);
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      const T& left = cells.back();
      if (points_[i] == left && cells_[i + 1] == left) continue;
      breaks.push_back(breaks_[i]);
      points.push_back(points_[i]);
      cells.push_back(cells_[i + 1]);
    }
    Partition out;
    out.breaks_ = std::move(breaks);
    out.cells_ = std::move(cells);
    out.points_ = std::move(points);
    return out;
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.breaks_ == b.breaks_ && a.cells_ == b.cells_ && a.points_ == b.points_;
  }

 private:
  template <class>
  friend class Partition;

  std::vector<Rational> breaks_;
  std::vector<T> cells_;
  std::vector<T> points_;
};

/// Pointwise combination over the common refinement, simplified.
template <class A, class B, class F>
auto combine(const Partition<A>& a, const Partition<B>& b, F op)
    -> Partition<decltype(op(std::declval<const A&>(), std::declval<const B&>()))> {
  using R = decltype(op(std::declval<const A&>(), std::declval<const B&>()));
  const auto& ab = a.breakpoints();
  const auto& bb = b.breakpoints();
  std::vector<Rational> breaks;
  std::vector<R> cells;
  std::vector<R> points;
  breaks.reserve(ab.size() + bb.size());
  cells.push_back(op(a.cells()[0], b.cells()[0]));
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ab.size() || j < bb.size()) {
    if (j == bb.size() || (i < ab.size() && ab[i] < bb[j])) {
      breaks.push_back(ab[i]);
      points.push_back(op(a.points()[i], b.cells()[j]));
      ++i;
    } else if (i == ab.size() || bb[j] < ab[i]) {
      breaks.push_back(bb[j]);
      points.push_back(op(a.cells()[i], b.points()[j]));
      ++j;
    } else {
      breaks.push_back(ab[i]);
      points.push_back(op(a.points()[i], b.points()[j]));
      ++i;
      ++j;
    }
    cells.push_back(op(a.cells()[i], b.cells()[j]));
  }
  return Partition<R>(std::move(breaks), std::move(cells), std::move(points)).simplified();
}

/// Balanced pairwise reduction; keeps many-way combines at n log n.
template <class T, class F>
Partition<T> reduce_all(std::vector<Partition<T>> parts, F op, T identity) {
  if (parts.empty()) return Partition<T>(identity);
  while (parts.size() > 1) {
    std::vector<Partition<T>> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t k = 0; k + 1 < parts.size(); k += 2) {
      next.push_back(combine(parts[k], parts[k + 1], op));
    }
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

}  // namespace lpsens
