#pragma once

#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <utility>

#include "qcayley/errors.hpp"
#include "qcayley/linalg/types.hpp"

namespace qcayley {

/// The most recent k (time, state) pairs on a uniform time grid.
template <typename Real>
class InterpolationWindow {
 public:
  explicit InterpolationWindow(Index capacity) : capacity_(capacity) {
    if (capacity < 2) throw ParameterError("interpolation window needs capacity >= 2");
  }

  /// Appends a sample, evicting the oldest once the window is full.
  void push(Real t, Vector<Real> state) {
    if (!entries_.empty()) {
      const Real gap = t - entries_.back().first;
      if (!(gap > 0)) throw ParameterError("window times must be strictly increasing");
      // Rounding of t itself is allowed for when t is large against h.
      const Real slack = Real(1e-12) * spacing_or(gap) +
                         4 * std::numeric_limits<Real>::epsilon() * std::abs(t);
      if (entries_.size() >= 2 && std::abs(gap - spacing()) > slack) {
        throw ParameterError("window times must be uniformly spaced");
      }
      if (state.size() != entries_.back().second.size()) {
        throw ShapeError("window states differ in dimension");
      }
    }
    entries_.emplace_back(t, std::move(state));
    if (static_cast<Index>(entries_.size()) > capacity_) entries_.pop_front();
  }

  Index capacity() const { return capacity_; }
  Index size() const { return static_cast<Index>(entries_.size()); }
  bool full() const { return size() == capacity_; }

  Real spacing() const {
    if (entries_.size() < 2) throw StateError("window spacing needs two samples");
    return entries_[1].first - entries_[0].first;
  }

  Real first_time() const { return entries_.front().first; }
  Real last_time() const { return entries_.back().first; }
  const Vector<Real>& last_state() const { return entries_.back().second; }

  Real time(Index i) const { return entries_[static_cast<std::size_t>(i)].first; }
  const Vector<Real>& state(Index i) const { return entries_[static_cast<std::size_t>(i)].second; }

 private:
  Real spacing_or(Real fallback) const { return entries_.size() >= 2 ? spacing() : fallback; }

  Index capacity_;
  std::deque<std::pair<Real, Vector<Real>>> entries_;
};

/// Componentwise Lagrange polynomial of degree k-1 through the window,
/// evaluated at `t_star`. Extrapolation is allowed up to one spacing past the
/// newest sample. The result is not renormalized.
template <typename Real>
Vector<Real> lagrange_interpolate(const InterpolationWindow<Real>& window, Real t_star) {
  if (!window.full()) throw StateError("interpolation window is not full");
  const Real h = window.spacing();
  const Real slack = Real(1e-12) * h;
  if (t_star < window.first_time() - slack || t_star > window.last_time() + h + slack) {
    throw UsageError("interpolation time outside [first sample, last sample + spacing]");
  }
  // The basis sums to one, so interpolating offsets from the newest state is
  // the same polynomial and reproduces constant data exactly.
  const Index k = window.size();
  const Vector<Real>& anchor = window.last_state();
  Vector<Real> out = anchor;
  for (Index i = 0; i + 1 < k; ++i) {
    Real basis = 1;
    for (Index j = 0; j < k; ++j) {
      if (j == i) continue;
      basis *= (t_star - window.time(j)) / (window.time(i) - window.time(j));
    }
    out += basis * (window.state(i) - anchor);
  }
  return out;
}

}  // namespace qcayley
