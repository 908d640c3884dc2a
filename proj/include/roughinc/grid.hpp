#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace roughinc {

// A point of some dyadic partition of [0,T]: index * 2^-level * T.
// Kept as integers so that membership and ancestry are exact.
struct DyadicTime {
  std::int64_t index = 0;
  int level = 0;

  // Same point, written with the coarsest level that represents it.
  DyadicTime reduced() const {
    if (index == 0) return {0, 0};
    DyadicTime r = *this;
    while (r.level > 0 && (r.index & 1) == 0) {
      r.index >>= 1;
      --r.level;
    }
    return r;
  }

  // Same point at a finer (or equal) level.
  DyadicTime at_level(int target) const {
    if (target < level) {
      DyadicTime r = reduced();
      if (r.level > target) {
        throw std::invalid_argument("dyadic time not representable at level " + std::to_string(target));
      }
      return {r.index << (target - r.level), target};
    }
    return {index << (target - level), target};
  }

  double fraction() const { return std::ldexp(static_cast<double>(index), -level); }

  friend bool operator==(const DyadicTime& a, const DyadicTime& b) {
    DyadicTime ra = a.reduced(), rb = b.reduced();
    return ra.index == rb.index && ra.level == rb.level;
  }
  friend bool operator<(const DyadicTime& a, const DyadicTime& b) {
    int l = std::max(a.level, b.level);
    return a.at_level(l).index < b.at_level(l).index;
  }
};

// Uniform dyadic partition pi^(m) of [0,T]. Holds 2^m + 1 points.
class DyadicGrid {
 public:
  DyadicGrid() = default;
  DyadicGrid(double horizon, int level) : horizon_(horizon), level_(level) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw std::invalid_argument("grid horizon must be positive and finite");
    }
    if (level < 0 || level > 30) {
      throw std::invalid_argument("grid level must lie in [0, 30]");
    }
  }

  double horizon() const { return horizon_; }
  int level() const { return level_; }
  std::int64_t cells() const { return std::int64_t{1} << level_; }
  std::size_t size() const { return static_cast<std::size_t>(cells() + 1); }
  double spacing() const { return std::ldexp(horizon_, -level_); }

  // t_i = i * 2^-m * T; the last point is exactly T.
  double time(std::int64_t i) const {
    if (i == cells()) return horizon_;
    return std::ldexp(static_cast<double>(i) * horizon_, -level_);
  }
  double time(const DyadicTime& t) const { return time(t.at_level(level_).index); }

  std::vector<double> times() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = time(static_cast<std::int64_t>(i));
    return out;
  }

  DyadicTime point(std::int64_t i) const { return {i, level_}; }

  bool contains(const DyadicTime& t) const {
    DyadicTime r = t.reduced();
    return r.index >= 0 && r.level <= level_ && r.index <= (std::int64_t{1} << r.level);
  }

  // Coarser grid pi^(n) of the same interval.
  DyadicGrid coarsen(int n) const { return DyadicGrid(horizon_, n); }

  friend bool operator==(const DyadicGrid& a, const DyadicGrid& b) {
    return a.horizon_ == b.horizon_ && a.level_ == b.level_;
  }

 private:
  double horizon_ = 1.0;
  int level_ = 0;
};

inline DyadicGrid make_grid(double horizon, int level) { return DyadicGrid(horizon, level); }

namespace detail {
inline void require_interior(const DyadicTime& t, const DyadicGrid& grid) {
  if (t.index <= 0) throw std::invalid_argument("level/ancestor undefined at t = 0");
  if (!grid.contains(t)) throw std::invalid_argument("time is not a point of the grid");
}
}  // namespace detail

// M(t) = min{ j : t in pi^(j) }.
inline int level_of(const DyadicTime& t, const DyadicGrid& grid) {
  detail::require_interior(t, grid);
  DyadicTime r = t.reduced();
  return r.level;
}

// s(t) = max{ s in pi^(M(t)-1) : s < t }, and 0 for t = T. Returned at grid level.
inline DyadicTime ancestor(const DyadicTime& t, const DyadicGrid& grid) {
  detail::require_interior(t, grid);
  DyadicTime r = t.reduced();
  if (r.level == 0) return {0, grid.level()};
  DyadicTime parent{(r.index - 1) / 2, r.level - 1};
  return parent.at_level(grid.level());
}

// Index form of the two maps above for a point i of pi^(m), 0 < i <= 2^m.
inline int level_of_index(std::int64_t i, int m) {
  if (i == (std::int64_t{1} << m)) return 0;
  return m - std::countr_zero(static_cast<std::uint64_t>(i));
}

inline std::int64_t ancestor_index(std::int64_t i, int m) {
  int tz = std::countr_zero(static_cast<std::uint64_t>(i));
  int mi = m - tz;
  if (mi <= 0) return 0;
  std::int64_t odd = i >> tz;
  return ((odd - 1) / 2) << (tz + 1);
}

}  // namespace roughinc
