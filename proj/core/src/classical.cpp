#include "openmap/classical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "openmap/errors.hpp"
#include "openmap/fit.hpp"

namespace openmap {

namespace {

constexpr int kMaxDigitDepth = 20;

using Wide = __int128;

Wide floor_scaled(const Rational& r, std::int64_t scale) {
  // r >= 0 for every endpoint handled here.
  return (static_cast<Wide>(r.numerator()) * scale) / r.denominator();
}

Wide ceil_scaled(const Rational& r, std::int64_t scale) {
  const Wide num = static_cast<Wide>(r.numerator()) * scale;
  return (num + r.denominator() - 1) / r.denominator();
}

void check_depth(int depth, const char* what) {
  if (depth > kMaxDigitDepth) {
    throw ValidationError(std::string(what) + ": digit depth " + std::to_string(depth) +
                          " exceeds the supported maximum of " + std::to_string(kMaxDigitDepth));
  }
}

// Intervals [x, x + 3^{-length-1}) where x has digits in {0,2} in the first
// `length` places followed by `tail_digit`. With tail_digit < 0 the interval
// has width 3^{-length} and no tail digit (Cantor approximant).
IntervalUnion digit_intervals(int length, int tail_digit) {
  const int depth = tail_digit >= 0 ? length + 1 : length;
  const std::int64_t den = pow3(depth);
  const std::int64_t count = std::int64_t{1} << length;
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t mask = 0; mask < count; ++mask) {
    std::int64_t num = 0;
    for (int i = 0; i < length; ++i) {
      const bool two = (mask >> (length - 1 - i)) & 1;
      num = num * 3 + (two ? 2 : 0);
    }
    if (tail_digit >= 0) num = num * 3 + tail_digit;
    out.push_back({Rational(num, den), Rational(num + 1, den)});
  }
  return IntervalUnion(std::move(out));
}

int leading_digit(double x) {
  return std::clamp(static_cast<int>(std::floor(3.0 * x)), 0, 2);
}

}  // namespace

TorusPoint::TorusPoint(double q, double p) {
  auto wrap = [](double v) {
    double r = v - std::floor(v);
    return r >= 1.0 ? 0.0 : r;
  };
  q_ = wrap(q);
  p_ = wrap(p);
}

bool Interval::contains(double x) const {
  return to_double(lo) <= x && x < to_double(hi);
}

IntervalUnion::IntervalUnion(std::vector<Interval> intervals) {
  for (const auto& iv : intervals) {
    if (iv.lo < 0 || iv.hi > 1 || !(iv.lo < iv.hi)) {
      throw ValidationError("IntervalUnion: interval must satisfy 0 <= lo < hi <= 1");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : intervals) {
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
}

IntervalUnion IntervalUnion::full() {
  return IntervalUnion({{Rational(0), Rational(1)}});
}

Rational IntervalUnion::measure() const {
  Rational total(0);
  for (const auto& iv : intervals_) total += iv.length();
  return total;
}

bool IntervalUnion::contains(double x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const Interval& iv) { return v < to_double(iv.lo); });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->contains(x);
}

IntervalUnion IntervalUnion::complement() const {
  std::vector<Interval> gaps;
  Rational cursor(0);
  for (const auto& iv : intervals_) {
    if (cursor < iv.lo) gaps.push_back({cursor, iv.lo});
    cursor = iv.hi;
  }
  if (cursor < 1) gaps.push_back({cursor, Rational(1)});
  return IntervalUnion(std::move(gaps));
}

IntervalUnion IntervalUnion::united(const IntervalUnion& other) const {
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return IntervalUnion(std::move(all));
}

IntervalUnion IntervalUnion::intersected(const IntervalUnion& other) const {
  std::vector<Interval> out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < intervals_.size() && j < other.intervals_.size()) {
    const auto& a = intervals_[i];
    const auto& b = other.intervals_[j];
    const Rational lo = std::max(a.lo, b.lo);
    const Rational hi = std::min(a.hi, b.hi);
    if (lo < hi) out.push_back({lo, hi});
    if (a.hi < b.hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return IntervalUnion(std::move(out));
}

IntervalUnion IntervalUnion::minus(const IntervalUnion& other) const {
  return intersected(other.complement());
}

IntervalUnion IntervalUnion::contracted_into_third(int digit) const {
  if (digit < 0 || digit > 2) throw ValidationError("contracted_into_third: digit must be 0, 1 or 2");
  std::vector<Interval> out;
  out.reserve(intervals_.size());
  for (const auto& iv : intervals_) {
    out.push_back({(iv.lo + digit) / 3, (iv.hi + digit) / 3});
  }
  return IntervalUnion(std::move(out));
}

bool StripRegion::contains(const TorusPoint& x) const {
  return support.contains(axis == Axis::position ? x.q() : x.p());
}

TorusPoint baker_forward(const TorusPoint& x) {
  const int d = leading_digit(x.q());
  return {3.0 * x.q() - d, (x.p() + d) / 3.0};
}

TorusPoint baker_inverse(const TorusPoint& x) {
  const int d = leading_digit(x.p());
  return {(x.q() + d) / 3.0, 3.0 * x.p() - d};
}

StripRegion opening() {
  return {Axis::position, IntervalUnion({{Rational(1, 3), Rational(2, 3)}})};
}

StripRegion region_r_plus(int m) {
  if (m < 0) throw ValidationError("region_r_plus: m must be >= 0");
  check_depth(m + 1, "region_r_plus");
  return {Axis::position, digit_intervals(m, 1)};
}

StripRegion region_r_minus(int m) {
  if (m < 1) throw ValidationError("region_r_minus: m must be >= 1");
  check_depth(m, "region_r_minus");
  // Momentum digits record past position digits, most recent first.
  return {Axis::momentum, digit_intervals(m - 1, 1)};
}

IntervalUnion cantor_approx(int level) {
  if (level < 0) throw ValidationError("cantor_approx: level must be >= 0");
  check_depth(level, "cantor_approx");
  return digit_intervals(level, -1);
}

StripRegion backward_preimage_outside_opening(const StripRegion& vertical) {
  if (vertical.axis != Axis::position) {
    throw ValidationError("backward_preimage_outside_opening: expected a vertical strip");
  }
  IntervalUnion pre;
  for (int d = 0; d < 3; ++d) pre = pre.united(vertical.support.contracted_into_third(d));
  return {Axis::position, pre.minus(opening().support)};
}

StripRegion forward_image_outside_opening(const StripRegion& horizontal) {
  if (horizontal.axis != Axis::momentum) {
    throw ValidationError("forward_image_outside_opening: expected a horizontal strip");
  }
  // The opening is the whole d = 1 third in q; the d = 0 and d = 2 thirds
  // stretch over all of [0,1) in q.
  IntervalUnion img;
  for (int d : {0, 2}) img = img.united(horizontal.support.contracted_into_third(d));
  return {Axis::momentum, img};
}

double escape_rate_estimate(int max_m) {
  if (max_m < 2) throw ValidationError("escape_rate_estimate: max_m must be >= 2");
  std::vector<double> xs;
  std::vector<double> ys;
  for (int m = 0; m <= max_m; ++m) {
    xs.push_back(m);
    ys.push_back(std::log(to_double(region_r_plus(m).measure())));
  }
  return -least_squares_line(xs, ys).slope;
}

std::int64_t box_count(const IntervalUnion& u, int level) {
  if (level < 0) throw ValidationError("box_count: level must be >= 0");
  const std::int64_t scale = pow3(level);
  std::int64_t count = 0;
  Wide last_box_end = -1;
  for (const auto& iv : u.intervals()) {
    Wide first = floor_scaled(iv.lo, scale);
    const Wide end = ceil_scaled(iv.hi, scale);
    first = std::max(first, last_box_end);
    if (end > first) count += static_cast<std::int64_t>(end - first);
    last_box_end = std::max(last_box_end, end);
  }
  return count;
}

double box_dimension(const IntervalUnion& u, std::span<const int> levels) {
  if (u.empty()) throw ValidationError("box_dimension: empty set has no dimension");
  if (levels.size() < 2) throw ValidationError("box_dimension: need at least two levels");
  if (!std::is_sorted(levels.begin(), levels.end()) ||
      std::adjacent_find(levels.begin(), levels.end()) != levels.end()) {
    throw ValidationError("box_dimension: levels must be strictly increasing");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (int l : levels) {
    xs.push_back(l * std::log(3.0));
    ys.push_back(std::log(static_cast<double>(box_count(u, l))));
  }
  return least_squares_line(xs, ys).slope;
}

double ehrenfest_time(int dimension) {
  if (dimension < 3 || dimension % 3 != 0) {
    throw ValidationError("ehrenfest_time: N must be a positive multiple of 3");
  }
  return std::log(dimension / 3.0) / std::log(3.0);
}

MapParameters triadic_baker_parameters(int dimension) {
  MapParameters params;
  params.lyapunov = std::log(3.0);
  params.escape_rate = std::log(1.5);
  params.ehrenfest_time = ehrenfest_time(dimension);
  params.channels = dimension / 3;
  params.dimension = dimension;
  return params;
}

std::int64_t pow3(int k) {
  if (k < 0 || k > 39) throw ValidationError("pow3: exponent out of range [0, 39]");
  std::int64_t v = 1;
  for (int i = 0; i < k; ++i) v *= 3;
  return v;
}

bool is_power_of_three(std::int64_t n) {
  if (n < 1) return false;
  while (n % 3 == 0) n /= 3;
  return n == 1;
}

int log3_exact(std::int64_t n) {
  if (!is_power_of_three(n)) throw ValidationError("expected a power of three, got " + std::to_string(n));
  int k = 0;
  while (n > 1) {
    n /= 3;
    ++k;
  }
  return k;
}

}  // namespace openmap
