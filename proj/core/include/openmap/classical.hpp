#pragma once

// Classical geometry of the open triadic baker map on the unit torus.
//
// Escape regions, openings and Cantor approximants are stored exactly as
// unions of half-open intervals with rational (triadic) endpoints, so set
// identities such as the preimage recursion for R_+^m can be checked with
// operator== instead of a tolerance.

#include <cstdint>
#include <span>
#include <vector>

#include <boost/rational.hpp>

namespace openmap {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

/// Point (q, p) on the unit torus; both coordinates are reduced modulo 1.
class TorusPoint {
 public:
  TorusPoint() = default;
  TorusPoint(double q, double p);

  double q() const { return q_; }
  double p() const { return p_; }

 private:
  double q_ = 0.0;
  double p_ = 0.0;
};

/// Half-open interval [lo, hi) inside [0, 1).
struct Interval {
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
  bool contains(double x) const;
  bool operator==(const Interval&) const = default;
};

/// Finite union of disjoint half-open subintervals of [0, 1), kept sorted
/// with touching intervals merged so that equal sets compare equal.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<Interval> intervals);

  static IntervalUnion full();

  const std::vector<Interval>& intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return intervals_.empty(); }

  Rational measure() const;
  bool contains(double x) const;

  IntervalUnion complement() const;
  IntervalUnion united(const IntervalUnion& other) const;
  IntervalUnion intersected(const IntervalUnion& other) const;
  IntervalUnion minus(const IntervalUnion& other) const;

  /// The image of the set under x -> (x + digit) / 3.
  IntervalUnion contracted_into_third(int digit) const;

  bool operator==(const IntervalUnion&) const = default;

 private:
  std::vector<Interval> intervals_;
};

enum class Axis { position, momentum };

/// support x [0,1) for Axis::position (vertical strip), [0,1) x support for
/// Axis::momentum (horizontal strip).
struct StripRegion {
  Axis axis = Axis::position;
  IntervalUnion support;

  bool contains(const TorusPoint& x) const;
  Rational measure() const { return support.measure(); }
  bool operator==(const StripRegion&) const = default;
};

struct MapParameters {
  double lyapunov = 0.0;
  double escape_rate = 0.0;
  double ehrenfest_time = 0.0;
  int channels = 0;
  int dimension = 0;
};

TorusPoint baker_forward(const TorusPoint& x);
TorusPoint baker_inverse(const TorusPoint& x);

/// The middle vertical strip [1/3, 2/3) x [0, 1).
StripRegion opening();

/// Points entering the opening for the first time after exactly m forward
/// steps. R_+^0 is the opening itself.
StripRegion region_r_plus(int m);

/// Points that arrived from the opening m steps ago and not earlier,
/// m >= 1. R_-^1 is the forward image of the opening.
StripRegion region_r_minus(int m);

/// Level-`level` approximant of the middle-third Cantor set.
IntervalUnion cantor_approx(int level);

/// Preimage of a vertical strip with the opening removed:
/// U^{-1}(strip) \ O. Maps R_+^m onto R_+^{m+1}.
StripRegion backward_preimage_outside_opening(const StripRegion& vertical);

/// Forward image of a horizontal strip with the opening removed first:
/// U(strip \ O). Maps R_-^m onto R_-^{m+1}.
StripRegion forward_image_outside_opening(const StripRegion& horizontal);

/// Unweighted least-squares fit of log(measure R_+^m) over m = 0..max_m;
/// returns the decay rate (minus the slope).
double escape_rate_estimate(int max_m);

/// Box-counting dimension using boxes of size 3^{-l} for l in `levels`.
double box_dimension(const IntervalUnion& u, std::span<const int> levels);

/// Number of triadic boxes of size 3^{-level} meeting `u` in positive measure.
std::int64_t box_count(const IntervalUnion& u, int level);

/// ln(M) / ln(3) with M = N / 3 open channels.
double ehrenfest_time(int dimension);

MapParameters triadic_baker_parameters(int dimension);

/// 3^k as an integer; rejects exponents that overflow int64.
std::int64_t pow3(int k);

/// True when n = 3^k for some k >= 0.
bool is_power_of_three(std::int64_t n);

/// log_3(n) for an exact power of three; throws otherwise.
int log3_exact(std::int64_t n);

}  // namespace openmap
