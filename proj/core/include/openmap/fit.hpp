#pragma once

#include <span>

namespace openmap {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Unweighted ordinary least squares y ~ slope * x + intercept.
/// Throws NumericalError for fewer than two points or constant x.
LinearFit least_squares_line(std::span<const double> x, std::span<const double> y);

}  // namespace openmap
