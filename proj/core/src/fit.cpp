#include "openmap/fit.hpp"

#include <cmath>

#include "openmap/errors.hpp"

namespace openmap {

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("least_squares_line: length mismatch");
  if (x.size() < 2) throw NumericalError("least_squares_line: fewer than two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw NumericalError("least_squares_line: abscissae are all equal");
  const double slope = sxy / sxx;
  if (!std::isfinite(slope)) throw NumericalError("least_squares_line: non-finite slope");
  return {slope, my - slope * mx};
}

}  // namespace openmap
