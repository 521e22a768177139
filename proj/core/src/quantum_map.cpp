#include "openmap/quantum_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "openmap/errors.hpp"

namespace openmap {

DiagonalProjector::DiagonalProjector(int dim, std::vector<int> kept_indices)
    : dim_(dim), kept_(std::move(kept_indices)) {
  if (dim_ <= 0) throw ValidationError("DiagonalProjector: dimension must be positive");
  std::sort(kept_.begin(), kept_.end());
  kept_.erase(std::unique(kept_.begin(), kept_.end()), kept_.end());
  if (!kept_.empty() && (kept_.front() < 0 || kept_.back() >= dim_)) {
    throw ValidationError("DiagonalProjector: index out of range");
  }
}

DiagonalProjector DiagonalProjector::identity(int dim) {
  std::vector<int> all(static_cast<std::size_t>(std::max(dim, 0)));
  for (int i = 0; i < dim; ++i) all[static_cast<std::size_t>(i)] = i;
  return {dim, std::move(all)};
}

bool DiagonalProjector::keeps(int index) const {
  return std::binary_search(kept_.begin(), kept_.end(), index);
}

DiagonalProjector DiagonalProjector::complement() const {
  std::vector<int> rest;
  rest.reserve(static_cast<std::size_t>(dim_) - kept_.size());
  for (int i = 0; i < dim_; ++i) {
    if (!keeps(i)) rest.push_back(i);
  }
  return {dim_, std::move(rest)};
}

ComplexVector DiagonalProjector::apply(const ComplexVector& v) const {
  if (v.size() != dim_) throw ValidationError("DiagonalProjector::apply: dimension mismatch");
  ComplexVector out = ComplexVector::Zero(dim_);
  for (int i : kept_) out(i) = v(i);
  return out;
}

ComplexMatrix DiagonalProjector::matrix() const {
  ComplexMatrix m = ComplexMatrix::Zero(dim_, dim_);
  for (int i : kept_) m(i, i) = 1.0;
  return m;
}

void require_baker_dimension(int n, const char* where) {
  if (n < 3 || n % 3 != 0) {
    throw ValidationError(std::string(where) + ": N must be a positive multiple of 3, got " +
                          std::to_string(n));
  }
}

ComplexMatrix dft_matrix(int n) {
  if (n <= 0) throw ValidationError("dft_matrix: N must be positive");
  ComplexMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < n; ++row) {
      // Reduce the phase modulo 4N before scaling so large N keeps full precision.
      const long long num = (2LL * row + 1) * (2LL * col + 1) % (4LL * n);
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(num) / (4.0 * n);
      f(row, col) = std::polar(scale, phase);
    }
  }
  return f;
}

ComplexMatrix baker_unitary(int n) {
  require_baker_dimension(n, "baker_unitary");
  const int third = n / 3;
  const ComplexMatrix block = dft_matrix(third);
  ComplexMatrix inner = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < 3; ++j) inner.block(j * third, j * third, third, third) = block;
  return dft_matrix(n).adjoint() * inner;
}

DiagonalProjector projector_for_region(const StripRegion& region, int n) {
  if (region.axis != Axis::position) {
    throw ValidationError("projector_for_region: only vertical (position) strips are diagonal");
  }
  if (n <= 0) throw ValidationError("projector_for_region: N must be positive");
  const Rational cell(1, n);
  for (const auto& iv : region.support.intervals()) {
    if (iv.length() < cell) {
      throw UnresolvedRegionError("projector_for_region: interval of width " +
                                  std::to_string(to_double(iv.length())) +
                                  " is finer than the grid spacing 1/" + std::to_string(n));
    }
  }
  std::vector<int> kept;
  for (const auto& iv : region.support.intervals()) {
    // Grid points (2n + 1) / (2N) in [lo, hi), located exactly.
    const Rational first = iv.lo * n - Rational(1, 2);
    const Rational last = iv.hi * n - Rational(1, 2);
    auto ceil_r = [](const Rational& r) {
      std::int64_t q = r.numerator() / r.denominator();
      if (r.numerator() % r.denominator() != 0 && r.numerator() > 0) ++q;
      return q;
    };
    const std::int64_t begin = std::max<std::int64_t>(0, ceil_r(first));
    const std::int64_t end = std::min<std::int64_t>(n, ceil_r(last));
    for (std::int64_t i = begin; i < end; ++i) kept.push_back(static_cast<int>(i));
  }
  return {n, std::move(kept)};
}

DiagonalProjector opening_projector(int n) {
  return projector_for_region(opening(), n);
}

DiagonalProjector escape_projector(int m, int n) {
  return projector_for_region(region_r_plus(m), n);
}

ComplexMatrix open_propagator(const ComplexMatrix& closed, const DiagonalProjector& opening_proj) {
  if (closed.rows() != closed.cols() || closed.rows() != opening_proj.dim()) {
    throw ValidationError("open_propagator: dimension mismatch");
  }
  ComplexMatrix out = closed;
  for (int col : opening_proj.kept_indices()) out.col(col).setZero();
  return out;
}

ComplexMatrix open_propagator(int n) {
  require_baker_dimension(n, "open_propagator");
  return open_propagator(baker_unitary(n), opening_projector(n));
}

ComplexMatrix open_propagator(const QuantizationConfig& config) {
  require_baker_dimension(config.dimension, "open_propagator");
  return open_propagator(baker_unitary(config.dimension),
                         projector_for_region(config.opening_region, config.dimension));
}

ComplexVector momentum_transform(const ComplexVector& state) {
  if (state.size() == 0) throw ValidationError("momentum_transform: empty state");
  // (F v)_m = N^{-1/2} e^{-i pi (m + 1/2)/N} sum_n [v_n e^{-i pi n / N}] e^{-2 pi i n m / N}
  const auto n = state.size();
  const double dn = static_cast<double>(n);
  std::vector<Complex> in(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    in[static_cast<std::size_t>(k)] = state(k) * std::polar(1.0, -std::numbers::pi * static_cast<double>(k) / dn);
  }
  std::vector<Complex> out;
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  ComplexVector result(n);
  const double scale = 1.0 / std::sqrt(dn);
  for (Eigen::Index m = 0; m < n; ++m) {
    result(m) = out[static_cast<std::size_t>(m)] *
                std::polar(scale, -std::numbers::pi * (static_cast<double>(m) + 0.5) / dn);
  }
  return result;
}

ComplexVector inverse_momentum_transform(const ComplexVector& state) {
  if (state.size() == 0) throw ValidationError("inverse_momentum_transform: empty state");
  // F is symmetric, so F^dagger v = conj(F conj(v)).
  return momentum_transform(state.conjugate()).conjugate();
}

}  // namespace openmap
