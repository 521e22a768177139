#include "openmap/walsh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "openmap/errors.hpp"

namespace openmap {

namespace {

std::vector<int> ternary_digits(std::int64_t n, int k) {
  std::vector<int> digits(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    digits[static_cast<std::size_t>(i)] = static_cast<int>(n % 3);
    n /= 3;
  }
  return digits;
}

ComplexMatrix tensor_fourier(int k, bool reverse_rows) {
  const auto n = static_cast<int>(pow3(k));
  std::vector<std::vector<int>> digits(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) digits[static_cast<std::size_t>(i)] = ternary_digits(i, k);
  std::array<Complex, 3> roots;
  for (int j = 0; j < 3; ++j) roots[static_cast<std::size_t>(j)] = std::polar(1.0, -2.0 * std::numbers::pi * j / 3.0);
  const double scale = std::pow(3.0, -0.5 * k);
  ComplexMatrix w(n, n);
  for (int c = 0; c < n; ++c) {
    const auto& cd = digits[static_cast<std::size_t>(c)];
    for (int r = 0; r < n; ++r) {
      const auto& rd = digits[static_cast<std::size_t>(r)];
      int exponent = 0;
      for (int i = 0; i < k; ++i) {
        const int row_digit = reverse_rows ? rd[static_cast<std::size_t>(k - 1 - i)] : rd[static_cast<std::size_t>(i)];
        exponent += row_digit * cd[static_cast<std::size_t>(i)];
      }
      w(r, c) = scale * roots[static_cast<std::size_t>(exponent % 3)];
    }
  }
  return w;
}

}  // namespace

ComplexMatrix walsh_transform(int k, WalshDigitOrder order) {
  if (k < 1) throw ValidationError("walsh_transform: k must be >= 1");
  return tensor_fourier(k, order == WalshDigitOrder::reversed);
}

ComplexMatrix walsh_open_baker(int k, WalshDigitOrder order) {
  if (k < 2) throw ValidationError("walsh_open_baker: k must be >= 2");
  const auto n = static_cast<int>(pow3(k));
  const int third = n / 3;
  const ComplexMatrix block = tensor_fourier(k - 1, order != WalshDigitOrder::natural);
  const ComplexMatrix outer = tensor_fourier(k, order == WalshDigitOrder::reversed);
  ComplexMatrix inner = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < 3; ++j) inner.block(j * third, j * third, third, third) = block;
  return open_propagator(ComplexMatrix(outer.adjoint() * inner), opening_projector(n));
}

Spectrum walsh_spectrum(int k, WalshDigitOrder order) {
  return eigendecompose_deflated(walsh_open_baker(k, order), kWalshZeroThreshold);
}

std::vector<ExperimentRecord> walsh_spectrum_report(int k) {
  return walsh_spectrum_report(k, walsh_spectrum(k));
}

std::vector<ExperimentRecord> walsh_spectrum_report(int k, const Spectrum& s) {
  if (k < 2) throw ValidationError("walsh_spectrum_report: k must be >= 2");
  const auto n = static_cast<int>(pow3(k));
  if (s.dim != n) throw ValidationError("walsh_spectrum_report: spectrum dimension does not match 3^k");

  std::vector<DiagonalProjector> projectors;
  for (int m = 0; m < k; ++m) projectors.push_back(escape_projector(m, n));

  std::vector<ExperimentRecord> rows;
  int long_lived = 0;
  double max_eq8 = 0.0;
  double max_weight_m4 = 0.0;
  double max_weight_all = 0.0;
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    const auto& p = s.pairs[i];
    const bool is_long = p.modulus() > kWalshZeroThreshold;
    ExperimentRecord row("walsh_spectrum");
    row.set("k", k).set("N", n).set("index", static_cast<double>(i));
    row.set("re_z", p.z.real()).set("im_z", p.z.imag()).set("modulus", p.modulus());
    row.set("long_lived", is_long ? 1.0 : 0.0);
    if (is_long) {
      ++long_lived;
      const double eq8 = std::abs(weight(p, projectors[0]) - (1.0 - std::norm(p.z)));
      max_eq8 = std::max(max_eq8, eq8);
      row.set("opening_weight_residual", eq8);
      for (int m = 0; m < k; ++m) {
        const double res = std::abs(weight(p, projectors[static_cast<std::size_t>(m)]) - weight_prediction(p.z, m));
        row.set("weight_residual_m" + std::to_string(m), res);
        max_weight_all = std::max(max_weight_all, res);
        if (m <= 4) max_weight_m4 = std::max(max_weight_m4, res);
      }
    }
    rows.push_back(std::move(row));
  }

  ExperimentRecord summary("walsh_summary");
  summary.set("k", k).set("N", n);
  summary.set("zero_threshold", kWalshZeroThreshold);
  summary.set("long_lived_count", long_lived);
  summary.set("short_lived_count", n - long_lived);
  summary.set("kernel_dimension", n - long_lived);
  summary.set("rank_oracle_count", nonzero_eigenvalue_count(walsh_open_baker(k), kWalshZeroThreshold));
  summary.set("expected_count", std::pow(2.0, k));
  summary.set("max_opening_weight_residual", max_eq8);
  summary.set("max_weight_residual_m_le_4", max_weight_m4);
  summary.set("max_weight_residual_all_m", max_weight_all);
  summary.set("max_residual_right", s.max_residual_right());
  if (s.has_left) summary.set("max_residual_left", s.max_residual_left());
  rows.push_back(std::move(summary));
  return rows;
}

}  // namespace openmap
