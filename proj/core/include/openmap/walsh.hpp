#pragma once

// Walsh-Fourier quantization of the open triadic baker map.
//
// The Walsh transform on N = 3^k sites is the k-fold tensor power of the
// unshifted 3x3 Fourier matrix, followed by reversal of the ternary digits of
// the output index:
//
//   (W_N)_{rc} = 3^{-k/2} exp(-2 pi i / 3 * sum_i r_{k+1-i} c_i)
//
// where r_i, c_i are the i-th most significant ternary digits. With digit
// reversal applied to both W_N and the block factors W_{N/3}, the open map
// W_N^dagger diag(W_{N/3}, W_{N/3}, W_{N/3}) (I - pi_0) has exactly 2^k
// nonzero eigenvalues and every long-lived right eigenvector carries weight
// |z|^{2m}(1 - |z|^2) on R_+^m. The other digit orders are kept for
// comparison; they do not have this structure.

#include <vector>

#include "openmap/quantum_map.hpp"
#include "openmap/record.hpp"
#include "openmap/spectral.hpp"

namespace openmap {

enum class WalshDigitOrder {
  reversed,          // reversal on W_N and on the block factors (shipped)
  natural,           // plain tensor power everywhere
  block_reversal,    // reversal on the block factors only
};

constexpr double kWalshZeroThreshold = 1e-10;

ComplexMatrix walsh_transform(int k, WalshDigitOrder order = WalshDigitOrder::reversed);

ComplexMatrix walsh_open_baker(int k, WalshDigitOrder order = WalshDigitOrder::reversed);

/// Spectrum with the null space split off exactly (zero eigenvalues stored as 0).
Spectrum walsh_spectrum(int k, WalshDigitOrder order = WalshDigitOrder::reversed);

/// One row per eigenvalue (long_lived flag, escape-region weight residuals for
/// m = 0..k-1 on long-lived states) followed by a summary row with the kernel
/// dimension, rank-oracle count and maximum residuals.
std::vector<ExperimentRecord> walsh_spectrum_report(int k);

std::vector<ExperimentRecord> walsh_spectrum_report(int k, const Spectrum& s);

}  // namespace openmap
