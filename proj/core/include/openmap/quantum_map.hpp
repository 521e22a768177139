#pragma once

// Quantization of the triadic baker map on an N-dimensional Hilbert space.
//
// Position basis states |n> sit at q_n = (n + 1/2) / N. The shifted Fourier
// matrix F_N carries these to momentum states at p_m = (m + 1/2) / N and
// imposes antiperiodic boundary conditions.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "openmap/classical.hpp"

namespace openmap {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Diagonal 0/1 projector in the position basis.
class DiagonalProjector {
 public:
  DiagonalProjector(int dim, std::vector<int> kept_indices);

  static DiagonalProjector identity(int dim);

  int dim() const { return dim_; }
  const std::vector<int>& kept_indices() const { return kept_; }
  int trace() const { return static_cast<int>(kept_.size()); }
  bool keeps(int index) const;

  DiagonalProjector complement() const;
  ComplexVector apply(const ComplexVector& v) const;
  ComplexMatrix matrix() const;

 private:
  int dim_;
  std::vector<int> kept_;
};

struct QuantizationConfig {
  int dimension = 0;
  StripRegion opening_region = openmap::opening();
};

/// (F_N)_{nm} = N^{-1/2} exp(-2 pi i (n + 1/2)(m + 1/2) / N).
ComplexMatrix dft_matrix(int n);

/// U_N = F_N^{-1} diag(F_{N/3}, F_{N/3}, F_{N/3}), with F_N^{-1} = F_N^dagger.
ComplexMatrix baker_unitary(int n);

/// Indices n with (n + 1/2)/N inside the vertical strip. Throws
/// UnresolvedRegionError when the strip has an interval narrower than 1/N.
DiagonalProjector projector_for_region(const StripRegion& region, int n);

/// pi_0, the projector onto the middle-third opening.
DiagonalProjector opening_projector(int n);

/// pi_m, the projector onto R_+^m.
DiagonalProjector escape_projector(int m, int n);

/// U (I - pi), the map with the columns inside the opening zeroed.
ComplexMatrix open_propagator(const ComplexMatrix& closed, const DiagonalProjector& opening_proj);

/// Open baker propagator with the middle-third opening.
ComplexMatrix open_propagator(int n);

ComplexMatrix open_propagator(const QuantizationConfig& config);

/// Position to momentum representation: F_N v.
ComplexVector momentum_transform(const ComplexVector& state);

/// Momentum to position representation: F_N^dagger v.
ComplexVector inverse_momentum_transform(const ComplexVector& state);

/// Validates N as a positive multiple of 3 for baker constructions.
void require_baker_dimension(int n, const char* where);

}  // namespace openmap
