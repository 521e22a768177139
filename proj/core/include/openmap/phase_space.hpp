#pragma once

// Phase-space views of states on the quantum torus: coherent states, Husimi
// and Wigner distributions, position/momentum densities, and the structural
// measurements (Cantor mass, self-similarity, trapped-band mass) built on
// them.

#include <span>
#include <string>
#include <vector>

#include "openmap/classical.hpp"
#include "openmap/quantum_map.hpp"

namespace openmap {

enum class Normalization { unit_sum, raw };

/// Real-valued grid. 1D grids have rows == 1. For 2D phase-space grids the
/// row index is the q cell and the column index the p cell; cell (i, j) is
/// centred at ((i + 1/2)/rows, (j + 1/2)/cols).
struct DensityGrid {
  std::vector<std::string> axes;
  std::size_t rows = 1;
  std::size_t cols = 0;
  std::vector<double> values;
  Normalization normalization = Normalization::unit_sum;

  bool is_1d() const { return rows == 1; }
  std::size_t length() const { return values.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double total() const;
};

/// Wigner function on the doubled 2N x 2N lattice, q = a/(2N), p = b/(2N).
/// Values are signed. Odd rows (a = 2n + 1) sum to |<n|psi>|^2, odd columns
/// (b = 2m + 1) to |<p_m|psi>|^2; even rows and columns sum to zero.
struct WignerGrid {
  int dim = 0;
  std::vector<double> values;  // index a * side() + b

  std::size_t side() const { return 2 * static_cast<std::size_t>(dim); }
  double at(std::size_t a, std::size_t b) const { return values[a * side() + b]; }
  double total() const;
};

struct CoherentState {
  TorusPoint center;
  int dim = 0;
  ComplexVector vector;
};

/// Gaussian width parameter 1 / sqrt(2 pi N).
double coherent_width(int n);

/// Periodized Gaussian at `center`, antiperiodic in q, unit norm.
CoherentState coherent_state(const TorusPoint& center, int n);

DensityGrid husimi_grid(const ComplexVector& state, int g, Normalization mode = Normalization::unit_sum);

/// Mean of unit-sum Husimi grids of the given states.
DensityGrid husimi_average(std::span<const ComplexVector> states, int g);

WignerGrid wigner_grid(const ComplexVector& state);

/// Mean of the Wigner grids of unit-normalized states.
WignerGrid wigner_average(std::span<const ComplexVector> states);

/// Odd-row sums (length N).
std::vector<double> wigner_position_marginal(const WignerGrid& w);

/// Odd-column sums (length N).
std::vector<double> wigner_momentum_marginal(const WignerGrid& w);

DensityGrid position_density(const ComplexVector& state);
DensityGrid momentum_density(const ComplexVector& state);

/// Arithmetic mean renormalized to unit sum.
DensityGrid average_density(std::span<const DensityGrid> densities);

/// Fraction of the mass of a 1D density lying in cantor_approx(level) cells.
double cantor_mass(const DensityGrid& d, int level);

/// Fraction of a 2D phase-space grid's mass in cells whose centre coordinate
/// along `axis` lies in `band`.
double band_mass(const DensityGrid& grid, Axis axis, const IntervalUnion& band);

/// Pearson correlation between the density on [0, 1/factor) (renormalized)
/// and the full density block-averaged down to the same length.
double self_similarity_score(const DensityGrid& d, int factor = 3);

struct KillCheckResult {
  double max_norm = 0.0;
  std::vector<double> norms;  // one per accepted centre
  std::vector<TorusPoint> accepted;
  int excluded = 0;           // centres within 2 widths of the R_-^m boundary
};

/// ||(U^dagger)^m |x>|| for coherent states centred inside R_-^m.
KillCheckResult kill_property_check(const ComplexMatrix& u, int m, std::span<const TorusPoint> centers);

}  // namespace openmap
