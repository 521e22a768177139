#pragma once

// Resonance spectra of non-unitary propagators.
//
// Right eigenvectors come from the matrix itself, left eigenvectors from its
// conjugate transpose, and the two families are paired by eigenvalue. Both
// are normalized to unit Euclidean norm, with the largest-modulus component
// made real and positive.

#include <complex>
#include <iosfwd>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "openmap/quantum_map.hpp"

namespace openmap {

struct ResonanceEigenpair {
  Complex z;
  /// -ln|z|^2; +infinity for an exact zero eigenvalue.
  double gamma = 0.0;
  ComplexVector right;
  ComplexVector left;
  double residual_right = 0.0;  // ||U v - z v||
  double residual_left = 0.0;   // ||U^dagger w - conj(z) w||
  bool matched = true;

  double modulus() const { return std::abs(z); }
  bool is_null() const { return z == Complex(0.0, 0.0); }
};

struct Spectrum {
  int dim = 0;
  /// Sorted by |z| descending; ties (|z| equal to 1e-12) by arg(z) ascending.
  std::vector<ResonanceEigenpair> pairs;
  bool has_left = true;

  double max_residual_right() const;
  double max_residual_left() const;
  int unmatched_count() const;
};

struct EigenOptions {
  bool compute_left = true;
  /// Pairs whose eigenvalues differ by more than this are flagged unmatched.
  double match_radius = 1e-6;
};

/// Full dense eigendecomposition (LAPACK zgeev on U and on U^dagger).
Spectrum eigendecompose(const ComplexMatrix& u, const EigenOptions& options = {});

/// Eigendecomposition that splits off the generalized null space first.
///
/// The range of U^j stops shrinking once j reaches the nilpotency index of
/// the zero eigenvalue; that range is invariant and carries every nonzero
/// eigenvalue. Eigenpairs are computed on the compressed operator, and the
/// null-space directions are stored with z = 0 exactly. This avoids the
/// eps^{1/j} scatter that a dense solver produces on large Jordan blocks.
Spectrum eigendecompose_deflated(const ComplexMatrix& u, double rank_threshold = 1e-10,
                                 const EigenOptions& options = {});

/// Number of nonzero eigenvalues counted with algebraic multiplicity, from the
/// stabilized numerical rank of U^j (singular values above `threshold`).
int nonzero_eigenvalue_count(const ComplexMatrix& u, double threshold = 1e-10);

/// The `count` longest-lived pairs (largest |z|) in spectrum order.
std::vector<ResonanceEigenpair> select_long_lived(const Spectrum& s, int count);

enum class Side { left, right };

/// <v| pi |v> for the chosen eigenvector.
double weight(const ResonanceEigenpair& pair, const DiagonalProjector& proj, Side side = Side::right);

/// |z|^{2m} (1 - |z|^2).
double weight_prediction(Complex z, int m);

/// Entries |<L_n | R_m>|.
Eigen::MatrixXd biorthogonality_matrix(const Spectrum& s);

struct BiorthogonalityReport {
  double max_off_diagonal = 0.0;  // over pairs with |z_n - z_m| > separation
  double min_diagonal = std::numeric_limits<double>::infinity();
};

BiorthogonalityReport biorthogonality_report(const Spectrum& s, double separation = 1e-8);

/// max over pairs of ||U^m v - z^m v||.
double propagation_identity_check(const Spectrum& s, const ComplexMatrix& u, int m);

/// Spectrum table: index, re_z, im_z, modulus, gamma, residual_right,
/// residual_left, matched_flag; 17 significant digits.
void write_spectrum_csv(std::ostream& out, const Spectrum& s);

/// Moduli of all eigenvalues (eigenvalues only, no vectors), descending.
std::vector<double> eigenvalue_moduli(const ComplexMatrix& u);

}  // namespace openmap
