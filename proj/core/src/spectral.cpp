#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "openmap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "openmap/errors.hpp"

namespace openmap {

namespace {

struct RawEigen {
  std::vector<Complex> values;
  ComplexMatrix vectors;  // right eigenvectors as columns; empty if not requested
};

RawEigen lapack_eig(ComplexMatrix a, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  RawEigen out;
  out.values.resize(static_cast<std::size_t>(n));
  if (want_vectors) out.vectors.resize(n, n);
  Complex dummy;
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, a.data(), n, out.values.data(), &dummy, 1,
      want_vectors ? out.vectors.data() : &dummy, want_vectors ? n : 1);
  if (info != 0) {
    throw NumericalError("zgeev failed with info = " + std::to_string(info));
  }
  return out;
}

void fix_phase(ComplexVector& v) {
  const double norm = v.norm();
  if (norm == 0.0) return;
  v /= norm;
  // First component within a relative 1e-9 of the largest modulus, so that
  // symmetry-related ties resolve the same way on every platform.
  const double top = v.cwiseAbs().maxCoeff();
  Eigen::Index best = 0;
  while (std::abs(v(best)) < top * (1.0 - 1e-9)) ++best;
  v *= std::conj(v(best)) / std::abs(v(best));
}

long long modulus_key(Complex z) {
  return std::llround(std::abs(z) * 1e12);
}

bool spectrum_order(const ResonanceEigenpair& a, const ResonanceEigenpair& b) {
  const long long ka = modulus_key(a.z);
  const long long kb = modulus_key(b.z);
  if (ka != kb) return ka > kb;
  return std::arg(a.z) < std::arg(b.z);
}

double decay_rate(Complex z) {
  if (z == Complex(0.0, 0.0)) return std::numeric_limits<double>::infinity();
  return -std::log(std::norm(z));
}

// Greedy eigenvalue matching of left vectors (eigenvalues conj(w) of U^dagger)
// onto right pairs, visiting right pairs in spectrum order.
void attach_left_vectors(std::vector<ResonanceEigenpair>& pairs, const std::vector<Complex>& left_values,
                         const ComplexMatrix& left_vectors, double radius) {
  const std::size_t n = left_values.size();
  std::vector<bool> used(n, false);
  std::vector<Complex> targets(n);
  for (std::size_t j = 0; j < n; ++j) targets[j] = std::conj(left_values[j]);

  for (auto& pair : pairs) {
    std::size_t best = n;
    double best_dist = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> close;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(targets[j] - pair.z);
      if (d <= radius) close.push_back(j);
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best == n) {
      pair.matched = false;
      continue;
    }
    if (close.size() > 1) {
      double best_overlap = -1.0;
      for (std::size_t j : close) {
        const double overlap = std::abs(left_vectors.col(static_cast<Eigen::Index>(j)).dot(pair.right));
        if (overlap > best_overlap) {
          best_overlap = overlap;
          best = j;
        }
      }
    }
    used[best] = true;
    pair.matched = best_dist <= radius;
    pair.left = left_vectors.col(static_cast<Eigen::Index>(best));
    fix_phase(pair.left);
  }
}

void compute_residuals(std::vector<ResonanceEigenpair>& pairs, const ComplexMatrix& u, bool has_left) {
  const auto n = static_cast<Eigen::Index>(pairs.size());
  if (n == 0) return;
  ComplexMatrix rv(u.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) rv.col(i) = pairs[static_cast<std::size_t>(i)].right;
  const ComplexMatrix urv = u * rv;
  ComplexMatrix ulw;
  if (has_left) {
    ComplexMatrix lw(u.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) lw.col(i) = pairs[static_cast<std::size_t>(i)].left;
    ulw = u.adjoint() * lw;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& p = pairs[static_cast<std::size_t>(i)];
    p.residual_right = (urv.col(i) - p.z * p.right).norm();
    if (has_left) p.residual_left = (ulw.col(i) - std::conj(p.z) * p.left).norm();
  }
}

void require_square(const ComplexMatrix& u, const char* where) {
  if (u.rows() != u.cols() || u.rows() < 2) {
    throw ValidationError(std::string(where) + ": expected a square matrix of dimension >= 2");
  }
  if (!u.allFinite()) throw ValidationError(std::string(where) + ": matrix has non-finite entries");
}

struct StableRange {
  int rank = 0;
  Eigen::MatrixXcd range_basis;   // orthonormal basis of range(U^j)
  Eigen::MatrixXcd kernel_basis;  // orthonormal basis of ker(U^j)
};

StableRange stable_range(const ComplexMatrix& u, double threshold) {
  const auto n = u.rows();
  ComplexMatrix power = u;
  int previous = static_cast<int>(n);
  for (Eigen::Index j = 1; j <= n; ++j) {
    Eigen::BDCSVD<ComplexMatrix> svd(power, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > threshold) ++rank;
    }
    if (rank == previous || rank == 0) {
      StableRange out;
      out.rank = rank;
      out.range_basis = svd.matrixU().leftCols(rank);
      out.kernel_basis = svd.matrixV().rightCols(n - rank);
      return out;
    }
    previous = rank;
    power = u * power;
  }
  throw NumericalError("stable_range: rank of matrix powers did not stabilize");
}

std::vector<ResonanceEigenpair> pairs_from(const RawEigen& raw, const ComplexMatrix* lift) {
  std::vector<ResonanceEigenpair> pairs(raw.values.size());
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    auto& p = pairs[i];
    p.z = raw.values[i];
    p.gamma = decay_rate(p.z);
    const auto col = raw.vectors.col(static_cast<Eigen::Index>(i));
    p.right = lift ? ComplexVector(*lift * col) : ComplexVector(col);
    fix_phase(p.right);
  }
  return pairs;
}

}  // namespace

double Spectrum::max_residual_right() const {
  double r = 0.0;
  for (const auto& p : pairs) r = std::max(r, p.residual_right);
  return r;
}

double Spectrum::max_residual_left() const {
  double r = 0.0;
  for (const auto& p : pairs) r = std::max(r, p.residual_left);
  return r;
}

int Spectrum::unmatched_count() const {
  return static_cast<int>(std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return !p.matched; }));
}

Spectrum eigendecompose(const ComplexMatrix& u, const EigenOptions& options) {
  require_square(u, "eigendecompose");
  Spectrum s;
  s.dim = static_cast<int>(u.rows());
  s.has_left = options.compute_left;
  s.pairs = pairs_from(lapack_eig(u, true), nullptr);
  std::sort(s.pairs.begin(), s.pairs.end(), spectrum_order);
  if (options.compute_left) {
    const RawEigen left = lapack_eig(u.adjoint(), true);
    attach_left_vectors(s.pairs, left.values, left.vectors, options.match_radius);
  }
  compute_residuals(s.pairs, u, s.has_left);
  return s;
}

Spectrum eigendecompose_deflated(const ComplexMatrix& u, double rank_threshold, const EigenOptions& options) {
  require_square(u, "eigendecompose_deflated");
  const auto n = u.rows();
  const StableRange right_range = stable_range(u, rank_threshold);
  const int r = right_range.rank;

  Spectrum s;
  s.dim = static_cast<int>(n);
  s.has_left = options.compute_left;
  if (r > 0) {
    const ComplexMatrix& q = right_range.range_basis;
    const ComplexMatrix compressed = q.adjoint() * u * q;
    s.pairs = pairs_from(lapack_eig(compressed, true), &q);
  }
  std::sort(s.pairs.begin(), s.pairs.end(), spectrum_order);

  StableRange left_range;
  if (options.compute_left) {
    const ComplexMatrix ud = u.adjoint();
    left_range = stable_range(ud, rank_threshold);
    if (left_range.rank != r) {
      throw NumericalError("eigendecompose_deflated: left and right nonzero ranks differ");
    }
    if (r > 0) {
      const ComplexMatrix& q = left_range.range_basis;
      const RawEigen raw = lapack_eig(q.adjoint() * ud * q, true);
      const ComplexMatrix lifted = q * raw.vectors;
      attach_left_vectors(s.pairs, raw.values, lifted, options.match_radius);
    }
  }

  // Generalized null space: z = 0 exactly, vectors form an orthonormal basis.
  for (Eigen::Index i = 0; i < n - r; ++i) {
    ResonanceEigenpair p;
    p.z = Complex(0.0, 0.0);
    p.gamma = decay_rate(p.z);
    p.right = right_range.kernel_basis.col(i);
    fix_phase(p.right);
    if (options.compute_left) {
      // ker((U^dagger)^j) is the orthogonal complement of range(U^j).
      p.left = left_range.kernel_basis.col(i);
      fix_phase(p.left);
    }
    s.pairs.push_back(std::move(p));
  }
  compute_residuals(s.pairs, u, s.has_left);
  return s;
}

int nonzero_eigenvalue_count(const ComplexMatrix& u, double threshold) {
  require_square(u, "nonzero_eigenvalue_count");
  return stable_range(u, threshold).rank;
}

std::vector<ResonanceEigenpair> select_long_lived(const Spectrum& s, int count) {
  if (count < 1 || count > static_cast<int>(s.pairs.size())) {
    throw ValidationError("select_long_lived: count must lie in [1, N]");
  }
  return {s.pairs.begin(), s.pairs.begin() + count};
}

double weight(const ResonanceEigenpair& pair, const DiagonalProjector& proj, Side side) {
  const ComplexVector& v = side == Side::right ? pair.right : pair.left;
  if (v.size() != proj.dim()) throw ValidationError("weight: dimension mismatch");
  double w = 0.0;
  for (int i : proj.kept_indices()) w += std::norm(v(i));
  return w;
}

double weight_prediction(Complex z, int m) {
  if (m < 0) throw ValidationError("weight_prediction: m must be >= 0");
  const double r2 = std::norm(z);
  return std::pow(r2, m) * (1.0 - r2);
}

Eigen::MatrixXd biorthogonality_matrix(const Spectrum& s) {
  if (!s.has_left) throw ValidationError("biorthogonality_matrix: spectrum has no left eigenvectors");
  const auto n = static_cast<Eigen::Index>(s.pairs.size());
  ComplexMatrix left(s.dim, n);
  ComplexMatrix right(s.dim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    left.col(i) = s.pairs[static_cast<std::size_t>(i)].left;
    right.col(i) = s.pairs[static_cast<std::size_t>(i)].right;
  }
  return (left.adjoint() * right).cwiseAbs();
}

BiorthogonalityReport biorthogonality_report(const Spectrum& s, double separation) {
  const Eigen::MatrixXd b = biorthogonality_matrix(s);
  BiorthogonalityReport report;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    const auto& pi = s.pairs[static_cast<std::size_t>(i)];
    if (pi.matched) report.min_diagonal = std::min(report.min_diagonal, b(i, i));
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      if (std::abs(pi.z - s.pairs[static_cast<std::size_t>(j)].z) > separation) {
        report.max_off_diagonal = std::max(report.max_off_diagonal, b(i, j));
      }
    }
  }
  return report;
}

double propagation_identity_check(const Spectrum& s, const ComplexMatrix& u, int m) {
  if (m < 0) throw ValidationError("propagation_identity_check: m must be >= 0");
  if (m == 0 || s.pairs.empty()) return 0.0;
  const auto n = static_cast<Eigen::Index>(s.pairs.size());
  ComplexMatrix v(s.dim, n);
  for (Eigen::Index i = 0; i < n; ++i) v.col(i) = s.pairs[static_cast<std::size_t>(i)].right;
  ComplexMatrix w = v;
  for (int step = 0; step < m; ++step) w = u * w;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex zm = std::pow(s.pairs[static_cast<std::size_t>(i)].z, m);
    worst = std::max(worst, (w.col(i) - zm * v.col(i)).norm());
  }
  return worst;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "index,re_z,im_z,modulus,gamma,residual_right,residual_left,matched_flag\n";
  char buf[512];
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    const auto& p = s.pairs[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", i, p.z.real(), p.z.imag(),
                  p.modulus(), p.gamma, p.residual_right, p.residual_left, p.matched ? 1 : 0);
    out << buf;
  }
}

std::vector<double> eigenvalue_moduli(const ComplexMatrix& u) {
  require_square(u, "eigenvalue_moduli");
  const RawEigen raw = lapack_eig(u, false);
  std::vector<double> moduli;
  moduli.reserve(raw.values.size());
  for (Complex z : raw.values) moduli.push_back(std::abs(z));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  return moduli;
}

}  // namespace openmap
