#include "openmap/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/FFT>

#include "openmap/errors.hpp"

namespace openmap {

namespace {

constexpr double kPi = std::numbers::pi;

void require_states(std::span<const ComplexVector> states, const char* where) {
  if (states.empty()) throw ValidationError(std::string(where) + ": no states given");
  const auto n = states.front().size();
  for (const auto& s : states) {
    if (s.size() != n || n == 0) throw ValidationError(std::string(where) + ": states differ in length");
  }
}

DensityGrid density_1d(std::string axis, std::vector<double> values) {
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  if (total > 0.0) {
    for (double& v : values) v /= total;
  }
  DensityGrid d;
  d.axes = {std::move(axis)};
  d.rows = 1;
  d.cols = values.size();
  d.values = std::move(values);
  return d;
}

// Coherent states centred at ((i + 1/2)/g, (j + 1/2)/g) for fixed i, as columns.
ComplexMatrix coherent_column_block(int i, int g, int n) {
  ComplexMatrix block(n, g);
  for (int j = 0; j < g; ++j) {
    block.col(j) = coherent_state(TorusPoint((i + 0.5) / g, (j + 0.5) / g), n).vector;
  }
  return block;
}

}  // namespace

double DensityGrid::total() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

double WignerGrid::total() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

double coherent_width(int n) {
  if (n <= 0) throw ValidationError("coherent_width: N must be positive");
  return 1.0 / std::sqrt(2.0 * kPi * n);
}

CoherentState coherent_state(const TorusPoint& center, int n) {
  if (n < 3) throw ValidationError("coherent_state: N must be >= 3");
  const double q0 = center.q();
  const double p0 = center.p();
  ComplexVector v = ComplexVector::Zero(n);
  for (int k = 0; k < n; ++k) {
    const double qn = (k + 0.5) / n;
    Complex sum(0.0, 0.0);
    for (int nu = -1; nu <= 1; ++nu) {
      const double dq = qn - q0 + nu;
      const double amplitude = (nu == 0 ? 1.0 : -1.0) * std::exp(-kPi * n * dq * dq);
      const double phase = 2.0 * kPi * n * p0 * (qn + nu - 0.5 * q0);
      sum += std::polar(amplitude, phase);
    }
    v(k) = sum;
  }
  v.normalize();
  return {center, n, std::move(v)};
}

DensityGrid husimi_grid(const ComplexVector& state, int g, Normalization mode) {
  if (g < 8) throw ValidationError("husimi_grid: G must be >= 8");
  DensityGrid grid;
  if (mode == Normalization::unit_sum) {
    const ComplexVector states[] = {state};
    grid = husimi_average(states, g);
    return grid;
  }
  const int n = static_cast<int>(state.size());
  grid.axes = {"q", "p"};
  grid.rows = grid.cols = static_cast<std::size_t>(g);
  grid.values.assign(grid.rows * grid.cols, 0.0);
  grid.normalization = Normalization::raw;
  for (int i = 0; i < g; ++i) {
    const ComplexVector overlaps = coherent_column_block(i, g, n).adjoint() * state;
    for (int j = 0; j < g; ++j) grid.values[static_cast<std::size_t>(i * g + j)] = std::norm(overlaps(j));
  }
  return grid;
}

DensityGrid husimi_average(std::span<const ComplexVector> states, int g) {
  require_states(states, "husimi_average");
  if (g < 8) throw ValidationError("husimi_average: G must be >= 8");
  const int n = static_cast<int>(states.front().size());
  const auto count = static_cast<Eigen::Index>(states.size());
  ComplexMatrix columns(n, count);
  for (Eigen::Index s = 0; s < count; ++s) columns.col(s) = states[static_cast<std::size_t>(s)];

  const auto cells = static_cast<Eigen::Index>(g) * g;
  Eigen::MatrixXd raw(cells, count);
  for (int i = 0; i < g; ++i) {
    const ComplexMatrix overlaps = coherent_column_block(i, g, n).adjoint() * columns;
    raw.middleRows(static_cast<Eigen::Index>(i) * g, g) = overlaps.cwiseAbs2();
  }
  DensityGrid grid;
  grid.axes = {"q", "p"};
  grid.rows = grid.cols = static_cast<std::size_t>(g);
  grid.values.assign(static_cast<std::size_t>(cells), 0.0);
  for (Eigen::Index s = 0; s < count; ++s) {
    const double total = raw.col(s).sum();
    if (!(total > 0.0)) throw NumericalError("husimi_average: state has vanishing Husimi function");
    for (Eigen::Index c = 0; c < cells; ++c) {
      grid.values[static_cast<std::size_t>(c)] += raw(c, s) / total;
    }
  }
  for (double& v : grid.values) v /= static_cast<double>(count);
  return grid;
}

WignerGrid wigner_grid(const ComplexVector& state) {
  const ComplexVector states[] = {state};
  return wigner_average(states);
}

WignerGrid wigner_average(std::span<const ComplexVector> states) {
  require_states(states, "wigner_average");
  const int n = static_cast<int>(states.front().size());
  const std::size_t side = 2 * static_cast<std::size_t>(n);
  WignerGrid w;
  w.dim = n;
  w.values.assign(side * side, 0.0);

  // W(a, b) = (1/2N) e^{i pi b (a-1)/N} sum_j psi(j) conj(psi~(a-1-j)) e^{-2 pi i b j / N}
  // with psi~ the antiperiodic extension psi~(n + N) = -psi~(n).
  Eigen::FFT<double> fft;
  std::vector<Complex> g(static_cast<std::size_t>(n));
  std::vector<Complex> spectrum;
  std::vector<Complex> twiddle(2 * side);
  for (std::size_t t = 0; t < twiddle.size(); ++t) twiddle[t] = std::polar(1.0, kPi * static_cast<double>(t) / n);

  for (const auto& raw : states) {
    const double norm = raw.norm();
    if (!(norm > 0.0)) throw ValidationError("wigner_average: zero state");
    const ComplexVector psi = raw / norm;
    auto extended = [&](long long idx) {
      const long long period = 2LL * n;
      long long r = ((idx % period) + period) % period;
      return r < n ? psi(static_cast<Eigen::Index>(r)) : -psi(static_cast<Eigen::Index>(r - n));
    };
    for (std::size_t a = 0; a < side; ++a) {
      for (int j = 0; j < n; ++j) {
        g[static_cast<std::size_t>(j)] =
            psi(j) * std::conj(extended(static_cast<long long>(a) - 1 - j));
      }
      fft.fwd(spectrum, g);
      for (std::size_t b = 0; b < side; ++b) {
        // e^{i pi b (a-1) / N}, reduced modulo 2N in the exponent index.
        const long long e = (static_cast<long long>(b) * (static_cast<long long>(a) - 1)) %
                            static_cast<long long>(2 * side);
        const std::size_t idx = static_cast<std::size_t>((e + static_cast<long long>(2 * side)) %
                                                         static_cast<long long>(2 * side));
        const Complex value = twiddle[idx] * spectrum[b % static_cast<std::size_t>(n)];
        w.values[a * side + b] += value.real() / (2.0 * n);
      }
    }
  }
  for (double& v : w.values) v /= static_cast<double>(states.size());
  return w;
}

std::vector<double> wigner_position_marginal(const WignerGrid& w) {
  std::vector<double> out(static_cast<std::size_t>(w.dim), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const std::size_t a = 2 * k + 1;
    for (std::size_t b = 0; b < w.side(); ++b) out[k] += w.at(a, b);
  }
  return out;
}

std::vector<double> wigner_momentum_marginal(const WignerGrid& w) {
  std::vector<double> out(static_cast<std::size_t>(w.dim), 0.0);
  for (std::size_t a = 0; a < w.side(); ++a) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w.at(a, 2 * k + 1);
  }
  return out;
}

DensityGrid position_density(const ComplexVector& state) {
  if (state.size() == 0) throw ValidationError("position_density: empty state");
  std::vector<double> values(static_cast<std::size_t>(state.size()));
  for (Eigen::Index i = 0; i < state.size(); ++i) values[static_cast<std::size_t>(i)] = std::norm(state(i));
  return density_1d("q", std::move(values));
}

DensityGrid momentum_density(const ComplexVector& state) {
  if (state.size() == 0) throw ValidationError("momentum_density: empty state");
  const ComplexVector mom = momentum_transform(state);
  std::vector<double> values(static_cast<std::size_t>(mom.size()));
  for (Eigen::Index i = 0; i < mom.size(); ++i) values[static_cast<std::size_t>(i)] = std::norm(mom(i));
  return density_1d("p", std::move(values));
}

DensityGrid average_density(std::span<const DensityGrid> densities) {
  if (densities.empty()) throw ValidationError("average_density: empty list");
  const auto& first = densities.front();
  std::vector<double> sum(first.values.size(), 0.0);
  for (const auto& d : densities) {
    if (d.rows != first.rows || d.cols != first.cols) {
      throw ValidationError("average_density: densities differ in shape");
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += d.values[i];
  }
  const double total = std::accumulate(sum.begin(), sum.end(), 0.0);
  if (!(total > 0.0)) throw NumericalError("average_density: total mass is zero");
  DensityGrid out = first;
  for (std::size_t i = 0; i < sum.size(); ++i) out.values[i] = sum[i] / total;
  out.normalization = Normalization::unit_sum;
  return out;
}

double cantor_mass(const DensityGrid& d, int level) {
  if (!d.is_1d()) throw ValidationError("cantor_mass: expected a 1D density");
  if (level < 1) throw ValidationError("cantor_mass: level must be >= 1");
  const auto boxes = pow3(level);
  const auto length = static_cast<std::int64_t>(d.length());
  if (length == 0 || length % boxes != 0) {
    throw ValidationError("cantor_mass: grid length must be divisible by 3^level");
  }
  const std::int64_t per_box = length / boxes;
  double inside = 0.0;
  double total = 0.0;
  for (std::int64_t i = 0; i < length; ++i) {
    std::int64_t box = i / per_box;
    bool kept = true;
    for (int l = 0; l < level && kept; ++l) {
      kept = box % 3 != 1;
      box /= 3;
    }
    const double v = d.values[static_cast<std::size_t>(i)];
    total += v;
    if (kept) inside += v;
  }
  if (!(total > 0.0)) throw NumericalError("cantor_mass: total mass is zero");
  return inside / total;
}

double band_mass(const DensityGrid& grid, Axis axis, const IntervalUnion& band) {
  if (grid.is_1d()) throw ValidationError("band_mass: expected a 2D phase-space grid");
  double inside = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < grid.rows; ++i) {
    const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(grid.rows);
    for (std::size_t j = 0; j < grid.cols; ++j) {
      const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(grid.cols);
      const double v = grid.at(i, j);
      total += v;
      if (band.contains(axis == Axis::position ? q : p)) inside += v;
    }
  }
  if (!(total > 0.0)) throw NumericalError("band_mass: total mass is zero");
  return inside / total;
}

double self_similarity_score(const DensityGrid& d, int factor) {
  if (!d.is_1d()) throw ValidationError("self_similarity_score: expected a 1D density");
  if (factor < 2) throw ValidationError("self_similarity_score: factor must be >= 2");
  const std::size_t length = d.length();
  const auto f = static_cast<std::size_t>(factor);
  if (length == 0 || length % f != 0) {
    throw ValidationError("self_similarity_score: length must be divisible by the factor");
  }
  const std::size_t reduced = length / f;
  std::vector<double> zoom(d.values.begin(), d.values.begin() + static_cast<std::ptrdiff_t>(reduced));
  std::vector<double> coarse(reduced, 0.0);
  for (std::size_t i = 0; i < reduced; ++i) {
    for (std::size_t k = 0; k < f; ++k) coarse[i] += d.values[i * f + k];
    coarse[i] /= static_cast<double>(f);
  }
  auto normalize = [](std::vector<double>& v) {
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    if (s != 0.0) {
      for (double& x : v) x /= s;
    }
  };
  normalize(zoom);
  normalize(coarse);
  const double n = static_cast<double>(reduced);
  const double mz = std::accumulate(zoom.begin(), zoom.end(), 0.0) / n;
  const double mc = std::accumulate(coarse.begin(), coarse.end(), 0.0) / n;
  double szz = 0.0;
  double scc = 0.0;
  double szc = 0.0;
  for (std::size_t i = 0; i < reduced; ++i) {
    szz += (zoom[i] - mz) * (zoom[i] - mz);
    scc += (coarse[i] - mc) * (coarse[i] - mc);
    szc += (zoom[i] - mz) * (coarse[i] - mc);
  }
  // Normalizing a flat profile leaves ulp-level wiggles; treat those as flat.
  const double floor = 1e-24 * n * (mz * mz + mc * mc);
  if (szz <= floor || scc <= floor) throw NumericalError("self_similarity_score: zero-variance input");
  return szc / std::sqrt(szz * scc);
}

KillCheckResult kill_property_check(const ComplexMatrix& u, int m, std::span<const TorusPoint> centers) {
  if (u.rows() != u.cols()) throw ValidationError("kill_property_check: matrix must be square");
  const int n = static_cast<int>(u.rows());
  const StripRegion region = region_r_minus(m);
  const double margin = 2.0 * coherent_width(n);
  const ComplexMatrix adj = u.adjoint();

  KillCheckResult result;
  for (const auto& x : centers) {
    bool interior = false;
    for (const auto& iv : region.support.intervals()) {
      const double lo = to_double(iv.lo);
      const double hi = to_double(iv.hi);
      if (x.p() >= lo && x.p() < hi) interior = (x.p() - lo > margin) && (hi - x.p() > margin);
    }
    if (!interior) {
      ++result.excluded;
      continue;
    }
    ComplexVector v = coherent_state(x, n).vector;
    for (int step = 0; step < m; ++step) v = adj * v;
    const double norm = v.norm();
    result.norms.push_back(norm);
    result.accepted.push_back(x);
    result.max_norm = std::max(result.max_norm, norm);
  }
  if (result.norms.empty()) {
    throw ValidationError("kill_property_check: every centre lies within two widths of the R_-^m boundary");
  }
  return result;
}

}  // namespace openmap
