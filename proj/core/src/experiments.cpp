#include "openmap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <limits>
#include <random>

#include "openmap/classical.hpp"
#include "openmap/errors.hpp"
#include "openmap/fit.hpp"
#include "openmap/walsh.hpp"

namespace openmap {

namespace {

constexpr int kDefaultHusimiCount = 100;
constexpr int kDefaultDensityCount = 20;
constexpr double kStatsBandLo = 0.2;
constexpr double kStatsBandHi = 0.95;

const char* quantization_name(Quantization q) {
  return q == Quantization::standard ? "standard" : "walsh";
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file " + path.string());
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

std::vector<ComplexVector> vectors_of(const std::vector<ResonanceEigenpair>& pairs, Side side) {
  std::vector<ComplexVector> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(side == Side::right ? p.right : p.left);
  return out;
}

int nonzero_count(const Spectrum& s, double cutoff) {
  return static_cast<int>(
      std::count_if(s.pairs.begin(), s.pairs.end(), [&](const auto& p) { return p.modulus() > cutoff; }));
}

void require_baker_exponent(int n_exp, int minimum, const char* where) {
  if (n_exp < minimum) {
    throw ValidationError(std::string(where) + ": n-exp must be >= " + std::to_string(minimum));
  }
  if (n_exp > 9) throw ValidationError(std::string(where) + ": n-exp above 9 exceeds dense-matrix scale");
}

}  // namespace

int RunConfig::dimension() const {
  return static_cast<int>(pow3(n_exp));
}

io::Json RunConfig::to_json() const {
  io::Json j;
  j["n_exp"] = n_exp;
  j["N"] = dimension();
  j["quantization"] = quantization_name(quantization);
  j["grid"] = grid;
  j["count"] = count;
  j["threshold"] = threshold;
  j["zero_cutoff"] = zero_cutoff;
  j["format"] = format == OutputFormat::csv ? "csv" : "json";
  j["seed"] = seed;
  j["wigner"] = wigner;
  return j;
}

Spectrum compute_spectrum(Quantization q, int n_exp, bool closed, bool with_left) {
  require_baker_exponent(n_exp, 1, "compute_spectrum");
  if (q == Quantization::walsh) {
    if (closed) throw ValidationError("compute_spectrum: no closed Walsh control is provided");
    return eigendecompose_deflated(walsh_open_baker(n_exp), kWalshZeroThreshold, {with_left});
  }
  const int n = static_cast<int>(pow3(n_exp));
  const ComplexMatrix u = closed ? baker_unitary(n) : open_propagator(n);
  return eigendecompose(u, {with_left});
}

std::filesystem::path emit_records(const RunConfig& cfg, const std::string& stem,
                                   const std::vector<ExperimentRecord>& rows) {
  const bool csv = cfg.format == OutputFormat::csv;
  const auto path = cfg.out_dir / (stem + (csv ? ".csv" : ".json"));
  {
    auto out = open_output(path);
    if (csv) {
      write_records_csv(out, rows);
    } else {
      write_records_json(out, rows);
    }
  }
  io::write_sidecar(path, cfg.to_json());
  return path;
}

std::filesystem::path emit_spectrum(const RunConfig& cfg, const Spectrum& s) {
  const auto path = cfg.out_dir / ("spectrum_" + std::to_string(s.dim) + ".csv");
  {
    auto out = open_output(path);
    write_spectrum_csv(out, s);
  }
  io::Json extra;
  extra["rows"] = s.pairs.size();
  extra["max_residual_right"] = s.max_residual_right();
  if (s.has_left) extra["max_residual_left"] = s.max_residual_left();
  extra["unmatched_pairs"] = s.unmatched_count();
  io::write_sidecar(path, cfg.to_json(), extra);
  return path;
}

// --- weights -----------------------------------------------------------------

int weights_max_m(Quantization q, int n_exp) {
  return q == Quantization::walsh ? std::min(4, n_exp - 1) : std::min(4, n_exp - 2);
}

WeightsResult run_weights_experiment(const RunConfig& cfg) {
  const int min_exp = cfg.quantization == Quantization::walsh ? 2 : 4;
  require_baker_exponent(cfg.n_exp, min_exp, "weights");
  return run_weights_experiment(cfg.quantization, cfg.n_exp, compute_spectrum(cfg.quantization, cfg.n_exp, false, false),
                                cfg.zero_cutoff);
}

WeightsResult run_weights_experiment(Quantization q, int n_exp, const Spectrum& s, double zero_cutoff) {
  const int n = static_cast<int>(pow3(n_exp));
  if (s.dim != n) throw ValidationError("run_weights_experiment: spectrum dimension does not match 3^k");
  const int max_m = weights_max_m(q, n_exp);
  if (max_m < 0) throw ValidationError("run_weights_experiment: N too small for any escape region");

  WeightsResult result;
  result.n_exp = n_exp;
  result.quantization = q;
  std::vector<DiagonalProjector> projectors;
  for (int m = 0; m <= max_m; ++m) projectors.push_back(escape_projector(m, n));

  std::vector<std::vector<double>> band_errors(static_cast<std::size_t>(max_m + 1));
  std::vector<WeightStats> stats(static_cast<std::size_t>(max_m + 1));
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    const auto& p = s.pairs[i];
    // Walsh null states have no weight law; standard pairs are all emitted.
    if (q == Quantization::walsh && p.modulus() <= zero_cutoff) continue;
    for (int m = 0; m <= max_m; ++m) {
      const double measured = weight(p, projectors[static_cast<std::size_t>(m)]);
      const double predicted = weight_prediction(p.z, m);
      const double residual = std::abs(measured - predicted);
      ExperimentRecord row("weights");
      row.set("N", n).set("pair", static_cast<double>(i)).set("modulus", p.modulus()).set("m", m);
      row.set("measured", measured).set("predicted", predicted).set("residual", residual);
      auto& st = stats[static_cast<std::size_t>(m)];
      st.max_residual = std::max(st.max_residual, residual);
      if (predicted > 0.0) {
        const double rel = residual / predicted;
        row.set("relative_error", rel);
        if (p.modulus() >= kStatsBandLo && p.modulus() <= kStatsBandHi) {
          band_errors[static_cast<std::size_t>(m)].push_back(rel);
        }
      }
      result.rows.push_back(std::move(row));
    }
  }
  for (int m = 0; m <= max_m; ++m) {
    auto& st = stats[static_cast<std::size_t>(m)];
    st.m = m;
    st.pairs = static_cast<int>(band_errors[static_cast<std::size_t>(m)].size());
    st.median_relative_error = median(band_errors[static_cast<std::size_t>(m)]);
  }
  result.stats = std::move(stats);
  return result;
}

double median_relative_error(const WeightsResult& r, int m, double lo, double hi) {
  std::vector<double> errors;
  for (const auto& row : r.rows) {
    if (static_cast<int>(row.get("m")) != m || !row.has("relative_error")) continue;
    const double mod = row.get("modulus");
    if (mod >= lo && mod <= hi) errors.push_back(row.get("relative_error"));
  }
  if (errors.empty()) throw NumericalError("median_relative_error: no pairs in the modulus band");
  return median(std::move(errors));
}

double max_weight_residual(const WeightsResult& r, int max_m) {
  double worst = 0.0;
  for (const auto& row : r.rows) {
    if (static_cast<int>(row.get("m")) <= max_m) worst = std::max(worst, row.get("residual"));
  }
  return worst;
}

std::vector<std::filesystem::path> emit_weights(const RunConfig& cfg, const WeightsResult& r) {
  const std::string suffix = std::string(quantization_name(r.quantization)) + "_" +
                             std::to_string(pow3(r.n_exp));
  std::vector<std::filesystem::path> paths;
  paths.push_back(emit_records(cfg, "weights_" + suffix, r.rows));
  std::vector<ExperimentRecord> summary;
  for (const auto& st : r.stats) {
    ExperimentRecord row("weights_summary");
    row.set("N", static_cast<double>(pow3(r.n_exp))).set("m", st.m);
    row.set("band_lo", kStatsBandLo).set("band_hi", kStatsBandHi).set("band_pairs", st.pairs);
    if (std::isfinite(st.median_relative_error)) {
      row.set("median_relative_error", st.median_relative_error);
    } else {
      row.flag("empty_band");
    }
    row.set("max_residual", st.max_residual);
    summary.push_back(std::move(row));
  }
  paths.push_back(emit_records(cfg, "weights_summary_" + suffix, summary));
  return paths;
}

// --- Weyl ----------------------------------------------------------------------

ExperimentRecord WeylResult::record() const {
  ExperimentRecord row("weyl");
  row.set("threshold", threshold);
  for (std::size_t i = 0; i < n_exps.size(); ++i) {
    row.set("count_N" + std::to_string(pow3(n_exps[i])), counts[i]);
  }
  if (slope) row.set("slope", *slope);
  row.set("target_slope", std::log(2.0) / std::log(3.0));
  if (degenerate) row.flag("degenerate_fit");
  row.flag(quantization_name(quantization));
  return row;
}

std::vector<double> spectrum_moduli(Quantization q, int n_exp) {
  require_baker_exponent(n_exp, 1, "spectrum_moduli");
  if (q == Quantization::walsh) {
    const Spectrum s = eigendecompose_deflated(walsh_open_baker(n_exp), kWalshZeroThreshold, {false});
    std::vector<double> out;
    for (const auto& p : s.pairs) out.push_back(p.modulus());
    return out;
  }
  return eigenvalue_moduli(open_propagator(static_cast<int>(pow3(n_exp))));
}

WeylResult run_weyl_experiment(const std::vector<int>& n_exps, double threshold, Quantization q) {
  std::map<int, std::vector<double>> moduli;
  for (int k : n_exps) moduli[k] = spectrum_moduli(q, k);
  return run_weyl_experiment(moduli, threshold, q);
}

WeylResult run_weyl_experiment(const std::map<int, std::vector<double>>& moduli, double threshold,
                               Quantization q) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("weyl: threshold must lie in (0, 1)");
  if (moduli.size() < 3) throw ValidationError("weyl: need at least three values of N");
  WeylResult r;
  r.threshold = threshold;
  r.quantization = q;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [k, values] : moduli) {
    const int count = static_cast<int>(std::count_if(values.begin(), values.end(), [&](double v) { return v > threshold; }));
    r.n_exps.push_back(k);
    r.counts.push_back(count);
    if (count > 0) {
      xs.push_back(k * std::log(3.0));
      ys.push_back(std::log(static_cast<double>(count)));
    } else {
      r.degenerate = true;
    }
  }
  if (xs.size() >= 2) r.slope = least_squares_line(xs, ys).slope;
  if (xs.size() < moduli.size()) r.degenerate = true;
  return r;
}

std::vector<std::filesystem::path> emit_weyl(const RunConfig& cfg, const std::vector<WeylResult>& results) {
  std::vector<ExperimentRecord> rows;
  for (const auto& r : results) rows.push_back(r.record());
  const std::string q = results.empty() ? "standard" : quantization_name(results.front().quantization);
  return {emit_records(cfg, "weyl_" + q, rows)};
}

// --- Husimi figure -------------------------------------------------------------

HusimiFigureResult run_husimi_figure(const RunConfig& cfg) {
  require_baker_exponent(cfg.n_exp, 2, "husimi");
  return run_husimi_figure(cfg, compute_spectrum(Quantization::standard, cfg.n_exp),
                           compute_spectrum(Quantization::standard, cfg.n_exp, true, false));
}

HusimiFigureResult run_husimi_figure(const RunConfig& cfg, const Spectrum& open, const Spectrum& closed) {
  if (!open.has_left) throw ValidationError("husimi: open spectrum needs left eigenvectors");
  const int requested = cfg.count > 0 ? cfg.count : kDefaultHusimiCount;
  const int available = nonzero_count(open, cfg.zero_cutoff);
  if (available < 1) throw NumericalError("husimi: no eigenvalue above the zero cutoff");

  HusimiFigureResult r;
  r.n_exp = cfg.n_exp;
  r.count = std::min(requested, available);
  const auto selected = select_long_lived(open, r.count);
  r.min_selected_modulus = selected.back().modulus();
  const auto right = vectors_of(selected, Side::right);
  const auto left = vectors_of(selected, Side::left);
  r.right = husimi_average(right, cfg.grid);
  r.left = husimi_average(left, cfg.grid);
  const auto closed_selected = select_long_lived(closed, std::min(r.count, static_cast<int>(closed.pairs.size())));
  r.closed = husimi_average(vectors_of(closed_selected, Side::right), cfg.grid);
  if (cfg.wigner) r.wigner = wigner_average(right);

  const IntervalUnion band1 = cantor_approx(1);
  const IntervalUnion band2 = cantor_approx(2);
  r.right_band_mass = band_mass(r.right, Axis::momentum, band1);
  r.left_band_mass = band_mass(r.left, Axis::position, band1);
  r.closed_band_mass = band_mass(r.closed, Axis::momentum, band1);
  r.right_band_mass_level2 = band_mass(r.right, Axis::momentum, band2);
  r.left_band_mass_level2 = band_mass(r.left, Axis::position, band2);
  return r;
}

std::vector<std::filesystem::path> emit_husimi_figure(const RunConfig& cfg, const HusimiFigureResult& r) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::string n = std::to_string(pow3(r.n_exp));
  const io::Json config = cfg.to_json();
  const std::string axis = "x: q from 0 (left) to 1 (right); y: p from 1 (top) to 0 (bottom)";
  std::vector<std::filesystem::path> paths;

  auto emit_grid = [&](const std::string& stem, const DensityGrid& grid) {
    const auto csv = cfg.out_dir / (stem + ".csv");
    {
      auto out = open_output(csv);
      io::write_density_csv(out, grid);
    }
    io::write_sidecar(csv, config);
    const auto pgm = cfg.out_dir / (stem + ".pgm");
    const auto info = io::write_phase_space_pgm(pgm, grid, 16);
    io::write_sidecar(pgm, config, io::pgm_sidecar_fields(info, axis));
    paths.push_back(csv);
    paths.push_back(pgm);
  };
  emit_grid("husimi_right_" + n, r.right);
  emit_grid("husimi_left_" + n, r.left);
  emit_grid("husimi_closed_" + n, r.closed);

  if (r.wigner) {
    const auto stem = cfg.out_dir / ("wigner_right_" + n);
    const auto images = io::write_wigner_pgms(stem, *r.wigner, 16);
    const std::string waxis = "x: q = a/2N to the right; y: p = b/2N upwards";
    for (const auto& [suffix, info] : {std::pair{"_positive.pgm", images.positive},
                                       std::pair{"_negative.pgm", images.negative},
                                       std::pair{"_sign.pgm", images.sign_mask}}) {
      auto path = stem;
      path += suffix;
      io::write_sidecar(path, config, io::pgm_sidecar_fields(info, waxis));
      paths.push_back(path);
    }
  }

  // Cantor band masks; the horizontal bands approximate the set trapped in the past.
  for (int level = 1; level <= 3; ++level) {
    const IntervalUnion band = cantor_approx(level);
    const auto g = static_cast<std::size_t>(cfg.grid);
    const auto path = cfg.out_dir / ("mask_trapped_band_level" + std::to_string(level) + "_" + std::to_string(g) + ".pgm");
    const auto info = io::write_pgm(
        path, g, g,
        [&](std::size_t, std::size_t y) {
          const double p = (static_cast<double>(g - 1 - y) + 0.5) / static_cast<double>(g);
          return band.contains(p) ? 1.0 : 0.0;
        },
        8);
    io::write_sidecar(path, config, io::pgm_sidecar_fields(info, axis));
    paths.push_back(path);
  }

  std::vector<ExperimentRecord> rows;
  ExperimentRecord summary("husimi_figure");
  summary.set("N", static_cast<double>(pow3(r.n_exp))).set("grid", cfg.grid).set("count", r.count);
  summary.set("min_selected_modulus", r.min_selected_modulus);
  summary.set("right_band_mass_level1", r.right_band_mass);
  summary.set("left_band_mass_level1", r.left_band_mass);
  summary.set("closed_band_mass_level1", r.closed_band_mass);
  summary.set("right_band_mass_level2", r.right_band_mass_level2);
  summary.set("left_band_mass_level2", r.left_band_mass_level2);
  rows.push_back(std::move(summary));
  paths.push_back(emit_records(cfg, "husimi_summary_" + n, rows));
  return paths;
}

// --- density figures -----------------------------------------------------------

ModulusBin position_density_bin(const Spectrum& s, double centre, double half_width) {
  ModulusBin bin;
  bin.centre = centre;
  double width = half_width;
  for (;;) {
    bin.lo = centre - width;
    bin.hi = centre + width;
    std::vector<DensityGrid> densities;
    for (const auto& p : s.pairs) {
      if (p.modulus() >= bin.lo && p.modulus() <= bin.hi) densities.push_back(position_density(p.right));
    }
    if (!densities.empty()) {
      bin.states = static_cast<int>(densities.size());
      bin.density = average_density(densities);
      bin.self_similarity = self_similarity_score(bin.density, 3);
      return bin;
    }
    if (bin.lo <= 0.0 && bin.hi >= 1.0) throw NumericalError("position_density_bin: spectrum has no states");
    ++bin.widenings;
    width += 0.05;
  }
}

DensityGrid white_noise_density(std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> values(length);
  for (double& v : values) v = uniform(rng);
  DensityGrid d;
  d.axes = {"q"};
  d.cols = length;
  d.values = std::move(values);
  const DensityGrid one[] = {d};
  return average_density(one);
}

DensityFiguresResult run_density_figures(const RunConfig& cfg) {
  require_baker_exponent(cfg.n_exp, 3, "density");
  return run_density_figures(cfg, compute_spectrum(Quantization::standard, cfg.n_exp, false, false));
}

DensityFiguresResult run_density_figures(const RunConfig& cfg, const Spectrum& open) {
  DensityFiguresResult r;
  r.n_exp = cfg.n_exp;
  const int requested = cfg.count > 0 ? cfg.count : kDefaultDensityCount;
  r.momentum_count = std::min(requested, static_cast<int>(open.pairs.size()));
  const auto selected = select_long_lived(open, r.momentum_count);
  r.momentum_max_modulus = selected.front().modulus();
  r.momentum_min_modulus = selected.back().modulus();
  std::vector<DensityGrid> densities;
  for (const auto& p : selected) densities.push_back(momentum_density(p.right));
  r.momentum = average_density(densities);
  r.momentum_cantor_mass_l1 = cantor_mass(r.momentum, 1);
  if (open.dim % 9 == 0) r.momentum_cantor_mass_l2 = cantor_mass(r.momentum, 2);
  for (double centre : {0.4, 0.7}) r.bins.push_back(position_density_bin(open, centre));
  r.noise_self_similarity = self_similarity_score(white_noise_density(static_cast<std::size_t>(open.dim), cfg.seed));
  return r;
}

std::vector<std::filesystem::path> emit_density_figures(const RunConfig& cfg, const DensityFiguresResult& r) {
  const std::string n = std::to_string(pow3(r.n_exp));
  const io::Json config = cfg.to_json();
  std::vector<std::filesystem::path> paths;
  auto emit_density = [&](const std::string& stem, const DensityGrid& d) {
    const auto path = cfg.out_dir / (stem + ".csv");
    {
      auto out = open_output(path);
      io::write_density_csv(out, d);
    }
    io::write_sidecar(path, config);
    paths.push_back(path);
  };
  auto magnified = [](const DensityGrid& d) {
    DensityGrid z = d;
    z.cols = d.cols / 3;
    z.values.assign(d.values.begin(), d.values.begin() + static_cast<std::ptrdiff_t>(z.cols));
    const DensityGrid one[] = {z};
    return average_density(one);
  };
  emit_density("momentum_density_" + n, r.momentum);
  emit_density("momentum_density_x3_" + n, magnified(r.momentum));
  for (const auto& bin : r.bins) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "%.2f", bin.centre);
    emit_density("position_density_bin" + std::string(tag) + "_" + n, bin.density);
    emit_density("position_density_bin" + std::string(tag) + "_x3_" + n, magnified(bin.density));
  }

  std::vector<ExperimentRecord> rows;
  ExperimentRecord mom("momentum_figure");
  mom.set("N", static_cast<double>(pow3(r.n_exp))).set("count", r.momentum_count);
  mom.set("max_modulus", r.momentum_max_modulus).set("min_modulus", r.momentum_min_modulus);
  mom.set("cantor_mass_level1", r.momentum_cantor_mass_l1).set("cantor_mass_level2", r.momentum_cantor_mass_l2);
  rows.push_back(std::move(mom));
  for (const auto& bin : r.bins) {
    ExperimentRecord row("position_bin");
    row.set("N", static_cast<double>(pow3(r.n_exp))).set("centre", bin.centre).set("lo", bin.lo).set("hi", bin.hi);
    row.set("states", bin.states).set("widenings", bin.widenings).set("self_similarity", bin.self_similarity);
    if (bin.widenings > 0) row.flag("bin_widened");
    rows.push_back(std::move(row));
  }
  ExperimentRecord noise("noise_baseline");
  noise.set("N", static_cast<double>(pow3(r.n_exp))).set("seed", static_cast<double>(cfg.seed));
  noise.set("self_similarity", r.noise_self_similarity);
  rows.push_back(std::move(noise));
  paths.push_back(emit_records(cfg, "density_summary_" + n, rows));
  return paths;
}

// --- Walsh / classical -------------------------------------------------------

std::vector<std::filesystem::path> emit_walsh_report(const RunConfig& cfg, const std::vector<ExperimentRecord>& rows) {
  return {emit_records(cfg, "walsh_" + std::to_string(cfg.dimension()), rows)};
}

std::vector<ExperimentRecord> classical_report(int max_m) {
  if (max_m < 2) throw ValidationError("classical: max m must be >= 2");
  std::vector<ExperimentRecord> rows;
  Rational cumulative(0);
  for (int m = 0; m <= max_m; ++m) {
    const StripRegion region = region_r_plus(m);
    cumulative += region.measure();
    ExperimentRecord row("escape_region");
    row.set("m", m).set("intervals", static_cast<double>(region.support.size()));
    row.set("measure", to_double(region.measure()));
    row.set("survival_after_m", to_double(Rational(1) - cumulative));
    rows.push_back(std::move(row));
  }
  const std::vector<int> levels = [&] {
    std::vector<int> l;
    for (int i = 1; i <= std::min(max_m, 8); ++i) l.push_back(i);
    return l;
  }();
  ExperimentRecord summary("classical_summary");
  summary.set("max_m", max_m);
  summary.set("escape_rate", escape_rate_estimate(max_m));
  summary.set("escape_rate_exact", std::log(1.5));
  summary.set("cantor_box_dimension", box_dimension(cantor_approx(std::min(max_m, 8) + 2), levels));
  summary.set("cantor_dimension_exact", std::log(2.0) / std::log(3.0));
  summary.set("lyapunov", std::log(3.0));
  rows.push_back(std::move(summary));
  for (int k = 1; k <= 8; ++k) {
    const auto params = triadic_baker_parameters(static_cast<int>(pow3(k)));
    ExperimentRecord row("ehrenfest");
    row.set("N", params.dimension).set("channels", params.channels).set("ehrenfest_time", params.ehrenfest_time);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::filesystem::path> emit_classical_report(const RunConfig& cfg,
                                                         const std::vector<ExperimentRecord>& rows) {
  return {emit_records(cfg, "classical", rows)};
}

}  // namespace openmap
