#pragma once

// Figure-level pipelines and the fractal Weyl counting experiment.
//
// Each run_* function computes its results from explicit inputs and returns
// them; emit_* functions write the corresponding files (CSV or JSON tables,
// PGM images, JSON sidecars) into RunConfig::out_dir. Spectra can be passed
// in so that expensive decompositions are shared between experiments.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "openmap/io.hpp"
#include "openmap/phase_space.hpp"
#include "openmap/record.hpp"
#include "openmap/spectral.hpp"

namespace openmap {

enum class Quantization { standard, walsh };
enum class OutputFormat { csv, json };

struct RunConfig {
  int n_exp = 6;
  std::filesystem::path out_dir = ".";
  int grid = 81;
  /// 0 selects the experiment's default (100 for Husimi, 20 for densities).
  int count = 0;
  double threshold = 0.5;
  double zero_cutoff = 1e-10;
  OutputFormat format = OutputFormat::csv;
  std::uint64_t seed = 20240601;
  Quantization quantization = Quantization::standard;
  bool wigner = true;

  int dimension() const;
  io::Json to_json() const;
};

/// Spectrum of the open (or closed) map selected by the config. Standard
/// spectra come from the dense solver, Walsh spectra from the deflated one.
Spectrum compute_spectrum(Quantization q, int n_exp, bool closed = false, bool with_left = true);

/// Writes spectrum_<N>.csv and its sidecar; returns the CSV path.
std::filesystem::path emit_spectrum(const RunConfig& cfg, const Spectrum& s);

// --- Weights on R_+^m --------------------------------------------------------

struct WeightStats {
  int m = 0;
  int pairs = 0;
  double median_relative_error = 0.0;  // over |z| in [0.2, 0.95]
  double max_residual = 0.0;           // over all emitted pairs
};

struct WeightsResult {
  int n_exp = 0;
  Quantization quantization = Quantization::standard;
  std::vector<ExperimentRecord> rows;
  std::vector<WeightStats> stats;
};

/// m = 0..min(4, k-2) for the standard map, m = 0..min(4, k-1) for Walsh.
int weights_max_m(Quantization q, int n_exp);

WeightsResult run_weights_experiment(const RunConfig& cfg);
WeightsResult run_weights_experiment(Quantization q, int n_exp, const Spectrum& s, double zero_cutoff = 1e-10);

/// Median of |measured - predicted| / predicted over rows with the given m and
/// lo <= |z| <= hi.
double median_relative_error(const WeightsResult& r, int m, double lo, double hi);

double max_weight_residual(const WeightsResult& r, int max_m);

std::vector<std::filesystem::path> emit_weights(const RunConfig& cfg, const WeightsResult& r);

// --- Fractal Weyl counting ---------------------------------------------------

struct WeylResult {
  double threshold = 0.0;
  Quantization quantization = Quantization::standard;
  std::vector<int> n_exps;
  std::vector<int> counts;
  std::optional<double> slope;  // least-squares slope of log count vs log N
  bool degenerate = false;      // some count was zero
  ExperimentRecord record() const;
};

/// Moduli (descending) of the eigenvalues for the given quantization.
std::vector<double> spectrum_moduli(Quantization q, int n_exp);

WeylResult run_weyl_experiment(const std::vector<int>& n_exps, double threshold,
                               Quantization q = Quantization::standard);

/// Same, with moduli supplied per exponent.
WeylResult run_weyl_experiment(const std::map<int, std::vector<double>>& moduli, double threshold,
                               Quantization q = Quantization::standard);

std::vector<std::filesystem::path> emit_weyl(const RunConfig& cfg, const std::vector<WeylResult>& results);

// --- Husimi / Wigner figure --------------------------------------------------

struct HusimiFigureResult {
  int n_exp = 0;
  int count = 0;                 // states actually averaged
  double min_selected_modulus = 0.0;
  DensityGrid right;             // averaged right-state Husimi
  DensityGrid left;              // averaged left-state Husimi
  DensityGrid closed;            // closed-map control
  std::optional<WignerGrid> wigner;
  double right_band_mass = 0.0;  // level-1 horizontal Cantor band (past-trapped set)
  double left_band_mass = 0.0;   // level-1 vertical Cantor band (future-trapped set)
  double closed_band_mass = 0.0;
  double right_band_mass_level2 = 0.0;
  double left_band_mass_level2 = 0.0;
};

/// `count` is clamped to the number of eigenvalues with |z| > zero_cutoff.
HusimiFigureResult run_husimi_figure(const RunConfig& cfg, const Spectrum& open, const Spectrum& closed);
HusimiFigureResult run_husimi_figure(const RunConfig& cfg);

std::vector<std::filesystem::path> emit_husimi_figure(const RunConfig& cfg, const HusimiFigureResult& r);

// --- Position / momentum density figures -------------------------------------

struct ModulusBin {
  double centre = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int states = 0;
  int widenings = 0;
  DensityGrid density;
  double self_similarity = 0.0;
};

struct DensityFiguresResult {
  int n_exp = 0;
  int momentum_count = 0;
  double momentum_max_modulus = 0.0;
  double momentum_min_modulus = 0.0;
  DensityGrid momentum;          // averaged momentum density of the longest-lived states
  double momentum_cantor_mass_l1 = 0.0;
  double momentum_cantor_mass_l2 = 0.0;
  std::vector<ModulusBin> bins;  // centred at 0.4 and 0.7
  double noise_self_similarity = 0.0;
};

/// Modulus bins [c - 0.05, c + 0.05]; an empty bin is widened by 0.05 per side
/// until it holds a state.
ModulusBin position_density_bin(const Spectrum& s, double centre, double half_width = 0.05);

/// Seeded uniform white-noise density of the given length.
DensityGrid white_noise_density(std::size_t length, std::uint64_t seed);

DensityFiguresResult run_density_figures(const RunConfig& cfg, const Spectrum& open);
DensityFiguresResult run_density_figures(const RunConfig& cfg);

std::vector<std::filesystem::path> emit_density_figures(const RunConfig& cfg, const DensityFiguresResult& r);

// --- Walsh and classical reports ---------------------------------------------

std::vector<std::filesystem::path> emit_walsh_report(const RunConfig& cfg, const std::vector<ExperimentRecord>& rows);

std::vector<ExperimentRecord> classical_report(int max_m);

std::vector<std::filesystem::path> emit_classical_report(const RunConfig& cfg,
                                                         const std::vector<ExperimentRecord>& rows);

/// Writes a record table as CSV or JSON (per cfg.format) plus its sidecar.
std::filesystem::path emit_records(const RunConfig& cfg, const std::string& stem,
                                   const std::vector<ExperimentRecord>& rows);

}  // namespace openmap
