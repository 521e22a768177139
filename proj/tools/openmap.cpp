// openmap: command-line front end for the resonance experiments.
//
// Exit status: 0 on success, 1 on bad input (including unknown flags),
// 2 when a numerical step fails.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "openmap/classical.hpp"
#include "openmap/errors.hpp"
#include "openmap/experiments.hpp"
#include "openmap/walsh.hpp"

namespace {

using namespace openmap;

void report(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << p.string() << '\n';
}

void add_common(CLI::App* cmd, RunConfig& cfg, bool& walsh) {
  cmd->add_option("--n-exp", cfg.n_exp, "N = 3^k")->check(CLI::Range(1, 9));
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--grid", cfg.grid, "phase-space grid resolution G")->check(CLI::Range(8, 4096));
  cmd->add_option("--count", cfg.count, "number of longest-lived states (0 = experiment default)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--threshold", cfg.threshold, "long-lived modulus cutoff r")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--zero-cutoff", cfg.zero_cutoff, "moduli at or below this count as zero");
  cmd->add_option("--format", cfg.format, "table format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, OutputFormat>{{"csv", OutputFormat::csv},
                                                                               {"json", OutputFormat::json}}));
  cmd->add_option("--seed", cfg.seed, "seed for noise baselines");
  cmd->add_flag("--walsh", walsh, "use the Walsh quantization");
}

int dispatch(const std::string& name, RunConfig& cfg, const std::vector<int>& weyl_exps, bool no_wigner,
             bool threshold_given) {
  if (name == "spectrum") {
    report({emit_spectrum(cfg, compute_spectrum(cfg.quantization, cfg.n_exp))});
  } else if (name == "weights") {
    report(emit_weights(cfg, run_weights_experiment(cfg)));
  } else if (name == "weyl") {
    std::vector<WeylResult> results;
    // Spectra are shared across thresholds.
    std::map<int, std::vector<double>> moduli;
    for (int k : weyl_exps) moduli[k] = spectrum_moduli(cfg.quantization, k);
    // Without --threshold the default cutoff is swept to show the slope is r-insensitive.
    std::vector<double> thresholds{0.3, 0.5, 0.7};
    if (threshold_given) thresholds = {cfg.threshold};
    for (double r : thresholds) results.push_back(run_weyl_experiment(moduli, r, cfg.quantization));
    report(emit_weyl(cfg, results));
  } else if (name == "husimi") {
    cfg.wigner = !no_wigner;
    report(emit_husimi_figure(cfg, run_husimi_figure(cfg)));
  } else if (name == "density") {
    report(emit_density_figures(cfg, run_density_figures(cfg)));
  } else if (name == "walsh") {
    cfg.quantization = Quantization::walsh;
    if (cfg.n_exp < 2) throw ValidationError("walsh: n-exp must be >= 2");
    report(emit_walsh_report(cfg, walsh_spectrum_report(cfg.n_exp)));
  } else if (name == "classical") {
    report(emit_classical_report(cfg, classical_report(8)));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonance eigenstates of the quantized open triadic baker map"};
  app.require_subcommand(1);
  app.set_version_flag("--version", OPENMAP_VERSION_STRING);

  RunConfig cfg;
  bool walsh = false;
  bool no_wigner = false;
  std::vector<int> weyl_exps{3, 4, 5, 6, 7};

  // Default exponents follow the published figure sizes.
  const std::map<std::string, int> default_exp{{"spectrum", 6}, {"weights", 6}, {"weyl", 7},  {"husimi", 7},
                                               {"density", 7},  {"walsh", 5},   {"classical", 6}};
  const std::map<std::string, std::string> commands{
      {"spectrum", "eigenvalues and residuals of the open map"},
      {"weights", "weights of right eigenstates on the escape regions"},
      {"weyl", "count of long-lived resonances versus N"},
      {"husimi", "averaged Husimi and Wigner images of long-lived states"},
      {"density", "momentum and position densities of long-lived states"},
      {"walsh", "exactness report for the Walsh quantization"},
      {"classical", "escape regions, escape rate and Cantor dimension"},
  };
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, cfg, walsh);
    if (name == "weyl") cmd->add_option("--n-exps", weyl_exps, "exponents k to sweep (at least three)");
    if (name == "husimi") cmd->add_flag("--no-wigner", no_wigner, "skip the Wigner images");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (walsh) cfg.quantization = Quantization::walsh;
    const auto* cmd = app.get_subcommands().front();
    if (cmd->count("--n-exp") == 0) cfg.n_exp = default_exp.at(cmd->get_name());
    return dispatch(cmd->get_name(), cfg, weyl_exps, no_wigner, cmd->count("--threshold") > 0);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}
