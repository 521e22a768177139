// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Expensive spectra are computed once and shared between criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "openmap/classical.hpp"
#include "openmap/experiments.hpp"
#include "openmap/phase_space.hpp"
#include "openmap/quantum_map.hpp"
#include "openmap/spectral.hpp"
#include "openmap/walsh.hpp"

namespace fs = std::filesystem;
using namespace openmap;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void run(const char* id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %s: %s |%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Spectra shared between criteria.
std::map<int, Spectrum> open_with_left;   // k = 4, 5, 6
std::map<int, Spectrum> closed_spectra;   // k = 4, 5, 6
Spectrum open_2187;                       // right vectors only

const Spectrum& open_spectrum(int k) {
  auto it = open_with_left.find(k);
  if (it == open_with_left.end()) it = open_with_left.emplace(k, compute_spectrum(Quantization::standard, k)).first;
  return it->second;
}

const Spectrum& closed_spectrum(int k) {
  auto it = closed_spectra.find(k);
  if (it == closed_spectra.end()) {
    it = closed_spectra.emplace(k, compute_spectrum(Quantization::standard, k, true, false)).first;
  }
  return it->second;
}

const Spectrum& spectrum_2187() {
  if (open_2187.pairs.empty()) open_2187 = compute_spectrum(Quantization::standard, 7, false, false);
  return open_2187;
}

double identity_defect(const ComplexMatrix& u, const DiagonalProjector& opening) {
  const ComplexMatrix lhs = u.adjoint() * u;
  ComplexMatrix rhs = ComplexMatrix::Identity(u.rows(), u.cols()) - opening.matrix();
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main() {
  run("C1", "open-map identity U~^dagger U~ = I - pi_0", [](Outcome& o) {
    for (int k : {3, 5, 7}) {
      const int n = static_cast<int>(pow3(k));
      const double standard = identity_defect(open_propagator(n), opening_projector(n));
      const double walsh = identity_defect(walsh_open_baker(k), opening_projector(n));
      o.detail << " N=" << n << " standard=" << fmt(standard) << " walsh=" << fmt(walsh);
      o.require(standard < 1e-12, "standard defect at N=" + std::to_string(n));
      o.require(walsh < 1e-12, "walsh defect at N=" + std::to_string(n));
    }
  });

  run("C2", "opening weight equals 1 - |z|^2 for every right eigenpair", [](Outcome& o) {
    for (int k : {5, 6}) {
      const Spectrum& s = open_spectrum(k);
      const auto proj = opening_projector(s.dim);
      double worst = 0.0;
      for (const auto& p : s.pairs) worst = std::max(worst, std::abs(weight(p, proj) - weight_prediction(p.z, 0)));
      o.detail << " N=" << s.dim << " max=" << fmt(worst);
      o.require(worst < 1e-9, "residual at N=" + std::to_string(s.dim));
    }
  });

  run("C3", "escape-region weights follow |z|^2m (1-|z|^2)", [](Outcome& o) {
    std::map<int, std::map<int, double>> med;  // m -> k -> median
    for (int k : {4, 5, 6}) {
      const auto r = run_weights_experiment(Quantization::standard, k, open_spectrum(k));
      for (int m : {1, 2}) {
        med[m][k] = median_relative_error(r, m, 0.3, 0.9);
        o.detail << " N=" << pow3(k) << ",m=" << m << ":" << fmt(med[m][k]);
      }
    }
    o.require(med[1][6] < 0.25, "m=1 median at N=729");
    o.require(med[2][6] < 0.40, "m=2 median at N=729");
    for (int m : {1, 2}) {
      o.require(med[m][4] > med[m][5] && med[m][5] > med[m][6], "median decreases with N for m=" + std::to_string(m));
    }
  });

  run("C4", "20 largest moduli at N=2187 in [0.80, 0.93], largest in [0.88, 0.92]", [](Outcome& o) {
    const Spectrum& s = spectrum_2187();
    const auto top = select_long_lived(s, 20);
    const double hi = top.front().modulus();
    const double lo = top.back().modulus();
    o.detail << " largest=" << fmt(hi) << " 20th=" << fmt(lo);
    o.require(hi <= 0.93 && lo >= 0.80, "top-20 range");
    o.require(hi >= 0.88 && hi <= 0.92, "largest modulus");
  });

  run("C5", "Walsh weights exact and 2^k nonzero eigenvalues", [](Outcome& o) {
    for (int k : {4, 5}) {
      const int n = static_cast<int>(pow3(k));
      const ComplexMatrix u = walsh_open_baker(k);
      const Spectrum s = eigendecompose_deflated(u, kWalshZeroThreshold, {false});
      const int max_m = std::min(4, k - 1);  // finer regions are below grid resolution
      double worst = 0.0;
      int long_lived = 0;
      for (const auto& p : s.pairs) {
        if (p.modulus() <= 1e-10) continue;
        ++long_lived;
        for (int m = 0; m <= max_m; ++m) {
          worst = std::max(worst, std::abs(weight(p, escape_projector(m, n)) - weight_prediction(p.z, m)));
        }
      }
      const int rank = nonzero_eigenvalue_count(u, 1e-10);
      o.detail << " k=" << k << " m<=" << max_m << " max=" << fmt(worst) << " count=" << long_lived
               << " rank=" << rank;
      o.require(worst < 1e-8, "weight residual at k=" + std::to_string(k));
      o.require(long_lived == (1 << k) && rank == (1 << k), "count at k=" + std::to_string(k));
    }
  });

  run("C6", "fractal Weyl slope in [0.48, 0.78]; Walsh count 2^k", [](Outcome& o) {
    std::map<int, std::vector<double>> moduli;
    for (int k = 3; k <= 6; ++k) {
      const Spectrum s = k >= 4 ? open_spectrum(k) : compute_spectrum(Quantization::standard, k, false, false);
      for (const auto& p : s.pairs) moduli[k].push_back(p.modulus());
    }
    for (const auto& p : spectrum_2187().pairs) moduli[7].push_back(p.modulus());
    const auto w = run_weyl_experiment(moduli, 0.5);
    o.detail << " counts=";
    for (int c : w.counts) o.detail << c << ",";
    o.detail << " slope=" << (w.slope ? fmt(*w.slope) : "none");
    o.require(w.slope && *w.slope >= 0.48 && *w.slope <= 0.78 && !w.degenerate, "slope");

    std::vector<int> ks{3, 4, 5, 6};
    const auto walsh = run_weyl_experiment(ks, 1e-6, Quantization::walsh);
    o.detail << " walsh=";
    for (std::size_t i = 0; i < ks.size(); ++i) {
      o.detail << walsh.counts[i] << ",";
      o.require(walsh.counts[i] == (1 << ks[i]), "walsh count at k=" + std::to_string(ks[i]));
    }
  });

  run("C7", "Husimi mass of long-lived states concentrates on the trapped bands", [](Outcome& o) {
    std::map<int, HusimiFigureResult> res;
    for (int k : {4, 5, 6}) {
      RunConfig cfg;
      cfg.n_exp = k;
      cfg.grid = 81;
      cfg.count = 100;
      cfg.wigner = false;
      res[k] = run_husimi_figure(cfg, open_spectrum(k), closed_spectrum(k));
      o.detail << " N=" << pow3(k) << "(n=" << res[k].count << "): right=" << fmt(res[k].right_band_mass)
               << " left=" << fmt(res[k].left_band_mass) << " closed=" << fmt(res[k].closed_band_mass);
      o.require(std::abs(res[k].closed_band_mass - 0.67) <= 0.05, "closed control at N=" + std::to_string(pow3(k)));
    }
    o.require(res[6].right_band_mass > 2.0 / 3.0, "right mass at N=729");
    o.require(res[6].left_band_mass > 2.0 / 3.0, "left mass at N=729");
    o.require(res[4].right_band_mass < res[5].right_band_mass && res[5].right_band_mass < res[6].right_band_mass,
              "right mass increases");
    o.require(res[4].left_band_mass < res[5].left_band_mass && res[5].left_band_mass < res[6].left_band_mass,
              "left mass increases");
  });

  run("C8", "coherent state at (0.5, 0.5) is suppressed more as N grows", [](Outcome& o) {
    const TorusPoint centre[] = {TorusPoint(0.5, 0.5)};
    std::vector<double> norms;
    for (int k : {4, 5, 6}) {
      const auto r = kill_property_check(open_propagator(static_cast<int>(pow3(k))), 1, centre);
      norms.push_back(r.max_norm);
      o.detail << " N=" << pow3(k) << ":" << fmt(r.max_norm);
    }
    o.require(norms[0] > norms[1] && norms[1] > norms[2], "monotone decrease");
  });

  run("C9", "position densities self-similar, white noise not", [](Outcome& o) {
    RunConfig cfg;
    cfg.n_exp = 7;
    const auto r = run_density_figures(cfg, spectrum_2187());
    for (const auto& bin : r.bins) {
      o.detail << " bin" << fmt(bin.centre) << ": states=" << bin.states << " score=" << fmt(bin.self_similarity);
      o.require(bin.widenings == 0, "bin " + fmt(bin.centre) + " needed widening");
      o.require(bin.self_similarity > 0.8, "score for bin " + fmt(bin.centre));
    }
    o.detail << " noise=" << fmt(r.noise_self_similarity);
    o.require(r.noise_self_similarity < 0.3, "noise baseline");
  });

  run("C10", "classical regions, recursions, escape rate and Cantor dimension", [](Outcome& o) {
    for (int m = 0; m <= 8; ++m) {
      Rational expected(1, 3);
      for (int i = 0; i < m; ++i) expected *= Rational(2, 3);
      o.require(region_r_plus(m).measure() == expected, "measure of R+^" + std::to_string(m));
      o.require(backward_preimage_outside_opening(region_r_plus(m)) == region_r_plus(m + 1),
                "backward recursion at m=" + std::to_string(m));
      if (m >= 1) {
        o.require(forward_image_outside_opening(region_r_minus(m)) == region_r_minus(m + 1),
                  "forward recursion at m=" + std::to_string(m));
      }
    }
    const double rate = escape_rate_estimate(8);
    std::vector<int> levels{1, 2, 3, 4, 5, 6, 7, 8};
    const double dim = box_dimension(cantor_approx(10), levels);
    o.detail << " escape_rate=" << fmt(rate) << " box_dim=" << fmt(dim);
    o.require(std::abs(rate - std::log(1.5)) < 1e-12, "escape rate");
    o.require(std::abs(dim - std::log(2.0) / std::log(3.0)) < 1e-6, "box dimension");
  });

  run("C11", "biorthogonality, unit-sum densities, Wigner marginals, determinism", [](Outcome& o) {
    const Spectrum& s81 = open_spectrum(4);
    // Biorthogonality is asserted on the resonances; the null block is a single
    // defective eigenvalue with no distinct partners.
    Spectrum resonances = s81;
    resonances.pairs.erase(std::remove_if(resonances.pairs.begin(), resonances.pairs.end(),
                                          [](const auto& p) { return p.modulus() <= 1e-6; }),
                           resonances.pairs.end());
    const auto bio = biorthogonality_report(resonances);
    o.detail << " biorth_off=" << fmt(bio.max_off_diagonal) << " (" << resonances.pairs.size() << " resonances)";
    o.require(bio.max_off_diagonal < 1e-8, "biorthogonality");

    double sum_defect = 0.0;
    double marginal_defect = 0.0;
    for (const auto& p : select_long_lived(s81, 10)) {
      const auto h = husimi_grid(p.right, 27);
      const auto x = position_density(p.right);
      const auto k = momentum_density(p.right);
      sum_defect = std::max({sum_defect, std::abs(h.total() - 1.0), std::abs(x.total() - 1.0), std::abs(k.total() - 1.0)});
      const auto w = wigner_grid(p.right.normalized());
      const auto wx = wigner_position_marginal(w);
      const auto wk = wigner_momentum_marginal(w);
      for (std::size_t i = 0; i < wx.size(); ++i) {
        marginal_defect = std::max({marginal_defect, std::abs(wx[i] - x.values[i]), std::abs(wk[i] - k.values[i])});
      }
    }
    o.detail << " unit_sum=" << fmt(sum_defect) << " wigner=" << fmt(marginal_defect);
    o.require(sum_defect < 1e-10, "unit-sum densities");
    o.require(marginal_defect < 1e-8, "Wigner marginals");

    const fs::path base = fs::temp_directory_path() / "openmap_acceptance";
    fs::remove_all(base);
    std::vector<std::vector<fs::path>> outputs;
    for (const char* run_dir : {"a", "b"}) {
      RunConfig cfg;
      cfg.n_exp = 4;
      cfg.grid = 27;
      cfg.out_dir = base / run_dir;
      std::vector<fs::path> files;
      files.push_back(emit_spectrum(cfg, compute_spectrum(Quantization::standard, 4)));
      for (auto& f : emit_weights(cfg, run_weights_experiment(cfg))) files.push_back(f);
      for (auto& f : emit_husimi_figure(cfg, run_husimi_figure(cfg))) files.push_back(f);
      outputs.push_back(files);
    }
    int compared = 0;
    for (std::size_t i = 0; i < outputs[0].size(); ++i) {
      if (outputs[0][i].extension() != ".csv") continue;
      ++compared;
      o.require(slurp(outputs[0][i]) == slurp(outputs[1][i]), "byte-identical " + outputs[0][i].filename().string());
    }
    o.detail << " identical_csv=" << compared;
    fs::remove_all(base);
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
