#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "openmap/errors.hpp"
#include "openmap/experiments.hpp"
#include "openmap/io.hpp"
#include "openmap/record.hpp"

namespace fs = std::filesystem;
using namespace openmap;

namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("openmap_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Records, CsvUnionOfFieldsAndFlags) {
  std::vector<ExperimentRecord> rows(2);
  rows[0].experiment = "a";
  rows[0].set("x", 1.5).flag("f1").flag("f2");
  rows[1].experiment = "b,c";
  rows[1].set("y", 2.0);
  std::ostringstream out;
  write_records_csv(out, rows);
  EXPECT_EQ(out.str(), "experiment,x,y,flags\na,1.5,,f1;f2\n\"b,c\",,2,\n");
}

TEST(Records, RejectNonFiniteValues) {
  ExperimentRecord r("r");
  EXPECT_THROW(r.set("x", std::nan("")), NumericalError);
  EXPECT_THROW(r.set("x", INFINITY), NumericalError);
  EXPECT_THROW(r.get("missing"), ValidationError);
}

TEST(Records, JsonRoundTrip) {
  std::vector<ExperimentRecord> rows(1);
  rows[0].experiment = "weyl";
  rows[0].set("slope", 0.125).flag("degenerate_fit");
  std::ostringstream out;
  write_records_json(out, rows);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j[0]["experiment"], "weyl");
  EXPECT_EQ(j[0]["fields"]["slope"], 0.125);
  EXPECT_EQ(j[0]["flags"][0], "degenerate_fit");
}

TEST(Records, SeventeenDigitsRoundTrip) {
  std::vector<ExperimentRecord> rows(1);
  rows[0].experiment = "x";
  rows[0].set("v", 0.1 + 0.2);
  std::ostringstream out;
  write_records_csv(out, rows);
  const std::string text = out.str();
  const auto second = text.substr(text.find('\n') + 1);
  const auto value = second.substr(2, second.find(',', 2) - 2);
  EXPECT_EQ(std::stod(value), 0.1 + 0.2);
}

TEST(Io, SidecarChecksumMatchesFile) {
  TempDir dir;
  const auto path = dir.path() / "data.csv";
  std::ofstream(path) << "a,b\n1,2\n";
  io::Json cfg;
  cfg["seed"] = 7;
  io::write_sidecar(path, cfg);
  const auto j = nlohmann::json::parse(slurp(dir.path() / "data.csv.json"));
  EXPECT_EQ(j["sha256"], io::sha256_file(path));
  EXPECT_EQ(j["config"]["seed"], 7);
  EXPECT_EQ(j["version"], io::software_version());
  // Known digest of the empty file.
  std::ofstream(dir.path() / "empty").close();
  EXPECT_EQ(io::sha256_file(dir.path() / "empty"), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Io, PgmHeaderAndScaling) {
  TempDir dir;
  const auto path = dir.path() / "img.pgm";
  const auto info = io::write_pgm(path, 3, 2, [](std::size_t x, std::size_t y) { return static_cast<double>(x + 3 * y); });
  EXPECT_EQ(info.min_value, 0.0);
  EXPECT_EQ(info.max_value, 5.0);
  const std::string bytes = slurp(path);
  const std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  ASSERT_EQ(bytes.size(), header.size() + 6);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size()]), 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes.back()), 255);
}

TEST(Io, DensityCsvLayout) {
  DensityGrid g;
  g.axes = {"q", "p"};
  g.rows = g.cols = 2;
  g.values = {0.1, 0.2, 0.3, 0.4};
  std::ostringstream out;
  io::write_density_csv(out, g);
  const std::string text = out.str();
  EXPECT_EQ(text[0], '#');
  EXPECT_NE(text.find("q_index,p_index,q,p,value\n"), std::string::npos);
  EXPECT_EQ(line_count(text), 6u);
}

TEST(Spectrum, CliContractWritesOneRowPerEigenvalue) {
  TempDir dir;
  RunConfig cfg;
  cfg.n_exp = 5;
  cfg.out_dir = dir.path() / "runs";
  const auto path = emit_spectrum(cfg, compute_spectrum(Quantization::standard, 5, false, false));
  EXPECT_EQ(path.filename(), "spectrum_243.csv");
  EXPECT_EQ(line_count(slurp(path)), 244u);
  EXPECT_TRUE(fs::exists(dir.path() / "runs" / "spectrum_243.csv.json"));
}

TEST(Weights, RowsAndStatistics) {
  const auto r = run_weights_experiment(Quantization::standard, 4, compute_spectrum(Quantization::standard, 4, false, false));
  ASSERT_EQ(r.stats.size(), 3u);  // m = 0..k-2
  EXPECT_EQ(r.rows.size(), 81u * 3u);
  EXPECT_LT(max_weight_residual(r, 0), 1e-10);
  EXPECT_LT(r.stats[0].median_relative_error, 1e-10);
  EXPECT_GT(r.stats[1].median_relative_error, 1e-6);
  EXPECT_NEAR(median_relative_error(r, 0, 0.2, 0.95), r.stats[0].median_relative_error, 1e-15);
  EXPECT_THROW(median_relative_error(r, 1, 0.999, 1.0), NumericalError);
}

TEST(Weights, ValidatesExponent) {
  RunConfig cfg;
  cfg.n_exp = 3;
  EXPECT_THROW(run_weights_experiment(cfg), ValidationError);
  cfg.quantization = Quantization::walsh;
  EXPECT_NO_THROW(run_weights_experiment(cfg));
  EXPECT_EQ(weights_max_m(Quantization::walsh, 3), 2);
  EXPECT_EQ(weights_max_m(Quantization::standard, 7), 4);
}

TEST(Weyl, CountsSlopeAndDegenerateFlag) {
  std::map<int, std::vector<double>> moduli{{1, {0.9, 0.6}}, {2, {0.9, 0.8, 0.7, 0.6}}, {3, {0.9, 0.8, 0.7, 0.6, 0.55, 0.52, 0.51, 0.5}}};
  const auto r = run_weyl_experiment(moduli, 0.5);
  EXPECT_EQ(r.counts, (std::vector<int>{2, 4, 7}));
  ASSERT_TRUE(r.slope.has_value());
  EXPECT_FALSE(r.degenerate);

  const auto d = run_weyl_experiment(moduli, 0.999);
  EXPECT_TRUE(d.degenerate);
  EXPECT_TRUE(d.record().has_flag("degenerate_fit"));
  EXPECT_THROW(run_weyl_experiment(moduli, 1.0), ValidationError);
  EXPECT_THROW(run_weyl_experiment(std::map<int, std::vector<double>>{{1, {}}, {2, {}}}, 0.5), ValidationError);
}

TEST(Weyl, WalshCountsAreTwoToTheK) {
  const auto r = run_weyl_experiment(std::vector<int>{2, 3, 4}, 1e-6, Quantization::walsh);
  EXPECT_EQ(r.counts, (std::vector<int>{4, 8, 16}));
  ASSERT_TRUE(r.slope.has_value());
  EXPECT_NEAR(*r.slope, std::log(2.0) / std::log(3.0), 1e-12);
}

TEST(Husimi, CountIsClampedToNonzeroEigenvalues) {
  RunConfig cfg;
  cfg.n_exp = 3;
  cfg.grid = 27;
  cfg.count = 100;
  cfg.wigner = true;
  const auto r = run_husimi_figure(cfg);
  EXPECT_LE(r.count, 27);
  EXPECT_GT(r.min_selected_modulus, cfg.zero_cutoff);
  EXPECT_NEAR(r.right.total(), 1.0, 1e-10);
  EXPECT_NEAR(r.left.total(), 1.0, 1e-10);
  ASSERT_TRUE(r.wigner.has_value());
  EXPECT_NEAR(r.wigner->total(), 1.0, 1e-10);
}

TEST(Husimi, EmitsImagesMasksAndSidecars) {
  TempDir dir;
  RunConfig cfg;
  cfg.n_exp = 3;
  cfg.grid = 27;
  cfg.out_dir = dir.path();
  const auto paths = emit_husimi_figure(cfg, run_husimi_figure(cfg));
  for (const auto& p : paths) {
    EXPECT_TRUE(fs::exists(p)) << p;
    EXPECT_TRUE(fs::exists(fs::path(p.string() + ".json"))) << p;
  }
  for (int level = 1; level <= 3; ++level) {
    EXPECT_TRUE(fs::exists(dir.path() / ("mask_trapped_band_level" + std::to_string(level) + "_27.pgm")));
  }
  EXPECT_TRUE(fs::exists(dir.path() / "wigner_right_27_sign.pgm"));
}

TEST(Density, BinsWidenWhenEmpty) {
  Spectrum s;
  s.dim = 9;
  ResonanceEigenpair p;
  p.z = Complex(0.58, 0.0);
  p.right = ComplexVector::Zero(9);
  for (int i = 0; i < 9; ++i) p.right(i) = 1.0 + i;
  s.pairs.push_back(p);
  const auto bin = position_density_bin(s, 0.4);
  EXPECT_EQ(bin.widenings, 3);
  EXPECT_EQ(bin.states, 1);
  EXPECT_NEAR(bin.lo, 0.2, 1e-12);
  EXPECT_NEAR(bin.density.total(), 1.0, 1e-12);
}

TEST(Density, NoiseBaselineDependsOnlyOnSeed) {
  const auto a = white_noise_density(81, 3);
  const auto b = white_noise_density(81, 3);
  const auto c = white_noise_density(81, 4);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  EXPECT_NEAR(a.total(), 1.0, 1e-12);
}

TEST(Density, FiguresAtSmallN) {
  RunConfig cfg;
  cfg.n_exp = 5;
  const auto r = run_density_figures(cfg);
  EXPECT_EQ(r.momentum_count, 20);
  EXPECT_GE(r.momentum_max_modulus, r.momentum_min_modulus);
  EXPECT_GT(r.momentum_cantor_mass_l1, 0.9);
  EXPECT_EQ(r.bins.size(), 2u);
}

TEST(Determinism, RepeatedRunsGiveIdenticalCsv) {
  TempDir dir;
  std::vector<std::string> contents;
  for (const char* sub : {"a", "b"}) {
    RunConfig cfg;
    cfg.n_exp = 4;
    cfg.out_dir = dir.path() / sub;
    const auto paths = emit_density_figures(cfg, run_density_figures(cfg));
    std::string all;
    for (const auto& p : paths) all += slurp(p);
    contents.push_back(all);
  }
  EXPECT_EQ(contents[0], contents[1]);
}

TEST(Classical, ReportRows) {
  const auto rows = classical_report(8);
  ASSERT_GE(rows.size(), 10u);
  EXPECT_EQ(rows.front().experiment, "escape_region");
  const auto summary = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.experiment == "classical_summary"; });
  ASSERT_NE(summary, rows.end());
  EXPECT_NEAR(summary->get("escape_rate"), std::log(1.5), 1e-12);
  EXPECT_THROW(classical_report(1), ValidationError);
}

TEST(Config, JsonEchoesEveryField) {
  RunConfig cfg;
  cfg.n_exp = 4;
  cfg.seed = 99;
  const auto j = cfg.to_json();
  EXPECT_EQ(j["N"], 81);
  EXPECT_EQ(j["seed"], 99);
  EXPECT_EQ(j["quantization"], "standard");
  for (const char* key : {"grid", "count", "threshold", "zero_cutoff", "format", "wigner"}) EXPECT_TRUE(j.contains(key));
}
