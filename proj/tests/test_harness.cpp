#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gcgm/config.hpp"
#include "gcgm/data_io.hpp"
#include "gcgm/errors.hpp"
#include "gcgm/experiment.hpp"

using namespace gcgm;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gcgm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> violations_of(const std::vector<std::string>& args) {
  try {
    parse_config(args);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

ExperimentConfig small_sim() {
  ExperimentConfig cfg = parse_config({"sim", "--d", "8", "--n", "40", "--reps", "2",
                                       "--grid", "15", "--criteria", "gic,bic"});
  return cfg;
}

}  // namespace

TEST_CASE("config defaults") {
  const ExperimentConfig cfg = parse_config({"sim"});
  CHECK(cfg.mode == Mode::sim);
  CHECK(cfg.grid == 100);
  CHECK(cfg.grid_ratio == 0.01);
  CHECK(cfg.seed == 42);
  CHECK(cfg.penalty.family == PenaltyFamily::lasso);
  CHECK(cfg.cv_grid == 200);
  CHECK(cfg.cv_folds == 2);
  CHECK(cfg.copula);
  CHECK(cfg.criteria.size() == 6);
}

TEST_CASE("config flags") {
  const ExperimentConfig cfg =
      parse_config({"sim", "--d", "60", "--model", "band", "--penalty", "scad",
                    "--scad-a", "3.1", "--criteria", "gic,oracle", "--no-copula",
                    "--seed", "7", "--redraw-truth"});
  CHECK(cfg.d == 60);
  CHECK(cfg.model == ModelKind::band);
  CHECK(cfg.penalty.family == PenaltyFamily::scad);
  CHECK(cfg.penalty.a == 3.1);
  CHECK(cfg.criteria == std::vector<Criterion>{Criterion::gic, Criterion::kl_oracle});
  CHECK_FALSE(cfg.copula);
  CHECK(cfg.seed == 7);
  CHECK(cfg.redraw_truth);
}

TEST_CASE("config rejects a one-point grid") {
  CHECK_THROWS_AS(parse_config({"sim", "--grid", "1"}), ConfigError);
}

TEST_CASE("config reports every violation") {
  const auto v = violations_of({"sim", "--grid", "1", "--reps", "0", "--grid-ratio", "2",
                                "--penalty", "ridge", "--d", "x", "--bogus", "3"});
  CHECK(v.size() >= 6);
  const auto mentions = [&](const std::string& needle) {
    for (const auto& line : v) {
      if (line.find(needle) != std::string::npos) return true;
    }
    return false;
  };
  CHECK(mentions("grid must"));
  CHECK(mentions("reps"));
  CHECK(mentions("grid-ratio"));
  CHECK(mentions("penalty"));
  CHECK(mentions("'x'"));
  CHECK(mentions("bogus"));
}

TEST_CASE("config file values are overridden by flags; unknown keys rejected") {
  const auto dir = scratch_dir("config");
  const auto path = (dir / "cfg.json").string();
  {
    std::ofstream out(path);
    out << R"({"d": 20, "grid": 50, "criteria": ["gic", "aic"], "no-copula": true})";
  }
  const ExperimentConfig cfg = parse_config({"sim", "--config", path, "--grid", "30"});
  CHECK(cfg.d == 20);
  CHECK(cfg.grid == 30);
  CHECK(cfg.criteria.size() == 2);
  CHECK_FALSE(cfg.copula);

  {
    std::ofstream out(path);
    out << R"({"d": 20, "colour": "blue", "replicas": 3})";
  }
  const auto v = violations_of({"sim", "--config", path});
  CHECK(v.size() == 2);
}

TEST_CASE("fit mode needs data and refuses the oracle") {
  const auto v = violations_of({"fit", "--criteria", "oracle"});
  CHECK(v.size() == 2);
  CHECK(parse_config({"fit", "--data", "x.csv"}).criteria ==
        std::vector<Criterion>{Criterion::gic});
}

TEST_CASE("simulation table has one row per replicate and criterion") {
  const ResultsTable table = run_simulation(small_sim());
  CHECK(table.rows.size() == 4);
  CHECK(table.aggregates.size() == 2);
  for (const auto& row : table.rows) CHECK_FALSE(row.failed);

  for (const auto& agg : table.aggregates) {
    double sum = 0.0;
    int count = 0;
    for (const auto& row : table.rows) {
      if (row.criterion == agg.criterion) {
        sum += row.metrics.kl_loss;
        ++count;
      }
    }
    CHECK(agg.count == 2);
    CHECK(std::abs(*agg.mean[1] - sum / count) <= 1e-12);
  }
}

TEST_CASE("simulation output is deterministic") {
  ExperimentConfig cfg = small_sim();
  cfg.criteria = {Criterion::gic, Criterion::cv, Criterion::kl_oracle};
  cfg.cv_grid = 20;
  const ResultsTable a = run_simulation(cfg);
  cfg.threads = 2;
  const ResultsTable b = run_simulation(cfg);
  CHECK(a.replicates_csv() == b.replicates_csv());
  CHECK(a.summary_csv() == b.summary_csv());
}

TEST_CASE("k-fold cross-validation runs and averages") {
  ExperimentConfig cfg = small_sim();
  cfg.cv_grid = 10;
  cfg.cv_folds = 4;
  const TrueModel truth = correlation_scaled(band_model(8));
  const DataMatrix data = sample_mvn(truth, 40, 3);
  const PseudoSample ps = make_pseudo_sample(data);
  const CvSelection cv = cross_validate(data, cfg, ps.s_tilde, 9);
  CHECK(cv.losses.size() == 10);
  CHECK(cv.lambda == cv.grid[cv.index]);
  for (double loss : cv.losses) CHECK(std::isfinite(loss));
}

TEST_CASE("bias curve schema and the empty-graph end") {
  ExperimentConfig cfg = parse_config({"biascurve", "--d", "10", "--n", "60", "--grid", "20"});
  const auto rows = run_biascurve(cfg);
  CHECK(rows.size() == 20);
  CHECK(rows.front().df_aic == 0.0);
  const std::string csv = biascurve_csv(rows);
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header == "lambda,df_gic,df_aic,df_kl_true");
  CHECK(std::count(header.begin(), header.end(), ',') == 3);
}

TEST_CASE("data CSV: header detection, names and parse errors") {
  std::istringstream with_header("a,b,c\n1,2,3\n4,5,6\n");
  const DataMatrix x = read_data_csv(with_header);
  CHECK(x.names == std::vector<std::string>{"a", "b", "c"});
  CHECK(x.n() == 2);

  std::istringstream bare("1,2\n3,4.5e1\n");
  const DataMatrix y = read_data_csv(bare);
  CHECK(y.names.empty());
  CHECK(y.values(1, 1) == 45.0);

  std::istringstream bad("x,y\n1,2\n3,oops\n");
  try {
    read_data_csv(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
    CHECK(e.col() == 2);
  }
  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_data_csv(ragged), ParseError);
}

TEST_CASE("fit: two strongly correlated variables give one named edge") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  DataMatrix data;
  data.names = {"height", "weight"};
  data.values.resize(80, 2);
  for (Index i = 0; i < 80; ++i) {
    const double z = normal(rng);
    data.values(i, 0) = z;
    data.values(i, 1) = std::exp(0.9 * z + 0.3 * normal(rng));
  }
  const ExperimentConfig cfg = parse_config({"fit", "--data", "unused.csv", "--grid", "30"});
  const FitResult fit = fit_dataset(cfg, data);
  CHECK(fit.selected.edge_count() == 1);
  const std::string edges = fit_edges_csv(fit);
  CHECK(edges.find("height,weight,") != std::string::npos);
  CHECK(fit_summary_csv(fit).find(",gic,") != std::string::npos);
  CHECK(fit_omega_csv(fit).rfind("variable,height,weight\n", 0) == 0);
}

TEST_CASE("fit: end to end through files, and degenerate columns named") {
  const auto dir = scratch_dir("fit");
  const auto data_path = (dir / "data.csv").string();
  {
    std::ofstream out(data_path);
    out << "p,q,r\n";
    std::mt19937_64 rng(6);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 50; ++i) {
      const double z = normal(rng);
      out << z << "," << z + normal(rng) << "," << normal(rng) << "\n";
    }
  }
  ExperimentConfig cfg = parse_config(
      {"fit", "--data", data_path, "--out", (dir / "out").string(), "--grid", "20"});
  const auto written = write_outputs(cfg, fit_dataset(cfg));
  CHECK(written.size() == 3);
  for (const auto& path : written) CHECK(std::filesystem::exists(path));

  {
    std::ofstream out(data_path);
    out << "p,flat\n1,2\n3,2\n5,2\n";
  }
  try {
    fit_dataset(cfg);
    FAIL("expected DegenerateColumn");
  } catch (const DegenerateColumn& e) {
    CHECK(e.name() == "flat");
  }
}
