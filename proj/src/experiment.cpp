#include "gcgm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

#include "gcgm/data_io.hpp"
#include "gcgm/errors.hpp"

namespace gcgm {

namespace {

enum Stream : std::uint64_t { kModelStream = 1, kDataStream = 2, kSplitStream = 3 };

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

DataMatrix take_rows(const DataMatrix& data, const std::vector<Index>& rows) {
  DataMatrix out;
  out.names = data.names;
  out.values.resize(static_cast<Index>(rows.size()), data.d());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Index>(i)) = data.values.row(rows[i]);
  }
  return out;
}

PenaltySpec at_lambda(PenaltySpec spec, double lambda) {
  spec.lambda = lambda;
  return spec;
}

TrueModel truth_for(const ExperimentConfig& cfg, int replicate) {
  const std::uint64_t rep = cfg.redraw_truth ? static_cast<std::uint64_t>(replicate) : 0;
  return correlation_scaled(
      make_model(cfg.model, cfg.d, derive_seed(cfg.seed, rep, kModelStream)));
}

std::vector<Criterion> without_cv(const std::vector<Criterion>& criteria) {
  std::vector<Criterion> out;
  for (Criterion c : criteria) {
    if (c != Criterion::cv) out.push_back(c);
  }
  return out;
}

bool wants_cv(const std::vector<Criterion>& criteria) {
  return std::find(criteria.begin(), criteria.end(), Criterion::cv) != criteria.end();
}

std::vector<SelectionRow> run_replicate(const ExperimentConfig& cfg,
                                        const TrueModel* shared_truth,
                                        int replicate) {
  const auto rep = static_cast<std::uint64_t>(replicate);
  const TrueModel truth = shared_truth != nullptr ? *shared_truth : truth_for(cfg, replicate);
  const DataMatrix data = sample_mvn(truth, cfg.n, derive_seed(cfg.seed, rep, kDataStream));
  const PseudoSample ps = make_pseudo_sample(data, cfg.copula);

  std::vector<SelectionRow> rows;
  const auto scored = without_cv(cfg.criteria);
  if (!scored.empty()) {
    const auto start = Clock::now();
    ScoreContext ctx;
    ctx.sigma0 = &truth.sigma0;
    const PathResult path =
        fit_and_score(ps, cfg.penalty, lambda_grid(ps.s_tilde, cfg.grid, cfg.grid_ratio),
                      scored, ctx, cfg.solver);
    const double elapsed = seconds_since(start);
    for (Criterion c : scored) {
      SelectionRow row;
      row.replicate = replicate;
      row.criterion = c;
      row.index = path.selected.at(c);
      row.lambda = path.grid[row.index];
      const PrecisionEstimate& est = path.estimates[row.index];
      row.metrics = evaluate(truth, est);
      row.df_gic = df_gic(est, ps);
      row.df_aic = df_aic(est);
      row.runtime_seconds = elapsed;
      rows.push_back(std::move(row));
    }
  }
  if (wants_cv(cfg.criteria)) {
    const auto start = Clock::now();
    const CvSelection cv =
        cross_validate(data, cfg, ps.s_tilde, derive_seed(cfg.seed, rep, kSplitStream));
    const PrecisionEstimate est = mple(ps, at_lambda(cfg.penalty, cv.lambda), cfg.solver);
    SelectionRow row;
    row.replicate = replicate;
    row.criterion = Criterion::cv;
    row.index = cv.index;
    row.lambda = cv.lambda;
    row.metrics = evaluate(truth, est);
    row.df_gic = df_gic(est, ps);
    row.df_aic = df_aic(est);
    row.runtime_seconds = seconds_since(start);
    rows.push_back(std::move(row));
  }
  // Report in the configured criterion order.
  std::vector<SelectionRow> ordered;
  for (Criterion c : cfg.criteria) {
    for (auto& row : rows) {
      if (row.criterion == c) ordered.push_back(row);
    }
  }
  return ordered;
}

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : "NA";
}

void write_file(const std::filesystem::path& path, const std::string& text,
                std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  written.push_back(path.string());
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replicate,
                          std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

CvSelection cross_validate(const DataMatrix& data, const ExperimentConfig& cfg,
                           const SymMatrix& full_s, std::uint64_t seed) {
  const Index n = data.n();
  const int folds = cfg.cv_folds;
  if (n < 2 * std::max(folds, 2)) {
    throw InvalidInput("too few observations for cross-validation");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  CvSelection out;
  out.grid = lambda_grid(full_s, cfg.cv_grid, cfg.grid_ratio);
  out.losses.assign(out.grid.size(), 0.0);

  // Two folds means one training half and one validation half.
  const int rounds = folds == 2 ? 1 : folds;
  for (int fold = 0; fold < rounds; ++fold) {
    std::vector<Index> train;
    std::vector<Index> valid;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const bool held_out = folds == 2 ? i >= order.size() / 2
                                       : static_cast<int>(i % static_cast<std::size_t>(folds)) == fold;
      (held_out ? valid : train).push_back(order[i]);
    }
    std::sort(train.begin(), train.end());
    std::sort(valid.begin(), valid.end());
    const PseudoSample train_ps = make_pseudo_sample(take_rows(data, train), cfg.copula);
    const PseudoSample valid_ps = make_pseudo_sample(take_rows(data, valid), cfg.copula);
    const auto path = fit_path(train_ps, cfg.penalty, out.grid, cfg.solver);
    for (std::size_t i = 0; i < path.size(); ++i) {
      out.losses[i] += likelihood_loss(path[i].omega, valid_ps.s_tilde) / rounds;
    }
  }
  out.index = static_cast<std::size_t>(
      std::min_element(out.losses.begin(), out.losses.end()) - out.losses.begin());
  out.lambda = out.grid[out.index];
  return out;
}

const std::array<const char*, kMetricCount> kMetricNames = {
    "lambda",      "kl_loss",     "op_norm", "l1_norm", "fro_norm",
    "specificity", "sensitivity", "mcc",     "df_gic",  "df_aic"};

std::array<std::optional<double>, kMetricCount> metric_values(const SelectionRow& row) {
  return {row.lambda,           row.metrics.kl_loss,     row.metrics.op_norm,
          row.metrics.l1_norm,  row.metrics.fro_norm,    row.metrics.specificity,
          row.metrics.sensitivity, row.metrics.mcc,      row.df_gic,
          row.df_aic};
}

std::vector<AggregateRow> aggregate(const std::vector<SelectionRow>& rows) {
  std::vector<Criterion> order;
  for (const auto& row : rows) {
    if (std::find(order.begin(), order.end(), row.criterion) == order.end()) {
      order.push_back(row.criterion);
    }
  }
  std::vector<AggregateRow> out;
  for (Criterion c : order) {
    AggregateRow agg;
    agg.criterion = c;
    std::array<std::vector<double>, kMetricCount> samples;
    for (const auto& row : rows) {
      if (row.criterion != c || row.failed) continue;
      ++agg.count;
      const auto values = metric_values(row);
      for (std::size_t m = 0; m < kMetricCount; ++m) {
        if (values[m]) samples[m].push_back(*values[m]);
      }
    }
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      const auto& xs = samples[m];
      if (xs.empty()) continue;
      const double count = static_cast<double>(xs.size());
      const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
      agg.mean[m] = mean;
      if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        agg.se[m] = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
      }
    }
    out.push_back(std::move(agg));
  }
  return out;
}

std::string ResultsTable::replicates_csv(bool timings) const {
  std::string out = "replicate,criterion,lambda_index";
  for (const char* name : kMetricNames) out += std::string(",") + name;
  out += ",status";
  if (timings) out += ",runtime_s";
  out += "\n";
  for (const auto& row : rows) {
    out += std::to_string(row.replicate) + "," + to_string(row.criterion) + "," +
           std::to_string(row.index);
    for (const auto& v : metric_values(row)) {
      out += "," + (row.failed ? std::string("NA") : optional_number(v));
    }
    out += row.failed ? ",failed" : ",ok";
    if (timings) out += "," + format_number(row.runtime_seconds);
    out += "\n";
  }
  return out;
}

std::string ResultsTable::summary_csv() const {
  std::string out = "criterion,replicates";
  for (const char* name : kMetricNames) {
    out += std::string(",") + name + "_mean," + name + "_se";
  }
  out += "\n";
  for (const auto& agg : aggregates) {
    out += to_string(agg.criterion) + "," + std::to_string(agg.count);
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      out += "," + optional_number(agg.mean[m]) + "," + optional_number(agg.se[m]);
    }
    out += "\n";
  }
  return out;
}

ResultsTable run_simulation(const ExperimentConfig& cfg) {
  if (cfg.mode != Mode::sim) throw InvalidInput("run_simulation needs mode sim");
  std::optional<TrueModel> shared;
  if (!cfg.redraw_truth) shared = truth_for(cfg, 0);

  std::vector<std::vector<SelectionRow>> per_rep(static_cast<std::size_t>(cfg.replicates));
  parallel_for(cfg.replicates, cfg.threads, [&](int rep) {
    auto& slot = per_rep[static_cast<std::size_t>(rep)];
    try {
      slot = run_replicate(cfg, shared ? &*shared : nullptr, rep);
    } catch (const Error& e) {
      slot.clear();
      for (Criterion c : cfg.criteria) {
        SelectionRow row;
        row.replicate = rep;
        row.criterion = c;
        row.failed = true;
        row.error = e.what();
        slot.push_back(std::move(row));
      }
    }
  });

  ResultsTable table;
  for (auto& rows : per_rep) {
    for (auto& row : rows) table.rows.push_back(std::move(row));
  }
  table.aggregates = aggregate(table.rows);
  return table;
}

std::vector<BiasCurveRow> run_biascurve(const ExperimentConfig& cfg) {
  const TrueModel truth = truth_for(cfg, 0);
  const DataMatrix data = sample_mvn(truth, cfg.n, derive_seed(cfg.seed, 0, kDataStream));
  const PseudoSample ps = make_pseudo_sample(data, cfg.copula);
  const auto grid = lambda_grid(ps.s_tilde, cfg.grid, cfg.grid_ratio);
  const auto path = fit_path(ps, cfg.penalty, grid, cfg.solver);
  const Eigen::MatrixXd gap = truth.sigma0.dense() - ps.s_tilde.dense();
  const double n = static_cast<double>(ps.n());

  std::vector<BiasCurveRow> rows;
  for (std::size_t i = 0; i < path.size(); ++i) {
    BiasCurveRow row;
    row.lambda = grid[i];
    row.df_gic = df_gic(path[i], ps);
    row.df_aic = df_aic(path[i]);
    row.df_kl_true = n * path[i].omega.dense().cwiseProduct(gap).sum();
    rows.push_back(row);
  }
  return rows;
}

std::string biascurve_csv(const std::vector<BiasCurveRow>& rows) {
  std::string out = "lambda,df_gic,df_aic,df_kl_true\n";
  for (const auto& r : rows) {
    out += format_number(r.lambda) + "," + format_number(r.df_gic) + "," +
           format_number(r.df_aic) + "," + format_number(r.df_kl_true) + "\n";
  }
  return out;
}

FitResult fit_dataset(const ExperimentConfig& cfg, const DataMatrix& data) {
  if (cfg.criteria.empty()) throw InvalidInput("no selection criterion");
  const Criterion criterion = cfg.criteria.front();
  const PseudoSample ps = make_pseudo_sample(data, cfg.copula);

  FitResult fit;
  fit.names.resize(static_cast<std::size_t>(data.d()));
  for (Index j = 0; j < data.d(); ++j) fit.names[static_cast<std::size_t>(j)] = data.column_name(j);
  fit.criterion = criterion;

  if (criterion == Criterion::cv) {
    const CvSelection cv =
        cross_validate(data, cfg, ps.s_tilde, derive_seed(cfg.seed, 0, kSplitStream));
    fit.grid = cv.grid;
    fit.index = cv.index;
    fit.value = cv.losses[cv.index];
    fit.selected = mple(ps, at_lambda(cfg.penalty, cv.lambda), cfg.solver);
  } else {
    const std::vector<Criterion> criteria{criterion};
    const PathResult path =
        fit_and_score(ps, cfg.penalty, lambda_grid(ps.s_tilde, cfg.grid, cfg.grid_ratio),
                      criteria, {}, cfg.solver);
    fit.grid = path.grid;
    fit.index = path.selected.at(criterion);
    fit.value = path.scores.at(criterion)[fit.index].value;
    fit.selected = path.estimates[fit.index];
  }
  fit.df_gic = df_gic(fit.selected, ps);
  fit.df_aic = df_aic(fit.selected);
  return fit;
}

FitResult fit_dataset(const ExperimentConfig& cfg) {
  if (cfg.mode != Mode::fit) throw InvalidInput("fit_dataset needs mode fit");
  return fit_dataset(cfg, read_data_csv(cfg.data));
}

std::string fit_omega_csv(const FitResult& fit) {
  DataMatrix labels;
  labels.names = fit.names;
  return matrix_csv(fit.selected.omega.dense(), labels);
}

std::string fit_edges_csv(const FitResult& fit) {
  std::string out = "i,j,omega\n";
  const Index d = fit.selected.order();
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      if (fit.selected.support(i, j) == 0) continue;
      out += fit.names[static_cast<std::size_t>(i)] + "," +
             fit.names[static_cast<std::size_t>(j)] + "," +
             format_number(fit.selected.omega(i, j)) + "\n";
    }
  }
  return out;
}

std::string fit_summary_csv(const FitResult& fit) {
  return "lambda,criterion,value,df_gic,df_aic,edges\n" +
         format_number(fit.grid[fit.index]) + "," + to_string(fit.criterion) + "," +
         format_number(fit.value) + "," + format_number(fit.df_gic) + "," +
         format_number(fit.df_aic) + "," + std::to_string(fit.selected.edge_count()) +
         "\n";
}

std::vector<std::string> write_outputs(const ExperimentConfig& cfg,
                                       const ResultsTable& table) {
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  write_file(dir / "replicates.csv", table.replicates_csv(cfg.timings), written);
  write_file(dir / "summary.csv", table.summary_csv(), written);
  return written;
}

std::vector<std::string> write_outputs(const ExperimentConfig& cfg,
                                       const std::vector<BiasCurveRow>& curve) {
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  write_file(dir / "biascurve.csv", biascurve_csv(curve), written);
  return written;
}

std::vector<std::string> write_outputs(const ExperimentConfig& cfg,
                                       const FitResult& fit) {
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  write_file(dir / "omega.csv", fit_omega_csv(fit), written);
  write_file(dir / "edges.csv", fit_edges_csv(fit), written);
  write_file(dir / "summary.csv", fit_summary_csv(fit), written);
  return written;
}

}  // namespace gcgm
