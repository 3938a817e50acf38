#include "gcgm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcgm/errors.hpp"

namespace gcgm {

namespace {

// Keys shared by the command line (as --key) and the JSON config file.
const std::set<std::string>& value_keys() {
  static const std::set<std::string> keys = {
      "model",   "d",          "n",         "reps",      "penalty",
      "criteria", "grid",      "grid-ratio", "gamma",    "scad-a",
      "seed",    "data",       "out",       "cv-folds",  "cv-grid",
      "reweight-steps", "threads", "tol",   "max-iter"};
  return keys;
}

const std::set<std::string>& flag_keys() {
  static const std::set<std::string> keys = {"no-copula", "redraw-truth",
                                             "timings"};
  return keys;
}

template <typename T>
std::optional<T> parse_number(const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

class Builder {
 public:
  explicit Builder(ExperimentConfig& cfg) : cfg_(cfg) {}

  void apply(const std::string& key, const std::string& value) {
    if (key == "model") {
      guard(key, value, [&] { cfg_.model = parse_model_kind(value); });
    } else if (key == "d") {
      integer(key, value, [&](long v) { cfg_.d = v; });
    } else if (key == "n") {
      integer(key, value, [&](long v) { cfg_.n = v; });
    } else if (key == "reps") {
      integer(key, value, [&](long v) { cfg_.replicates = static_cast<int>(v); });
    } else if (key == "penalty") {
      guard(key, value, [&] { cfg_.penalty.family = parse_penalty_family(value); });
    } else if (key == "criteria") {
      std::vector<Criterion> list;
      for (const auto& item : split_list(value)) {
        guard(key, item, [&] { list.push_back(parse_criterion(item)); });
      }
      if (list.empty()) errors_.push_back("criteria: list is empty");
      cfg_.criteria = std::move(list);
      criteria_set_ = true;
    } else if (key == "grid") {
      integer(key, value, [&](long v) { cfg_.grid = static_cast<int>(v); });
    } else if (key == "grid-ratio") {
      real(key, value, [&](double v) { cfg_.grid_ratio = v; });
    } else if (key == "gamma") {
      real(key, value, [&](double v) { cfg_.penalty.gamma = v; });
    } else if (key == "scad-a") {
      real(key, value, [&](double v) { cfg_.penalty.a = v; });
    } else if (key == "seed") {
      const auto v = parse_number<std::uint64_t>(value);
      if (v) cfg_.seed = *v;
      else errors_.push_back("seed: '" + value + "' is not a nonnegative integer");
    } else if (key == "data") {
      cfg_.data = value;
    } else if (key == "out") {
      cfg_.out = value;
    } else if (key == "cv-folds") {
      integer(key, value, [&](long v) { cfg_.cv_folds = static_cast<int>(v); });
    } else if (key == "cv-grid") {
      integer(key, value, [&](long v) { cfg_.cv_grid = static_cast<int>(v); });
    } else if (key == "reweight-steps") {
      integer(key, value, [&](long v) { cfg_.penalty.reweight_steps = static_cast<int>(v); });
    } else if (key == "threads") {
      integer(key, value, [&](long v) { cfg_.threads = static_cast<int>(v); });
    } else if (key == "tol") {
      real(key, value, [&](double v) { cfg_.solver.tol = v; });
    } else if (key == "max-iter") {
      integer(key, value, [&](long v) { cfg_.solver.max_iter = static_cast<int>(v); });
    } else if (key == "no-copula") {
      flag(key, value, [&](bool v) { cfg_.copula = !v; });
    } else if (key == "redraw-truth") {
      flag(key, value, [&](bool v) { cfg_.redraw_truth = v; });
    } else if (key == "timings") {
      flag(key, value, [&](bool v) { cfg_.timings = v; });
    } else {
      errors_.push_back("unknown key '" + key + "'");
    }
  }

  void error(std::string message) { errors_.push_back(std::move(message)); }
  bool criteria_set() const { return criteria_set_; }
  std::vector<std::string>& errors() { return errors_; }

 private:
  template <typename F>
  void guard(const std::string& key, const std::string& value, F&& f) {
    try {
      f();
    } catch (const Error&) {
      errors_.push_back(key + ": invalid value '" + value + "'");
    }
  }

  template <typename F>
  void integer(const std::string& key, const std::string& value, F&& f) {
    const auto v = parse_number<long>(value);
    if (v) f(*v);
    else errors_.push_back(key + ": '" + value + "' is not an integer");
  }

  template <typename F>
  void real(const std::string& key, const std::string& value, F&& f) {
    const auto v = parse_number<double>(value);
    if (v) f(*v);
    else errors_.push_back(key + ": '" + value + "' is not a number");
  }

  template <typename F>
  void flag(const std::string& key, const std::string& value, F&& f) {
    if (value == "true" || value == "1") f(true);
    else if (value == "false" || value == "0") f(false);
    else errors_.push_back(key + ": '" + value + "' is not a boolean");
  }

  ExperimentConfig& cfg_;
  std::vector<std::string> errors_;
  bool criteria_set_ = false;
};

std::string json_scalar(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string joined;
    for (const auto& item : value) {
      if (!joined.empty()) joined += ",";
      joined += json_scalar(item);
    }
    return joined;
  }
  return value.dump();
}

void load_file(const std::string& path, Builder& builder) {
  std::ifstream in(path);
  if (!in) {
    builder.error("config: cannot open '" + path + "'");
    return;
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    builder.error("config: " + std::string(e.what()));
    return;
  }
  if (!doc.is_object()) {
    builder.error("config: top level must be an object");
    return;
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "mode" || key == "config") {
      builder.error("config: key '" + key + "' is only valid on the command line");
      continue;
    }
    builder.apply(key, json_scalar(value));
  }
}

void validate(const ExperimentConfig& cfg, std::vector<std::string>& errors) {
  if (cfg.replicates < 1) errors.push_back("reps must be at least 1");
  if (cfg.grid < 2) errors.push_back("grid must be at least 2");
  if (cfg.cv_grid < 2) errors.push_back("cv-grid must be at least 2");
  if (!(cfg.grid_ratio > 0.0 && cfg.grid_ratio < 1.0)) {
    errors.push_back("grid-ratio must lie in (0,1)");
  }
  if (cfg.d < 2) errors.push_back("d must be at least 2");
  if (cfg.mode != Mode::fit && cfg.model == ModelKind::band && cfg.d <= 4) {
    errors.push_back("band model needs d > 4");
  }
  if (cfg.n < 2) errors.push_back("n must be at least 2");
  if (!(cfg.penalty.gamma > 0.0)) errors.push_back("gamma must be positive");
  if (!(cfg.penalty.a > 2.0)) errors.push_back("scad-a must exceed 2");
  if (cfg.penalty.reweight_steps < 1) errors.push_back("reweight-steps must be at least 1");
  if (cfg.cv_folds < 2) errors.push_back("cv-folds must be at least 2");
  if (cfg.threads < 1) errors.push_back("threads must be at least 1");
  if (!(cfg.solver.tol > 0.0)) errors.push_back("tol must be positive");
  if (cfg.solver.max_iter < 1) errors.push_back("max-iter must be at least 1");
  if (cfg.mode == Mode::fit) {
    if (cfg.data.empty()) errors.push_back("fit needs --data <csv>");
    for (Criterion c : cfg.criteria) {
      if (c == Criterion::kl_oracle) {
        errors.push_back("kl_oracle needs a true model and is not available in fit mode");
      }
    }
  }
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::sim:
      return "sim";
    case Mode::fit:
      return "fit";
    case Mode::biascurve:
      return "biascurve";
  }
  return "unknown";
}

std::string config_usage() {
  return R"(usage: gcgm <sim|fit|biascurve> [options]

  --model band|sparse|dense   true graph for sim/biascurve (band)
  --d N --n N --reps N        dimension (30), sample size (100), replicates (100)
  --penalty lasso|adaptive|scad  (lasso)
  --criteria LIST             comma list of gic,aic,bic,gbic,cv,oracle
  --grid R --grid-ratio X     lambda grid length (100) and lambda_min/lambda_max (0.01)
  --cv-grid R --cv-folds K    cross-validation grid (200) and folds (2 = one split)
  --gamma X --scad-a X        adaptive exponent (0.5), SCAD shape (3.7)
  --reweight-steps K          reweighting rounds for adaptive/scad (2)
  --seed S                    master seed (42)
  --no-copula                 standardise columns instead of the rank transform
  --redraw-truth              draw a new true model for every replicate
  --data FILE                 input CSV for fit
  --out DIR                   output directory (.)
  --config FILE               JSON file of the same keys; flags override it
  --threads N --timings --tol X --max-iter N
)";
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  ExperimentConfig cfg;
  Builder builder(cfg);

  if (args.empty()) throw ConfigError({"missing subcommand (sim, fit or biascurve)"});
  const std::string& sub = args.front();
  if (sub == "sim") cfg.mode = Mode::sim;
  else if (sub == "fit") cfg.mode = Mode::fit;
  else if (sub == "biascurve") cfg.mode = Mode::biascurve;
  else builder.error("unknown subcommand '" + sub + "'");

  CLI::App app{"gcgm"};
  app.allow_extras();
  std::map<std::string, std::optional<std::string>> values;
  std::map<std::string, bool> flags;
  std::optional<std::string> config_path;
  app.add_option("--config", config_path);
  for (const auto& key : value_keys()) app.add_option("--" + key, values[key]);
  for (const auto& key : flag_keys()) app.add_flag("--" + key, flags[key]);

  std::vector<std::string> rest(args.begin() + 1, args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    builder.error(e.what());
  }
  for (const auto& extra : app.remaining()) {
    builder.error("unknown argument '" + extra + "'");
  }

  if (config_path) load_file(*config_path, builder);
  if (!builder.criteria_set() && cfg.mode == Mode::fit) cfg.criteria = {Criterion::gic};
  for (const auto& [key, value] : values) {
    if (value) builder.apply(key, *value);
  }
  for (const auto& [key, set] : flags) {
    if (set) builder.apply(key, "true");
  }

  validate(cfg, builder.errors());
  if (!builder.errors().empty()) throw ConfigError(builder.errors());
  return cfg;
}

}  // namespace gcgm
