// grank: command-line front end for the generalized-rank protocols.

#include "grank/datagen.hpp"
#include "grank/error.hpp"
#include "grank/experiment.hpp"
#include "grank/protocols.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace grank;

namespace {

// Flat JSON object -> CLI11 config items; keys are long flag names.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }
};

struct Params {
  long long n = 1000;
  int m = 2;
  int r = 100;
  long long samples = 1000;
  double lambda = 0.4;
  double sigma2 = 0.1;
  std::string normalize = "clip";
  std::string kind = "spiked";
  double high = 0.6;
  double c1 = 0.5;
  double c2 = 0.1;
  double delta = 0.0;
  int p = -1;
  int T = 32;
  int trials = 100;
  std::uint64_t seed = 0;
  std::string quantize = "exact";
  double tau = 0.0;
  double range = 0.0;
  int q1_degree = 0;
  std::string scheme = "horner";
  int degree = 12;
  int rank_cap = -1;
  std::vector<std::string> shards;
  std::string instance;
  std::string out;
  std::string ledger;
  std::string trace;
  std::vector<int> T_values;
  std::vector<int> p_values{0, 1, 5};
  int p_max = 12;
  double true_rank = -1.0;
  std::string descriptor;
};

int default_p(Eigen::Index n) { return static_cast<int>(std::ceil(std::log2(2.0 * static_cast<double>(n)))); }

Thresholds thresholds(const Params& ps) { return {ps.c1, ps.c2, ps.delta}; }

datagen::SpikedCovConfig spiked_config(const Params& ps) {
  datagen::SpikedCovConfig cfg;
  cfg.n = ps.n;
  cfg.m = ps.m;
  cfg.samples_per_machine = ps.samples;
  cfg.r = ps.r;
  cfg.lambda = ps.lambda;
  cfg.sigma2 = ps.sigma2;
  cfg.seed = ps.seed;
  if (ps.normalize == "none") {
    cfg.normalize = datagen::Normalize::none;
  } else if (ps.normalize != "clip") {
    throw InvalidArgument("--normalize must be clip or none");
  }
  return cfg;
}

struct Instance {
  std::vector<PsdShard> shards;
  std::optional<int> planted_rank;
  json description;
};

Instance generate(const Params& ps) {
  Instance inst;
  if (ps.kind == "spiked") {
    const auto cfg = spiked_config(ps);
    datagen::ShardSet set = datagen::spiked_covariance_shards(cfg);
    inst.shards = std::move(set.shards);
    inst.planted_rank = set.planted_rank;
    inst.description = {{"kind", "spiked"}, {"config", datagen::to_json(cfg)}, {"scale", set.scale}};
  } else if (ps.kind == "planted") {
    if (ps.r < 0 || ps.r > ps.n) throw InvalidArgument("--r must lie in [0, n]");
    Vector ev = Vector::Zero(ps.n);
    ev.head(ps.r).setConstant(ps.high);
    inst.shards = datagen::planted_spectrum_shards(ps.n, ps.m, ev, ps.seed);
    inst.planted_rank = ps.r;
    inst.description = {{"kind", "planted"}, {"n", ps.n}, {"m", ps.m}, {"r", ps.r},
                        {"eigenvalue", ps.high}, {"seed", ps.seed}};
  } else {
    throw InvalidArgument("--kind must be spiked or planted");
  }
  return inst;
}

std::vector<fs::path> manifest_files(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("cannot open " + (dir / "manifest.json").string());
  const json manifest = json::parse(in);
  std::vector<fs::path> files;
  for (const auto& name : manifest.at("shards")) files.push_back(dir / name.get<std::string>());
  return files;
}

Instance load_instance(const Params& ps) {
  std::vector<fs::path> files;
  if (!ps.instance.empty()) {
    files = manifest_files(ps.instance);
  } else {
    for (const auto& s : ps.shards) files.emplace_back(s);
  }
  if (files.empty()) return generate(ps);
  Instance inst;
  inst.shards = datagen::read_shard_files(files);
  json names = json::array();
  for (const auto& f : files) names.push_back(f.string());
  inst.description = {{"kind", "files"}, {"shards", names}};
  return inst;
}

QuantizationSpec quantization(const Params& ps, int machines, int q1_degree, Eigen::Index n, int p) {
  if (ps.quantize == "exact") return QuantizationSpec::exact_channel();
  if (ps.quantize != "fixed") throw InvalidArgument("--quantize must be exact or fixed");
  const double tau = ps.tau > 0.0 ? ps.tau : default_tau(machines, q1_degree, n, p);
  return QuantizationSpec::fixed_point(tau, ps.range);
}

BoosterScheme scheme(const Params& ps) {
  if (ps.scheme == "horner") return BoosterScheme::horner;
  if (ps.scheme == "powers") return BoosterScheme::powers;
  throw InvalidArgument("--scheme must be horner or powers");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

void write_side_files(const Params& ps, const Blackboard& board) {
  if (!ps.ledger.empty()) {
    std::ofstream out(ps.ledger);
    if (!out) throw IoError("cannot write " + ps.ledger);
    board.ledger().write_csv(out);
  }
  if (!ps.trace.empty()) {
    std::ofstream out(ps.trace);
    if (!out) throw IoError("cannot write " + ps.trace);
    board.write_trace(out);
  }
}

int cmd_gen(const Params& ps) {
  if (ps.out.empty()) throw InvalidArgument("gen needs --out <directory>");
  Instance inst = generate(ps);
  json manifest = inst.description;
  if (inst.planted_rank) manifest["planted_rank"] = *inst.planted_rank;
  datagen::write_shard_set(ps.out, inst.shards, manifest);
  std::cout << json{{"out", ps.out}, {"shards", inst.shards.size()}}.dump() << '\n';
  return 0;
}

int cmd_randomized(const Params& ps, FilterKind filter) {
  Instance inst = load_instance(ps);
  Cluster cluster(std::move(inst.shards));
  const Eigen::Index n = cluster.n();
  RandomizedOptions opts;
  opts.thresholds = thresholds(ps);
  opts.p = ps.p >= 0 ? ps.p : default_p(n);
  opts.T = ps.T;
  opts.seed = ps.seed;
  opts.filter = filter;
  opts.baseline_degree = ps.degree;
  opts.q1_degree = ps.q1_degree;
  opts.scheme = scheme(ps);
  opts.delta = ps.delta;

  int q1_degree = ps.degree;
  if (filter == FilterKind::composite) {
    q1_degree = ps.q1_degree > 0 ? ps.q1_degree : fit_q1(opts.thresholds).degree();
  }
  Blackboard board(cluster.size(), quantization(ps, cluster.size(), q1_degree, n, opts.p), !ps.trace.empty());
  EstimateReport report = randomized_rank_estimate(cluster, board, opts);
  write_side_files(ps, board);
  json j = to_json(report);
  j["protocol"] = filter == FilterKind::baseline ? "baseline" : "randomized";
  j["p"] = opts.p;
  j["instance"] = inst.description;
  emit(ps.out, j.dump(2) + "\n");
  return 0;
}

int cmd_det(const Params& ps) {
  Instance inst = load_instance(ps);
  Cluster cluster(std::move(inst.shards));
  const int r = ps.rank_cap > 0 ? ps.rank_cap : ps.r;
  Blackboard board(cluster.size(), QuantizationSpec::exact_channel(), !ps.trace.empty());
  DetProtocolReport report = deterministic_rank_protocol(cluster, board, thresholds(ps), r);
  write_side_files(ps, board);
  json j = to_json(report);
  j["protocol"] = "deterministic";
  j["instance"] = inst.description;
  emit(ps.out, j.dump(2) + "\n");
  return 0;
}

int cmd_experiment(const Params& ps) {
  if (ps.out.empty()) throw InvalidArgument("experiment needs --out <directory>");
  Instance inst = load_instance(ps);
  const Thresholds th = thresholds(ps);
  double truth = ps.true_rank;
  if (truth < 0) {
    truth = inst.planted_rank ? *inst.planted_rank : generalized_rank(datagen::sum_shards(inst.shards), th.c1);
  }
  Cluster cluster(std::move(inst.shards));

  experiment::ExperimentConfig cfg;
  cfg.T_values = ps.T_values;
  if (cfg.T_values.empty()) {
    for (int t = 1; t <= 30; ++t) cfg.T_values.push_back(t);
  }
  for (int p : ps.p_values) cfg.points.push_back({FilterKind::composite, p});
  if (ps.degree > 0) cfg.points.push_back({FilterKind::baseline, 0, ps.degree});
  cfg.trials = ps.trials;
  cfg.thresholds = th;
  cfg.q1_degree = ps.q1_degree;
  cfg.scheme = scheme(ps);
  cfg.master_seed = ps.seed;
  const int q1_degree = ps.q1_degree > 0 ? ps.q1_degree : fit_q1(th).degree();
  const int p_top = ps.p_values.empty() ? 0 : *std::max_element(ps.p_values.begin(), ps.p_values.end());
  cfg.quantization = quantization(ps, cluster.size(), q1_degree, cluster.n(), p_top);

  experiment::ExperimentResult res = experiment::run_experiment(cfg, cluster, truth);

  fs::create_directories(ps.out);
  std::ofstream rows(fs::path(ps.out) / "rows.csv");
  std::ofstream summary(fs::path(ps.out) / "summary.csv");
  if (!rows || !summary) throw IoError("cannot write CSV files in " + ps.out);
  experiment::write_rows_csv(rows, res.rows);
  experiment::write_summary_csv(summary, res.summary);
  std::cout << json{{"out", ps.out}, {"rows", res.rows.size()}, {"true_rank", truth}}.dump() << '\n';
  return 0;
}

int cmd_verify_poly(const Params& ps) {
  std::ostringstream csv;
  experiment::write_poly_csv(csv, experiment::verify_poly(thresholds(ps), ps.p_max, ps.q1_degree));
  emit(ps.out, csv.str());
  return 0;
}

int cmd_lemma3(const Params& ps) {
  std::ostringstream csv;
  const experiment::Lemma3Result res = experiment::lemma3_check(ps.n, ps.r, ps.trials, ps.seed);
  experiment::write_lemma3_csv(csv, res);
  emit(ps.out, csv.str());
  std::cerr << json{{"passes", res.passes}, {"trials", ps.trials}, {"index", res.index}}.dump() << '\n';
  return 0;
}

int cmd_run(Params ps) {
  std::ifstream in(ps.descriptor);
  if (!in) throw IoError("cannot open run descriptor " + ps.descriptor);
  const json d = json::parse(in);
  const std::string protocol = d.value("protocol", "randomized");
  ps.n = d.value("n", ps.n);
  ps.m = d.value("m", ps.m);
  ps.c1 = d.value("c1", ps.c1);
  ps.c2 = d.value("c2", ps.c2);
  ps.p = d.value("p", ps.p);
  ps.T = d.value("T", ps.T);
  ps.r = d.value("r", ps.r);
  ps.degree = d.value("degree", ps.degree);
  ps.seed = d.value("seed", ps.seed);
  if (d.contains("quantization")) {
    const json& q = d.at("quantization");
    const std::string mode = q.value("mode", "exact");
    ps.quantize = mode == "fixed-point" ? "fixed" : mode;
    ps.tau = q.value("tau", 0.0);
  }
  if (d.contains("shards")) {
    ps.shards = d.at("shards").get<std::vector<std::string>>();
    ps.instance.clear();
  }
  if (!ps.shards.empty() && (d.contains("n") || d.contains("m"))) {
    const Instance inst = load_instance(ps);
    if (inst.shards.front().matrix.n() != ps.n || static_cast<int>(inst.shards.size()) != ps.m) {
      throw DimensionMismatch("run descriptor n/m do not match the shard files");
    }
  }
  if (protocol == "randomized") return cmd_randomized(ps, FilterKind::composite);
  if (protocol == "baseline") return cmd_randomized(ps, FilterKind::baseline);
  if (protocol == "deterministic") return cmd_det(ps);
  throw InvalidArgument("unknown protocol '" + protocol + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized rank estimation over simulated machines"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file whose keys mirror the long flags; flags override it");

  Params ps;
  app.add_option("--n", ps.n, "Dimension")->capture_default_str();
  app.add_option("--m", ps.m, "Machines")->capture_default_str();
  app.add_option("--r", ps.r, "Planted rank, rank cap for det, or r in lemma3-check")->capture_default_str();
  app.add_option("--samples", ps.samples, "Samples per machine (spiked)")->capture_default_str();
  app.add_option("--lambda", ps.lambda, "Spike scale (spiked)")->capture_default_str();
  app.add_option("--sigma2", ps.sigma2, "Noise variance (spiked)")->capture_default_str();
  app.add_option("--normalize", ps.normalize, "clip or none")->capture_default_str();
  app.add_option("--kind", ps.kind, "Generated instance: spiked or planted")->capture_default_str();
  app.add_option("--high", ps.high, "Planted eigenvalue for --kind planted")->capture_default_str();
  app.add_option("--c1", ps.c1, "Upper threshold")->capture_default_str();
  app.add_option("--c2", ps.c2, "Lower threshold")->capture_default_str();
  app.add_option("--delta", ps.delta, "Tolerance reported with the estimate (0: 1/sqrt(rhat))");
  app.add_option("--p", ps.p, "Booster parameter (default ceil(log2 2n))");
  app.add_option("--T", ps.T, "Repetitions")->capture_default_str();
  app.add_option("--trials", ps.trials, "Trials (experiment, lemma3-check)")->capture_default_str();
  app.add_option("--seed", ps.seed, "Seed (master seed for experiment)")->capture_default_str();
  app.add_option("--quantize", ps.quantize, "exact or fixed")->capture_default_str();
  app.add_option("--tau", ps.tau, "Fixed-point grid step (0: default 1/(m d n 2^4p))");
  app.add_option("--range", ps.range, "Declared message range R (0: per-message power of two)");
  app.add_option("--q1-degree", ps.q1_degree, "q1 degree (0: minimal fit)");
  app.add_option("--scheme", ps.scheme, "horner or powers")->capture_default_str();
  app.add_option("--degree", ps.degree, "Baseline filter degree (0 drops the baseline from experiments)")
      ->capture_default_str();
  app.add_option("--rank-cap", ps.rank_cap, "r for the deterministic protocol (default --r)");
  app.add_option("--shards", ps.shards, "Shard matrix files, machine 1 first");
  app.add_option("--instance", ps.instance, "Directory written by gen");
  app.add_option("--out", ps.out, "Output file or directory");
  app.add_option("--ledger", ps.ledger, "Write the bit ledger CSV here");
  app.add_option("--trace", ps.trace, "Write the message trace CSV here");
  app.add_option("--T-values", ps.T_values, "Experiment T sweep (default 1..30)");
  app.add_option("--p-values", ps.p_values, "Experiment composite p values")->capture_default_str();
  app.add_option("--p-max", ps.p_max, "Largest p for verify-poly")->capture_default_str();
  app.add_option("--true-rank", ps.true_rank, "Reference rank for MSE (default: planted or oracle rank at c1)");

  auto* gen = app.add_subcommand("gen", "Write a generated shard set")->fallthrough();
  auto* estimate = app.add_subcommand("estimate", "One randomized composite-filter run")->fallthrough();
  auto* det = app.add_subcommand("det", "Deterministic quantized-factorization protocol")->fallthrough();
  auto* baseline = app.add_subcommand("baseline", "Randomized run with the high-pass baseline filter")->fallthrough();
  auto* exper = app.add_subcommand("experiment", "Sweep T and p, write rows.csv and summary.csv")->fallthrough();
  auto* vpoly = app.add_subcommand("verify-poly", "Composite vs Chebyshev error curve CSV")->fallthrough();
  auto* lemma3 = app.add_subcommand("lemma3-check", "Orthogonal-ensemble eigenvalue check CSV")->fallthrough();
  auto* run = app.add_subcommand("run", "Execute a JSON run descriptor")->fallthrough();
  run->add_option("descriptor", ps.descriptor, "Run descriptor JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) return cmd_gen(ps);
    if (*estimate) return cmd_randomized(ps, FilterKind::composite);
    if (*det) return cmd_det(ps);
    if (*baseline) return cmd_randomized(ps, FilterKind::baseline);
    if (*exper) return cmd_experiment(ps);
    if (*vpoly) return cmd_verify_poly(ps);
    if (*lemma3) return cmd_lemma3(ps);
    if (*run) return cmd_run(ps);
  } catch (const Error& e) {
    std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 3;
  }
  return 1;
}
