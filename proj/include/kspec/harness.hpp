#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kspec/deep_ssm.hpp"
#include "kspec/errors.hpp"
#include "kspec/excitation.hpp"
#include "kspec/io.hpp"
#include "kspec/kspectral.hpp"
#include "kspec/plants.hpp"
#include "kspec/rng.hpp"
#include "kspec/signal.hpp"

namespace kspec {

// Sample Pearson correlation coefficient. Throws ConstantInput when either
// sequence is constant (reported as N/A upstream).
inline double pearson(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw LengthMismatch("pearson");
  const std::size_t n = xs.size();
  if (n < 2) throw ConfigError("pearson: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ConstantInput("pearson: constant input sequence");
  }
  return sxy / std::sqrt(sxx * syy);
}

// One identification sequence: multisine input through a plant, first
// train_len samples for training, the rest for validation.
struct IdentDataset {
  int id = 0;
  Signal u;
  Signal y;
  std::size_t train_len = 0;
  MultisineSpec gen;
  NoiseConfig noise;
  PlantKind plant = PlantKind::Wiener;
  int components = 0;

  TrainingSequence train_seq() const {
    return {Signal(u.begin(), u.begin() + static_cast<long>(train_len)),
            Signal(y.begin(), y.begin() + static_cast<long>(train_len))};
  }
  TrainingSequence val_seq() const {
    return {Signal(u.begin() + static_cast<long>(train_len), u.end()),
            Signal(y.begin() + static_cast<long>(train_len), y.end())};
  }
};

struct ExperimentConfig {
  PlantKind plant = PlantKind::Wiener;
  int num_datasets = 100;    // N_d
  std::size_t t_len = 2000;  // samples per sequence
  int i_max = 0;             // max component count; 0 -> T/2
  double train_frac = 0.8;
  double input_norm = 100.0;
  double noise_rel = 0.01;  // sigma_e = noise_rel * RMS of noiseless output
  DeepSsmConfig model;
  TrainConfig train{1e-3, 30, 1, 4, 0, 0, false};
  int metric_epoch = 1;
  std::vector<int> k_values;  // for the K sweep; empty -> {d/2, d, 2d, d_in}
  std::uint64_t seed = 0;
  int repetitions = 3;
  int test_interval = 20;
  int threads = 0;  // 0 -> hardware concurrency

  int effective_i_max() const {
    return i_max > 0 ? i_max : static_cast<int>(t_len / 2);
  }
  std::vector<int> effective_k_values() const {
    std::vector<int> ks = k_values;
    if (ks.empty()) {
      ks = {std::max(1, model.state_dim / 2), model.state_dim,
            2 * model.state_dim, model.channels};
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
  }
  void validate() const {
    if (num_datasets < 2) {
      throw ConfigError("ExperimentConfig: correlation needs >= 2 datasets");
    }
    if (t_len < 16) throw ConfigError("ExperimentConfig: T too small");
    if (train_frac <= 0.0 || train_frac >= 1.0) {
      throw ConfigError("ExperimentConfig: train_frac must be in (0,1)");
    }
    if (repetitions < 1) throw ConfigError("ExperimentConfig: repetitions >= 1");
    if (metric_epoch < 0 || metric_epoch > train.epochs) {
      throw ConfigError("ExperimentConfig: metric_epoch out of range");
    }
    model.validate();
  }
};

inline nlohmann::json to_json(const TrainConfig& t) {
  return nlohmann::json{{"eta", t.eta},         {"epochs", t.epochs},
                        {"batch_size", t.batch_size}, {"K", t.k},
                        {"seed", t.seed},       {"window", t.window}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig t;
  t.eta = j.value("eta", 1e-3);
  t.epochs = j.value("epochs", 30);
  t.batch_size = j.value("batch_size", 1);
  t.k = j.value("K", 4);
  t.seed = j.value("seed", std::uint64_t{0});
  t.window = j.value("window", 0);
  return t;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return nlohmann::json{{"plant", to_string(c.plant)},
                        {"num_datasets", c.num_datasets},
                        {"T", c.t_len},
                        {"i_max", c.i_max},
                        {"train_frac", c.train_frac},
                        {"input_norm", c.input_norm},
                        {"noise_rel", c.noise_rel},
                        {"model", to_json(c.model)},
                        {"train", to_json(c.train)},
                        {"metric_epoch", c.metric_epoch},
                        {"k_values", c.k_values},
                        {"seed", c.seed},
                        {"repetitions", c.repetitions},
                        {"test_interval", c.test_interval},
                        {"threads", c.threads}};
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.plant = plant_from_string(j.value("plant", std::string("wiener")));
  c.num_datasets = j.value("num_datasets", 100);
  c.t_len = j.value("T", std::size_t{2000});
  c.i_max = j.value("i_max", 0);
  c.train_frac = j.value("train_frac", 0.8);
  c.input_norm = j.value("input_norm", 100.0);
  c.noise_rel = j.value("noise_rel", 0.01);
  if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
  if (j.contains("train")) c.train = train_config_from_json(j.at("train"));
  c.metric_epoch = j.value("metric_epoch", 1);
  c.k_values = j.value("k_values", std::vector<int>{});
  c.seed = j.value("seed", std::uint64_t{0});
  c.repetitions = j.value("repetitions", 3);
  c.test_interval = j.value("test_interval", 20);
  c.threads = j.value("threads", 0);
  c.validate();
  return c;
}

namespace seeds {
// stream offsets in the experiment seed hierarchy
constexpr std::uint64_t kInput = 0x100000;
constexpr std::uint64_t kNoise = 0x200000;
constexpr std::uint64_t kModel = 0x300000;
constexpr std::uint64_t kTest = 0x400000;
}  // namespace seeds

inline int components_for_dataset(const ExperimentConfig& cfg, int id) {
  // dataset ids 0..N_d-1 map linearly onto component counts [1, i_max]
  const double frac = static_cast<double>(id + 1) /
                      static_cast<double>(cfg.num_datasets);
  return std::max(1, static_cast<int>(std::llround(frac * cfg.effective_i_max())));
}

inline double rms(const Signal& x) {
  return l2_norm(x) / std::sqrt(static_cast<double>(x.size()));
}

inline IdentDataset make_ident_dataset(const ExperimentConfig& cfg, int id) {
  IdentDataset ds;
  ds.id = id;
  ds.plant = cfg.plant;
  ds.components = components_for_dataset(cfg, id);
  const std::uint64_t in_seed = mix_seed(cfg.seed, seeds::kInput + static_cast<std::uint64_t>(id));
  MultisineResult gen = gen_multisine(ds.components, cfg.t_len, cfg.input_norm, in_seed);
  ds.u = std::move(gen.signal);
  ds.gen = gen.spec;
  const Signal clean = plant_response(cfg.plant, ds.u, NoiseConfig{0.0, 0});
  ds.noise.sigma = cfg.noise_rel * rms(clean);
  ds.noise.seed = mix_seed(cfg.seed, seeds::kNoise + static_cast<std::uint64_t>(id));
  ds.y = clean;
  add_noise(ds.y, ds.noise);
  ds.train_len = static_cast<std::size_t>(
      std::llround(cfg.train_frac * static_cast<double>(cfg.t_len)));
  return ds;
}

inline std::vector<IdentDataset> generate_ident_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<IdentDataset> out;
  out.reserve(static_cast<std::size_t>(cfg.num_datasets));
  for (int id = 0; id < cfg.num_datasets; ++id) {
    out.push_back(make_ident_dataset(cfg, id));
  }
  return out;
}

struct TestInputs {
  Signal u1, y1;  // test input I: multisine with i = i_max
  Signal u2, y2;  // test input II: piecewise constant, noiseless truth
};

inline TestInputs make_test_inputs(const ExperimentConfig& cfg) {
  TestInputs t;
  const auto gen = gen_multisine(cfg.effective_i_max(), cfg.t_len, cfg.input_norm,
                                 mix_seed(cfg.seed, seeds::kTest));
  t.u1 = gen.signal;
  t.y1 = plant_response(cfg.plant, t.u1, NoiseConfig{0.0, 0});
  t.u2 = gen_piecewise_constant(cfg.t_len, cfg.test_interval, cfg.input_norm,
                                mix_seed(cfg.seed, seeds::kTest + 1));
  t.y2 = plant_response(cfg.plant, t.u2, NoiseConfig{0.0, 0});
  return t;
}

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double r_bar = 0.0;
  std::vector<double> per_layer_r;
};

struct RunRecord {
  int dataset_id = 0;
  int rep = 0;
  int components = 0;
  std::size_t dataset_size = 0;
  std::vector<EpochRecord> epochs;  // index 0 is the pre-training capture
  double test_mse_1 = 0.0;
  double test_mse_2 = 0.0;
  double final_train_loss = 0.0;
  bool diverged = false;
  // metric-epoch spectra, [sequence][channel]; kept only for the K sweep
  std::vector<std::vector<Spectrum>> metric_spectra;
};

inline nlohmann::json to_json(const RunRecord& r, int k) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back(nlohmann::json{{"epoch", e.epoch},
                                    {"train_loss", e.train_loss},
                                    {"val_loss", e.val_loss},
                                    {"R_bar", e.r_bar},
                                    {"per_layer_R", e.per_layer_r},
                                    {"K", k}});
  }
  return nlohmann::json{{"dataset_id", r.dataset_id},
                        {"rep", r.rep},
                        {"num_components", r.components},
                        {"dataset_size", r.dataset_size},
                        {"epochs", epochs},
                        {"test_mse_I", r.test_mse_1},
                        {"test_mse_II", r.test_mse_2},
                        {"final_train_loss", r.final_train_loss},
                        {"diverged", r.diverged}};
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.dataset_id = j.at("dataset_id").get<int>();
  r.rep = j.at("rep").get<int>();
  r.components = j.value("num_components", 0);
  r.dataset_size = j.value("dataset_size", std::size_t{0});
  for (const auto& e : j.at("epochs")) {
    EpochRecord er;
    er.epoch = e.at("epoch").get<int>();
    er.train_loss = e.at("train_loss").get<double>();
    er.val_loss = e.at("val_loss").get<double>();
    er.r_bar = e.at("R_bar").get<double>();
    er.per_layer_r = e.value("per_layer_R", std::vector<double>{});
    r.epochs.push_back(std::move(er));
  }
  r.test_mse_1 = j.at("test_mse_I").get<double>();
  r.test_mse_2 = j.at("test_mse_II").get<double>();
  r.final_train_loss = j.value("final_train_loss", 0.0);
  r.diverged = j.value("diverged", false);
  return r;
}

// Train one model on one dataset, recording the metric and losses per epoch
// (including the epoch-0 capture with untouched initial weights).
inline RunRecord run_single(const ExperimentConfig& cfg, const IdentDataset& ds,
                            const TestInputs& tests, int rep,
                            bool capture_spectra_at_metric_epoch) {
  RunRecord rec;
  rec.dataset_id = ds.id;
  rec.rep = rep;
  rec.components = ds.components;
  rec.dataset_size = ds.train_len;

  const std::uint64_t model_seed =
      mix_seed(cfg.seed, seeds::kModel +
                             static_cast<std::uint64_t>(rep) *
                                 static_cast<std::uint64_t>(cfg.num_datasets) +
                             static_cast<std::uint64_t>(ds.id));
  DeepSsm model = init_model(cfg.model, model_seed);

  const TrainingSet train_set = {ds.train_seq()};
  const auto [u_val, y_val] = ds.val_seq();

  TrainConfig tc = cfg.train;
  tc.k = cfg.train.k > 0 ? cfg.train.k : default_k(cfg.model);

  try {
    EpochResult e0 = evaluate_metric(model, train_set, tc.k, tc.window);
    rec.epochs.push_back({0, e0.train_loss, predict_mse(model, u_val, y_val),
                          e0.r_bar, e0.per_layer_r});
    for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
      TrainConfig step = tc;
      step.capture_spectra =
          capture_spectra_at_metric_epoch && epoch == cfg.metric_epoch;
      EpochResult er = train_epoch_with_metric(model, train_set, step);
      rec.epochs.push_back({epoch, er.train_loss,
                            predict_mse(model, u_val, y_val), er.r_bar,
                            er.per_layer_r});
      if (step.capture_spectra) rec.metric_spectra = std::move(er.spectra);
      rec.final_train_loss = er.train_loss;
    }
    // Stability validation: the plants are stable, so a trained model with
    // an unstable SSM channel is an identification failure. Such a model can
    // produce finite-but-astronomical errors on held-out inputs (the training
    // multisines are zero-mean and never probe DC), so it is excluded the
    // same way as a numerically diverged run.
    for (const auto& layer : model.banks) {
      for (const auto& channel : layer) {
        if (!is_stable(channel)) throw NonFinite("unstable trained model");
      }
    }
    rec.test_mse_1 = predict_mse(model, tests.u1, tests.y1);
    rec.test_mse_2 = predict_mse(model, tests.u2, tests.y2);
  } catch (const NonFinite&) {
    rec.diverged = true;
  }
  return rec;
}

struct CorrelationStat {
  std::vector<double> per_rep;  // one rho per repetition
  double mean = 0.0;
  double stddev = 0.0;
  bool available = false;  // false -> N/A (constant baseline)

  void finalize() {
    if (per_rep.empty()) {
      available = false;
      return;
    }
    available = true;
    mean = 0.0;
    for (double v : per_rep) mean += v;
    mean /= static_cast<double>(per_rep.size());
    double var = 0.0;
    for (double v : per_rep) var += (v - mean) * (v - mean);
    stddev = per_rep.size() > 1
                 ? std::sqrt(var / static_cast<double>(per_rep.size() - 1))
                 : 0.0;
  }
};

inline nlohmann::json to_json(const CorrelationStat& s) {
  if (!s.available) return nullptr;
  return nlohmann::json{{"mean", s.mean}, {"std", s.stddev}, {"per_rep", s.per_rep}};
}

struct ExperimentResult {
  std::vector<RunRecord> records;
  // correlation[test_input][metric], metrics: kspectral, valloss, size
  std::map<std::string, std::map<std::string, CorrelationStat>> correlation;
  std::map<std::string, std::pair<double, double>> loo_range;  // leave-one-out
  int diverged_runs = 0;
  int total_runs = 0;
  bool too_many_diverged = false;
};

namespace detail {

inline std::optional<double> try_pearson(const std::vector<double>& xs,
                                         const std::vector<double>& ys) {
  try {
    return pearson(xs, ys);
  } catch (const ConstantInput&) {
    return std::nullopt;
  }
}

// leave-one-out rho range as a stability diagnostic
inline std::pair<double, double> loo_rho_range(const std::vector<double>& xs,
                                               const std::vector<double>& ys) {
  double lo = 1.0, hi = -1.0;
  for (std::size_t skip = 0; skip < xs.size(); ++skip) {
    std::vector<double> x2, y2;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i == skip) continue;
      x2.push_back(xs[i]);
      y2.push_back(ys[i]);
    }
    const auto rho = try_pearson(x2, y2);
    if (rho) {
      lo = std::min(lo, *rho);
      hi = std::max(hi, *rho);
    }
  }
  return {lo, hi};
}

template <typename Fn>
inline void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Value of R_bar at a given epoch from a run record.
inline double r_bar_at(const RunRecord& rec, int epoch) {
  return rec.epochs.at(static_cast<std::size_t>(epoch)).r_bar;
}

inline std::vector<RunRecord> run_all(const ExperimentConfig& cfg,
                                      const std::vector<IdentDataset>& datasets,
                                      const TestInputs& tests,
                                      bool capture_spectra) {
  const int n = cfg.num_datasets * cfg.repetitions;
  std::vector<RunRecord> records(static_cast<std::size_t>(n));
  detail::parallel_for(n, cfg.threads, [&](int idx) {
    const int rep = idx / cfg.num_datasets;
    const int id = idx % cfg.num_datasets;
    records[static_cast<std::size_t>(idx)] =
        run_single(cfg, datasets[static_cast<std::size_t>(id)], tests, rep,
                   capture_spectra);
  });
  return records;
}

// Correlations for one metric across datasets, one rho per repetition.
inline CorrelationStat correlate_metric(
    const std::vector<RunRecord>& records, int num_datasets, int repetitions,
    const std::function<double(const RunRecord&)>& metric,
    const std::function<double(const RunRecord&)>& target) {
  CorrelationStat stat;
  bool any_constant = false;
  for (int rep = 0; rep < repetitions; ++rep) {
    std::vector<double> xs, ys;
    for (int id = 0; id < num_datasets; ++id) {
      const auto& rec =
          records[static_cast<std::size_t>(rep * num_datasets + id)];
      if (rec.diverged) continue;
      xs.push_back(metric(rec));
      ys.push_back(target(rec));
    }
    if (xs.size() < 2) continue;
    const auto rho = detail::try_pearson(xs, ys);
    if (rho) {
      stat.per_rep.push_back(*rho);
    } else {
      any_constant = true;
    }
  }
  if (any_constant) stat.per_rep.clear();
  stat.finalize();
  return stat;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       bool capture_spectra = false) {
  cfg.validate();
  const auto datasets = generate_ident_suite(cfg);
  const auto tests = make_test_inputs(cfg);

  ExperimentResult res;
  res.records = run_all(cfg, datasets, tests, capture_spectra);
  res.total_runs = static_cast<int>(res.records.size());
  for (const auto& r : res.records) {
    if (r.diverged) ++res.diverged_runs;
  }
  res.too_many_diverged =
      res.diverged_runs * 10 > res.total_runs;  // > 10% divergence

  const int me = cfg.metric_epoch;
  const auto r_metric = [me](const RunRecord& r) { return r_bar_at(r, me); };
  const auto v_metric = [me](const RunRecord& r) {
    return r.epochs.at(static_cast<std::size_t>(me)).val_loss;
  };
  const auto s_metric = [](const RunRecord& r) {
    return static_cast<double>(r.dataset_size);
  };
  const auto mse1 = [](const RunRecord& r) { return r.test_mse_1; };
  const auto mse2 = [](const RunRecord& r) { return r.test_mse_2; };

  const int nd = cfg.num_datasets, nr = cfg.repetitions;
  res.correlation["test_I"]["kspectral"] =
      correlate_metric(res.records, nd, nr, r_metric, mse1);
  res.correlation["test_I"]["valloss"] =
      correlate_metric(res.records, nd, nr, v_metric, mse1);
  res.correlation["test_I"]["size"] =
      correlate_metric(res.records, nd, nr, s_metric, mse1);
  res.correlation["test_II"]["kspectral"] =
      correlate_metric(res.records, nd, nr, r_metric, mse2);
  res.correlation["test_II"]["valloss"] =
      correlate_metric(res.records, nd, nr, v_metric, mse2);
  res.correlation["test_II"]["size"] =
      correlate_metric(res.records, nd, nr, s_metric, mse2);

  // leave-one-out diagnostic on the first repetition
  {
    std::vector<double> xs, ys1, ys2;
    for (int id = 0; id < nd; ++id) {
      const auto& rec = res.records[static_cast<std::size_t>(id)];
      if (rec.diverged) continue;
      xs.push_back(r_metric(rec));
      ys1.push_back(rec.test_mse_1);
      ys2.push_back(rec.test_mse_2);
    }
    if (xs.size() >= 3) {
      res.loo_range["test_I"] = detail::loo_rho_range(xs, ys1);
      res.loo_range["test_II"] = detail::loo_rho_range(xs, ys2);
    }
  }
  return res;
}

inline nlohmann::json summary_to_json(const ExperimentConfig& cfg,
                                      const ExperimentResult& res) {
  nlohmann::json corr;
  for (const auto& [test, metrics] : res.correlation) {
    for (const auto& [name, stat] : metrics) {
      corr[test][name] = to_json(stat);
    }
  }
  nlohmann::json loo;
  for (const auto& [test, range] : res.loo_range) {
    loo[test] = nlohmann::json{{"min", range.first}, {"max", range.second}};
  }
  return nlohmann::json{{"config", to_json(cfg)},
                        {"correlation", corr},
                        {"leave_one_out", loo},
                        {"diverged_runs", res.diverged_runs},
                        {"total_runs", res.total_runs}};
}

inline void write_records_jsonl(const std::string& path,
                                const std::vector<RunRecord>& records, int k) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open for write: " + path);
  for (const auto& r : records) f << to_json(r, k).dump() << "\n";
}

inline std::vector<RunRecord> read_records_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open for read: " + path);
  std::vector<RunRecord> records;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    records.push_back(run_record_from_json(nlohmann::json::parse(line)));
  }
  return records;
}

// rho(R_bar@epoch, final test MSE) per epoch, including the epoch-0 capture.
struct SweepPoint {
  CorrelationStat test_1;
  CorrelationStat test_2;
};

inline std::map<int, SweepPoint> epoch_sweep(const ExperimentConfig& cfg) {
  if (cfg.train.epochs < 2) throw ConfigError("epoch_sweep: need >= 2 epochs");
  cfg.validate();
  const auto datasets = generate_ident_suite(cfg);
  const auto tests = make_test_inputs(cfg);
  const auto records = run_all(cfg, datasets, tests, false);

  std::map<int, SweepPoint> out;
  for (int e = 0; e <= cfg.train.epochs; ++e) {
    const auto metric = [e](const RunRecord& r) { return r_bar_at(r, e); };
    SweepPoint pt;
    pt.test_1 = correlate_metric(records, cfg.num_datasets, cfg.repetitions,
                                 metric,
                                 [](const RunRecord& r) { return r.test_mse_1; });
    pt.test_2 = correlate_metric(records, cfg.num_datasets, cfg.repetitions,
                                 metric,
                                 [](const RunRecord& r) { return r.test_mse_2; });
    out[e] = std::move(pt);
  }
  return out;
}

// Channel-mean metric recomputed from stored spectra for an arbitrary K.
// Uses the same running-mean accumulation as the in-loop capture so the
// recomputed value is bit-identical for the same K.
inline double r_bar_from_spectra(
    const std::vector<std::vector<Spectrum>>& spectra, int k) {
  if (spectra.empty()) throw EmptyInput();
  double total = 0.0;
  for (const auto& seq : spectra) {
    if (seq.empty()) throw EmptyInput();
    double r_bar_n = 0.0;
    int n = 0;
    for (const auto& sp : seq) {
      r_bar_n = (static_cast<double>(n) * r_bar_n + k_spectral(sp, k)) /
                static_cast<double>(n + 1);
      ++n;
    }
    total += r_bar_n;
  }
  return total / static_cast<double>(spectra.size());
}

struct KSweepPoint {
  CorrelationStat test_1;  // signed rho; callers report |rho|
  CorrelationStat test_2;
};

// One shared set of training runs; the metric is recomputed per K from the
// spectra captured at the metric epoch.
inline std::map<int, KSweepPoint> k_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto ks = cfg.effective_k_values();
  for (int k : ks) {
    if (k < 1 || static_cast<std::size_t>(k) > cfg.t_len) {
      throw BadK("k_sweep: K=" + std::to_string(k));
    }
  }
  const auto datasets = generate_ident_suite(cfg);
  const auto tests = make_test_inputs(cfg);
  const auto records = run_all(cfg, datasets, tests, true);

  std::map<int, KSweepPoint> out;
  for (int k : ks) {
    const auto metric = [k](const RunRecord& r) {
      return r_bar_from_spectra(r.metric_spectra, k);
    };
    KSweepPoint pt;
    pt.test_1 = correlate_metric(records, cfg.num_datasets, cfg.repetitions,
                                 metric,
                                 [](const RunRecord& r) { return r.test_mse_1; });
    pt.test_2 = correlate_metric(records, cfg.num_datasets, cfg.repetitions,
                                 metric,
                                 [](const RunRecord& r) { return r.test_mse_2; });
    out[k] = std::move(pt);
  }
  return out;
}

}  // namespace kspec
