// Command-line front end: dataset generation, instrumented training runs,
// correlation tables, epoch/K sweeps, and the four-signal metric demo.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "kspec/fig2.hpp"
#include "kspec/harness.hpp"
#include "kspec/io.hpp"

namespace fs = std::filesystem;
using namespace kspec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  f >> j;
  return experiment_config_from_json(j);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open for write: " + path.string());
  f << j.dump(2) << "\n";
}

int cmd_generate(const std::string& plant, int num, std::size_t len,
                 std::uint64_t seed, const std::string& out) {
  ExperimentConfig cfg;
  cfg.plant = plant_from_string(plant);
  cfg.num_datasets = num;
  cfg.t_len = len;
  cfg.seed = seed;
  cfg.validate();

  fs::create_directories(out);
  const auto suite = generate_ident_suite(cfg);
  for (const auto& ds : suite) {
    const std::string stem = "dataset_" + std::to_string(ds.id);
    write_pair_csv((fs::path(out) / (stem + ".csv")).string(), ds.u, ds.y);
    write_json(fs::path(out) / (stem + ".json"),
               nlohmann::json{{"id", ds.id},
                              {"plant", to_string(ds.plant)},
                              {"num_components", ds.components},
                              {"train_len", ds.train_len},
                              {"input", to_json(ds.gen)},
                              {"noise",
                               {{"sigma", ds.noise.sigma},
                                {"seed", ds.noise.seed}}}});
  }
  write_json(fs::path(out) / "config.json", to_json(cfg));
  std::cout << "wrote " << suite.size() << " datasets to " << out << "\n";
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& out) {
  const ExperimentConfig cfg = load_config(config_path);
  fs::create_directories(out);
  const ExperimentResult res = run_experiment(cfg);
  write_records_jsonl((fs::path(out) / "records.jsonl").string(), res.records,
                      cfg.train.k);
  write_json(fs::path(out) / "summary.json", summary_to_json(cfg, res));
  std::cout << "runs: " << res.total_runs << ", diverged: " << res.diverged_runs
            << "\n";
  for (const auto& [test, metrics] : res.correlation) {
    for (const auto& [name, stat] : metrics) {
      if (stat.available) {
        std::printf("%s %-10s rho = %+.4f +- %.4f\n", test.c_str(),
                    name.c_str(), stat.mean, stat.stddev);
      } else {
        std::printf("%s %-10s rho = N/A\n", test.c_str(), name.c_str());
      }
    }
  }
  return res.too_many_diverged ? kExitDiverged : kExitOk;
}

int cmd_correlate(const std::string& runs, const std::string& metric,
                  int epoch) {
  const auto records =
      read_records_jsonl((fs::path(runs) / "records.jsonl").string());
  if (records.empty()) throw ConfigError("no records in " + runs);
  int num_datasets = 0, repetitions = 0;
  for (const auto& r : records) {
    num_datasets = std::max(num_datasets, r.dataset_id + 1);
    repetitions = std::max(repetitions, r.rep + 1);
  }
  const auto pick = [&](const RunRecord& r) -> double {
    if (metric == "kspectral") return r_bar_at(r, epoch);
    if (metric == "valloss") {
      return r.epochs.at(static_cast<std::size_t>(epoch)).val_loss;
    }
    return static_cast<double>(r.dataset_size);
  };
  nlohmann::json table;
  std::string csv = "test_input,metric,epoch,rho_mean,rho_std\n";
  for (const auto& [test, target] :
       std::map<std::string, std::function<double(const RunRecord&)>>{
           {"test_I", [](const RunRecord& r) { return r.test_mse_1; }},
           {"test_II", [](const RunRecord& r) { return r.test_mse_2; }}}) {
    const CorrelationStat stat =
        correlate_metric(records, num_datasets, repetitions, pick, target);
    table[test] = to_json(stat);
    csv += test + "," + metric + "," + std::to_string(epoch) + ",";
    csv += stat.available ? format_double(stat.mean) + "," +
                                format_double(stat.stddev)
                          : std::string("N/A,N/A");
    csv += "\n";
  }
  write_json(fs::path(runs) / ("correlation_" + metric + ".json"), table);
  std::ofstream f(fs::path(runs) / ("correlation_" + metric + ".csv"));
  f << csv;
  std::cout << csv;
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& mode,
              const std::string& out) {
  const ExperimentConfig cfg = load_config(config_path);
  fs::create_directories(out);
  nlohmann::json j;
  std::string csv;
  if (mode == "epoch") {
    const auto sweep = epoch_sweep(cfg);
    csv = "epoch,rho_test_I,rho_test_II\n";
    for (const auto& [epoch, pt] : sweep) {
      j[std::to_string(epoch)] = {{"test_I", to_json(pt.test_1)},
                                  {"test_II", to_json(pt.test_2)}};
      csv += std::to_string(epoch) + ",";
      csv += pt.test_1.available ? format_double(pt.test_1.mean) : "N/A";
      csv += ",";
      csv += pt.test_2.available ? format_double(pt.test_2.mean) : "N/A";
      csv += "\n";
    }
  } else {
    const auto sweep = k_sweep(cfg);
    // |rho| is the headline number; the sign is kept in the JSON
    csv = "K,abs_rho_test_I,abs_rho_test_II\n";
    for (const auto& [k, pt] : sweep) {
      j[std::to_string(k)] = {{"test_I", to_json(pt.test_1)},
                              {"test_II", to_json(pt.test_2)}};
      csv += std::to_string(k) + ",";
      csv += pt.test_1.available ? format_double(std::abs(pt.test_1.mean))
                                 : "N/A";
      csv += ",";
      csv += pt.test_2.available ? format_double(std::abs(pt.test_2.mean))
                                 : "N/A";
      csv += "\n";
    }
  }
  write_json(fs::path(out) / (mode + "_sweep.json"), j);
  std::ofstream f(fs::path(out) / (mode + "_sweep.csv"));
  f << csv;
  std::cout << csv;
  return kExitOk;
}

int cmd_demo_fig2() {
  const Fig2Demo demo = fig2_demo();
  std::printf("four multisine signals, T = %zu, K = %d, max = %.4f\n",
              demo.t_len, demo.k,
              k_spectral_max(demo.t_len, demo.k));
  static const char* desc[4] = {
      "6 sinusoids, amplitude 1", "3 sinusoids, amplitude 1",
      "12 sinusoids, amplitude 1", "3 at amplitude 1 + 3 at amplitude 0.5"};
  for (int i = 0; i < 4; ++i) {
    std::printf("signal %d (%-36s): R = %8.4f\n", i + 1, desc[i], demo.r[i]);
  }
  const bool ordered = demo.r[0] > demo.r[3] && demo.r[3] > demo.r[2] &&
                       demo.r[2] > demo.r[1];
  std::printf("ordering 1 > 4 > 3 > 2: %s\n", ordered ? "yes" : "no");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"K-spectral metric toolkit for deep SSM identification"};
  app.require_subcommand(1);

  std::string plant = "wiener", config_path, out = ".", runs,
              metric = "kspectral", mode = "epoch";
  int num = 100, epoch = 1;
  std::size_t len = 2000;
  std::uint64_t seed = 0;

  auto* generate = app.add_subcommand("generate", "generate plant datasets");
  generate->add_option("--plant", plant)
      ->check(CLI::IsMember({"wiener", "hammerstein"}));
  generate->add_option("--num", num);
  generate->add_option("--len", len);
  generate->add_option("--seed", seed);
  generate->add_option("--out", out)->required();

  auto* train = app.add_subcommand("train", "run the training experiment");
  train->add_option("--config", config_path)->required();
  train->add_option("--out", out)->required();

  auto* correlate = app.add_subcommand("correlate", "correlation table");
  correlate->add_option("--runs", runs)->required();
  correlate->add_option("--metric", metric)
      ->check(CLI::IsMember({"kspectral", "valloss", "size"}));
  correlate->add_option("--epoch", epoch);

  auto* sweep = app.add_subcommand("sweep", "epoch or K sweep");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--mode", mode)->check(CLI::IsMember({"epoch", "k"}));
  sweep->add_option("--out", out)->required();

  app.add_subcommand("demo-fig2", "four-signal metric ordering demo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (generate->parsed()) return cmd_generate(plant, num, len, seed, out);
    if (train->parsed()) return cmd_train(config_path, out);
    if (correlate->parsed()) return cmd_correlate(runs, metric, epoch);
    if (sweep->parsed()) return cmd_sweep(config_path, mode, out);
    return cmd_demo_fig2();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}
