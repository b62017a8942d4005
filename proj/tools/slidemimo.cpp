// slidemimo: Monte Carlo link simulator for single-pilot-subcarrier sliding
// channel estimation in massive MIMO OFDM uplink.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slidemimo/channel.hpp"
#include "slidemimo/experiment.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& schemes,
            const std::string& sweep, const std::string& values, int trials, long long seed,
            const std::string& alpha, const std::string& out, const std::string& depths,
            int workers, bool noiseless, const std::string& pdp, const std::string& pdp_table,
            int antennas, double snr_db, double alpha_min, double rank_tol) {
  using namespace slidemimo;
  ExperimentSpec spec = config_path.empty() ? ExperimentSpec{} : load_spec(config_path);
  if (!schemes.empty()) {
    spec.schemes.clear();
    for (const auto& s : schemes) spec.schemes.push_back(parse_scheme(s));
  }
  if (!sweep.empty()) spec.sweep = parse_sweep(sweep);
  if (!values.empty()) spec.values = parse_list(values);
  if (trials > 0) spec.trials = trials;
  if (seed >= 0) spec.config.seed = static_cast<std::uint64_t>(seed);
  if (!alpha.empty()) spec.alpha = parse_alpha_mode(alpha);
  if (!out.empty()) spec.output = out;
  if (!depths.empty()) {
    spec.depths.clear();
    for (double d : parse_list(depths)) spec.depths.push_back(static_cast<int>(d));
  }
  if (workers > 0) spec.workers = workers;
  if (noiseless) spec.noiseless = true;
  if (!pdp.empty()) spec.pdp = pdp;
  if (!pdp_table.empty()) spec.pdp_table = pdp_table;
  if (antennas > 0) spec.config.antennas = antennas;
  if (!std::isnan(snr_db)) spec.config.noise_var = std::pow(10.0, -snr_db / 10.0);
  if (!std::isnan(alpha_min)) spec.sliding.alpha_min = alpha_min;
  if (!std::isnan(rank_tol)) spec.sliding.rank_tol = rank_tol;
  spec.validate();

  auto records = run_experiment(spec, [](const MetricRecord& r) {
    if (!r.error.empty()) std::cerr << "sweep point aborted: " << r.error << '\n';
    std::cerr << "done: " << r.scheme << " Q=" << r.antennas
              << (r.depth ? " D=" + std::to_string(*r.depth) : std::string()) << '\n';
  });
  if (spec.output.empty()) {
    write_csv(std::cout, records);
  } else {
    write_outputs(spec, records);
  }
  return 0;
}

int cmd_pdp_list(const std::string& table) {
  using namespace slidemimo;
  auto models = builtin_pdp_models();
  if (!table.empty())
    for (auto& m : load_pdp_table(table)) models.push_back(m);
  for (const auto& m : models)
    std::printf("%-8s %zu taps, max delay %.0f ns\n", m.name.c_str(), m.delays.size(),
                m.delays.back() * 1e9);
  return 0;
}

int cmd_pdp_show(const std::string& name, const std::string& table, int subcarriers,
                 double spacing) {
  using namespace slidemimo;
  PdpModel model;
  bool found = false;
  if (!table.empty())
    for (auto& m : load_pdp_table(table))
      if (m.name == name) {
        model = m;
        found = true;
      }
  if (!found) model = builtin_pdp(name);
  const double fs = subcarriers * spacing;
  const SampledPdp s = sample_pdp(model, fs);
  std::printf("model %s at f_s = %.6g Hz\n", model.name.c_str(), fs);
  std::printf("L = %d, coherence bandwidth = %.6g Hz\n", s.length(), coherence_bandwidth(s, fs));
  for (int l = 0; l < s.length(); ++l)
    if (s.rho[l] > 0.0) std::printf("  tap %3d  rho = %.6f\n", l, s.rho[l]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding single-pilot channel estimation for massive MIMO OFDM"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a Monte Carlo sweep and emit CSV");
  std::string config_path, sweep, values, alpha, out, depths, pdp, pdp_table;
  std::vector<std::string> schemes;
  int trials = 0, workers = 0, antennas = 0;
  long long seed = -1;
  bool noiseless = false;
  double snr_db = std::nan(""), alpha_min = std::nan(""), rank_tol = std::nan("");
  run->add_option("--config", config_path, "JSON experiment spec");
  run->add_option("--scheme", schemes,
                  "conventional-mrc | conventional-mmse | sliding (repeatable)");
  run->add_option("--sweep", sweep, "q | ebn0 | depth");
  run->add_option("--values", values, "comma-separated sweep values");
  run->add_option("--trials", trials, "frames per sweep point");
  run->add_option("--seed", seed, "master RNG seed");
  run->add_option("--alpha", alpha, "exact | approx");
  run->add_option("--out", out, "CSV output path (stdout if omitted)");
  run->add_option("--depths", depths, "comma-separated sliding depths");
  run->add_option("--workers", workers, "worker threads");
  run->add_flag("--noiseless", noiseless, "noise-free run, reports SIR");
  run->add_option("--pdp", pdp, "PDP model name");
  run->add_option("--pdp-table", pdp_table, "PDP table file");
  run->add_option("--antennas", antennas, "BS antennas Q (template)");
  run->add_option("--snr-db", snr_db, "input SNR 1/noise_var in dB (template)");
  run->add_option("--alpha-min", alpha_min, "smallest |alpha| accepted for 1/alpha scaling");
  run->add_option("--rank-tol", rank_tol, "virtual-pilot relative singular value threshold");

  auto* pdp_cmd = app.add_subcommand("pdp", "list or inspect power delay profiles");
  pdp_cmd->require_subcommand(1);
  std::string table;
  pdp_cmd->add_option("--table", table, "additional PDP table file");
  auto* list = pdp_cmd->add_subcommand("list", "list available models");
  auto* show = pdp_cmd->add_subcommand("show", "print the sampled profile");
  std::string show_name = "ETU";
  int show_m = 1024;
  double show_df = 15e3;
  show->add_option("name", show_name, "model name");
  show->add_option("--M", show_m, "subcarrier count");
  show->add_option("--delta-f", show_df, "subcarrier spacing in Hz");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run)
      return cmd_run(config_path, schemes, sweep, values, trials, seed, alpha, out, depths,
                     workers, noiseless, pdp, pdp_table, antennas, snr_db, alpha_min, rank_tol);
    if (*list) return cmd_pdp_list(table);
    if (*show) return cmd_pdp_show(show_name, table, show_m, show_df);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
