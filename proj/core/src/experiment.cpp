#include "slidemimo/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "slidemimo/baseline_rx.hpp"
#include "slidemimo/channel.hpp"
#include "slidemimo/metrics.hpp"
#include "slidemimo/pilots.hpp"

namespace slidemimo {

using nlohmann::json;

std::string_view to_string(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::kConventionalMrc: return "conventional-mrc";
    case SchemeKind::kConventionalMmse: return "conventional-mmse";
    case SchemeKind::kSliding: return "sliding";
  }
  return "?";
}

std::string_view to_string(SweepVariable sweep) {
  switch (sweep) {
    case SweepVariable::kAntennas: return "q";
    case SweepVariable::kEbn0: return "ebn0";
    case SweepVariable::kDepth: return "depth";
  }
  return "?";
}

std::string_view to_string(AlphaMode mode) {
  return mode == AlphaMode::kExactPdp ? "exact" : "approx";
}

SchemeKind parse_scheme(std::string_view name) {
  for (auto s : {SchemeKind::kConventionalMrc, SchemeKind::kConventionalMmse, SchemeKind::kSliding})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

SweepVariable parse_sweep(std::string_view name) {
  for (auto s : {SweepVariable::kAntennas, SweepVariable::kEbn0, SweepVariable::kDepth})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown sweep variable '" + std::string(name) + "'");
}

AlphaMode parse_alpha_mode(std::string_view name) {
  if (name == "exact") return AlphaMode::kExactPdp;
  if (name == "approx") return AlphaMode::kCoherenceApprox;
  throw std::invalid_argument("unknown alpha mode '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  if (schemes.empty()) throw std::invalid_argument("ExperimentSpec: no schemes");
  if (values.empty()) throw std::invalid_argument("ExperimentSpec: sweep values are empty");
  if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
  if (workers < 1) throw std::invalid_argument("ExperimentSpec: workers must be >= 1");
  for (int d : depths)
    if (d < 0) throw std::invalid_argument("ExperimentSpec: negative depth");
  if (!(sliding.alpha_min >= 0.0) || !(sliding.rank_tol >= 0.0))
    throw std::invalid_argument("ExperimentSpec: alpha_min and rank_tol must be nonnegative");
  config.validate();
}

namespace {

struct Variant {
  SchemeKind kind;
  int depth = -1;
};

struct PointSetup {
  SystemConfig config;
  std::vector<SampledPdp> pdps;
  std::vector<Variant> variants;
  std::optional<Constellation> constellation;
  std::optional<PilotBook> book;
  std::optional<PilotPlacement> conventional;
  std::optional<CirInterpolator> interpolator;
  std::optional<PilotPlacement> single;
  std::optional<AlphaTable> alpha;
  SlidingOptions sliding;
};

PdpModel resolve_pdp(const ExperimentSpec& spec) {
  if (!spec.pdp_table.empty())
    for (auto& m : load_pdp_table(spec.pdp_table))
      if (m.name == spec.pdp) return m;
  return builtin_pdp(spec.pdp);
}

PointSetup prepare_point(const ExperimentSpec& spec, double value) {
  PointSetup p;
  p.config = spec.config;
  p.sliding = spec.sliding;
  switch (spec.sweep) {
    case SweepVariable::kAntennas: p.config.antennas = static_cast<int>(std::lround(value)); break;
    case SweepVariable::kEbn0:
      p.config.noise_var = ebn0_to_noise_var(value, p.config.constellation_order);
      break;
    case SweepVariable::kDepth: p.config.depth = static_cast<int>(std::lround(value)); break;
  }
  if (spec.noiseless) p.config.noise_var = 0.0;
  p.config.validate();

  const SampledPdp pdp = sample_pdp(resolve_pdp(spec), p.config.sample_rate());
  p.config.validate_channel_length(pdp.length());
  p.pdps.assign(p.config.users, pdp);
  p.constellation.emplace(p.config.constellation_order);
  p.book = zc_pilot_book(p.config.pilot_slots, p.config.users, 1);

  std::vector<int> depths;
  if (spec.sweep == SweepVariable::kDepth) {
    depths = {p.config.depth};
  } else {
    depths = spec.depths.empty() ? std::vector<int>{p.config.depth} : spec.depths;
  }
  for (SchemeKind s : spec.schemes) {
    if (s == SchemeKind::kSliding) {
      for (int d : depths) p.variants.push_back({s, d});
    } else {
      p.variants.push_back({s, -1});
    }
  }
  for (const auto& v : p.variants) {
    if (v.kind != SchemeKind::kSliding && !p.conventional) {
      p.conventional = conventional_placement(p.config, pdp.length());
      p.interpolator.emplace(p.config.subcarriers, p.conventional->pilot_subcarriers,
                             pdp.length());
    }
    if (v.kind == SchemeKind::kSliding && !p.single) {
      p.single = single_subcarrier_placement(p.config);
      p.alpha.emplace(p.pdps, p.config.subcarriers, spec.alpha, p.config.subcarrier_spacing);
    }
  }
  return p;
}

std::vector<UserFrame> make_frames(const PointSetup& p, const PilotPlacement& placement,
                                   const StreamSeeder& seeder, std::uint64_t trial,
                                   std::uint64_t scheme_tag) {
  const std::size_t count = static_cast<std::size_t>(data_re_count(placement, p.config)) *
                            p.constellation->bits_per_symbol();
  std::vector<Bits> bits;
  for (int k = 0; k < p.config.users; ++k) {
    Rng rng = seeder.stream(StreamTag::kBits, {trial, static_cast<std::uint64_t>(k), scheme_tag});
    bits.push_back(random_bits(count, rng));
  }
  return build_frames(placement, *p.book, bits, p.config, *p.constellation);
}

std::vector<LinkTally> run_trial(const PointSetup& p, std::uint64_t trial) {
  const SystemConfig& cfg = p.config;
  const StreamSeeder seeder(cfg.seed);
  const ChannelRealization ch = draw_channel(p.pdps, cfg.antennas, seeder, trial);
  const CfrTensor cfr = cir_to_cfr(ch, cfg.subcarriers);
  std::optional<SpaceTimeGrid> noise;
  if (cfg.noise_var > 0.0)
    noise = draw_noise(cfg.subcarriers, cfg.antennas, cfg.frame_length(), cfg.noise_var, seeder,
                       trial);

  auto received = [&](const std::vector<UserFrame>& frames) {
    SpaceTimeGrid grid = apply_cfr(frames, cfr);
    if (noise) grid.data() += noise->data();
    return grid;
  };

  std::vector<LinkTally> out(p.variants.size());
  if (p.conventional) {
    const auto frames = make_frames(p, *p.conventional, seeder, trial, 0);
    const SpaceTimeGrid grid = received(frames);
    for (std::size_t v = 0; v < p.variants.size(); ++v) {
      const auto kind = p.variants[v].kind;
      if (kind == SchemeKind::kSliding) continue;
      const Combiner comb = kind == SchemeKind::kConventionalMmse ? Combiner::kMmse : Combiner::kMrc;
      const auto result = run_conventional(grid, *p.conventional, *p.book, *p.interpolator,
                                           cfg.noise_var, comb, *p.constellation);
      out[v] = score_frame(result, frames, *p.constellation);
    }
  }
  if (p.single) {
    const auto frames = make_frames(p, *p.single, seeder, trial, 1);
    const SpaceTimeGrid grid = received(frames);
    for (std::size_t v = 0; v < p.variants.size(); ++v) {
      if (p.variants[v].kind != SchemeKind::kSliding) continue;
      SystemConfig c = cfg;
      c.depth = p.variants[v].depth;
      const auto result = run_sliding(grid, *p.single, *p.book, *p.alpha, c, p.sliding);
      out[v] = score_frame(result, frames, *p.constellation);
    }
  }
  return out;
}

MetricRecord base_record(const ExperimentSpec& spec, const SystemConfig& cfg,
                         SchemeKind kind, int depth) {
  MetricRecord r;
  r.scheme = std::string(to_string(kind));
  r.antennas = cfg.antennas;
  if (cfg.noise_var > 0.0) {
    r.snr_db = -10.0 * std::log10(cfg.noise_var);
    r.ebn0_db = *r.snr_db - 10.0 * std::log10(std::log2(static_cast<double>(cfg.constellation_order)));
  }
  if (kind == SchemeKind::kSliding) r.depth = depth;
  r.seed = spec.config.seed;
  return r;
}

}  // namespace

std::vector<MetricRecord> run_experiment(const ExperimentSpec& spec, const RecordCallback& on_record) {
  spec.validate();
  std::vector<MetricRecord> records;

  for (double value : spec.values) {
    std::optional<PointSetup> setup;
    std::string setup_error;
    try {
      setup = prepare_point(spec, value);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    if (!setup) {
      MetricRecord r;
      r.scheme = "error";
      r.error = setup_error;
      r.seed = spec.config.seed;
      r.failed_frames = spec.trials;
      if (on_record) on_record(r);
      records.push_back(std::move(r));
      continue;
    }

    const int trials = spec.trials;
    std::vector<std::vector<LinkTally>> per_trial(trials);
    std::vector<std::string> errors(trials);
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int t = next++; t < trials; t = next++) {
        try {
          per_trial[t] = run_trial(*setup, static_cast<std::uint64_t>(t));
        } catch (const std::exception& e) {
          errors[t] = e.what();
        }
      }
    };
    const int n_workers = std::min(spec.workers, trials);
    if (n_workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    std::string first_error;
    for (const auto& e : errors)
      if (!e.empty()) {
        first_error = e;
        break;
      }

    for (std::size_t v = 0; v < setup->variants.size(); ++v) {
      const auto& variant = setup->variants[v];
      MetricRecord r = base_record(spec, setup->config, variant.kind, variant.depth);
      if (!first_error.empty()) {
        r.error = first_error;
        r.failed_frames = trials;
      } else {
        LinkTally total(setup->config.users);
        for (int t = 0; t < trials; ++t) total.merge(per_trial[t][v]);
        r.frames = total.frames;
        r.failed_frames = total.failed_frames;
        if (total.frames > 0) {
          const double sinr = total.mean_sinr_db();
          if (setup->config.noise_var == 0.0) {
            r.sir_db = sinr;
          } else {
            r.sinr_db = sinr;
          }
          r.ber = total.ber();
        }
      }
      if (on_record) on_record(r);
      records.push_back(std::move(r));
    }
  }
  return records;
}

namespace {

std::string fmt_number(std::optional<double> v, const char* pattern) {
  if (!v) return "NA";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  if (std::isnan(*v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, *v);
  std::string text(buf);
  if (text.starts_with('-') && text.find_first_not_of("-0.e+", 0) == std::string::npos)
    text.erase(0, 1);  // "-0.0000"
  return text;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<MetricRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.scheme << ',' << r.antennas << ',' << fmt_number(r.ebn0_db, "%.4f") << ','
        << fmt_number(r.snr_db, "%.4f") << ','
        << (r.depth ? std::to_string(*r.depth) : std::string("NA")) << ','
        << fmt_number(r.sinr_db, "%.4f") << ',' << fmt_number(r.sir_db, "%.4f") << ','
        << fmt_number(r.ber, "%.6e") << ',' << r.frames << ',' << r.failed_frames << ','
        << r.seed << '\n';
  }
}

std::string to_csv(const std::vector<MetricRecord>& records) {
  std::ostringstream ss;
  write_csv(ss, records);
  return ss.str();
}

std::string spec_to_json(const ExperimentSpec& spec) {
  json schemes = json::array();
  for (auto s : spec.schemes) schemes.push_back(std::string(to_string(s)));
  const SystemConfig& c = spec.config;
  json j = {
      {"schemes", schemes},
      {"sweep", std::string(to_string(spec.sweep))},
      {"values", spec.values},
      {"trials", spec.trials},
      {"config",
       {{"M", c.subcarriers},
        {"M_CP", c.cp_length},
        {"K", c.users},
        {"Q", c.antennas},
        {"N_p", c.pilot_slots},
        {"N_d", c.data_slots},
        {"delta_f", c.subcarrier_spacing},
        {"noise_var", c.noise_var},
        {"depth", c.depth},
        {"constellation_order", c.constellation_order},
        {"seed", c.seed}}},
      {"pdp", spec.pdp},
      {"pdp_table", spec.pdp_table},
      {"alpha", std::string(to_string(spec.alpha))},
      {"output", spec.output},
      {"depths", spec.depths},
      {"noiseless", spec.noiseless},
      {"workers", spec.workers},
      {"alpha_min", spec.sliding.alpha_min},
      {"rank_tol", spec.sliding.rank_tol},
  };
  return j.dump(2);
}

ExperimentSpec spec_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
  ExperimentSpec spec;
  try {
    if (j.contains("schemes")) {
      spec.schemes.clear();
      for (const auto& s : j.at("schemes")) spec.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    if (j.contains("sweep")) spec.sweep = parse_sweep(j.at("sweep").get<std::string>());
    if (j.contains("values")) spec.values = j.at("values").get<std::vector<double>>();
    if (j.contains("trials")) spec.trials = j.at("trials").get<int>();
    if (j.contains("pdp")) spec.pdp = j.at("pdp").get<std::string>();
    if (j.contains("pdp_table")) spec.pdp_table = j.at("pdp_table").get<std::string>();
    if (j.contains("alpha")) spec.alpha = parse_alpha_mode(j.at("alpha").get<std::string>());
    if (j.contains("output")) spec.output = j.at("output").get<std::string>();
    if (j.contains("depths")) spec.depths = j.at("depths").get<std::vector<int>>();
    if (j.contains("noiseless")) spec.noiseless = j.at("noiseless").get<bool>();
    if (j.contains("workers")) spec.workers = j.at("workers").get<int>();
    if (j.contains("alpha_min")) spec.sliding.alpha_min = j.at("alpha_min").get<double>();
    if (j.contains("rank_tol")) spec.sliding.rank_tol = j.at("rank_tol").get<double>();
    if (j.contains("config")) {
      const json& c = j.at("config");
      SystemConfig& cfg = spec.config;
      auto read = [&](const char* key, auto& field) {
        if (c.contains(key)) field = c.at(key).get<std::decay_t<decltype(field)>>();
      };
      read("M", cfg.subcarriers);
      read("M_CP", cfg.cp_length);
      read("K", cfg.users);
      read("Q", cfg.antennas);
      read("N_p", cfg.pilot_slots);
      read("N_d", cfg.data_slots);
      read("delta_f", cfg.subcarrier_spacing);
      read("noise_var", cfg.noise_var);
      read("depth", cfg.depth);
      read("constellation_order", cfg.constellation_order);
      read("seed", cfg.seed);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return spec_from_json(ss.str());
}

void write_outputs(const ExperimentSpec& spec, const std::vector<MetricRecord>& records) {
  if (spec.output.empty()) return;
  std::filesystem::path csv_path(spec.output);
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write '" + spec.output + "'");
    write_csv(csv, records);
  }
  std::filesystem::path sidecar = csv_path;
  sidecar.replace_extension(".json");
  if (sidecar == csv_path) sidecar += ".spec.json";
  std::ofstream js(sidecar, std::ios::binary);
  if (!js) throw std::runtime_error("cannot write '" + sidecar.string() + "'");
  js << spec_to_json(spec) << '\n';
}

}  // namespace slidemimo
