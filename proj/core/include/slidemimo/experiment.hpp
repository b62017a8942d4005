#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "slidemimo/sliding_rx.hpp"
#include "slidemimo/waveform.hpp"

namespace slidemimo {

enum class SchemeKind { kConventionalMrc, kConventionalMmse, kSliding };
enum class SweepVariable { kAntennas, kEbn0, kDepth };

std::string_view to_string(SchemeKind scheme);
std::string_view to_string(SweepVariable sweep);
std::string_view to_string(AlphaMode mode);
SchemeKind parse_scheme(std::string_view name);
SweepVariable parse_sweep(std::string_view name);
AlphaMode parse_alpha_mode(std::string_view name);

/// A Monte Carlo sweep. The sweep value overrides Q, the noise variance (via
/// Eb/N0) or the sliding depth of the config template at each point.
struct ExperimentSpec {
  std::vector<SchemeKind> schemes{SchemeKind::kConventionalMmse, SchemeKind::kSliding};
  SweepVariable sweep = SweepVariable::kAntennas;
  std::vector<double> values{200};
  int trials = 10;
  SystemConfig config;
  std::string pdp = "ETU";
  std::string pdp_table;       // optional file with extra PDP models
  AlphaMode alpha = AlphaMode::kExactPdp;
  std::string output;          // CSV path; empty disables file output
  std::vector<int> depths;     // sliding variants; empty means {config.depth}
  bool noiseless = false;      // force noise_var = 0 and report SIR
  int workers = 1;
  SlidingOptions sliding;      // alpha_min guard and virtual-pilot rank tolerance

  void validate() const;
};

/// One CSV row. Unset optionals are written as NA.
struct MetricRecord {
  std::string scheme;
  int antennas = 0;
  std::optional<double> ebn0_db;
  std::optional<double> snr_db;
  std::optional<int> depth;
  std::optional<double> sinr_db;
  std::optional<double> sir_db;
  std::optional<double> ber;
  int frames = 0;
  int failed_frames = 0;
  std::uint64_t seed = 0;
  std::string error;  // diagnostic when the sweep point aborted
};

inline constexpr std::string_view kCsvHeader =
    "scheme,Q,ebn0_db,snr_db,depth,sinr_db,sir_db,ber,frames,failed_frames,seed";

using RecordCallback = std::function<void(const MetricRecord&)>;

/// Runs every sweep point and scheme. Trials fan out over spec.workers
/// threads; the records are identical for any worker count.
std::vector<MetricRecord> run_experiment(const ExperimentSpec& spec,
                                         const RecordCallback& on_record = {});

void write_csv(std::ostream& out, const std::vector<MetricRecord>& records);
std::string to_csv(const std::vector<MetricRecord>& records);

std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(std::string_view text);
ExperimentSpec load_spec(const std::string& path);

/// Writes the CSV to spec.output and the spec itself next to it with a .json
/// extension.
void write_outputs(const ExperimentSpec& spec, const std::vector<MetricRecord>& records);

}  // namespace slidemimo
