#include "slidemimo/channel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "slidemimo/dft.hpp"

namespace slidemimo {
namespace {

PdpModel make_model(std::string name, std::initializer_list<double> delays_ns,
                    std::initializer_list<double> powers_db) {
  PdpModel model{std::move(name), {}, std::vector<double>(powers_db)};
  for (double d : delays_ns) model.delays.push_back(d * 1e-9);
  return model;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void PdpModel::validate() const {
  if (delays.empty()) throw std::invalid_argument("PDP '" + name + "': no taps");
  if (delays.size() != powers_db.size())
    throw std::invalid_argument("PDP '" + name + "': delay/power count mismatch");
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (delays[i] < 0.0) throw std::invalid_argument("PDP '" + name + "': negative delay");
    if (i > 0 && !(delays[i] > delays[i - 1]))
      throw std::invalid_argument("PDP '" + name + "': delays not strictly increasing");
  }
}

PdpModel etu_model() {
  return make_model("ETU", {0, 50, 120, 200, 230, 500, 1600, 2300, 5000},
                    {-1, -1, -1, 0, 0, 0, -3, -5, -7});
}

PdpModel epa_model() {
  return make_model("EPA", {0, 30, 70, 90, 110, 190, 410},
                    {0, -1, -2, -3, -8, -17.2, -20.8});
}

PdpModel eva_model() {
  return make_model("EVA", {0, 30, 150, 310, 370, 710, 1090, 1730, 2510},
                    {0, -1.5, -1.4, -3.6, -0.6, -9.1, -7, -12, -16.9});
}

std::vector<PdpModel> builtin_pdp_models() { return {epa_model(), eva_model(), etu_model()}; }

PdpModel builtin_pdp(std::string_view name) {
  for (auto& model : builtin_pdp_models())
    if (lower(model.name) == lower(name)) return model;
  throw std::invalid_argument("unknown PDP model '" + std::string(name) + "'");
}

std::vector<PdpModel> parse_pdp_table(std::istream& in) {
  std::vector<PdpModel> models;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(trim(f));
    if (fields.size() != 3)
      throw std::invalid_argument("PDP table line " + std::to_string(line_no) +
                                  ": expected 'name, delay_ns, power_db'");
    double delay_ns = 0.0;
    double power_db = 0.0;
    try {
      delay_ns = std::stod(fields[1]);
      power_db = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw std::invalid_argument("PDP table line " + std::to_string(line_no) +
                                  ": bad number");
    }
    auto it = std::find_if(models.begin(), models.end(),
                           [&](const PdpModel& m) { return m.name == fields[0]; });
    if (it == models.end()) {
      models.push_back({fields[0], {}, {}});
      it = std::prev(models.end());
    }
    it->delays.push_back(delay_ns * 1e-9);
    it->powers_db.push_back(power_db);
  }
  for (const auto& m : models) m.validate();
  return models;
}

std::vector<PdpModel> load_pdp_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open PDP table '" + path + "'");
  return parse_pdp_table(in);
}

SampledPdp sample_pdp(const PdpModel& model, double sample_rate) {
  model.validate();
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_pdp: sample rate must be positive");

  std::vector<double> rho;
  for (std::size_t i = 0; i < model.delays.size(); ++i) {
    // Small tolerance so delays that are exact sample multiples are not
    // pushed down by rounding in delay * sample_rate.
    const auto idx = static_cast<std::size_t>(std::floor(model.delays[i] * sample_rate + 1e-6));
    if (idx >= rho.size()) rho.resize(idx + 1, 0.0);
    rho[idx] += std::pow(10.0, model.powers_db[i] / 10.0);
  }
  double total = 0.0;
  for (double r : rho) total += r;
  for (double& r : rho) r /= total;
  while (rho.size() > 1 && rho.back() == 0.0) rho.pop_back();
  return {std::move(rho)};
}

ChannelRealization draw_channel(std::span<const SampledPdp> pdp_per_user, int antennas,
                                const StreamSeeder& seeder, std::uint64_t trial) {
  if (pdp_per_user.empty()) throw std::invalid_argument("draw_channel: no users");
  ChannelRealization ch;
  ch.antennas = antennas;
  ch.users = static_cast<int>(pdp_per_user.size());
  ch.pdp.assign(pdp_per_user.begin(), pdp_per_user.end());
  for (const auto& p : ch.pdp) {
    if (p.length() < 1) throw std::invalid_argument("draw_channel: empty PDP");
    ch.length = std::max(ch.length, p.length());
  }
  ch.taps.assign(static_cast<std::size_t>(antennas) * ch.users * ch.length, cd{});

  ComplexGaussian unit(1.0);
  for (int q = 0; q < antennas; ++q) {
    for (int k = 0; k < ch.users; ++k) {
      Rng rng = seeder.stream(StreamTag::kChannel,
                              {trial, static_cast<std::uint64_t>(q), static_cast<std::uint64_t>(k)});
      const auto& rho = ch.pdp[k].rho;
      for (int l = 0; l < static_cast<int>(rho.size()); ++l)
        ch.tap(q, k, l) = std::sqrt(rho[l]) * unit(rng);
    }
  }
  return ch;
}

CfrTensor::CfrTensor(int subcarriers, int antennas, int users)
    : subcarriers_(subcarriers),
      users_(users),
      data_(CMatrix::Zero(antennas, static_cast<Eigen::Index>(subcarriers) * users)) {}

CfrTensor cir_to_cfr(const ChannelRealization& realization, int subcarriers) {
  if (realization.length > subcarriers)
    throw std::invalid_argument("cir_to_cfr: channel longer than M");
  CfrTensor cfr(subcarriers, realization.antennas, realization.users);
  const Dft dft(subcarriers);
  std::vector<cd> padded(subcarriers), spectrum(subcarriers);
  for (int q = 0; q < realization.antennas; ++q) {
    for (int k = 0; k < realization.users; ++k) {
      std::fill(padded.begin(), padded.end(), cd{});
      auto h = realization.cir(q, k);
      std::copy(h.begin(), h.end(), padded.begin());
      dft.forward(padded, spectrum);
      for (int m = 0; m < subcarriers; ++m) cfr.data()(q, m * realization.users + k) = spectrum[m];
    }
  }
  return cfr;
}

SpaceTimeGrid apply_cfr(std::span<const UserFrame> frames, const CfrTensor& cfr) {
  const int users = cfr.users();
  if (static_cast<int>(frames.size()) != users)
    throw std::invalid_argument("apply_cfr: frame count differs from K");
  const int m_sub = cfr.subcarriers();
  const int n_sym = static_cast<int>(frames[0].symbols.cols());
  SpaceTimeGrid grid(m_sub, cfr.antennas(), n_sym);
  CMatrix x(users, n_sym);
  for (int m = 0; m < m_sub; ++m) {
    for (int k = 0; k < users; ++k) x.row(k) = frames[k].symbols.row(m);
    grid.subcarrier(m).noalias() = cfr.at(m) * x;
  }
  return grid;
}

SpaceTimeGrid draw_noise(int subcarriers, int antennas, int slots, double noise_var,
                         const StreamSeeder& seeder, std::uint64_t trial) {
  SpaceTimeGrid noise(subcarriers, antennas, slots);
  if (noise_var == 0.0) return noise;
  ComplexGaussian gauss(noise_var);
  const Eigen::Index cols = noise.data().cols();
  for (int q = 0; q < antennas; ++q) {
    Rng rng = seeder.stream(StreamTag::kNoise, {trial, static_cast<std::uint64_t>(q)});
    for (Eigen::Index c = 0; c < cols; ++c) noise.data()(q, c) = gauss(rng);
  }
  return noise;
}

namespace {

SpaceTimeGrid propagate_time_domain(std::span<const UserFrame> frames,
                                    const ChannelRealization& ch, const SystemConfig& config,
                                    const StreamSeeder& seeder, std::uint64_t trial) {
  std::vector<std::vector<cd>> tx;
  tx.reserve(frames.size());
  for (const auto& f : frames) tx.push_back(ofdm_modulate(f, config));
  const std::size_t len = tx.front().size();

  ComplexGaussian gauss(config.noise_var);
  std::vector<CMatrix> per_antenna;
  per_antenna.reserve(ch.antennas);
  std::vector<cd> rx(len);
  for (int q = 0; q < ch.antennas; ++q) {
    std::fill(rx.begin(), rx.end(), cd{});
    for (int k = 0; k < ch.users; ++k) {
      auto h = ch.cir(q, k);
      const auto& s = tx[k];
      // Linear convolution truncated to the frame; the CP absorbs the tail
      // from each previous symbol.
      for (std::size_t t = 0; t < len; ++t) {
        cd acc{};
        const std::size_t taps = std::min<std::size_t>(h.size(), t + 1);
        for (std::size_t l = 0; l < taps; ++l) acc += h[l] * s[t - l];
        rx[t] += acc;
      }
    }
    if (config.noise_var > 0.0) {
      Rng rng = seeder.stream(StreamTag::kNoise, {trial, static_cast<std::uint64_t>(q)});
      for (auto& v : rx) v += gauss(rng);
    }
    per_antenna.push_back(ofdm_demodulate(rx, config));
  }
  return assemble_space_time(per_antenna);
}

}  // namespace

SpaceTimeGrid propagate(std::span<const UserFrame> frames,
                        const ChannelRealization& realization,
                        const SystemConfig& config, const StreamSeeder& seeder,
                        std::uint64_t trial, PropagationPath path) {
  config.validate_channel_length(realization.length);
  if (static_cast<int>(frames.size()) != realization.users)
    throw std::invalid_argument("propagate: frame count differs from K");
  if (path == PropagationPath::kTime)
    return propagate_time_domain(frames, realization, config, seeder, trial);

  const CfrTensor cfr = cir_to_cfr(realization, config.subcarriers);
  SpaceTimeGrid grid = apply_cfr(frames, cfr);
  if (config.noise_var > 0.0) {
    grid.data() += draw_noise(config.subcarriers, realization.antennas, config.frame_length(),
                              config.noise_var, seeder, trial)
                       .data();
  }
  return grid;
}

double coherence_bandwidth(const SampledPdp& pdp, double sample_rate) {
  if (pdp.length() <= 1) return std::numeric_limits<double>::infinity();
  return sample_rate / (pdp.length() - 1);
}

}  // namespace slidemimo
