#include "radarhr/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "radarhr/errors.hpp"

namespace radarhr {

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw DataError("cannot open " + path.string());
  return is;
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size() || s.empty()) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

constexpr std::array<const char*, 6> kRadarKeys{"carrier_freq_hz",   "bandwidth_hz",      "chirp_duration_s",
                                                "fast_time_samples", "slow_time_rate_hz", "adc_rate_hz"};

}  // namespace

void write_series_csv(const fs::path& path, const SeriesD& values, double rate_hz) {
  if (!(rate_hz > 0)) throw InvalidArgument("write_series_csv: rate must be positive");
  auto os = open_out(path);
  os << "t_s,value\n";
  os << std::setprecision(17);
  for (Index i = 0; i < values.size(); ++i) os << static_cast<double>(i) / rate_hz << ',' << values(i) << '\n';
  if (!os) throw DataError("write failed: " + path.string());
}

SampledSeries read_series_csv(const fs::path& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) throw DataError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_s,value") throw DataError(path.string() + ": expected header 't_s,value'");

  std::vector<double> t, v;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError(path.string() + ":" + std::to_string(lineno) + ": missing comma");
    t.push_back(parse_double(line.substr(0, comma), path, lineno));
    v.push_back(parse_double(line.substr(comma + 1), path, lineno));
  }
  if (v.size() < 2) throw DataError(path.string() + ": need at least two samples");
  const double span = t.back() - t.front();
  if (!(span > 0)) throw DataError(path.string() + ": timestamps must increase");
  SampledSeries out;
  out.rate_hz = static_cast<double>(v.size() - 1) / span;
  out.values = Eigen::Map<const SeriesD>(v.data(), static_cast<Index>(v.size()));
  if (!all_finite(out.values)) throw DataError(path.string() + ": non-finite value");
  return out;
}

void write_phase_csv(const fs::path& path, const PhaseSeries& phase) { write_series_csv(path, phase.phase, phase.rate_hz); }

PhaseSeries read_phase_csv(const fs::path& path) {
  SampledSeries s = read_series_csv(path);
  return PhaseSeries{std::move(s.values), s.rate_hz, -1};
}

DisplacementTrace read_trace_csv(const fs::path& path, double base_range_m) {
  SampledSeries s = read_series_csv(path);
  DisplacementTrace tr{std::move(s.values), s.rate_hz, base_range_m};
  tr.validate();
  return tr;
}

nlohmann::json radar_config_to_json(const RadarConfig& cfg) {
  return {{"carrier_freq_hz", cfg.carrier_freq_hz},     {"bandwidth_hz", cfg.bandwidth_hz},
          {"chirp_duration_s", cfg.chirp_duration_s},   {"fast_time_samples", cfg.fast_time_samples},
          {"slow_time_rate_hz", cfg.slow_time_rate_hz}, {"adc_rate_hz", cfg.adc_rate_hz}};
}

RadarConfig radar_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("radar config must be a JSON object");
  RadarConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(kRadarKeys.begin(), kRadarKeys.end(), [&](const char* k) { return key == k; }) == kRadarKeys.end()) {
      throw ConfigError("unknown radar config key '" + key + "'");
    }
    if (!value.is_number()) throw ConfigError("radar config key '" + key + "' must be a number");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  get("carrier_freq_hz", cfg.carrier_freq_hz);
  get("bandwidth_hz", cfg.bandwidth_hz);
  get("chirp_duration_s", cfg.chirp_duration_s);
  if (j.contains("fast_time_samples")) {
    if (!j.at("fast_time_samples").is_number_integer()) throw ConfigError("fast_time_samples must be an integer");
    cfg.fast_time_samples = j.at("fast_time_samples").get<Index>();
  }
  get("slow_time_rate_hz", cfg.slow_time_rate_hz);
  get("adc_rate_hz", cfg.adc_rate_hz);
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

void write_iq(const fs::path& bin_path, const fs::path& sidecar_path, const IQCube& cube) {
  double peak = 0.0;
  for (Index i = 0; i < cube.samples.size(); ++i) {
    const auto& s = cube.samples.data()[i];
    peak = std::max({peak, std::abs(s.real()), std::abs(s.imag())});
  }
  const double scale = peak > 0 ? 32767.0 / peak : 1.0;
  auto os = open_out(bin_path, std::ios::out | std::ios::binary);
  auto put = [&](double v) {
    const auto q = static_cast<std::int16_t>(std::lround(v * scale));
    auto u = static_cast<std::uint16_t>(q);
    if constexpr (std::endian::native == std::endian::big) u = static_cast<std::uint16_t>((u >> 8) | (u << 8));
    const char bytes[2] = {static_cast<char>(u & 0xff), static_cast<char>(u >> 8)};
    os.write(bytes, 2);
  };
  for (Index n = 0; n < cube.samples.rows(); ++n) {
    for (Index m = 0; m < cube.samples.cols(); ++m) {
      put(cube.samples(n, m).real());
      put(cube.samples(n, m).imag());
    }
  }
  if (!os) throw DataError("write failed: " + bin_path.string());
  auto js = open_out(sidecar_path);
  js << radar_config_to_json(cube.config).dump(2) << '\n';
}

IQCube read_iq(const fs::path& bin_path, const fs::path& sidecar_path) {
  IQCube cube;
  try {
    cube.config = radar_config_from_json(read_json_file(sidecar_path));
  } catch (const ConfigError& e) {
    throw DataError(sidecar_path.string() + ": " + e.what());
  }
  auto is = open_in(bin_path, std::ios::in | std::ios::binary);
  std::vector<char> raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const auto row_bytes = static_cast<std::size_t>(cube.config.fast_time_samples) * 4;
  if (raw.size() % row_bytes != 0) {
    throw DataError(bin_path.string() + ": size " + std::to_string(raw.size()) + " is not a whole number of chirps");
  }
  const auto chirps = static_cast<Index>(raw.size() / row_bytes);
  cube.samples.resize(chirps, cube.config.fast_time_samples);
  auto get = [&](std::size_t offset) {
    const auto u = static_cast<std::uint16_t>(static_cast<unsigned char>(raw[offset]) |
                                              (static_cast<unsigned char>(raw[offset + 1]) << 8));
    return static_cast<double>(static_cast<std::int16_t>(u));
  };
  std::size_t off = 0;
  for (Index n = 0; n < chirps; ++n) {
    for (Index m = 0; m < cube.config.fast_time_samples; ++m, off += 4) {
      cube.samples(n, m) = {get(off), get(off + 2)};
    }
  }
  return cube;
}

void write_imfs_csv(const fs::path& path, const ImfSet<double>& imfs, const VmdParams& params) {
  nlohmann::json header;
  header["center_freqs_hz"] = std::vector<double>(imfs.center_freqs_hz.data(), imfs.center_freqs_hz.data() + imfs.k());
  header["params"] = {{"k_modes", params.k_modes},
                      {"alpha", params.alpha},
                      {"tau", params.tau},
                      {"tolerance", params.tolerance},
                      {"max_iterations", params.max_iterations}};
  header["iterations_used"] = imfs.iterations_used;
  header["converged"] = imfs.converged;
  header["rate_hz"] = imfs.rate_hz;
  auto os = open_out(path);
  os << "# " << header.dump() << '\n';
  os << "t_s";
  for (Index k = 0; k < imfs.k(); ++k) os << ",mode_" << k + 1;
  os << '\n' << std::setprecision(17);
  for (Index i = 0; i < imfs.length(); ++i) {
    os << static_cast<double>(i) / imfs.rate_hz;
    for (Index k = 0; k < imfs.k(); ++k) os << ',' << imfs.modes(i, k);
    os << '\n';
  }
}

void write_peaks_csv(const fs::path& path, const SeriesD& cms, const std::vector<Index>& peaks, double rate_hz) {
  auto os = open_out(path);
  os << "index,t_s,amplitude\n" << std::setprecision(17);
  for (const Index p : peaks) {
    if (p < 0 || p >= cms.size()) throw InvalidArgument("write_peaks_csv: peak index out of range");
    os << p << ',' << static_cast<double>(p) / rate_hz << ',' << cms(p) << '\n';
  }
}

void write_optimizer_trace(std::ostream& os, const OptResult& result) {
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const Candidate& c = result.trace[i];
    os << nlohmann::json{{"iter", i}, {"best_k", c.k_modes}, {"best_alpha", c.alpha}, {"best_fitness", c.fitness}}.dump()
       << '\n';
  }
}

nlohmann::json read_json_file(const fs::path& path) {
  auto is = open_in(path);
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
  if (!os) throw DataError("write failed: " + path.string());
}

}  // namespace radarhr
