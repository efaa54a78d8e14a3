#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "radarhr/config.hpp"
#include "radarhr/io.hpp"

using namespace radarhr;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::path(RADARHR_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("series CSV round-trip") {
  const fs::path dir = scratch_dir("series");
  SeriesD x = SeriesD::LinSpaced(50, -1.0, 2.0);
  x(3) = 1.0 / 3.0;
  write_series_csv(dir / "x.csv", x, 20.0);
  const SampledSeries s = read_series_csv(dir / "x.csv");
  CHECK(s.values == x);
  CHECK(s.rate_hz == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(slurp(dir / "x.csv").rfind("t_s,value\n", 0) == 0);

  PhaseSeries ph{x, 20.0, 4};
  write_phase_csv(dir / "p.csv", ph);
  const PhaseSeries back = read_phase_csv(dir / "p.csv");
  CHECK(back.phase == x);
  CHECK(back.origin_bin == -1);
}

TEST_CASE("malformed series CSV") {
  const fs::path dir = scratch_dir("bad_series");
  std::ofstream(dir / "hdr.csv") << "time,value\n0,1\n1,2\n";
  CHECK_THROWS_AS(read_series_csv(dir / "hdr.csv"), DataError);
  std::ofstream(dir / "num.csv") << "t_s,value\n0,1\n1,abc\n";
  CHECK_THROWS_AS(read_series_csv(dir / "num.csv"), DataError);
  std::ofstream(dir / "one.csv") << "t_s,value\n0,1\n";
  CHECK_THROWS_AS(read_series_csv(dir / "one.csv"), DataError);
  std::ofstream(dir / "nan.csv") << "t_s,value\n0,1\n1,nan\n";
  CHECK_THROWS_AS(read_series_csv(dir / "nan.csv"), DataError);
  CHECK_THROWS_AS(read_series_csv(dir / "missing.csv"), DataError);
  std::ofstream(dir / "crlf.csv") << "t_s,value\r\n0,1\r\n0.5,2\r\n";
  CHECK(read_series_csv(dir / "crlf.csv").rate_hz == 2.0);
}

TEST_CASE("trace CSV is validated against the base range") {
  const fs::path dir = scratch_dir("trace");
  write_series_csv(dir / "t.csv", SeriesD::Constant(10, 0.5), 2000);
  CHECK_THROWS_AS(read_trace_csv(dir / "t.csv", 0.2), InvalidArgument);
  write_series_csv(dir / "ok.csv", SeriesD::Constant(10, 1e-3), 2000);
  CHECK(read_trace_csv(dir / "ok.csv", 0.2).rate_hz == doctest::Approx(2000));
}

TEST_CASE("IQ binary round-trip within quantization") {
  const fs::path dir = scratch_dir("iq");
  RadarConfig cfg;
  DisplacementTrace tr{SeriesD::LinSpaced(200, 0, 1e-3), cfg.slow_time_rate_hz, 0.2};
  const IQCube cube = synthesize_iq(tr, cfg, 20.0, 3);
  write_iq(dir / "c.bin", dir / "c.json", cube);
  CHECK(fs::file_size(dir / "c.bin") == std::uintmax_t(200 * 32 * 4));
  const IQCube back = read_iq(dir / "c.bin", dir / "c.json");
  REQUIRE(back.samples.rows() == 200);
  REQUIRE(back.samples.cols() == 32);
  const double scale = back.samples.cwiseAbs().maxCoeff() / cube.samples.cwiseAbs().maxCoeff();
  CHECK((back.samples / scale - cube.samples).cwiseAbs().maxCoeff() < 1e-3 * cube.samples.cwiseAbs().maxCoeff());
  CHECK(back.config.bandwidth_hz == cfg.bandwidth_hz);

  // The little-endian layout: first I sample then first Q sample.
  std::ifstream is(dir / "c.bin", std::ios::binary);
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  CHECK(static_cast<std::int16_t>(b[0] | (b[1] << 8)) == static_cast<std::int16_t>(back.samples(0, 0).real()));
  CHECK(static_cast<std::int16_t>(b[2] | (b[3] << 8)) == static_cast<std::int16_t>(back.samples(0, 0).imag()));

  std::ofstream(dir / "short.bin", std::ios::binary) << "abcdefg";
  CHECK_THROWS_AS(read_iq(dir / "short.bin", dir / "c.json"), DataError);
}

TEST_CASE("radar sidecar is strict") {
  nlohmann::json j = radar_config_to_json(RadarConfig{});
  CHECK(radar_config_from_json(j).carrier_freq_hz == 60e9);
  j["gain_db"] = 3;
  CHECK_THROWS_AS(radar_config_from_json(j), ConfigError);
  j = radar_config_to_json(RadarConfig{});
  j["fast_time_samples"] = 32.5;
  CHECK_THROWS_AS(radar_config_from_json(j), ConfigError);
  j = radar_config_to_json(RadarConfig{});
  j["bandwidth_hz"] = "wide";
  CHECK_THROWS_AS(radar_config_from_json(j), ConfigError);
  j = radar_config_to_json(RadarConfig{});
  j["fast_time_samples"] = 4096;
  CHECK_THROWS_AS(radar_config_from_json(j), ConfigError);
}

TEST_CASE("pipeline config parsing") {
  const PipelineConfig defaults;
  const PipelineConfig round = pipeline_config_from_json(pipeline_config_to_json(defaults));
  CHECK(round.decimate_to_hz == defaults.decimate_to_hz);
  CHECK(round.vmd_params.k_modes == 5);
  CHECK(round.bounds.alpha_max == 8000);
  CHECK(round.nrbo_config.local_delta_range == defaults.nrbo_config.local_delta_range);

  const PipelineConfig partial = pipeline_config_from_json(nlohmann::json::parse(
      R"({"nrbo_config": {"population_n": 8}, "bounds": {"k_range": [2, 6]}, "vmd_params": {"init_mode": "zero"}})"));
  CHECK(partial.nrbo_config.population_n == 8);
  CHECK(partial.nrbo_config.max_iterations == defaults.nrbo_config.max_iterations);
  CHECK(partial.bounds.k_min == 2);
  CHECK(partial.bounds.k_max == 6);
  CHECK(partial.vmd_params.init_mode == OmegaInit::Zero);

  auto bad = [](const char* text) { return pipeline_config_from_json(nlohmann::json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"nrbo": {}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"nrbo_config": {"population": 8}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"nrbo_config": {"population_n": 2}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"nrbo_config": {"population_n": 8.5}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"bounds": {"k_range": [2]}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"band_spec": {"low_hz": 3, "high_hz": 2}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"vmd_params": {"init_mode": "spread"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"ga_config": {"seed": -1}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"([1, 2])"), ConfigError);
}

TEST_CASE("IMF, peak and trace exports") {
  const fs::path dir = scratch_dir("exports");
  ImfSet<double> imfs;
  imfs.modes = ModeMatrix<double>::Ones(5, 2);
  imfs.center_freqs_hz = Series<double>::LinSpaced(2, 0.3, 1.2);
  imfs.rate_hz = 10;
  write_imfs_csv(dir / "imfs.csv", imfs, VmdParams{});
  std::ifstream is(dir / "imfs.csv");
  std::string header, columns;
  std::getline(is, header);
  std::getline(is, columns);
  REQUIRE(header.rfind("# ", 0) == 0);
  const nlohmann::json meta = nlohmann::json::parse(header.substr(2));
  CHECK(meta["center_freqs_hz"][1].get<double>() == doctest::Approx(1.2));
  CHECK(columns == "t_s,mode_1,mode_2");

  SeriesD cms = SeriesD::LinSpaced(10, 0, 9);
  write_peaks_csv(dir / "peaks.csv", cms, {2, 7}, 10);
  CHECK(slurp(dir / "peaks.csv") == "index,t_s,amplitude\n2,0.20000000000000001,2\n7,0.69999999999999996,7\n");
  CHECK_THROWS_AS(write_peaks_csv(dir / "bad.csv", cms, {10}, 10), InvalidArgument);

  OptResult r;
  r.trace = {{4, 1000.0, 0.5}, {5, 1200.0, 0.25}};
  std::ostringstream os;
  write_optimizer_trace(os, r);
  std::istringstream lines(os.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j["iter"] == count);
    CHECK(j.contains("best_alpha"));
    ++count;
  }
  CHECK(count == 2);
}

}  // TEST_SUITE
