#include "radarhr/evaluation.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "radarhr/baselines.hpp"
#include "radarhr/errors.hpp"
#include "radarhr/io.hpp"

namespace radarhr {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::NrboVmd: return kTagNrboVmd;
    case Method::GaVmd: return kTagGaVmd;
    case Method::Vmd: return kTagFixedVmd;
    case Method::BpfFft: return kTagBpfFft;
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (const Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "' (expected nrbo-vmd | ga-vmd | vmd | bpf)");
}

MethodOutput run_method(Method method, const PhaseSeries& phase, const PipelineConfig& cfg, std::uint64_t seed) {
  MethodOutput out;
  switch (method) {
    case Method::BpfFft:
      out.estimate = bpf_fft_estimate(phase, cfg.band_spec);
      break;
    case Method::Vmd:
      out.estimate = fixed_vmd_estimate(phase, cfg.vmd_params, cfg.band_spec, cfg.peak_config);
      break;
    case Method::NrboVmd: {
      NrboConfig n = cfg.nrbo_config;
      n.seed = seed;
      out.fit = nrbo_vmd_fit(phase, cfg.bounds, n, cfg.sampen_config, cfg.fit_options());
      out.estimate = estimate_from_cms(out.fit->cms, phase.rate_hz, cfg.peak_config, kTagNrboVmd);
      break;
    }
    case Method::GaVmd: {
      GaConfig g = cfg.ga_config;
      g.seed = seed;
      out.fit = ga_vmd_fit(phase, cfg.bounds, g, cfg.sampen_config, cfg.fit_options());
      out.estimate = estimate_from_cms(out.fit->cms, phase.rate_hz, cfg.peak_config, kTagGaVmd);
      break;
    }
  }
  return out;
}

double rmse(std::span<const double> est, std::span<const double> ref) {
  if (est.size() != ref.size()) throw InvalidArgument("rmse: length mismatch");
  if (est.empty()) throw InvalidArgument("rmse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) acc += (est[i] - ref[i]) * (est[i] - ref[i]);
  return std::sqrt(acc / static_cast<double>(est.size()));
}

double accuracy_percent(std::span<const double> est, std::span<const double> ref) {
  if (est.size() != ref.size()) throw InvalidArgument("accuracy_percent: length mismatch");
  if (est.empty()) throw InvalidArgument("accuracy_percent: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (!(ref[i] > 0)) throw InvalidArgument("accuracy_percent: reference must be positive");
    acc += std::max(0.0, 1.0 - std::abs(est[i] - ref[i]) / ref[i]);
  }
  return 100.0 * acc / static_cast<double>(est.size());
}

void SubjectRecord::validate() const {
  if (!(reference_bpm > 0 && reference_bpm < 300)) throw InvalidArgument("subject " + id + ": reference_bpm outside (0, 300)");
  if (duration_s && !(*duration_s > 0)) throw InvalidArgument("subject " + id + ": duration_s must be positive");
}

PhaseSeries load_subject_phase(const SubjectRecord& rec, const PipelineConfig& cfg) {
  PhaseSeries phase = std::visit(
      [&](const auto& src) -> PhaseSeries {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, PhaseSeries>) {
          return src;
        } else if constexpr (std::is_same_v<T, PhaseCsvSource>) {
          return read_phase_csv(src.path);
        } else {
          const IQCube cube = read_iq(src.bin_path, src.sidecar_path);
          if (cube.empty()) throw DataError("subject " + rec.id + ": empty IQ capture");
          return extract_phase(cube, cube.config.slow_time_rate_hz).phase;
        }
      },
      rec.source);
  if (!(phase.rate_hz > 0) || phase.size() == 0) throw DataError("subject " + rec.id + ": empty phase series");
  if (phase.rate_hz > cfg.decimate_to_hz * (1.0 + 1e-9)) phase = decimate(phase, cfg.decimate_to_hz);
  if (rec.duration_s) {
    const auto n = static_cast<Index>(std::llround(*rec.duration_s * phase.rate_hz));
    if (n < phase.size()) phase.phase = phase.phase.head(n).eval();
  }
  return phase;
}

std::vector<MethodAggregate> EvalReport::aggregate(const std::vector<ReportRow>& rows) {
  std::vector<MethodAggregate> out;
  for (const Method m : kAllMethods) {
    std::vector<double> est, ref;
    bool present = false;
    for (const auto& r : rows) {
      if (r.method != m) continue;
      present = true;
      if (!r.complete) continue;
      est.push_back(r.est_bpm);
      ref.push_back(r.ref_bpm);
    }
    if (!present) continue;
    MethodAggregate a;
    a.method = m;
    a.n_complete = est.size();
    if (!est.empty()) {
      a.rmse_bpm = rmse(est, ref);
      a.accuracy_pct = accuracy_percent(est, ref);
    } else {
      a.rmse_bpm = std::numeric_limits<double>::quiet_NaN();
      a.accuracy_pct = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(a);
  }
  return out;
}

const MethodAggregate* EvalReport::find(Method m) const {
  for (const auto& a : aggregates) {
    if (a.method == m) return &a;
  }
  return nullptr;
}

std::uint64_t subject_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 step keeps neighbouring subjects' streams unrelated.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

EvalReport run_cohort(const std::vector<SubjectRecord>& records, const std::vector<Method>& methods,
                      std::uint64_t seed, const PipelineConfig& cfg, unsigned threads) {
  if (records.empty()) throw InvalidArgument("run_cohort: empty cohort");
  if (methods.empty()) throw InvalidArgument("run_cohort: no methods requested");
  cfg.validate();

  std::vector<std::vector<ReportRow>> per_subject(records.size());
  auto run_subject = [&](std::size_t i) {
    const SubjectRecord& rec = records[i];
    std::vector<ReportRow>& rows = per_subject[i];
    auto blank = [&](Method m) {
      ReportRow r;
      r.id = rec.id;
      r.method = m;
      r.ref_bpm = rec.reference_bpm;
      return r;
    };
    PhaseSeries phase;
    try {
      rec.validate();
      phase = load_subject_phase(rec, cfg);
    } catch (const std::exception& e) {
      for (const Method m : methods) {
        ReportRow r = blank(m);
        r.error = e.what();
        rows.push_back(r);
      }
      return;
    }
    for (const Method m : methods) {
      ReportRow r = blank(m);
      try {
        const MethodOutput out = run_method(m, phase, cfg, subject_seed(seed, i));
        r.est_bpm = out.estimate.bpm;
        r.abs_error = std::abs(r.est_bpm - r.ref_bpm);
        r.low_confidence = out.estimate.low_confidence;
        r.complete = true;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      rows.push_back(r);
    }
  };

  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(records.size())));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) run_subject(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < records.size(); i = next++) run_subject(i);
      });
    }
  }

  EvalReport report;
  for (auto& rows : per_subject) report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  report.aggregates = EvalReport::aggregate(report.rows);
  return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["accuracy_definition"] = kAccuracyDefinition;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json row{{"id", r.id}, {"method", method_name(r.method)}, {"ref_bpm", r.ref_bpm}, {"complete", r.complete}};
    if (r.complete) {
      row["est_bpm"] = r.est_bpm;
      row["abs_error"] = r.abs_error;
      row["low_confidence"] = r.low_confidence;
    } else {
      row["est_bpm"] = nullptr;
      row["abs_error"] = nullptr;
      row["error"] = r.error;
    }
    j["rows"].push_back(row);
  }
  j["aggregates"] = nlohmann::json::array();
  for (const auto& a : report.aggregates) {
    nlohmann::json agg{{"method", method_name(a.method)}, {"n_complete", a.n_complete}};
    agg["rmse_bpm"] = a.n_complete ? nlohmann::json(a.rmse_bpm) : nlohmann::json(nullptr);
    agg["accuracy_pct"] = a.n_complete ? nlohmann::json(a.accuracy_pct) : nlohmann::json(nullptr);
    j["aggregates"].push_back(agg);
  }
  return j;
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream os;
  os << "Heart rate estimation results\n";
  os << "Accuracy: " << kAccuracyDefinition << "\n\n";
  os << std::left << std::setw(12) << "Method" << std::right << std::setw(12) << "RMSE (bpm)" << std::setw(16)
     << "Accuracy (%)" << std::setw(10) << "Complete" << '\n';
  os << std::fixed << std::setprecision(3);
  for (const auto& a : report.aggregates) {
    os << std::left << std::setw(12) << method_name(a.method) << std::right;
    if (a.n_complete) {
      os << std::setw(12) << a.rmse_bpm << std::setw(16) << a.accuracy_pct;
    } else {
      os << std::setw(12) << "-" << std::setw(16) << "-";
    }
    os << std::setw(10) << a.n_complete << '\n';
  }
  os << "\nPer subject\n";
  os << std::left << std::setw(16) << "Subject" << std::setw(12) << "Method" << std::right << std::setw(10) << "Est"
     << std::setw(10) << "Ref" << std::setw(10) << "|Err|" << '\n';
  for (const auto& r : report.rows) {
    os << std::left << std::setw(16) << r.id << std::setw(12) << method_name(r.method) << std::right;
    if (r.complete) {
      os << std::setw(10) << r.est_bpm << std::setw(10) << r.ref_bpm << std::setw(10) << r.abs_error;
      if (r.low_confidence) os << "  (low confidence)";
    } else {
      os << std::setw(10) << "-" << std::setw(10) << r.ref_bpm << std::setw(10) << "-" << "  error: " << r.error;
    }
    os << '\n';
  }
  return os.str();
}

std::string abs_error_csv(const EvalReport& report) {
  std::vector<Method> methods;
  std::vector<std::string> ids;
  for (const auto& r : report.rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    if (std::find(ids.begin(), ids.end(), r.id) == ids.end()) ids.push_back(r.id);
  }
  std::ostringstream os;
  os << "id";
  for (const Method m : methods) os << ',' << method_name(m);
  os << '\n' << std::setprecision(12);
  for (const auto& id : ids) {
    os << id;
    for (const Method m : methods) {
      os << ',';
      for (const auto& r : report.rows) {
        if (r.id == id && r.method == m && r.complete) os << r.abs_error;
      }
    }
    os << '\n';
  }
  return os.str();
}

DisplacementTrace SyntheticSubject::trace(const RadarConfig& radar, const CohortSpec& spec) const {
  const auto n = static_cast<Index>(std::llround(spec.duration_s * radar.slow_time_rate_hz));
  DisplacementTrace tr;
  tr.rate_hz = radar.slow_time_rate_hz;
  tr.base_range_m = spec.base_range_m;
  tr.samples.resize(n);
  const double two_pi = 2.0 * std::numbers::pi;
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / radar.slow_time_rate_hz;
    tr.samples(i) = cardiac_amp_m * std::sin(two_pi * cardiac_hz * t + cardiac_phase) +
                    resp_amp_m * std::sin(two_pi * resp_hz * t + resp_phase);
  }
  return tr;
}

std::vector<SyntheticSubject> draw_cohort(std::size_t n_subjects, std::uint64_t seed, const CohortSpec& spec) {
  if (n_subjects < 1) throw InvalidArgument("draw_cohort: need at least one subject");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const std::array<double, 2>& r) { return r[0] + (r[1] - r[0]) * unit(rng); };
  std::vector<SyntheticSubject> out(n_subjects);
  for (std::size_t i = 0; i < n_subjects; ++i) {
    SyntheticSubject& s = out[i];
    std::ostringstream id;
    id << "subject_" << std::setw(2) << std::setfill('0') << i + 1;
    s.id = id.str();
    s.cardiac_hz = draw(spec.cardiac_hz);
    s.cardiac_amp_m = draw(spec.cardiac_amp_m);
    s.cardiac_phase = 2.0 * std::numbers::pi * unit(rng);
    s.resp_hz = draw(spec.resp_hz);
    s.resp_amp_m = draw(spec.resp_amp_m);
    s.resp_phase = 2.0 * std::numbers::pi * unit(rng);
    s.snr_db = draw(spec.snr_db);
    s.noise_seed = rng();
  }
  return out;
}

IQCube synthesize_subject(const SyntheticSubject& s, const RadarConfig& radar, const CohortSpec& spec) {
  return synthesize_iq(s.trace(radar, spec), radar, s.snr_db, s.noise_seed);
}

std::vector<SubjectRecord> synth_cohort(std::size_t n_subjects, std::uint64_t seed, const CohortSpec& spec,
                                        const PipelineConfig& cfg) {
  std::vector<SubjectRecord> out;
  for (const SyntheticSubject& s : draw_cohort(n_subjects, seed, spec)) {
    SubjectRecord rec;
    rec.id = s.id;
    rec.reference_bpm = s.reference_bpm();
    rec.duration_s = spec.duration_s;
    rec.source = extract_phase(synthesize_subject(s, cfg.radar_config, spec), cfg.decimate_to_hz).phase;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<SubjectRecord> read_manifest(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  const std::filesystem::path base = path.parent_path();
  if (!j.is_object() || !j.contains("subjects") || !j.at("subjects").is_array()) {
    throw DataError(path.string() + ": manifest needs a 'subjects' array");
  }
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  std::vector<SubjectRecord> out;
  for (const auto& e : j.at("subjects")) {
    if (!e.is_object()) throw DataError(path.string() + ": subject entry must be an object");
    for (const auto& [key, _] : e.items()) {
      if (key != "id" && key != "ref_bpm" && key != "phase_csv" && key != "iq_bin" && key != "sidecar" && key != "duration_s") {
        throw DataError(path.string() + ": unknown subject key '" + key + "'");
      }
    }
    SubjectRecord rec;
    try {
      rec.id = e.at("id").get<std::string>();
      rec.reference_bpm = e.at("ref_bpm").get<double>();
      if (e.contains("duration_s")) rec.duration_s = e.at("duration_s").get<double>();
      if (e.contains("phase_csv")) {
        rec.source = PhaseCsvSource{resolve(e.at("phase_csv").get<std::string>())};
      } else if (e.contains("iq_bin") && e.contains("sidecar")) {
        rec.source = IqSource{resolve(e.at("iq_bin").get<std::string>()), resolve(e.at("sidecar").get<std::string>())};
      } else {
        throw DataError("subject needs phase_csv or iq_bin + sidecar");
      }
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(path.string() + ": bad subject entry: " + ex.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

nlohmann::json manifest_entry(const SubjectRecord& rec, const std::filesystem::path& relative_to) {
  nlohmann::json e{{"id", rec.id}, {"ref_bpm", rec.reference_bpm}};
  if (rec.duration_s) e["duration_s"] = *rec.duration_s;
  auto rel = [&](const std::filesystem::path& p) { return std::filesystem::relative(p, relative_to).generic_string(); };
  if (const auto* csv = std::get_if<PhaseCsvSource>(&rec.source)) {
    e["phase_csv"] = rel(csv->path);
  } else if (const auto* iq = std::get_if<IqSource>(&rec.source)) {
    e["iq_bin"] = rel(iq->bin_path);
    e["sidecar"] = rel(iq->sidecar_path);
  } else {
    throw InvalidArgument("manifest_entry: in-memory subject has no file");
  }
  return e;
}

}  // namespace radarhr
