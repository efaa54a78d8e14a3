// radarhr: synthetic cohorts, phase extraction, single-subject estimates,
// cohort evaluation and figure data from one binary.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "radarhr/config.hpp"
#include "radarhr/errors.hpp"
#include "radarhr/evaluation.hpp"
#include "radarhr/filters.hpp"
#include "radarhr/io.hpp"

using namespace radarhr;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return PipelineConfig{};
  nlohmann::json j;
  try {
    j = read_json_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return pipeline_config_from_json(j);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

// Phase from either a CSV or an IQ capture, at the configured analysis rate.
PhaseSeries input_phase(const std::string& phase_csv, const std::string& iq_bin, const std::string& sidecar,
                        const PipelineConfig& cfg) {
  SubjectRecord rec;
  rec.id = "input";
  rec.reference_bpm = 60;
  if (!phase_csv.empty()) {
    rec.source = PhaseCsvSource{phase_csv};
  } else if (!iq_bin.empty() && !sidecar.empty()) {
    rec.source = IqSource{iq_bin, sidecar};
  } else {
    throw ConfigError("give --phase, or --iq with --sidecar");
  }
  return load_subject_phase(rec, cfg);
}

struct SynthArgs {
  std::string out;
  std::string config;
  std::string trace;
  std::string format = "iq";
  std::size_t n = 18;
  std::uint64_t seed = 1;
  double snr_min = 5, snr_max = 20;
  double duration = 60;
};

int run_synth(const SynthArgs& a) {
  const PipelineConfig cfg = load_config(a.config);
  const fs::path out(a.out);
  ensure_dir(out);

  if (!a.trace.empty()) {
    const DisplacementTrace tr = read_trace_csv(a.trace, CohortSpec{}.base_range_m);
    write_iq(out / "trace.bin", out / "trace.json",
             synthesize_iq(tr, cfg.radar_config, std::optional<double>(a.snr_max), a.seed));
    std::cout << "wrote " << (out / "trace.bin").string() << '\n';
    return kOk;
  }

  if (a.format != "iq" && a.format != "phase") throw ConfigError("--format must be iq or phase");
  CohortSpec spec;
  spec.snr_db = {a.snr_min, a.snr_max};
  spec.duration_s = a.duration;
  if (!(a.snr_min <= a.snr_max)) throw ConfigError("--snr-min must not exceed --snr-max");
  if (!(a.duration > 0)) throw ConfigError("--duration must be positive");

  nlohmann::json manifest{{"subjects", nlohmann::json::array()}};
  nlohmann::json truth = nlohmann::json::object();
  for (const SyntheticSubject& s : draw_cohort(a.n, a.seed, spec)) {
    SubjectRecord rec;
    rec.id = s.id;
    rec.reference_bpm = s.reference_bpm();
    rec.duration_s = spec.duration_s;
    const IQCube cube = synthesize_subject(s, cfg.radar_config, spec);
    if (a.format == "iq") {
      const fs::path bin = out / (s.id + ".bin");
      const fs::path side = out / (s.id + ".json");
      write_iq(bin, side, cube);
      rec.source = IqSource{bin, side};
    } else {
      const fs::path csv = out / (s.id + "_phase.csv");
      write_phase_csv(csv, extract_phase(cube, cfg.decimate_to_hz).phase);
      rec.source = PhaseCsvSource{csv};
    }
    manifest["subjects"].push_back(manifest_entry(rec, out));
    truth[s.id] = {{"cardiac_hz", s.cardiac_hz}, {"cardiac_amp_m", s.cardiac_amp_m}, {"resp_hz", s.resp_hz},
                   {"resp_amp_m", s.resp_amp_m}, {"snr_db", s.snr_db}};
    std::cout << s.id << " ref_bpm " << rec.reference_bpm << '\n';
  }
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  write_text_file(out / "truth.json", truth.dump(2) + "\n");
  std::cout << "wrote " << (out / "manifest.json").string() << '\n';
  return kOk;
}

struct ExtractArgs {
  std::string iq, sidecar, out, config;
  std::optional<double> rate;
};

int run_extract(const ExtractArgs& a) {
  PipelineConfig cfg = load_config(a.config);
  if (a.rate) cfg.decimate_to_hz = *a.rate;
  const IQCube cube = read_iq(a.iq, a.sidecar);
  if (cube.empty()) throw DataError(a.iq + ": no chirps");
  const PhaseExtraction ex = extract_phase(cube, cfg.decimate_to_hz);
  write_phase_csv(a.out, ex.phase);
  std::cout << "range bin " << ex.selection.bin << " (peak/mean " << ex.selection.peak_to_mean_db << " dB"
            << (ex.selection.low_confidence ? ", low confidence" : "") << ")\n"
            << ex.phase.size() << " samples at " << ex.phase.rate_hz << " Hz -> " << a.out << '\n';
  return kOk;
}

struct EstimateArgs {
  std::string phase, iq, sidecar, config, method = "nrbo-vmd";
  std::string imfs_out, peaks_out, trace_out;
  std::uint64_t seed = 1;
  bool json = false;
};

int run_estimate(const EstimateArgs& a) {
  const PipelineConfig cfg = load_config(a.config);
  const Method method = parse_method(a.method);
  const PhaseSeries phase = input_phase(a.phase, a.iq, a.sidecar, cfg);
  const MethodOutput out = run_method(method, phase, cfg, a.seed);
  const BpmEstimate& est = out.estimate;

  if (!a.imfs_out.empty() || !a.peaks_out.empty()) {
    if (method == Method::BpfFft) throw ConfigError("--imfs and --peaks need a VMD-based method");
    VmdParams p = cfg.vmd_params;
    ImfSet<double> imfs;
    CmsSignal<double> cms;
    if (out.fit) {
      p.k_modes = out.fit->best.k_modes;
      p.alpha = out.fit->best.alpha;
      imfs = out.fit->imfs;
      cms = out.fit->cms;
    } else {
      imfs = decompose(phase.phase, phase.rate_hz, p);
      cms = reconstruct(imfs, select_cardiac_modes(imfs, cfg.band_spec));
    }
    if (!a.imfs_out.empty()) write_imfs_csv(a.imfs_out, imfs, p);
    if (!a.peaks_out.empty()) write_peaks_csv(a.peaks_out, cms.signal, est.peak_indices, phase.rate_hz);
  }
  if (!a.trace_out.empty()) {
    if (!out.fit) throw ConfigError("--trace needs an optimizer-driven method");
    std::ofstream os(a.trace_out);
    if (!os) throw DataError("cannot open " + a.trace_out);
    write_optimizer_trace(os, out.fit->search);
  }

  if (a.json) {
    nlohmann::json j{{"method", est.method_tag},
                     {"bpm", est.bpm},
                     {"peaks", est.peak_indices.size()},
                     {"low_confidence", est.low_confidence},
                     {"empty_band", est.empty_band}};
    j["ibi_median_bpm"] = std::isnan(est.ibi_median_bpm) ? nlohmann::json(nullptr) : nlohmann::json(est.ibi_median_bpm);
    if (out.fit) {
      j["k_modes"] = out.fit->best.k_modes;
      j["alpha"] = out.fit->best.alpha;
      j["fitness"] = out.fit->best.fitness;
      j["evaluations"] = out.fit->search.evaluations;
    }
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << est.method_tag << ": " << est.bpm << " bpm";
    if (method != Method::BpfFft) std::cout << " (" << est.peak_indices.size() << " peaks)";
    if (est.empty_band) std::cout << ", no mode in band";
    else if (est.low_confidence) std::cout << ", low confidence";
    std::cout << '\n';
    if (out.fit) {
      std::cout << "K = " << out.fit->best.k_modes << ", alpha = " << out.fit->best.alpha
                << ", sample entropy = " << out.fit->best.fitness << '\n';
    }
  }
  return kOk;
}

struct EvalArgs {
  std::string manifest, out, config;
  std::vector<std::string> methods;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

int run_eval(const EvalArgs& a) {
  const PipelineConfig cfg = load_config(a.config);
  std::vector<Method> methods;
  if (a.methods.empty()) methods.assign(kAllMethods.begin(), kAllMethods.end());
  for (const auto& m : a.methods) methods.push_back(parse_method(m));
  const std::vector<SubjectRecord> records = read_manifest(a.manifest);
  const EvalReport report = run_cohort(records, methods, a.seed, cfg, a.threads);
  const std::string text = report_to_text(report);
  std::cout << text;
  if (!a.out.empty()) {
    const fs::path out(a.out);
    ensure_dir(out);
    write_text_file(out / "report.json", report_to_json(report).dump(2) + "\n");
    write_text_file(out / "report.txt", text);
    write_text_file(out / "abs_error.csv", abs_error_csv(report));
  }
  return kOk;
}

struct PlotArgs {
  std::string phase, iq, sidecar, report, out, config;
  std::uint64_t seed = 1;
};

// Magnitude spectra of the reconstructed CMS for each VMD-based method.
void write_spectra(const PhaseSeries& phase, const PipelineConfig& cfg, std::uint64_t seed, const fs::path& path) {
  const std::vector<Method> methods{Method::NrboVmd, Method::GaVmd, Method::Vmd};
  std::vector<SeriesD> spectra;
  const Index nfft = next_pow2(std::max(phase.size(), static_cast<Index>(std::ceil(phase.rate_hz / 0.01))));
  for (const Method m : methods) {
    MethodOutput out = run_method(m, phase, cfg, seed);
    SeriesD cms;
    if (out.fit) {
      cms = out.fit->cms.signal;
    } else {
      const ImfSet<double> imfs = decompose(phase.phase, phase.rate_hz, cfg.vmd_params);
      cms = reconstruct(imfs, select_cardiac_modes(imfs, cfg.band_spec)).signal;
    }
    SeriesD mag = magnitude_spectrum(cms, nfft);
    if (mag.maxCoeff() > 0) mag /= mag.maxCoeff();
    spectra.push_back(std::move(mag));
  }
  std::ostringstream os;
  os << "freq_hz";
  for (const Method m : methods) os << ',' << method_name(m);
  os << '\n' << std::setprecision(10);
  const double df = phase.rate_hz / static_cast<double>(nfft);
  for (Index b = 0; b < spectra.front().size(); ++b) {
    const double f = static_cast<double>(b) * df;
    if (f > 2.0 * cfg.band_spec.high_hz) break;
    os << f;
    for (const auto& s : spectra) os << ',' << s(b);
    os << '\n';
  }
  write_text_file(path, os.str());
}

void write_error_table(const fs::path& report_path, const fs::path& path) {
  const nlohmann::json j = read_json_file(report_path);
  if (!j.contains("rows") || !j.at("rows").is_array()) throw DataError(report_path.string() + ": no rows array");
  EvalReport report;
  try {
    for (const auto& r : j.at("rows")) {
      ReportRow row;
      row.id = r.at("id").get<std::string>();
      row.method = parse_method(r.at("method").get<std::string>());
      row.ref_bpm = r.at("ref_bpm").get<double>();
      row.complete = r.at("complete").get<bool>();
      if (row.complete) {
        row.est_bpm = r.at("est_bpm").get<double>();
        row.abs_error = r.at("abs_error").get<double>();
      }
      report.rows.push_back(row);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(report_path.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(report_path.string() + ": " + e.what());
  }
  write_text_file(path, abs_error_csv(report));
}

int run_plotdata(const PlotArgs& a) {
  const PipelineConfig cfg = load_config(a.config);
  const bool spectra = !a.phase.empty() || !a.iq.empty();
  if (!spectra && a.report.empty()) throw ConfigError("give --phase/--iq for spectra and/or --report for errors");
  const fs::path out(a.out);
  ensure_dir(out);
  if (spectra) {
    write_spectra(input_phase(a.phase, a.iq, a.sidecar, cfg), cfg, a.seed, out / "cms_spectra.csv");
    std::cout << "wrote " << (out / "cms_spectra.csv").string() << '\n';
  }
  if (!a.report.empty()) {
    write_error_table(a.report, out / "abs_error.csv");
    std::cout << "wrote " << (out / "abs_error.csv").string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar heart-rate estimation with optimizer-tuned VMD"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Write a synthetic cohort (IQ captures or phase CSVs) and its manifest");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("-n,--subjects", synth.n, "Number of subjects")->check(CLI::PositiveNumber);
  s->add_option("--seed", synth.seed, "Cohort seed");
  s->add_option("--snr-min", synth.snr_min, "Lowest per-sample SNR in dB");
  s->add_option("--snr-max", synth.snr_max, "Highest per-sample SNR in dB (also the SNR used with --trace)");
  s->add_option("--duration", synth.duration, "Seconds per subject");
  s->add_option("--format", synth.format, "iq or phase")->check(CLI::IsMember({"iq", "phase"}));
  s->add_option("--trace", synth.trace, "Displacement CSV (t_s,value in m) to turn into one IQ capture");
  s->add_option("--config", synth.config, "Pipeline config JSON");

  ExtractArgs extract;
  auto* x = app.add_subcommand("extract", "IQ capture -> unwrapped, decimated phase CSV");
  x->add_option("--iq", extract.iq, "IQ binary")->required();
  x->add_option("--sidecar", extract.sidecar, "JSON sidecar with the radar config")->required();
  x->add_option("--out", extract.out, "Phase CSV to write")->required();
  x->add_option("--rate", extract.rate, "Output rate in Hz (defaults to decimate_to_hz)");
  x->add_option("--config", extract.config, "Pipeline config JSON");

  EstimateArgs estimate;
  auto* e = app.add_subcommand("estimate", "Heart rate of one subject with one method");
  e->add_option("--phase", estimate.phase, "Phase CSV");
  e->add_option("--iq", estimate.iq, "IQ binary (with --sidecar)");
  e->add_option("--sidecar", estimate.sidecar, "IQ sidecar JSON");
  e->add_option("--method", estimate.method, "nrbo-vmd | ga-vmd | vmd | bpf")
      ->check(CLI::IsMember({"nrbo-vmd", "ga-vmd", "vmd", "bpf"}));
  e->add_option("--seed", estimate.seed, "Optimizer seed");
  e->add_option("--config", estimate.config, "Pipeline config JSON");
  e->add_option("--imfs", estimate.imfs_out, "Write the modes of the chosen decomposition to this CSV");
  e->add_option("--peaks", estimate.peaks_out, "Write detected peaks to this CSV");
  e->add_option("--trace", estimate.trace_out, "Write the optimizer trace (JSON lines) here");
  e->add_flag("--json", estimate.json, "Print the result as JSON");

  EvalArgs eval;
  auto* v = app.add_subcommand("eval", "Run methods over a manifest and report RMSE / accuracy");
  v->add_option("--manifest", eval.manifest, "Cohort manifest JSON")->required();
  v->add_option("--out", eval.out, "Directory for report.json, report.txt and abs_error.csv");
  v->add_option("--methods", eval.methods, "Subset of methods (default: all four)")
      ->delimiter(',')
      ->check(CLI::IsMember({"nrbo-vmd", "ga-vmd", "vmd", "bpf"}));
  v->add_option("--seed", eval.seed, "Base seed; each subject derives its own");
  v->add_option("--threads", eval.threads, "Subjects evaluated concurrently")->check(CLI::PositiveNumber);
  v->add_option("--config", eval.config, "Pipeline config JSON");

  PlotArgs plot;
  auto* p = app.add_subcommand("plotdata", "CSV data for the CMS spectrum comparison and the absolute-error chart");
  p->add_option("--phase", plot.phase, "Phase CSV of the subject to plot spectra for");
  p->add_option("--iq", plot.iq, "IQ binary (with --sidecar)");
  p->add_option("--sidecar", plot.sidecar, "IQ sidecar JSON");
  p->add_option("--report", plot.report, "report.json from eval");
  p->add_option("--out", plot.out, "Output directory")->required();
  p->add_option("--seed", plot.seed, "Optimizer seed");
  p->add_option("--config", plot.config, "Pipeline config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return run_synth(synth);
    if (*x) return run_extract(extract);
    if (*e) return run_estimate(estimate);
    if (*v) return run_eval(eval);
    if (*p) return run_plotdata(plot);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kUsage;
  } catch (const DataError& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return kData;
  } catch (const InvalidArgument& err) {
    std::cerr << "invalid input: " << err.what() << '\n';
    return kData;
  } catch (const CapacityError& err) {
    std::cerr << "too large: " << err.what() << '\n';
    return kData;
  } catch (const NumericalError& err) {
    std::cerr << "numerical failure: " << err.what() << '\n';
    return kNumerical;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
