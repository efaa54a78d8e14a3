#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "radarhr/config.hpp"
#include "radarhr/heart_rate.hpp"
#include "radarhr/nrbo.hpp"
#include "radarhr/signal_model.hpp"

namespace radarhr {

enum class Method { NrboVmd, GaVmd, Vmd, BpfFft };

inline constexpr std::array<Method, 4> kAllMethods{Method::NrboVmd, Method::GaVmd, Method::Vmd, Method::BpfFft};

std::string_view method_name(Method m);
/// Accepts nrbo-vmd | ga-vmd | vmd | bpf.
Method parse_method(std::string_view name);

struct MethodOutput {
  BpmEstimate estimate;
  /// Set for the VMD-based methods.
  std::optional<VmdFit> fit;
};

MethodOutput run_method(Method method, const PhaseSeries& phase, const PipelineConfig& cfg, std::uint64_t seed);

double rmse(std::span<const double> est, std::span<const double> ref);

/// mean_i max(0, 1 - |est_i - ref_i| / ref_i) * 100.
double accuracy_percent(std::span<const double> est, std::span<const double> ref);

inline constexpr const char* kAccuracyDefinition =
    "accuracy_pct = mean over subjects of max(0, 1 - |est_bpm - ref_bpm| / ref_bpm) * 100 "
    "(interpretation: relative agreement per subject, floored at zero)";

struct PhaseCsvSource {
  std::filesystem::path path;
};

struct IqSource {
  std::filesystem::path bin_path;
  std::filesystem::path sidecar_path;
};

struct SubjectRecord {
  std::string id;
  std::variant<PhaseSeries, PhaseCsvSource, IqSource> source;
  double reference_bpm = 0.0;
  /// Analysis window; the loaded phase is cropped to it when longer.
  std::optional<double> duration_s;

  void validate() const;
};

/// Reads (or takes) the subject's phase, runs IQ through the radar chain when
/// needed, decimates to cfg.decimate_to_hz and crops to duration_s.
PhaseSeries load_subject_phase(const SubjectRecord& rec, const PipelineConfig& cfg);

struct ReportRow {
  std::string id;
  Method method = Method::NrboVmd;
  double est_bpm = 0.0;
  double ref_bpm = 0.0;
  double abs_error = 0.0;
  bool complete = false;
  bool low_confidence = false;
  std::string error;
};

struct MethodAggregate {
  Method method = Method::NrboVmd;
  double rmse_bpm = 0.0;
  double accuracy_pct = 0.0;
  std::size_t n_complete = 0;
};

struct EvalReport {
  std::vector<ReportRow> rows;
  std::vector<MethodAggregate> aggregates;

  /// Aggregates from the complete rows, one per method present, in kAllMethods order.
  static std::vector<MethodAggregate> aggregate(const std::vector<ReportRow>& rows);
  const MethodAggregate* find(Method m) const;
};

/// Seed used for the optimizers on the subject at manifest position `index`.
std::uint64_t subject_seed(std::uint64_t seed, std::size_t index);

/// Runs each requested method on each subject. A subject that fails to load
/// (or a method that throws) yields incomplete rows instead of aborting.
/// Subjects run on up to `threads` threads; rows are assembled in input order.
EvalReport run_cohort(const std::vector<SubjectRecord>& records, const std::vector<Method>& methods,
                      std::uint64_t seed, const PipelineConfig& cfg, unsigned threads = 1);

nlohmann::json report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);
/// id,<method>... absolute errors; empty cell for incomplete rows.
std::string abs_error_csv(const EvalReport& report);

/// Draw ranges for the synthetic cohort.
struct CohortSpec {
  std::array<double, 2> cardiac_hz{0.8, 1.8};
  std::array<double, 2> cardiac_amp_m{0.2e-3, 0.5e-3};
  std::array<double, 2> resp_hz{0.15, 0.4};
  std::array<double, 2> resp_amp_m{1e-3, 12e-3};
  std::array<double, 2> snr_db{5.0, 20.0};
  double base_range_m = 0.2;
  double duration_s = 60.0;
};

struct SyntheticSubject {
  std::string id;
  double cardiac_hz = 0, cardiac_amp_m = 0, cardiac_phase = 0;
  double resp_hz = 0, resp_amp_m = 0, resp_phase = 0;
  double snr_db = 0;
  std::uint64_t noise_seed = 0;

  double reference_bpm() const { return 60.0 * cardiac_hz; }
  DisplacementTrace trace(const RadarConfig& radar, const CohortSpec& spec) const;
};

std::vector<SyntheticSubject> draw_cohort(std::size_t n_subjects, std::uint64_t seed, const CohortSpec& spec = {});
IQCube synthesize_subject(const SyntheticSubject& s, const RadarConfig& radar, const CohortSpec& spec = {});

/// Synthetic cohort with in-memory phase (chest motion -> IQ -> phase -> decimation).
std::vector<SubjectRecord> synth_cohort(std::size_t n_subjects, std::uint64_t seed, const CohortSpec& spec,
                                        const PipelineConfig& cfg);

/// Manifest: {"subjects": [{"id", "ref_bpm", "phase_csv" | ("iq_bin", "sidecar"), "duration_s"?}]}.
/// Relative paths resolve against the manifest's directory.
std::vector<SubjectRecord> read_manifest(const std::filesystem::path& path);
nlohmann::json manifest_entry(const SubjectRecord& rec, const std::filesystem::path& relative_to);

}  // namespace radarhr
