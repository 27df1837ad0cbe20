#pragma once
// JSON configuration and report serialization for the command-line driver.
//
// Parsing is strict: unknown keys, wrong types, and out-of-range values are
// rejected with a ConfigError carrying the dotted path of the offending field
// so a caller can point at exactly what to fix.  Report serialization writes
// every measured floating-point value as a 17-significant-digit decimal
// string ("inf" / "-inf" / "nan" for the non-finite values, which JSON
// numbers cannot carry), so report bytes are identical across repeated runs
// of the same configuration and seed.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssrg/norm_domain.hpp"
#include "ssrg/pipeline.hpp"
#include "ssrg/verification.hpp"

namespace ssrg {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class RunMode { verify, bounds, greens, scaling };
enum class ReportFormat { json, csv };

RunMode parse_run_mode(const std::string& name);            // ConfigError("run.mode", ...)
ReportFormat parse_report_format(const std::string& name);  // ConfigError("run.format", ...)
const char* run_mode_name(RunMode mode);
const char* report_format_name(ReportFormat format);

// Interaction presets: a translation-invariant spatial potential built from a
// named shape and a couple of scalars.
struct InteractionSpec {
  std::string type = "nearest";  // "onsite" | "nearest" | "exponential"
  double v0 = 1.0;               // value at coincident points
  double v1 = 0.5;               // value one lattice step away (nearest only)
  double rate = 1.0;             // decay rate per unit distance (exponential only)
};

SpatialPotential make_potential(const InteractionSpec& spec, double dx);

struct RunOptions {
  RunMode mode = RunMode::verify;
  std::string out = ".";  // directory receiving report files
  ReportFormat format = ReportFormat::json;
  int m_max = 6;  // largest external-leg count reported (2, 4, or 6)
};

struct LoadedConfig {
  ModelConfig model;  // potential populated from the interaction preset
  InteractionSpec interaction;
  RunOptions run;
};

LoadedConfig default_loaded_config();
LoadedConfig parse_config(const std::string& text);
LoadedConfig load_config(const std::string& path);

// Canonical serialization: sorted keys, plain JSON numbers, two-space indent.
// parse_config round-trips it to the same effective configuration.
std::string config_text(const LoadedConfig& lc);
std::string default_config_text();

// FNV-1a 64-bit hex digest of the canonical form with the output directory
// removed, so the digest identifies the computation, not where it lands.
std::string config_digest(const LoadedConfig& lc);

// 17-significant-digit decimal; round-trips IEEE doubles exactly.
std::string fmt17(double x);
// Inverse of fmt17; throws std::invalid_argument on malformed text.
double parse17(const std::string& text);

// Coefficient-exact NormElement serialization; the reader checks the entry
// list against the supplied domain index by index.
std::string norm_element_json(const NormElement& x);
NormElement norm_element_from_json(const std::string& text, const SaturatedSetPtr& dom);

// Run descriptor embedded in every report.  Holds nothing time-dependent:
// repeated runs with one configuration and seed must emit identical bytes.
struct RunManifest {
  std::string version;
  std::string mode;
  std::string config_digest;
  std::uint64_t seed = 0;
  double epsilon = 1.0;
  std::string interaction;
  LatticeSpec lattice;
};

RunManifest make_manifest(const LoadedConfig& lc);

std::string verification_report_json(const std::vector<CheckResult>& checks,
                                     const RunManifest& m);
std::string verification_csv(const std::vector<CheckResult>& checks);

std::string bounds_report_json(const BoundsReport& br, const RunManifest& m);
std::string bounds_csv(const BoundsReport& br);

std::string greens_report_json(const GreensSet& gs, const std::vector<DeviationRow>& rows,
                               double lambda, int m_max, const RunManifest& m);
std::string deviation_rows_csv(const std::vector<DeviationRow>& rows);

std::string scaling_report_json(const ScalingResult& sr, const RunManifest& m);
std::string scaling_csv(const ScalingResult& sr);

}  // namespace ssrg
