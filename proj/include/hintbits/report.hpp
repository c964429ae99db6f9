#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hintbits/experiments.hpp"

namespace hintbits {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance attached to every report. Entries keep insertion order so the
// rendered bytes depend only on what was recorded.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> inputs;  // path -> sha256
  std::string tool_version = kToolVersion;
  std::optional<double> wall_clock_seconds;

  void set(std::string key, std::string value);
  void add_input(std::string path, std::string digest);
};

std::string sha256_file(const std::filesystem::path& path);
// Digest over every regular file below `root`, in sorted relative-path order.
std::string sha256_tree(const std::filesystem::path& root);
std::string sha256_path(const std::filesystem::path& path);

// Shortest representation that round-trips; "nan"/"inf" for non-finite.
std::string format_number(double x);

enum class ReportFormat { kCsv, kJson, kMarkdown };

inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      "subset",    "g",         "skipped",  "soft_acc1", "soft_acc2",
      "hard_acc1", "hard_acc2", "delta_i1", "delta_i2",  "i0"};
  return cols;
}

std::string render_eval_report(const RunManifest& manifest,
                               std::span<const SubsetReport> rows,
                               ReportFormat format);

std::string render_curve_csv(const RunManifest& manifest,
                             std::span<const CurvePoint> curve);

struct ModelSummary {
  CoarseModelParams params;
  OffsetOnlyResult result;
};
std::string render_model_summary(const RunManifest& manifest,
                                 const ModelSummary& summary);

// The loaded-dice walkthrough: a fair-looking guess, a helpful first hint and
// a misleading second hint.
struct DiceWalkthrough {
  double i0 = 0.0, i1 = 0.0, i2 = 0.0;
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0;
  double delta_i1 = 0.0, delta_i2 = 0.0;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
};
DiceWalkthrough compute_dice_walkthrough();
std::string render_dice_walkthrough(const DiceWalkthrough& w);

}  // namespace hintbits
