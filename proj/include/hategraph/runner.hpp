#pragma once

#include <iosfwd>

#include "hategraph/config.hpp"

namespace hategraph::runner {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kResultsFile = "results.csv";
inline constexpr const char* kReportFile = "significance_report.md";

// Runs the full grid: ingestion, preprocessing, per-fold feature fitting,
// training, evaluation, significance report and manifest. Artifacts land in
// config.output_dir (which must not already contain files). Returns 0 iff
// every grid cell succeeded. `log` receives progress lines.
int run_experiment(const config::ExperimentConfig& config, std::ostream& log);

}  // namespace hategraph::runner
