#pragma once

// File formats for clouds, graphs, spectra and convergence reports.

#include "lapeig/graph.hpp"
#include "lapeig/harness.hpp"
#include "lapeig/spectral.hpp"

#include "json.hpp"

#include <string>

namespace lapeig {

enum class ReportFormat { CSV, JSON };

ReportFormat parse_format(std::string_view text);

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

nlohmann::json cloud_to_json(const PointCloud& cloud);
PointCloud cloud_from_json(const nlohmann::json& j);

/// {n, eps, kernel, m, metric, triplets: [[i, j, k_ij], ...]}
nlohmann::json graph_to_json(const NeighborhoodGraph& graph);
NeighborhoodGraph graph_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Header `n,trial,k,eps,raw,rescaled,target,rel_error` and one line per row.
std::string report_csv(const ConvergenceReport& report);
nlohmann::json report_to_json(const ConvergenceReport& report);
ConvergenceReport report_from_json(const nlohmann::json& j);

/// Writes CSV or JSON; IoFailure when the path cannot be written.
void emit_report(const ConvergenceReport& report, const std::string& path, ReportFormat format);
ConvergenceReport read_report_json(const std::string& path);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Build identification baked in at configure time.
const char* git_describe() noexcept;

}  // namespace lapeig
