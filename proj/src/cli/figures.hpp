#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pairchar/core_model.hpp"

namespace pairchar::cli {

struct FigureSpec {
  int id;
  MetricKind kind;
  /// Detector-free comparison curve, if the figure has one.
  std::optional<MetricKind> reference;
  /// Constant guide line (e.g. a classicality threshold).
  std::optional<double> guide;
  std::string guide_label;
};

inline constexpr int kFigureIds[] = {2, 4, 5, 7, 9, 11};
inline constexpr double kFigureEta = 1e-2;
inline constexpr double kFigureDarkCounts[] = {1e-6, 1e-5, 1e-4};

/// Throws UsageError for an unknown id.
const FigureSpec& figure_spec(int id);

/// 10^(-6 + i/40) for i < 240, then 0.99.
std::vector<double> figure_p_grid();

struct CurvePoint {
  double p;
  double value;
};

struct Curve {
  std::string file;
  std::string metric;
  std::optional<double> p_dc;  // empty for the reference curve
  std::vector<CurvePoint> points;
};

struct FigureData {
  FigureSpec spec;
  std::vector<Curve> curves;  // one per dark-count level, then the reference
  nlohmann::json manifest;
};

FigureData build_figure(int id);

/// Writes every curve CSV plus figure_<id>_manifest.json into out_dir.
/// Returns the written file names.
std::vector<std::string> write_figure(const FigureData& fig, const std::string& out_dir);

int cmd_figure(int id, const std::string& out_dir);

}  // namespace pairchar::cli
