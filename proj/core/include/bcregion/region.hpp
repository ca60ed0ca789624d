#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bcregion/model.hpp"

namespace bcregion {

enum class SourceTag {
  Frontier,
  Uncoded,
  Hybrid,
  GenieOuter,
  Separation,
  TrivialAnalog,
};

std::string_view to_string(SourceTag tag);

/// One achievable (or bounding) distortion pair, with the scheme that
/// produced it and the sweep parameter that generated it (d1 itself for
/// d1-indexed curves, alpha/lambda/beta_t for parametric ones).
struct DistortionPoint {
  double d1 = 0.0;
  double d2 = 0.0;
  SourceTag source_tag = SourceTag::Frontier;
  double param = 0.0;
};

struct CurveMeta {
  ProblemInstance instance{};
  std::string scheme;
  std::string grid;  // human-readable grid spec, e.g. "d1:400" or "lambda:200"
  std::uint64_t seed = 0;
  std::string version;
};

/// An ordered list of DistortionPoints sweeping d1, plus reproducibility
/// metadata. Serialized points are sorted by d1 ascending and must be finite.
struct RegionCurve {
  std::vector<DistortionPoint> points;
  CurveMeta meta;
};

void sort_by_d1(RegionCurve& curve);
bool all_finite(const RegionCurve& curve);

/// Shortest decimal form that round-trips a double (up to 17 significant
/// digits).
std::string format_double(double value);

/// Writes content to path via a temp file + rename so readers never observe
/// a partial file.
void atomic_write_text(const std::filesystem::path& path, std::string_view content);

/// CSV schema: header "d1,d2,scheme,param", one row per point. Sorts the
/// curve by d1 first and refuses non-finite values.
void write_curve_csv(RegionCurve curve, const std::filesystem::path& path);

}  // namespace bcregion
