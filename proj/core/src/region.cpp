#include "bcregion/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace bcregion {

std::string_view to_string(SourceTag tag) {
  switch (tag) {
    case SourceTag::Frontier: return "frontier";
    case SourceTag::Uncoded: return "uncoded";
    case SourceTag::Hybrid: return "hybrid";
    case SourceTag::GenieOuter: return "genie-outer";
    case SourceTag::Separation: return "separation";
    case SourceTag::TrivialAnalog: return "trivial-analog";
  }
  return "unknown";
}

void sort_by_d1(RegionCurve& curve) {
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const DistortionPoint& a, const DistortionPoint& b) { return a.d1 < b.d1; });
}

bool all_finite(const RegionCurve& curve) {
  return std::all_of(curve.points.begin(), curve.points.end(), [](const DistortionPoint& p) {
    return std::isfinite(p.d1) && std::isfinite(p.d2) && std::isfinite(p.param);
  });
}

std::string format_double(double value) {
  // Shortest round-trippable decimal: try increasing precision up to 17.
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == value) return buf;
  }
  return buf;
}

void atomic_write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_curve_csv(RegionCurve curve, const std::filesystem::path& path) {
  if (!all_finite(curve)) {
    throw std::invalid_argument("write_curve_csv: refusing to serialize non-finite values in '" +
                                curve.meta.scheme + "'");
  }
  sort_by_d1(curve);
  std::ostringstream out;
  out << "d1,d2,scheme,param\n";
  for (const auto& p : curve.points) {
    out << format_double(p.d1) << ',' << format_double(p.d2) << ',' << to_string(p.source_tag)
        << ',' << format_double(p.param) << '\n';
  }
  atomic_write_text(path, out.str());
}

}  // namespace bcregion
