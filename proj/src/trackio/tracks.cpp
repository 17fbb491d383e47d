#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pitchbench/trackio.h"

namespace pitchbench {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> ParseDouble(std::string_view s) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(Trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

PitchTrack ReadReferenceTrack(const std::filesystem::path& path, double hop_seconds) {
  std::ifstream in = OpenForRead(path);
  PitchTrack track;
  track.hop_seconds = hop_seconds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    const auto f0 = ParseDouble(first);
    if (!f0) throw ParseError(path.string(), line_no, "non-numeric f0 field '" + first + "'");
    if (*f0 < 0.0) throw ParseError(path.string(), line_no, "negative f0 " + first);
    track.f0_hz.push_back(*f0);
  }
  track.Validate();
  return track;
}

PitchTrack ReadExternalTrack(const std::filesystem::path& path, double confidence_threshold) {
  std::ifstream in = OpenForRead(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, header_line)) {
    ++line_no;
    if (!Trim(header_line).empty()) break;
  }
  header = SplitCommas(header_line);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto time_col = column("time_s");
  const auto f0_col = column("f0_hz");
  const auto conf_col = column("confidence");
  if (!f0_col) throw FormatError(path.string() + ": missing f0_hz column in header");
  if (!time_col) throw FormatError(path.string() + ": missing time_s column in header");

  std::vector<double> times;
  PitchTrack track;
  std::vector<double> confidence;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = SplitCommas(line);
    auto field = [&](std::size_t col, const char* name) {
      if (col >= fields.size()) {
        throw ParseError(path.string(), line_no, std::string("missing ") + name + " field");
      }
      const auto v = ParseDouble(fields[col]);
      if (!v) {
        throw ParseError(path.string(), line_no,
                         std::string("non-numeric ") + name + " '" + std::string(fields[col]) + "'");
      }
      return *v;
    };
    times.push_back(field(*time_col, "time_s"));
    double f0 = field(*f0_col, "f0_hz");
    if (f0 < 0.0) throw ParseError(path.string(), line_no, "negative f0");
    if (conf_col) {
      const double c = field(*conf_col, "confidence");
      if (c < 0.0 || c > 1.0) throw ParseError(path.string(), line_no, "confidence outside [0, 1]");
      if (c < confidence_threshold) f0 = 0.0;
      confidence.push_back(c);
    }
    track.f0_hz.push_back(f0);
  }

  if (times.size() >= 2) {
    const double hop = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(hop > 0.0)) throw FormatError(path.string() + ": timestamps must increase");
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double expected = times.front() + hop * static_cast<double>(i);
      if (std::abs(times[i] - expected) > kHopUniformityTolerance) {
        throw FormatError(path.string() + ": non-uniform timestamps near row " +
                          std::to_string(i + 1));
      }
    }
    track.hop_seconds = hop;
  }
  if (conf_col) track.confidence = std::move(confidence);
  track.Validate();
  return track;
}

void WriteTrack(const PitchTrack& track, const std::filesystem::path& path) {
  track.Validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << (track.confidence ? "frame,time_s,f0_hz,confidence\n" : "frame,time_s,f0_hz\n");
  char buf[128];
  for (std::size_t i = 0; i < track.size(); ++i) {
    const double t = static_cast<double>(i) * track.hop_seconds;
    int n = std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6g", i, t, track.f0_hz[i]);
    out.write(buf, n);
    if (track.confidence) {
      n = std::snprintf(buf, sizeof buf, ",%.6g", (*track.confidence)[i]);
      out.write(buf, n);
    }
    out.put('\n');
  }
  if (!out) throw IoError("write failed for " + path.string());
}

TrackSummary Summarize(const PitchTrack& track) {
  std::vector<double> voiced;
  for (double f : track.f0_hz) {
    if (f > 0.0) voiced.push_back(f);
  }
  TrackSummary s;
  s.voiced_frames = voiced.size();
  if (voiced.empty()) return s;
  std::sort(voiced.begin(), voiced.end());
  s.min_hz = voiced.front();
  s.max_hz = voiced.back();
  const std::size_t mid = voiced.size() / 2;
  s.median_hz = voiced.size() % 2 == 1 ? voiced[mid] : 0.5 * (voiced[mid - 1] + voiced[mid]);
  return s;
}

}  // namespace pitchbench
