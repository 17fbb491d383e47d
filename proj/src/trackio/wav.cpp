#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "pitchbench/trackio.h"

namespace pitchbench {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t ReadU32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool TagIs(const std::vector<std::uint8_t>& b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

void PutU16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xFF));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutU32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void PutTag(std::vector<std::uint8_t>& b, const char* tag) { b.insert(b.end(), tag, tag + 4); }

}  // namespace

AudioSignal ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());

  if (bytes.size() < 12) {
    throw FormatError(path.string() + ": truncated header, missing 'RIFF' chunk", bytes.size());
  }
  if (!TagIs(bytes, 0, "RIFF")) throw FormatError(path.string() + ": missing 'RIFF' chunk", 0);
  if (!TagIs(bytes, 8, "WAVE")) throw FormatError(path.string() + ": not a 'WAVE' file", 8);

  std::optional<FmtChunk> fmt;
  std::size_t fmt_offset = 0;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = ReadU32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (TagIs(bytes, pos, "fmt ")) {
      if (size < 16 || body + 16 > bytes.size()) {
        throw FormatError(path.string() + ": truncated 'fmt ' chunk", pos);
      }
      FmtChunk f;
      f.format = ReadU16(bytes, body);
      f.channels = ReadU16(bytes, body + 2);
      f.sample_rate = ReadU32(bytes, body + 4);
      f.bits = ReadU16(bytes, body + 14);
      if (f.format == kFormatExtensible) {
        if (size < 40 || body + 26 > bytes.size()) {
          throw FormatError(path.string() + ": truncated extensible 'fmt ' chunk", pos);
        }
        f.format = ReadU16(bytes, body + 24);
      }
      fmt = f;
      fmt_offset = body;
    } else if (TagIs(bytes, pos, "data")) {
      data_offset = body;
      // Streaming writers sometimes leave the size unset; clamp to the file.
      data_size = std::min<std::size_t>(size, bytes.size() - body);
      have_data = true;
      if (fmt) break;
    }
    pos = body + size + (size & 1U);
  }

  if (!fmt) throw FormatError(path.string() + ": missing 'fmt ' chunk", pos);
  if (!have_data) throw FormatError(path.string() + ": missing 'data' chunk", pos);

  const bool pcm = fmt->format == kFormatPcm &&
                   (fmt->bits == 16 || fmt->bits == 24 || fmt->bits == 32);
  const bool flt = fmt->format == kFormatFloat && fmt->bits == 32;
  if (!pcm && !flt) {
    throw FormatError(path.string() + ": unsupported codec (format tag " +
                          std::to_string(fmt->format) + ", " + std::to_string(fmt->bits) +
                          " bits)",
                      fmt_offset);
  }
  if (fmt->channels == 0) throw FormatError(path.string() + ": zero channels", fmt_offset + 2);
  if (fmt->sample_rate == 0) throw FormatError(path.string() + ": zero sample rate", fmt_offset + 4);

  const std::size_t width = fmt->bits / 8;
  const std::size_t frame_bytes = width * fmt->channels;
  const std::size_t n = data_size / frame_bytes;
  std::vector<double> samples(n);
  const double scale = pcm ? std::ldexp(1.0, fmt->bits - 1) : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t at = data_offset + i * frame_bytes;
    double v = 0.0;
    if (flt) {
      float f;
      std::uint32_t raw = ReadU32(bytes, at);
      std::memcpy(&f, &raw, sizeof f);
      v = static_cast<double>(f);
    } else if (width == 2) {
      v = static_cast<std::int16_t>(ReadU16(bytes, at));
    } else if (width == 3) {
      std::int32_t raw = bytes[at] | (bytes[at + 1] << 8) | (bytes[at + 2] << 16);
      if (raw & 0x800000) raw -= 0x1000000;
      v = raw;
    } else {
      v = static_cast<std::int32_t>(ReadU32(bytes, at));
    }
    samples[i] = v / scale;
    if (!std::isfinite(samples[i])) {
      throw FormatError(path.string() + ": non-finite sample", at);
    }
  }
  return AudioSignal(std::move(samples), fmt->sample_rate);
}

void WriteWav(const AudioSignal& signal, const std::filesystem::path& path, WavEncoding encoding) {
  std::uint16_t bits = 16;
  std::uint16_t format = kFormatPcm;
  switch (encoding) {
    case WavEncoding::kPcm16: bits = 16; break;
    case WavEncoding::kPcm24: bits = 24; break;
    case WavEncoding::kPcm32: bits = 32; break;
    case WavEncoding::kFloat32: bits = 32; format = kFormatFloat; break;
  }
  const std::size_t width = bits / 8;
  const auto data_size = static_cast<std::uint32_t>(signal.size() * width);

  std::vector<std::uint8_t> b;
  b.reserve(44 + data_size);
  PutTag(b, "RIFF");
  PutU32(b, 36 + data_size);
  PutTag(b, "WAVE");
  PutTag(b, "fmt ");
  PutU32(b, 16);
  PutU16(b, format);
  PutU16(b, 1);
  const auto rate = static_cast<std::uint32_t>(std::lround(signal.sample_rate_hz()));
  PutU32(b, rate);
  PutU32(b, rate * static_cast<std::uint32_t>(width));
  PutU16(b, static_cast<std::uint16_t>(width));
  PutU16(b, bits);
  PutTag(b, "data");
  PutU32(b, data_size);

  const double full_scale = std::ldexp(1.0, bits - 1);
  for (double x : signal.samples()) {
    if (format == kFormatFloat) {
      const auto f = static_cast<float>(x);
      std::uint32_t raw;
      std::memcpy(&raw, &f, sizeof raw);
      PutU32(b, raw);
      continue;
    }
    const double q = std::clamp(std::round(x * full_scale), -full_scale, full_scale - 1.0);
    const auto v = static_cast<std::int64_t>(q);
    for (std::size_t i = 0; i < width; ++i) {
      b.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace pitchbench
