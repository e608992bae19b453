#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nli/common.hpp"
#include "nli/forward.hpp"
#include "nli/reconstruct.hpp"
#include "nli/rng.hpp"
#include "nli/sample.hpp"
#include "nli/version.hpp"

// File formats. All binary payloads are little-endian; sample containers are
// a single file (magic + JSON header + raw float planes), frame stacks a
// directory of meta.json + frames.bin, reconstructed images a PGM/CSV pair
// with a JSON sidecar. Every writer goes through a temp-file + rename so
// partially written outputs never appear under their final name.

namespace nli {

namespace io_detail {

inline void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f32le(std::string& out, float f) {
  put_u32le(out, std::bit_cast<std::uint32_t>(f));
}

inline std::uint16_t get_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline float get_f32le(const unsigned char* p) {
  return std::bit_cast<float>(get_u32le(p));
}

}  // namespace io_detail

/// Writes bytes to path atomically (temp file in the same directory, then
/// rename).
inline void atomic_write_file(const std::filesystem::path& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + tmp.string());
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// FNV-1a digest of a file's bytes, as 16 hex characters. Used in run
/// manifests so inputs can be re-verified.
inline std::string file_digest(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
  return buf;
}

// ---------------------------------------------------------------------------
// Sample container: "NLISAMP1" | u32 header length | JSON header | raw planes
// (f32 LE, row-major, in header-declared field order; scatter stored as 0/1).
// ---------------------------------------------------------------------------

inline constexpr char kSampleMagic[] = "NLISAMP1";

inline void write_sample(const std::filesystem::path& path, const SampleMap& sample) {
  sample.validate();
  nlohmann::json header{{"width", sample.width},
                        {"height", sample.height},
                        {"pixel_pitch", sample.pixel_pitch},
                        {"fields", {"r", "tau", "height", "scatter"}},
                        {"seed", sample.seed},
                        {"immersion_index", sample.immersion_index},
                        {"name", sample.name}};
  const std::string hj = header.dump();

  std::string out;
  out.reserve(8 + 4 + hj.size() + sample.r.size() * 16);
  out.append(kSampleMagic, 8);
  io_detail::put_u32le(out, static_cast<std::uint32_t>(hj.size()));
  out.append(hj);
  auto put_plane_f = [&out](const Plane<float>& p) {
    for (float v : p.values()) io_detail::put_f32le(out, v);
  };
  put_plane_f(sample.r);
  put_plane_f(sample.tau);
  put_plane_f(sample.height_nm);
  for (std::uint8_t v : sample.scatter.values()) {
    io_detail::put_f32le(out, v ? 1.0f : 0.0f);
  }
  atomic_write_file(path, out);
}

inline SampleMap read_sample(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  if (bytes.size() < 12 || bytes.compare(0, 8, kSampleMagic, 8) != 0) {
    throw IoError("not a sample container (bad magic): " + path.string());
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t hlen = io_detail::get_u32le(p + 8);
  if (bytes.size() < 12 + static_cast<std::size_t>(hlen)) {
    throw IoError("sample header truncated at byte " + std::to_string(bytes.size()) +
                  ": " + path.string());
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(12, hlen));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("sample header is not valid JSON: " + path.string() + ": " + e.what());
  }

  SampleMap m;
  try {
    m.width = header.at("width").get<int>();
    m.height = header.at("height").get<int>();
    m.pixel_pitch = header.at("pixel_pitch").get<double>();
    m.seed = header.value("seed", std::uint64_t{0});
    m.immersion_index = header.value("immersion_index", 1.0);
    m.name = header.value("name", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw IoError("sample header incomplete: " + path.string() + ": " + e.what());
  }
  require(m.width > 0 && m.height > 0, "sample header has non-positive dimensions");

  const std::vector<std::string> fields =
      header.value("fields", std::vector<std::string>{"r", "tau", "height", "scatter"});
  const std::size_t npx = static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height);
  const std::size_t expected = 12 + hlen + fields.size() * npx * 4;
  if (bytes.size() != expected) {
    throw IoError("sample payload truncated: " + path.string() + ": expected " +
                  std::to_string(expected) + " bytes, got " + std::to_string(bytes.size()) +
                  " (payload ends at byte " + std::to_string(bytes.size()) + ")");
  }

  m.r = Plane<float>(m.width, m.height);
  m.tau = Plane<float>(m.width, m.height);
  m.height_nm = Plane<float>(m.width, m.height);
  m.scatter = Plane<std::uint8_t>(m.width, m.height);

  std::size_t off = 12 + hlen;
  auto read_plane_f = [&](Plane<float>& dst) {
    for (std::size_t i = 0; i < npx; ++i, off += 4) {
      dst[i] = io_detail::get_f32le(p + off);
    }
  };
  for (const std::string& f : fields) {
    if (f == "r") {
      read_plane_f(m.r);
    } else if (f == "tau") {
      read_plane_f(m.tau);
    } else if (f == "height") {
      read_plane_f(m.height_nm);
    } else if (f == "scatter") {
      for (std::size_t i = 0; i < npx; ++i, off += 4) {
        m.scatter[i] = io_detail::get_f32le(p + off) != 0.0f ? 1 : 0;
      }
    } else {
      throw IoError("sample header declares unknown field '" + f + "': " + path.string());
    }
  }
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// Frame stack: directory with meta.json and frames.bin (frame-major,
// row-major, u16 LE when quantized, f32 LE otherwise; meta declares which).
// ---------------------------------------------------------------------------

inline constexpr char kStackMagic[] = "NLISTACK1";

inline void write_stack(const std::filesystem::path& dir, const FrameStack& stack) {
  stack.validate();
  std::filesystem::create_directories(dir);

  nlohmann::json meta{{"magic", kStackMagic},
                      {"width", stack.width()},
                      {"height", stack.height()},
                      {"count", stack.count()},
                      {"dtype", stack.quantized ? "u16" : "f32"},
                      {"z_positions", stack.z_positions},
                      {"optics", stack.optics},
                      {"exposure_ms", stack.exposure_ms},
                      {"seed", stack.seed},
                      {"sample_id", stack.sample_id},
                      {"acquisition_seconds", stack.acquisition_seconds()}};
  if (stack.plan) meta["plan"] = *stack.plan;
  atomic_write_file(dir / "meta.json", meta.dump(2) + "\n");

  std::string bin;
  const std::size_t npx = static_cast<std::size_t>(stack.width()) *
                          static_cast<std::size_t>(stack.height());
  bin.reserve(stack.frames.size() * npx * (stack.quantized ? 2 : 4));
  for (const Frame& f : stack.frames) {
    for (double v : f.values()) {
      if (stack.quantized) {
        io_detail::put_u16le(bin, static_cast<std::uint16_t>(v));
      } else {
        io_detail::put_f32le(bin, static_cast<float>(v));
      }
    }
  }
  atomic_write_file(dir / "frames.bin", bin);
}

inline FrameStack read_stack(const std::filesystem::path& dir) {
  const std::filesystem::path meta_path = dir / "meta.json";
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file_bytes(meta_path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("stack metadata is not valid JSON: " + meta_path.string() + ": " +
                  e.what());
  }
  if (meta.value("magic", std::string{}) != kStackMagic) {
    throw IoError("not a frame stack (bad magic in meta.json): " + dir.string());
  }

  FrameStack stack;
  int width = 0, height = 0, count = 0;
  std::string dtype;
  try {
    width = meta.at("width").get<int>();
    height = meta.at("height").get<int>();
    count = meta.at("count").get<int>();
    dtype = meta.at("dtype").get<std::string>();
    meta.at("z_positions").get_to(stack.z_positions);
    meta.at("optics").get_to(stack.optics);
    stack.exposure_ms = meta.at("exposure_ms").get<double>();
    stack.seed = meta.value("seed", std::uint64_t{0});
    stack.sample_id = meta.value("sample_id", std::string{});
    if (meta.contains("plan")) stack.plan = meta.at("plan").get<ScanPlan>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("stack metadata incomplete: " + meta_path.string() + ": " + e.what());
  }
  require(width > 0 && height > 0 && count > 0, "stack metadata has non-positive shape");
  if (static_cast<int>(stack.z_positions.size()) != count) {
    throw IoError("stack metadata inconsistent: z_positions length " +
                  std::to_string(stack.z_positions.size()) + " != count " +
                  std::to_string(count) + ": " + meta_path.string());
  }
  if (dtype != "u16" && dtype != "f32") {
    throw IoError("stack dtype must be u16 or f32, got '" + dtype + "': " +
                  meta_path.string());
  }
  stack.quantized = dtype == "u16";

  const std::filesystem::path bin_path = dir / "frames.bin";
  const std::string bin = read_file_bytes(bin_path);
  const std::size_t npx = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t stride = stack.quantized ? 2 : 4;
  const std::size_t expected = npx * static_cast<std::size_t>(count) * stride;
  if (bin.size() != expected) {
    throw IoError("frames.bin truncated or oversized: " + bin_path.string() +
                  ": expected " + std::to_string(expected) + " bytes, got " +
                  std::to_string(bin.size()) + " (mismatch at byte offset " +
                  std::to_string(std::min(bin.size(), expected)) + ")");
  }

  const auto* p = reinterpret_cast<const unsigned char*>(bin.data());
  stack.frames.reserve(static_cast<std::size_t>(count));
  std::size_t off = 0;
  for (int k = 0; k < count; ++k) {
    Frame f(width, height);
    for (std::size_t i = 0; i < npx; ++i) {
      if (stack.quantized) {
        f[i] = static_cast<double>(io_detail::get_u16le(p + off));
        off += 2;
      } else {
        f[i] = static_cast<double>(io_detail::get_f32le(p + off));
        off += 4;
      }
    }
    stack.frames.push_back(std::move(f));
  }
  stack.validate();
  return stack;
}

// ---------------------------------------------------------------------------
// Image export: 16-bit PGM (min-max scaled; scale recorded in the sidecar),
// full-precision CSV, and a JSON sidecar. PGM sample bytes are big-endian per
// the netpbm convention.
// ---------------------------------------------------------------------------

struct ImageExportPaths {
  std::filesystem::path pgm, csv, sidecar;
};

inline ImageExportPaths export_image(const std::filesystem::path& dir,
                                     const std::string& stem, const ScalarImage& img) {
  require(img.width > 0 && img.height > 0, "cannot export an empty image");
  std::filesystem::create_directories(dir);

  double vmin = img.values[0], vmax = img.values[0];
  for (double v : img.values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const double span = vmax - vmin;

  std::string pgm;
  pgm += "P5\n";
  pgm += "# kind: " + std::string(to_string(img.kind)) + "\n";
  pgm += "# frames_used: " + std::to_string(img.frames_used) + "\n";
  pgm += "# normalized: " + std::string(img.normalized ? "1" : "0") + "\n";
  pgm += std::to_string(img.width) + " " + std::to_string(img.height) + "\n65535\n";
  for (double v : img.values) {
    const double t = span > 0.0 ? (v - vmin) / span : 0.0;
    const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    pgm.push_back(static_cast<char>((q >> 8) & 0xFF));  // MSB first
    pgm.push_back(static_cast<char>(q & 0xFF));
  }

  std::string csv;
  csv += "# kind: " + std::string(to_string(img.kind)) + "\n";
  csv += "# frames_used: " + std::to_string(img.frames_used) + "\n";
  csv += "# normalized: " + std::string(img.normalized ? "1" : "0") + "\n";
  csv += "# width: " + std::to_string(img.width) + "\n";
  csv += "# height: " + std::to_string(img.height) + "\n";
  char num[64];
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      std::snprintf(num, sizeof(num), "%.17g", img.at(x, y));
      csv += num;
      csv.push_back(x + 1 == img.width ? '\n' : ',');
    }
  }

  nlohmann::json sidecar{{"kind", to_string(img.kind)},
                         {"width", img.width},
                         {"height", img.height},
                         {"frames_used", img.frames_used},
                         {"normalized", img.normalized},
                         {"source", img.source},
                         {"value_min", vmin},
                         {"value_max", vmax},
                         {"pgm_maxval", 65535},
                         {"pgm_scale", span > 0.0 ? span / 65535.0 : 0.0},
                         {"flagged_count", img.flagged_count}};

  ImageExportPaths paths{dir / (stem + ".pgm"), dir / (stem + ".csv"),
                         dir / (stem + ".json")};
  atomic_write_file(paths.pgm, pgm);
  atomic_write_file(paths.csv, csv);
  atomic_write_file(paths.sidecar, sidecar.dump(2) + "\n");
  return paths;
}

// ---------------------------------------------------------------------------
// Run manifest: what was run, with which seed, on which inputs.
// ---------------------------------------------------------------------------

struct RunManifest {
  std::string tool_version = kVersion;
  std::vector<std::string> command_line;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;
  std::vector<std::string> outputs;
  double duration_ms = 0.0;
};

inline void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"tool_version", m.tool_version},
                     {"command_line", m.command_line},
                     {"seed", m.seed},
                     {"input_digests", m.input_digests},
                     {"outputs", m.outputs},
                     {"duration_ms", m.duration_ms}};
}

inline void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  nlohmann::json j = m;
  atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace nli
