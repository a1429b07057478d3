#ifndef KDSIM_HARNESS_FORMATS_HPP
#define KDSIM_HARNESS_FORMATS_HPP

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdsim/diagnostics.hpp"
#include "kdsim/errors.hpp"

// File formats. 1D spectra are CSV with a two-line header (axis kind +
// units, normalization). 2D arrays are raw little-endian float64,
// row-major, with a JSON sidecar carrying dimensions, spacings and
// units. Both are byte-deterministic for identical inputs, which the
// reproducibility contract relies on.

namespace kdsim {

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a64_hex(const std::string& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(s.data(), s.size())));
  return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(data.data(), std::streamsize(data.size()));
  if (!out) throw IoError("short write to " + path.string());
}

inline std::string checksum_file(const std::filesystem::path& path) {
  return fnv1a64_hex(read_file(path));
}

namespace detail {
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline const char* axis_kind_name(AxisKind k) {
  switch (k) {
    case AxisKind::k_transverse: return "k_transverse";
    case AxisKind::k_longitudinal: return "k_longitudinal";
    case AxisKind::energy_gain: return "energy_gain";
  }
  return "unknown";
}

inline const char* axis_unit(AxisKind k) {
  return k == AxisKind::energy_gain ? "eV" : "rad/nm";
}
} // namespace detail

inline void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s) {
  std::string out;
  out += "# axis=";
  out += detail::axis_kind_name(s.kind);
  out += " unit=";
  out += detail::axis_unit(s.kind);
  out += " normalization=";
  out += s.normalization == Normalization::unit_integral ? "unit_integral" : "unit_max";
  out += "\n# columns=axis,density\n";
  for (std::size_t i = 0; i < s.axis.size(); ++i) {
    out += detail::fmt_double(s.axis[i]);
    out += ",";
    out += detail::fmt_double(s.density[i]);
    out += "\n";
  }
  write_file(path, out);
}

inline Spectrum read_spectrum_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  Spectrum s;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty spectrum file " + path.string());
  if (line.find("axis=k_longitudinal") != std::string::npos)
    s.kind = AxisKind::k_longitudinal;
  else if (line.find("axis=energy_gain") != std::string::npos)
    s.kind = AxisKind::energy_gain;
  else
    s.kind = AxisKind::k_transverse;
  s.normalization = line.find("normalization=unit_max") != std::string::npos
                        ? Normalization::unit_max
                        : Normalization::unit_integral;
  std::getline(in, line); // columns header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError("malformed spectrum row in " + path.string());
    s.axis.push_back(std::stod(line.substr(0, comma)));
    s.density.push_back(std::stod(line.substr(comma + 1)));
  }
  return s;
}

struct Raw2DMeta {
  std::vector<std::size_t> shape; // [n_rows, n_cols]
  double row_start = 0.0, row_spacing = 0.0;
  double col_start = 0.0, col_spacing = 0.0;
  std::string row_unit, col_unit, value_unit, kind;
  std::string config_hash;
};

inline void write_raw2d(const std::filesystem::path& base, const std::vector<double>& data,
                        const Raw2DMeta& meta) {
  static_assert(sizeof(double) == 8);
  std::string bytes(reinterpret_cast<const char*>(data.data()),
                    data.size() * sizeof(double));
  write_file(base.string() + ".f64", bytes);
  nlohmann::json j{{"dtype", "float64-le"},
                   {"order", "row-major"},
                   {"shape", meta.shape},
                   {"row_start", meta.row_start},
                   {"row_spacing", meta.row_spacing},
                   {"col_start", meta.col_start},
                   {"col_spacing", meta.col_spacing},
                   {"row_unit", meta.row_unit},
                   {"col_unit", meta.col_unit},
                   {"value_unit", meta.value_unit},
                   {"kind", meta.kind},
                   {"config_hash", meta.config_hash}};
  write_file(base.string() + ".json", j.dump(2) + "\n");
}

inline std::vector<double> read_raw2d(const std::filesystem::path& base,
                                      Raw2DMeta* meta = nullptr) {
  std::string bytes = read_file(base.string() + ".f64");
  if (bytes.size() % sizeof(double) != 0)
    throw IoError("raw2d payload size not a multiple of 8: " + base.string());
  std::vector<double> data(bytes.size() / sizeof(double));
  std::memcpy(data.data(), bytes.data(), bytes.size());
  if (meta) {
    auto j = nlohmann::json::parse(read_file(base.string() + ".json"));
    meta->shape = j.at("shape").get<std::vector<std::size_t>>();
    meta->row_start = j.value("row_start", 0.0);
    meta->row_spacing = j.value("row_spacing", 0.0);
    meta->col_start = j.value("col_start", 0.0);
    meta->col_spacing = j.value("col_spacing", 0.0);
    meta->kind = j.value("kind", "");
    meta->config_hash = j.value("config_hash", "");
  }
  return data;
}

struct RunManifest {
  std::string scenario;
  std::string config_hash;
  std::string artifact_version = "kdsim 0.1.0";
  double wall_seconds = 0.0;
  bool completed = true;
  double final_norm = 0.0;
  double absorbed_fraction = 0.0;
  std::map<std::string, std::string> files; // relative path -> checksum
};

inline void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [k, v] : m.files) files[k] = v;
  nlohmann::json j{{"scenario", m.scenario},
                   {"config_hash", m.config_hash},
                   {"artifact_version", m.artifact_version},
                   {"wall_seconds", m.wall_seconds},
                   {"completed", m.completed},
                   {"norm_audit",
                    {{"final_norm", m.final_norm},
                     {"absorbed_fraction", m.absorbed_fraction}}},
                   {"files", files}};
  write_file(path, j.dump(2) + "\n");
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(read_file(path));
  RunManifest m;
  m.scenario = j.value("scenario", "");
  m.config_hash = j.value("config_hash", "");
  m.artifact_version = j.value("artifact_version", "");
  m.wall_seconds = j.value("wall_seconds", 0.0);
  m.completed = j.value("completed", true);
  if (j.contains("norm_audit")) {
    m.final_norm = j["norm_audit"].value("final_norm", 0.0);
    m.absorbed_fraction = j["norm_audit"].value("absorbed_fraction", 0.0);
  }
  if (j.contains("files"))
    for (auto it = j["files"].begin(); it != j["files"].end(); ++it)
      m.files[it.key()] = it.value().get<std::string>();
  return m;
}

} // namespace kdsim

#endif
