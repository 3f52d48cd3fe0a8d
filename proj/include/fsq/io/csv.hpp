#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "fsq/analysis/contrast.hpp"
#include "fsq/core/errors.hpp"
#include "fsq/dynamics/protocols.hpp"
#include "fsq/focalfield/lightshift_map.hpp"

namespace fsq::io {

/// Shortest decimal text that parses back to the same double. Locale-free,
/// so reruns produce byte-identical files on every platform.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// Column-major table writer: `columns[c][r]` is row r of column c.
inline std::string format_csv(const std::vector<std::string>& header,
                              const std::vector<const std::vector<double>*>& columns) {
  if (header.size() != columns.size()) throw InvalidArgument("CSV header and column count differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
  for (const auto* c : columns)
    if (c->size() != rows) throw InvalidArgument("CSV columns have different lengths");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double((*columns[c])[r]);
    }
    out += '\n';
  }
  return out;
}

inline std::string trace_csv(const dynamics::TraceResult& r) {
  return format_csv({"t_s", "p32_mean", "p32_sem"}, {&r.t_s, &r.p32_mean, &r.p32_sem});
}

/// Row-major map export: y outer, x inner.
inline std::string map_csv(const focalfield::LightShiftMap& map) {
  const int n = map.grid.points;
  std::vector<double> x, y, v;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      x.push_back(map.x_nm(ix));
      y.push_back(map.y_nm(iy));
      v.push_back(map.values_Hz(iy, ix));
    }
  return format_csv({"x_nm", "y_nm", "dU_over_h_Hz"}, {&x, &y, &v});
}

inline std::string contrast_csv(const std::vector<analysis::ContrastPoint>& points) {
  std::vector<double> t, c, e;
  for (const auto& p : points) {
    t.push_back(p.t_center_s);
    c.push_back(p.contrast);
    e.push_back(p.contrast_err);
  }
  return format_csv({"t_center_s", "contrast", "contrast_err"}, {&t, &c, &e});
}

/// Reads a trace CSV (`t_s,p32_mean[,p32_sem]`, header required, `#` lines
/// ignored). A missing SEM column leaves the trace unweighted.
inline analysis::Trace read_trace_csv(std::istream& in, const std::string& name = "trace") {
  analysis::Trace tr;
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (header.empty()) {
      header = cells;
      if (header.size() < 2 || header[0] != "t_s" || header[1] != "p32_mean" ||
          (header.size() > 2 && header[2] != "p32_sem") || header.size() > 3)
        throw TableFormatError(name + ": expected header t_s,p32_mean[,p32_sem]");
      continue;
    }
    if (cells.size() != header.size())
      throw TableFormatError(name + ":" + std::to_string(line_no) + ": wrong number of columns");
    double v[3] = {0, 0, 0};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& s = cells[c];
      const auto r = std::from_chars(s.data(), s.data() + s.size(), v[c]);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw TableFormatError(name + ":" + std::to_string(line_no) + ": malformed number '" + s + "'");
    }
    tr.t_s.push_back(v[0]);
    tr.p.push_back(v[1]);
    if (header.size() == 3) tr.sem.push_back(v[2]);
  }
  if (header.empty()) throw TableFormatError(name + ": empty trace file");
  return tr;
}

inline analysis::Trace read_trace_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file " + path.string());
  return read_trace_csv(in, path.string());
}

/// Set of output files that appear together or not at all. Contents are
/// staged in memory and written through temporaries renamed into place, so a
/// failure leaves no partial artifacts behind.
class OutputBundle {
 public:
  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

  void commit(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<fs::path> staged;
    try {
      for (const auto& [name, content] : files_) {
        const fs::path tmp = dir / ("." + name + ".tmp");
        std::ofstream out(tmp, std::ios::binary);
        out << content;
        out.close();
        if (!out) throw ConfigError("cannot write " + tmp.string());
        staged.push_back(tmp);
      }
    } catch (...) {
      for (const auto& p : staged) fs::remove(p);
      throw;
    }
    for (std::size_t i = 0; i < files_.size(); ++i) fs::rename(staged[i], dir / files_[i].first);
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace fsq::io
