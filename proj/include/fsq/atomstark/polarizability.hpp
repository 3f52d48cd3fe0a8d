#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fsq/atomstark/angular_momentum.hpp"
#include "fsq/core/errors.hpp"

namespace fsq::atomstark {

struct StateInfo {
  std::string label;
  AngularMomentum j;
  double g_j = 0.0;
};

/// Scalar and tensor polarizability in atomic units.
struct Polarizability {
  double scalar_au = 0.0;
  double tensor_au = 0.0;
};

struct PolarizabilityEntry {
  double wavelength_nm = 0.0;
  Polarizability alpha;
};

/// Quantum numbers for the levels this project ships data for. Table files may
/// override or extend these with "# state <label> J=<j> gJ=<g>" directives.
inline const std::map<std::string, StateInfo>& known_states() {
  static const std::map<std::string, StateInfo> states = {
      {"1S0", {"1S0", AngularMomentum::integer(0), 0.0}},
      {"3P0", {"3P0", AngularMomentum::integer(0), 0.0}},
      {"3P1", {"3P1", AngularMomentum::integer(1), 1.5}},
      {"3P2", {"3P2", AngularMomentum::integer(2), 1.5}},
  };
  return states;
}

/// Wavelength-resolved polarizabilities for a set of atomic states.
///
/// Entries per state are kept sorted by wavelength; duplicate wavelengths and
/// nonzero tensor polarizabilities for J < 1 are rejected on insertion.
class PolarizabilityTable {
 public:
  void add_state(const StateInfo& info) {
    auto& rec = states_[info.label];
    if (!rec.entries.empty() && rec.info.j != info.j)
      throw TableFormatError("state " + info.label + " redeclared with different J");
    rec.info = info;
  }

  void add_entry(const std::string& label, const PolarizabilityEntry& e) {
    auto it = states_.find(label);
    if (it == states_.end()) {
      auto known = known_states().find(label);
      if (known == known_states().end())
        throw UnknownState("state '" + label + "' has no J/gJ declaration");
      add_state(known->second);
      it = states_.find(label);
    }
    auto& rec = it->second;
    if (rec.info.j.twice_j < 2 && e.alpha.tensor_au != 0.0)
      throw TableFormatError("state " + label + " has J < 1 but a nonzero tensor polarizability");
    auto pos = std::lower_bound(
        rec.entries.begin(), rec.entries.end(), e.wavelength_nm,
        [](const PolarizabilityEntry& a, double wl) { return a.wavelength_nm < wl; });
    if (pos != rec.entries.end() && pos->wavelength_nm == e.wavelength_nm)
      throw TableFormatError("duplicate wavelength for state " + label);
    rec.entries.insert(pos, e);
  }

  bool has_state(const std::string& label) const { return states_.count(label) > 0; }

  const StateInfo& state(const std::string& label) const { return record(label).info; }

  const std::vector<PolarizabilityEntry>& entries(const std::string& label) const {
    return record(label).entries;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : states_) out.push_back(k);
    return out;
  }

  /// [min, max] wavelength covered for a state.
  std::pair<double, double> span(const std::string& label) const {
    const auto& e = entries(label);
    if (e.empty()) throw WavelengthOutOfRange("state " + label + " has no entries");
    return {e.front().wavelength_nm, e.back().wavelength_nm};
  }

  bool covers(const std::string& label, double wavelength_nm) const {
    if (!has_state(label) || entries(label).empty()) return false;
    auto [lo, hi] = span(label);
    return wavelength_nm >= lo && wavelength_nm <= hi;
  }

  /// Parses the CSV format `state,wavelength_nm,alpha_s_au,alpha_t_au`.
  static PolarizabilityTable from_csv(std::istream& in) {
    PolarizabilityTable table;
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      if (line[first] == '#') {
        parse_directive(table, line.substr(first + 1), line_no);
        continue;
      }
      auto fields = split(line);
      if (!header_seen) {
        if (fields.size() != 4 || fields[0] != "state" || fields[1] != "wavelength_nm" ||
            fields[2] != "alpha_s_au" || fields[3] != "alpha_t_au")
          throw TableFormatError("line " + std::to_string(line_no) +
                                 ": expected header state,wavelength_nm,alpha_s_au,alpha_t_au");
        header_seen = true;
        continue;
      }
      if (fields.size() != 4)
        throw TableFormatError("line " + std::to_string(line_no) + ": expected 4 fields");
      PolarizabilityEntry e;
      e.wavelength_nm = parse_number(fields[1], line_no);
      e.alpha.scalar_au = parse_number(fields[2], line_no);
      e.alpha.tensor_au = parse_number(fields[3], line_no);
      table.add_entry(fields[0], e);
    }
    if (!header_seen) throw TableFormatError("missing header line");
    return table;
  }

  static PolarizabilityTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TableFormatError("cannot open polarizability table '" + path + "'");
    return from_csv(in);
  }

 private:
  struct Record {
    StateInfo info;
    std::vector<PolarizabilityEntry> entries;
  };

  const Record& record(const std::string& label) const {
    auto it = states_.find(label);
    if (it == states_.end()) throw UnknownState("unknown state '" + label + "'");
    return it->second;
  }

  static std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  }

  static std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
  }

  static double parse_number(const std::string& s, int line_no) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw TableFormatError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
  }

  // "# state 3P2 J=2 gJ=1.5"; any other comment is ignored.
  static void parse_directive(PolarizabilityTable& table, const std::string& body, int line_no) {
    std::stringstream ss(body);
    std::string keyword;
    ss >> keyword;
    if (keyword != "state") return;
    StateInfo info;
    ss >> info.label;
    bool have_j = false;
    std::string tok;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "J") {
        const auto slash = val.find('/');
        if (slash != std::string::npos) {
          info.j = AngularMomentum::half(std::stoi(val.substr(0, slash)));
        } else {
          info.j = AngularMomentum::integer(static_cast<int>(parse_number(val, line_no)));
        }
        have_j = true;
      } else if (key == "gJ") {
        info.g_j = parse_number(val, line_no);
      }
    }
    if (info.label.empty() || !have_j)
      throw TableFormatError("line " + std::to_string(line_no) + ": state directive needs a label and J=");
    table.add_state(info);
  }

  std::map<std::string, Record> states_;
};

/// Linear interpolation between the two table entries bracketing the
/// wavelength. Exact at grid points; never extrapolates.
inline Polarizability interpolate_polarizability(const PolarizabilityTable& table,
                                                 const std::string& state,
                                                 double wavelength_nm) {
  const auto& e = table.entries(state);
  if (e.empty() || wavelength_nm < e.front().wavelength_nm ||
      wavelength_nm > e.back().wavelength_nm)
    throw WavelengthOutOfRange("wavelength " + std::to_string(wavelength_nm) +
                               " nm not covered for state " + state);
  auto hi = std::lower_bound(
      e.begin(), e.end(), wavelength_nm,
      [](const PolarizabilityEntry& a, double wl) { return a.wavelength_nm < wl; });
  if (hi->wavelength_nm == wavelength_nm) return hi->alpha;
  auto lo = hi - 1;
  const double t = (wavelength_nm - lo->wavelength_nm) / (hi->wavelength_nm - lo->wavelength_nm);
  return {lo->alpha.scalar_au + t * (hi->alpha.scalar_au - lo->alpha.scalar_au),
          lo->alpha.tensor_au + t * (hi->alpha.tensor_au - lo->alpha.tensor_au)};
}

}  // namespace fsq::atomstark
