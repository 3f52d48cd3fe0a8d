#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fsq/atomstark/polarizability.hpp"
#include "fsq/core/errors.hpp"
#include "fsq/dynamics/protocols.hpp"
#include "fsq/io/json.hpp"

namespace fsq::cli {

inline constexpr int kSchemaVersion = 1;

/// Environment variable naming the default polarizability table.
inline constexpr const char* kTableEnv = "FSQUBIT_TABLE";

struct Issue {
  std::string field;
  std::string message;
};

enum class Protocol { ramsey, echo };

struct TweezerSection {
  double wavelength_nm = 539.91;
  double power_mW = 1.45;
  double na = 0.5;
  std::optional<double> waist_nm = 564.0;  // calibrates the filling factor
  std::optional<double> filling_factor;    // used as given when set
  Eigen::Vector2d polarization_axis{0.0, 1.0};
};

struct FieldSection {
  double magnitude_G = 3.0;
  std::optional<double> phi_deg = 0.0;  // empty means "magic"
};

struct DriveSection {
  double rabi_kHz = 84.0;  // Omega / 2 pi
  double fringe_MHz = 1.3;
  dynamics::DriveReference reference = dynamics::DriveReference::thermal_mean;
};

struct TimeGrid {
  enum class Kind { linear, windowed, list } kind = Kind::linear;
  double t_max_us = 60.0;
  int points = 241;
  int windows = 10;
  double periods = 5.0;
  int samples_per_window = 40;
  std::vector<double> t_us;

  std::vector<double> seconds(double fringe_Hz) const {
    switch (kind) {
      case Kind::linear: {
        std::vector<double> t(points);
        for (int i = 0; i < points; ++i) t[i] = 1e-6 * t_max_us * i / (points - 1);
        return t;
      }
      case Kind::windowed:
        return dynamics::windowed_time_grid(1e-6 * t_max_us, windows, fringe_Hz, periods, samples_per_window);
      case Kind::list: {
        std::vector<double> t;
        for (double v : t_us) t.push_back(1e-6 * v);
        return t;
      }
    }
    return {};
  }
};

struct MagicScanSection {
  std::vector<double> phi_deg{0, 2, 4, 6, 8, 9.5, 11, 13, 15, 17.5, 20};
  double t_R_us = 30.0;
};

struct PhiNoiseSection {
  std::vector<double> phi_std_deg{0.0, 0.05, 0.1, 0.15, 0.2, 0.3};
  double target_t2_us = 1240.0;
};

struct ShiftMapSection {
  std::optional<double> half_extent_nm;  // default: 1.5 waists
  int points = 101;
};

struct MagicFindSection {
  std::optional<double> wavelength_min_nm;
  std::optional<double> wavelength_max_nm;
};

struct FitSection {
  std::string trace_csv;
  std::optional<double> fringe_MHz;  // fixes the fringe frequency when set
  bool envelope = false;             // contrast windows plus Gaussian envelope
  double periods = 5.0;
};

/// Noise parameters in configuration units.
struct NoiseSection {
  double rabi_frac_std = 0.0;
  double phi_jitter_std_deg = 0.0;
  double detuning_offset_std_Hz = 0.0;
  double prep_efficiency = 1.0;
  double readout_fidelity = 1.0;

  dynamics::NoiseModel model() const {
    return {rabi_frac_std, phi_jitter_std_deg, 2 * constants::pi * detuning_offset_std_Hz, prep_efficiency,
            readout_fidelity};
  }
};

struct ScenarioConfig {
  Protocol protocol = Protocol::ramsey;
  std::string table_path;  // resolved, absolute
  TweezerSection tweezer;
  FieldSection field;
  DriveSection drive;
  double temperature_uK = 8.0;
  trapmodel::MotionModel motion_model = trapmodel::MotionModel::fock;
  NoiseSection noise;
  bool apply_spam = true;
  TimeGrid time_grid;
  MagicScanSection magic_scan;
  PhiNoiseSection phinoise;
  ShiftMapSection shiftmap;
  MagicFindSection magic_find;
  std::optional<FitSection> fit;
  std::size_t trials = 2000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // does not affect results

  double rabi_rad_s() const { return 2e3 * constants::pi * drive.rabi_kHz; }
  double fringe_Hz() const { return 1e6 * drive.fringe_MHz; }
  double temperature_K() const { return 1e-6 * temperature_uK; }
};

/// Default table: $FSQUBIT_TABLE, else the fixture shipped with the sources.
inline std::string default_table_path() {
  if (const char* env = std::getenv(kTableEnv); env && *env) return env;
#ifdef FSQUBIT_DATA_DIR
  return std::string(FSQUBIT_DATA_DIR) + "/sr88_fixture.csv";
#else
  return "data/sr88_fixture.csv";
#endif
}

namespace detail {

using Json = io::Json;

/// Walks a JSON document, recording every problem instead of stopping at the
/// first, so `validate` can report all of them at once.
class Reader {
 public:
  explicit Reader(std::vector<Issue>& issues) : issues_(issues) {}

  void issue(const std::string& field, const std::string& msg) { issues_.push_back({field, msg}); }

  /// Flags keys the schema does not know; unit-suffix typos land here.
  void known_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) return;
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) issue(join(path, k), "unknown key");
  }

  const Json* section(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return nullptr;
    const Json& s = obj.at(key);
    if (!s.is_object()) {
      issue(join(path, key), "must be an object");
      return nullptr;
    }
    return &s;
  }

  enum class Range { any, positive, non_negative, unit_interval };

  void number(const Json& obj, const std::string& path, const char* key, double& out, Range range = Range::any) {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(key);
    const std::string f = join(path, key);
    if (!v.is_number()) return issue(f, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) return issue(f, "must be finite");
    switch (range) {
      case Range::positive:
        if (!(x > 0)) return issue(f, "out of range: must be positive");
        break;
      case Range::non_negative:
        if (x < 0) return issue(f, "out of range: must be non-negative");
        break;
      case Range::unit_interval:
        if (x < 0 || x > 1) return issue(f, "out of range: must lie in [0, 1]");
        break;
      case Range::any:
        break;
    }
    out = x;
  }

  void number(const Json& obj, const std::string& path, const char* key, std::optional<double>& out,
              Range range = Range::any) {
    if (!obj.contains(key)) return;
    if (obj.at(key).is_null()) {
      out.reset();
      return;
    }
    double x = 0.0;
    const std::size_t before = issues_.size();
    number(obj, path, key, x, range);
    if (issues_.size() == before) out = x;
  }

  template <class Int>
  void integer(const Json& obj, const std::string& path, const char* key, Int& out, long long min_value) {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(key);
    const std::string f = join(path, key);
    if (!v.is_number_integer()) return issue(f, "must be an integer");
    if (v.is_number_unsigned()) {
      const auto x = v.get<unsigned long long>();
      if (min_value > 0 && x < static_cast<unsigned long long>(min_value))
        return issue(f, "out of range: must be at least " + std::to_string(min_value));
      out = static_cast<Int>(x);
      return;
    }
    const auto x = v.get<long long>();
    if (x < min_value) return issue(f, "out of range: must be at least " + std::to_string(min_value));
    out = static_cast<Int>(x);
  }

  void boolean(const Json& obj, const std::string& path, const char* key, bool& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_boolean()) return issue(join(path, key), "must be true or false");
    out = obj.at(key).get<bool>();
  }

  void string(const Json& obj, const std::string& path, const char* key, std::string& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_string()) return issue(join(path, key), "must be a string");
    out = obj.at(key).get<std::string>();
  }

  void number_list(const Json& obj, const std::string& path, const char* key, std::vector<double>& out,
                   Range range) {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(key);
    const std::string f = join(path, key);
    if (!v.is_array() || v.empty()) return issue(f, "must be a non-empty array of numbers");
    std::vector<double> xs;
    for (const auto& e : v) {
      if (!e.is_number()) return issue(f, "must be a non-empty array of numbers");
      const double x = e.get<double>();
      if ((range == Range::non_negative && x < 0) || (range == Range::positive && !(x > 0)))
        return issue(f, "out of range: entries must be " +
                            std::string(range == Range::positive ? "positive" : "non-negative"));
      xs.push_back(x);
    }
    out = std::move(xs);
  }

  template <class Enum>
  void choice(const Json& obj, const std::string& path, const char* key, Enum& out,
              std::initializer_list<std::pair<const char*, Enum>> options) {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(key);
    std::string names;
    for (const auto& [name, value] : options) {
      if (v.is_string() && v.get<std::string>() == name) {
        out = value;
        return;
      }
      names += std::string(names.empty() ? "" : ", ") + name;
    }
    issue(join(path, key), "must be one of: " + names);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<Issue>& issues_;
};

inline std::string resolve_path(const std::string& p, const std::filesystem::path& base_dir) {
  namespace fs = std::filesystem;
  fs::path path(p);
  if (path.is_relative()) path = base_dir / path;
  return fs::weakly_canonical(path).string();
}

inline const char* reference_name(dynamics::DriveReference r) {
  switch (r) {
    case dynamics::DriveReference::thermal_mean: return "thermal_mean";
    case dynamics::DriveReference::center: return "center";
    case dynamics::DriveReference::free_space: return "free_space";
  }
  return "";
}

}  // namespace detail

/// Schema pass: types, ranges, unknown keys. Paths are resolved against
/// `base_dir`. Never throws for content problems; they are appended to
/// `issues`.
inline ScenarioConfig parse_config(const io::Json& doc_in, const std::filesystem::path& base_dir,
                                   std::vector<Issue>& issues) {
  using R = detail::Reader::Range;
  detail::Reader rd(issues);
  ScenarioConfig c;
  if (!doc_in.is_object()) {
    rd.issue("", "configuration must be a JSON object");
    return c;
  }
  // Metadata sidecars embed the resolved configuration; accept them directly.
  const io::Json& doc = doc_in.contains("config") && doc_in.at("config").is_object() ? doc_in.at("config") : doc_in;

  rd.known_keys(doc, "",
                {"schema_version", "protocol", "table_path", "tweezer", "field", "drive", "temperature_uK",
                 "motion_model", "noise", "apply_spam", "time_grid", "magic_scan", "phinoise", "shiftmap",
                 "magic_find", "fit", "trials", "seed", "threads"});
  if (!doc.contains("schema_version")) {
    rd.issue("schema_version", "missing");
  } else if (!doc.at("schema_version").is_number_integer() || doc.at("schema_version").get<int>() != kSchemaVersion) {
    rd.issue("schema_version", "unsupported; expected " + std::to_string(kSchemaVersion));
  }
  rd.choice(doc, "", "protocol", c.protocol, {{"ramsey", Protocol::ramsey}, {"echo", Protocol::echo}});

  std::string table = default_table_path();
  bool table_from_config = false;
  if (doc.contains("table_path")) {
    rd.string(doc, "", "table_path", table);
    table_from_config = true;
  }
  c.table_path = table_from_config ? detail::resolve_path(table, base_dir)
                                   : detail::resolve_path(table, std::filesystem::current_path());

  if (const auto* t = rd.section(doc, "", "tweezer")) {
    rd.known_keys(*t, "tweezer", {"wavelength_nm", "power_mW", "na", "waist_nm", "filling_factor", "polarization_axis"});
    rd.number(*t, "tweezer", "wavelength_nm", c.tweezer.wavelength_nm, R::positive);
    rd.number(*t, "tweezer", "power_mW", c.tweezer.power_mW, R::positive);
    rd.number(*t, "tweezer", "na", c.tweezer.na, R::positive);
    if (c.tweezer.na >= 1.0) rd.issue("tweezer.na", "out of range: must be below 1 in vacuum");
    rd.number(*t, "tweezer", "waist_nm", c.tweezer.waist_nm, R::positive);
    rd.number(*t, "tweezer", "filling_factor", c.tweezer.filling_factor, R::positive);
    if (t->contains("filling_factor") && !t->contains("waist_nm")) c.tweezer.waist_nm.reset();
    if (c.tweezer.waist_nm && c.tweezer.filling_factor)
      rd.issue("tweezer", "give either waist_nm or filling_factor, not both");
    if (t->contains("polarization_axis")) {
      std::vector<double> axis;
      rd.number_list(*t, "tweezer", "polarization_axis", axis, R::any);
      if (axis.size() == 2 && std::hypot(axis[0], axis[1]) > 0) {
        c.tweezer.polarization_axis = Eigen::Vector2d(axis[0], axis[1]).normalized();
      } else if (!axis.empty()) {
        rd.issue("tweezer.polarization_axis", "must be a non-zero [x, y] pair");
      }
    }
  }
  if (const auto* f = rd.section(doc, "", "field")) {
    rd.known_keys(*f, "field", {"magnitude_G", "phi_deg"});
    rd.number(*f, "field", "magnitude_G", c.field.magnitude_G, R::positive);
    if (f->contains("phi_deg")) {
      const auto& v = f->at("phi_deg");
      if (v.is_string() && v.get<std::string>() == "magic") {
        c.field.phi_deg.reset();
      } else if (v.is_number()) {
        c.field.phi_deg = v.get<double>();
      } else {
        rd.issue("field.phi_deg", "must be a number or \"magic\"");
      }
    }
  }
  if (const auto* d = rd.section(doc, "", "drive")) {
    rd.known_keys(*d, "drive", {"rabi_kHz", "fringe_MHz", "reference"});
    rd.number(*d, "drive", "rabi_kHz", c.drive.rabi_kHz, R::positive);
    rd.number(*d, "drive", "fringe_MHz", c.drive.fringe_MHz, R::positive);
    rd.choice(*d, "drive", "reference", c.drive.reference,
              {{"thermal_mean", dynamics::DriveReference::thermal_mean},
               {"center", dynamics::DriveReference::center},
               {"free_space", dynamics::DriveReference::free_space}});
  }
  rd.number(doc, "", "temperature_uK", c.temperature_uK, R::non_negative);
  rd.choice(doc, "", "motion_model", c.motion_model,
            {{"fock", trapmodel::MotionModel::fock}, {"classical", trapmodel::MotionModel::classical}});
  if (const auto* n = rd.section(doc, "", "noise")) {
    rd.known_keys(*n, "noise",
                  {"rabi_frac_std", "phi_jitter_std_deg", "detuning_offset_std_Hz", "prep_efficiency",
                   "readout_fidelity"});
    rd.number(*n, "noise", "rabi_frac_std", c.noise.rabi_frac_std, R::non_negative);
    rd.number(*n, "noise", "phi_jitter_std_deg", c.noise.phi_jitter_std_deg, R::non_negative);
    rd.number(*n, "noise", "detuning_offset_std_Hz", c.noise.detuning_offset_std_Hz, R::non_negative);
    rd.number(*n, "noise", "prep_efficiency", c.noise.prep_efficiency, R::unit_interval);
    rd.number(*n, "noise", "readout_fidelity", c.noise.readout_fidelity, R::unit_interval);
  }
  rd.boolean(doc, "", "apply_spam", c.apply_spam);
  if (const auto* g = rd.section(doc, "", "time_grid")) {
    rd.known_keys(*g, "time_grid", {"kind", "t_max_us", "points", "windows", "periods", "samples_per_window", "t_us"});
    using K = TimeGrid::Kind;
    rd.choice(*g, "time_grid", "kind", c.time_grid.kind,
              {{"linear", K::linear}, {"windowed", K::windowed}, {"list", K::list}});
    rd.number(*g, "time_grid", "t_max_us", c.time_grid.t_max_us, R::positive);
    rd.integer(*g, "time_grid", "points", c.time_grid.points, 2);
    rd.integer(*g, "time_grid", "windows", c.time_grid.windows, 2);
    rd.number(*g, "time_grid", "periods", c.time_grid.periods, R::positive);
    rd.integer(*g, "time_grid", "samples_per_window", c.time_grid.samples_per_window, 4);
    rd.number_list(*g, "time_grid", "t_us", c.time_grid.t_us, R::non_negative);
    if (c.time_grid.kind == K::list && c.time_grid.t_us.empty()) rd.issue("time_grid.t_us", "required for kind list");
  }
  if (const auto* m = rd.section(doc, "", "magic_scan")) {
    rd.known_keys(*m, "magic_scan", {"phi_deg", "t_R_us"});
    rd.number_list(*m, "magic_scan", "phi_deg", c.magic_scan.phi_deg, R::any);
    rd.number(*m, "magic_scan", "t_R_us", c.magic_scan.t_R_us, R::non_negative);
  }
  if (const auto* p = rd.section(doc, "", "phinoise")) {
    rd.known_keys(*p, "phinoise", {"phi_std_deg", "target_t2_us"});
    rd.number_list(*p, "phinoise", "phi_std_deg", c.phinoise.phi_std_deg, R::non_negative);
    rd.number(*p, "phinoise", "target_t2_us", c.phinoise.target_t2_us, R::positive);
  }
  if (const auto* s = rd.section(doc, "", "shiftmap")) {
    rd.known_keys(*s, "shiftmap", {"half_extent_nm", "points"});
    rd.number(*s, "shiftmap", "half_extent_nm", c.shiftmap.half_extent_nm, R::positive);
    rd.integer(*s, "shiftmap", "points", c.shiftmap.points, 3);
    if (c.shiftmap.points % 2 == 0) rd.issue("shiftmap.points", "must be odd so the centre is a grid node");
  }
  if (const auto* m = rd.section(doc, "", "magic_find")) {
    rd.known_keys(*m, "magic_find", {"wavelength_min_nm", "wavelength_max_nm"});
    rd.number(*m, "magic_find", "wavelength_min_nm", c.magic_find.wavelength_min_nm, R::positive);
    rd.number(*m, "magic_find", "wavelength_max_nm", c.magic_find.wavelength_max_nm, R::positive);
  }
  if (const auto* f = rd.section(doc, "", "fit")) {
    rd.known_keys(*f, "fit", {"trace_csv", "fringe_MHz", "envelope", "periods"});
    FitSection fit;
    if (!f->contains("trace_csv")) rd.issue("fit.trace_csv", "missing");
    rd.string(*f, "fit", "trace_csv", fit.trace_csv);
    if (!fit.trace_csv.empty()) fit.trace_csv = detail::resolve_path(fit.trace_csv, base_dir);
    rd.number(*f, "fit", "fringe_MHz", fit.fringe_MHz, R::positive);
    rd.boolean(*f, "fit", "envelope", fit.envelope);
    rd.number(*f, "fit", "periods", fit.periods, R::positive);
    if (fit.envelope && !fit.fringe_MHz) rd.issue("fit.fringe_MHz", "required for envelope fits");
    c.fit = fit;
  }
  rd.integer(doc, "", "trials", c.trials, 1);
  if (!doc.contains("seed")) rd.issue("seed", "missing; runs are never seeded from the clock");
  rd.integer(doc, "", "seed", c.seed, 0);
  rd.integer(doc, "", "threads", c.threads, 0);
  return c;
}

/// Physics sanity checks that need no simulation: table readable and
/// covering the tweezer wavelength for both qubit levels.
inline void check_physics(const ScenarioConfig& c, std::vector<Issue>& issues) {
  namespace fs = std::filesystem;
  if (!fs::exists(c.table_path)) {
    issues.push_back({"table_path", "file not found: " + c.table_path});
  } else {
    try {
      const auto table = atomstark::PolarizabilityTable::load(c.table_path);
      const atomstark::QubitLevels levels;
      for (const auto* s : {&levels.lower, &levels.upper}) {
        if (!table.has_state(*s)) {
          issues.push_back({"table_path", "table has no entries for state " + *s});
          continue;
        }
        atomstark::interpolate_polarizability(table, *s, c.tweezer.wavelength_nm);
      }
    } catch (const WavelengthOutOfRange& e) {
      issues.push_back({"tweezer.wavelength_nm", std::string("coverage: ") + e.what()});
    } catch (const Error& e) {
      issues.push_back({"table_path", e.code() + ": " + e.what()});
    }
  }
  if (c.fit && !c.fit->trace_csv.empty() && !fs::exists(c.fit->trace_csv))
    issues.push_back({"fit.trace_csv", "file not found: " + c.fit->trace_csv});
  if (c.magic_find.wavelength_min_nm && c.magic_find.wavelength_max_nm &&
      !(*c.magic_find.wavelength_min_nm < *c.magic_find.wavelength_max_nm))
    issues.push_back({"magic_find", "wavelength_min_nm must be below wavelength_max_nm"});
}

/// Full validation report for a configuration document.
inline std::vector<Issue> validate_config(const io::Json& doc, const std::filesystem::path& base_dir) {
  std::vector<Issue> issues;
  const auto c = parse_config(doc, base_dir, issues);
  if (issues.empty()) check_physics(c, issues);
  return issues;
}

inline std::string describe(const std::vector<Issue>& issues) {
  std::string s;
  for (const auto& i : issues) s += (s.empty() ? "" : "; ") + (i.field.empty() ? "" : i.field + ": ") + i.message;
  return s;
}

/// Reads and fully validates a configuration file; throws ConfigError
/// listing every issue.
inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  io::Json doc;
  try {
    doc = io::Json::parse(in);
  } catch (const io::Json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  std::vector<Issue> issues;
  auto c = parse_config(doc, std::filesystem::absolute(path).parent_path(), issues);
  if (issues.empty()) check_physics(c, issues);
  if (!issues.empty()) throw ConfigError(describe(issues));
  return c;
}

/// Canonical JSON form with every default made explicit. Feeding it back to
/// parse_config reproduces the configuration exactly.
inline io::Json to_json(const ScenarioConfig& c) {
  using io::Json;
  Json t{{"wavelength_nm", c.tweezer.wavelength_nm},
         {"power_mW", c.tweezer.power_mW},
         {"na", c.tweezer.na}};
  if (c.tweezer.waist_nm) t["waist_nm"] = *c.tweezer.waist_nm;
  if (c.tweezer.filling_factor) t["filling_factor"] = *c.tweezer.filling_factor;
  t["polarization_axis"] = {c.tweezer.polarization_axis.x(), c.tweezer.polarization_axis.y()};

  Json grid{{"kind", c.time_grid.kind == TimeGrid::Kind::linear     ? "linear"
                     : c.time_grid.kind == TimeGrid::Kind::windowed ? "windowed"
                                                                    : "list"},
            {"t_max_us", c.time_grid.t_max_us},
            {"points", c.time_grid.points},
            {"windows", c.time_grid.windows},
            {"periods", c.time_grid.periods},
            {"samples_per_window", c.time_grid.samples_per_window}};
  if (!c.time_grid.t_us.empty()) grid["t_us"] = c.time_grid.t_us;

  Json shiftmap{{"points", c.shiftmap.points}};
  if (c.shiftmap.half_extent_nm) shiftmap["half_extent_nm"] = *c.shiftmap.half_extent_nm;
  Json magic_find = Json::object();
  if (c.magic_find.wavelength_min_nm) magic_find["wavelength_min_nm"] = *c.magic_find.wavelength_min_nm;
  if (c.magic_find.wavelength_max_nm) magic_find["wavelength_max_nm"] = *c.magic_find.wavelength_max_nm;

  Json doc{{"schema_version", kSchemaVersion},
           {"protocol", c.protocol == Protocol::ramsey ? "ramsey" : "echo"},
           {"table_path", c.table_path},
           {"tweezer", t},
           {"field",
            {{"magnitude_G", c.field.magnitude_G},
             {"phi_deg", c.field.phi_deg ? Json(*c.field.phi_deg) : Json("magic")}}},
           {"drive",
            {{"rabi_kHz", c.drive.rabi_kHz},
             {"fringe_MHz", c.drive.fringe_MHz},
             {"reference", detail::reference_name(c.drive.reference)}}},
           {"temperature_uK", c.temperature_uK},
           {"motion_model", c.motion_model == trapmodel::MotionModel::fock ? "fock" : "classical"},
           {"noise",
            {{"rabi_frac_std", c.noise.rabi_frac_std},
             {"phi_jitter_std_deg", c.noise.phi_jitter_std_deg},
             {"detuning_offset_std_Hz", c.noise.detuning_offset_std_Hz},
             {"prep_efficiency", c.noise.prep_efficiency},
             {"readout_fidelity", c.noise.readout_fidelity}}},
           {"apply_spam", c.apply_spam},
           {"time_grid", grid},
           {"magic_scan", {{"phi_deg", c.magic_scan.phi_deg}, {"t_R_us", c.magic_scan.t_R_us}}},
           {"phinoise", {{"phi_std_deg", c.phinoise.phi_std_deg}, {"target_t2_us", c.phinoise.target_t2_us}}},
           {"shiftmap", shiftmap},
           {"magic_find", magic_find}};
  if (c.fit) {
    Json f{{"trace_csv", c.fit->trace_csv}, {"envelope", c.fit->envelope}, {"periods", c.fit->periods}};
    if (c.fit->fringe_MHz) f["fringe_MHz"] = *c.fit->fringe_MHz;
    doc["fit"] = f;
  }
  doc["trials"] = c.trials;
  doc["seed"] = c.seed;
  return doc;
}

}  // namespace fsq::cli
