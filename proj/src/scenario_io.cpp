#include "e2boost/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace e2boost {

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& path, const std::string& what) {
  throw ConfigError(origin + ": " + path + ": " + what);
}

YAML::Node require(const YAML::Node& node, const char* key, const std::string& origin, const std::string& path) {
  auto child = node[key];
  if (!child) fail(origin, path.empty() ? key : path + "." + key, "missing");
  return child;
}

double as_double(const YAML::Node& n, const std::string& origin, const std::string& path) {
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(origin, path, "expected a number");
  }
}

int as_int(const YAML::Node& n, const std::string& origin, const std::string& path) {
  try {
    return n.as<int>();
  } catch (const YAML::Exception&) {
    fail(origin, path, "expected an integer");
  }
}

Position3D as_position(const YAML::Node& n, const std::string& origin, const std::string& path,
                       std::optional<double> default_z = std::nullopt) {
  if (!n.IsSequence() || n.size() < 2 || n.size() > 3) fail(origin, path, "expected [x, y] or [x, y, z]");
  Position3D p;
  p.x = as_double(n[0], origin, path + "[0]");
  p.y = as_double(n[1], origin, path + "[1]");
  if (n.size() == 3) p.z = as_double(n[2], origin, path + "[2]");
  else if (default_z) p.z = *default_z;
  else fail(origin, path, "height missing");
  return p;
}

std::vector<Position3D> as_positions(const YAML::Node& n, const std::string& origin, const std::string& path,
                                     std::optional<double> default_z = std::nullopt) {
  if (!n.IsSequence()) fail(origin, path, "expected a list of positions");
  std::vector<Position3D> out;
  for (std::size_t i = 0; i < n.size(); ++i)
    out.push_back(as_position(n[i], origin, path + "[" + std::to_string(i) + "]", default_z));
  return out;
}

template <class T>
std::vector<T> as_list(const YAML::Node& n, const std::string& origin, const std::string& path) {
  if (!n.IsSequence()) fail(origin, path, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if constexpr (std::is_same_v<T, int>) out.push_back(as_int(n[i], origin, p));
    else out.push_back(as_double(n[i], origin, p));
  }
  return out;
}

double opt_double(const YAML::Node& parent, const char* key, double fallback, const std::string& origin,
                  const std::string& path) {
  auto n = parent[key];
  return n ? as_double(n, origin, path + "." + key) : fallback;
}

}  // namespace

Scenario parse_scenario(const std::string& yaml_text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin + ": parse error: " + e.what());
  }
  if (!root.IsMap()) throw ConfigError(origin + ": expected a mapping at top level");
  if (auto v = root["version"]; v && as_int(v, origin, "version") != 1)
    fail(origin, "version", "unsupported scenario version");

  Scenario s;
  s.device_height = opt_double(root, "device_height", 1.5, origin, "");
  s.bs = as_position(require(root, "bs", origin, ""), origin, "bs");
  s.ues = as_positions(require(root, "ues", origin, ""), origin, "ues", s.device_height);
  s.devices = as_positions(require(root, "devices", origin, ""), origin, "devices", s.device_height);
  s.min_device_distance = opt_double(root, "min_device_distance", 5.0, origin, "");
  if (auto area = root["device_area"]) {
    const auto c = as_position(require(area, "center", origin, "device_area"), origin, "device_area.center", 0.0);
    s.device_area = {c.x, c.y, as_double(require(area, "radius", origin, "device_area"), origin, "device_area.radius")};
  }

  const auto ris = require(root, "ris", origin, "");
  const int rows = ris["rows"] ? as_int(ris["rows"], origin, "ris.rows") : 101;
  const int cols = ris["cols"] ? as_int(ris["cols"], origin, "ris.cols") : 101;
  const double dv = opt_double(ris, "spacing_v", 0.01, origin, "ris");
  const double dh = opt_double(ris, "spacing_h", 0.01, origin, "ris");
  const double height = opt_double(ris, "height", 10.0, origin, "ris");
  const auto centers = as_positions(require(ris, "centers", origin, "ris"), origin, "ris.centers", height);
  if (rows < 1 || cols < 1) fail(origin, "ris.rows", "rows and cols must be >= 1");
  for (const auto& c : centers) {
    RisGeometry g;
    g.center = c;
    g.rows = rows;
    g.cols = cols;
    g.spacing_v = dv;
    g.spacing_h = dh;
    s.riss.push_back(std::move(g));
  }
  if (auto ap = ris["active_prob"]) {
    if (ap.IsSequence()) s.ris_active_prob = as_list<double>(ap, origin, "ris.active_prob");
    else s.ris_active_prob.assign(s.riss.size(), as_double(ap, origin, "ris.active_prob"));
  } else {
    s.ris_active_prob.assign(s.riss.size(), 0.2);
  }

  const auto radio = require(root, "radio", origin, "");
  auto& r = s.radio;
  r.tx_power = dbm_to_watts(as_double(require(radio, "tx_power_dbm", origin, "radio"), origin, "radio.tx_power_dbm"));
  r.noise_power = dbm_to_watts(opt_double(radio, "noise_dbm", -100.0, origin, "radio"));
  r.interference_sigma = opt_double(radio, "interference_sigma", 1.0, origin, "radio");
  if (auto total = radio["noise_plus_interference_dbm"]) {
    const double w = dbm_to_watts(as_double(total, origin, "radio.noise_plus_interference_dbm"));
    if (!(w > r.noise_power)) fail(origin, "radio.noise_plus_interference_dbm", "must exceed noise_dbm");
    r.interference_mu = 0.5 * std::log(w - r.noise_power) - r.interference_sigma * r.interference_sigma;
  } else {
    r.interference_mu = as_double(require(radio, "interference_mu", origin, "radio"), origin, "radio.interference_mu");
  }
  r.carrier_freq = as_double(require(radio, "carrier_ghz", origin, "radio"), origin, "radio.carrier_ghz") * 1e9;
  r.bandwidth = as_double(require(radio, "bandwidth_mhz", origin, "radio"), origin, "radio.bandwidth_mhz") * 1e6;
  r.code_rate = opt_double(radio, "code_rate", 0.5, origin, "radio");
  r.rician_factor = opt_double(radio, "rician_factor", 4.0, origin, "radio");
  r.antenna_gain = opt_double(radio, "antenna_gain", 1.0, origin, "radio");
  r.pathloss_exp = opt_double(radio, "pathloss_exp", 3.7, origin, "radio");
  r.reflection_amplitude = opt_double(radio, "reflection_amplitude", 1.0, origin, "radio");
  r.pin_bits = radio["pin_bits"] ? as_int(radio["pin_bits"], origin, "radio.pin_bits") : 8;
  r.shadow_sigma = opt_double(radio, "shadow_sigma_db", 8.0, origin, "radio") * std::log(10.0) / 10.0;
  if (auto mu = radio["shadow_mu"]) r.shadow_mu = as_double(mu, origin, "radio.shadow_mu");

  const auto sf = require(root, "sf_table", origin, "");
  auto sfs = as_list<int>(require(sf, "sf", origin, "sf_table"), origin, "sf_table.sf");
  auto thr = as_list<double>(require(sf, "threshold", origin, "sf_table"), origin, "sf_table.threshold");
  s.sf_table = make_sf_table(std::move(sfs), std::move(thr), r.bandwidth, r.code_rate);

  if (auto ps = root["phase_shift"]) {
    try {
      s.phase = parse_phase_mode(ps.as<std::string>());
    } catch (const std::exception& e) {
      fail(origin, "phase_shift", e.what());
    }
  }

  try {
    orient_riss(s);
  } catch (const GeometryError& e) {
    fail(origin, "ris.centers", e.what());
  }
  const auto violations = validate_scenario(s);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << origin << ": invalid scenario";
    for (const auto& v : violations) msg << "\n  " << v.path << ": " << v.message;
    throw ConfigError(msg.str());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

nlohmann::json scenario_to_json(const Scenario& s) {
  using nlohmann::json;
  auto pos = [](const Position3D& p) { return json::array({p.x, p.y, p.z}); };
  json j;
  j["bs"] = pos(s.bs);
  j["ues"] = json::array();
  for (const auto& u : s.ues) j["ues"].push_back(pos(u));
  j["devices"] = json::array();
  for (const auto& d : s.devices) j["devices"].push_back(pos(d));
  j["riss"] = json::array();
  for (const auto& g : s.riss)
    j["riss"].push_back({{"center", pos(g.center)},
                         {"rows", g.rows},
                         {"cols", g.cols},
                         {"spacing_v", g.spacing_v},
                         {"spacing_h", g.spacing_h},
                         {"orientation", g.orientation}});
  j["ris_active_prob"] = s.ris_active_prob;
  j["sf_table"] = {{"sfs", s.sf_table.sfs}, {"rates", s.sf_table.rates}, {"thresholds", s.sf_table.thresholds}};
  const auto& r = s.radio;
  j["radio"] = {{"tx_power", r.tx_power},
                {"noise_power", r.noise_power},
                {"interference_mu", r.interference_mu},
                {"interference_sigma", r.interference_sigma},
                {"carrier_freq", r.carrier_freq},
                {"bandwidth", r.bandwidth},
                {"code_rate", r.code_rate},
                {"rician_factor", std::isinf(r.rician_factor) ? json("inf") : json(r.rician_factor)},
                {"antenna_gain", r.antenna_gain},
                {"pathloss_exp", r.pathloss_exp},
                {"reflection_amplitude", r.reflection_amplitude},
                {"pin_bits", r.pin_bits},
                {"shadow_mu", r.shadow_mu ? json(*r.shadow_mu) : json(nullptr)},
                {"shadow_sigma", r.shadow_sigma}};
  j["phase_shift"] = to_string(s.phase);
  j["device_area"] = {{"center", json::array({s.device_area.cx, s.device_area.cy})}, {"radius", s.device_area.radius}};
  j["min_device_distance"] = s.min_device_distance;
  return j;
}

std::uint64_t scenario_hash(const Scenario& s) {
  const std::string text = scenario_to_json(s).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace e2boost
