#include "e2boost/netmodel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "e2boost/channel.hpp"

namespace e2boost {

double distance(const Position3D& a, const Position3D& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double distance_xy(const Position3D& a, const Position3D& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Position3D centroid(const std::vector<Position3D>& points) {
  Position3D c;
  if (points.empty()) return c;
  for (const auto& p : points) {
    c.x += p.x;
    c.y += p.y;
    c.z += p.z;
  }
  const double n = static_cast<double>(points.size());
  return {c.x / n, c.y / n, c.z / n};
}

double compute_ris_orientation(const Position3D& bs, const Position3D& ris_center,
                               const Position3D& ue_centroid) {
  const double rbx = bs.x - ris_center.x, rby = bs.y - ris_center.y;
  const double rux = ue_centroid.x - ris_center.x, ruy = ue_centroid.y - ris_center.y;
  const double nb = std::hypot(rbx, rby), nu = std::hypot(rux, ruy);
  if (nb < 1e-12 || nu < 1e-12) throw GeometryError("degenerate geometry");

  const double bx = rbx / nb, by = rby / nb, ux = rux / nu, uy = ruy / nu;
  const double cos_bru = bx * ux + by * uy;
  double xc = 0.0, yc = 0.0;
  if (cos_bru >= 0.0) {
    xc = -bx + ux;
    yc = -by + uy;
  } else {
    xc = bx + ux;
    yc = by + uy;
  }
  // B, R, U collinear: the two-case rule degenerates, fall back to the normal of RU.
  if (std::hypot(xc, yc) < 1e-9) {
    xc = -uy;
    yc = ux;
  }
  if (std::abs(yc) < 1e-15) return xc > 0.0 ? -std::numbers::pi / 2 : std::numbers::pi / 2;
  return -std::atan(xc / yc);
}

std::vector<Position3D> compute_element_positions(const RisGeometry& geom) {
  std::vector<Position3D> out;
  out.reserve(static_cast<std::size_t>(geom.rows) * geom.cols);
  const int center_row = (geom.rows + 1) / 2;  // ceil(rows/2), 1-based
  const int center_col = (geom.cols + 1) / 2;
  const double c = std::cos(geom.orientation), s = std::sin(geom.orientation);
  for (int r = 0; r < geom.rows; ++r) {
    const double off = static_cast<double>(r + 1 - center_row) * geom.spacing_v;
    for (int col = 0; col < geom.cols; ++col) {
      out.push_back({off * c + geom.center.x, off * s + geom.center.y,
                     static_cast<double>(col + 1 - center_col) * geom.spacing_h + geom.center.z});
    }
  }
  return out;
}

RisGeometry make_ris(const Position3D& center, int rows, int cols, double spacing_v,
                     double spacing_h, double orientation) {
  RisGeometry g;
  g.center = center;
  g.rows = rows;
  g.cols = cols;
  g.spacing_v = spacing_v;
  g.spacing_h = spacing_h;
  g.orientation = orientation;
  g.elements = compute_element_positions(g);
  return g;
}

SfTable make_sf_table(std::vector<int> sfs, std::vector<double> thresholds, double bandwidth,
                      double code_rate) {
  SfTable t;
  t.rates.reserve(sfs.size());
  for (int sf : sfs) t.rates.push_back(data_rate(sf, bandwidth, code_rate));
  t.sfs = std::move(sfs);
  t.thresholds = std::move(thresholds);
  return t;
}

double RadioConstants::noise_plus_interference() const {
  return std::exp(2.0 * interference_mu + 2.0 * interference_sigma * interference_sigma) + noise_power;
}

double RadioConstants::wavelength() const { return 299792458.0 / carrier_freq; }

PhaseShiftSetting parse_phase_mode(const std::string& text) {
  if (text == "optimal") return {PhaseMode::OptimalForUEs, 170};
  const std::string prefix = "constant:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    const std::string num = text.substr(prefix.size());
    int rho = 0;
    try {
      rho = std::stoi(num, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad phase mode: " + text);
    }
    if (used != num.size()) throw std::invalid_argument("bad phase mode: " + text);
    return {PhaseMode::Constant, rho};
  }
  if (text == "constant") return {PhaseMode::Constant, 170};
  throw std::invalid_argument("bad phase mode: " + text);
}

std::string to_string(const PhaseShiftSetting& setting) {
  if (setting.mode == PhaseMode::OptimalForUEs) return "optimal";
  return "constant:" + std::to_string(setting.rho);
}

double Scenario::shadow_mu_for(int device) const {
  if (radio.shadow_mu) return *radio.shadow_mu;
  const auto& dev = devices[static_cast<std::size_t>(device)];
  const double gain = nlos_pathloss_uma(distance(dev, bs), radio.carrier_freq / 1e9, dev.z);
  return std::log(gain) - 0.5 * radio.shadow_sigma * radio.shadow_sigma;
}

namespace {

bool finite(const Position3D& p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z); }

void check_position(std::vector<Violation>& out, const std::string& path, const Position3D& p) {
  if (!finite(p)) out.push_back({path, "non-finite coordinate"});
  else if (p.z < 0.0) out.push_back({path, "height must be >= 0"});
}

template <class T, class Cmp>
bool strictly(const std::vector<T>& v, Cmp cmp) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!cmp(v[i - 1], v[i])) return false;
  return true;
}

}  // namespace

std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;
  check_position(out, "bs", s.bs);
  if (s.ues.empty()) out.push_back({"ues", "at least one UE is required"});
  for (std::size_t i = 0; i < s.ues.size(); ++i) check_position(out, "ues[" + std::to_string(i) + "]", s.ues[i]);
  if (s.devices.empty()) out.push_back({"devices", "at least one device is required"});
  for (std::size_t i = 0; i < s.devices.size(); ++i)
    check_position(out, "devices[" + std::to_string(i) + "]", s.devices[i]);
  for (std::size_t i = 0; i < s.devices.size(); ++i)
    for (std::size_t j = i + 1; j < s.devices.size(); ++j)
      if (distance_xy(s.devices[i], s.devices[j]) < s.min_device_distance)
        out.push_back({"devices[" + std::to_string(j) + "]",
                       "closer than " + std::to_string(s.min_device_distance) + " m to devices[" +
                           std::to_string(i) + "]"});

  if (s.riss.empty()) out.push_back({"riss", "at least one RIS is required"});
  for (std::size_t k = 0; k < s.riss.size(); ++k) {
    const auto& g = s.riss[k];
    const std::string p = "riss[" + std::to_string(k) + "]";
    check_position(out, p + ".center", g.center);
    if (g.rows < 1 || g.cols < 1) {
      out.push_back({p + ".rows", "rows and cols must be >= 1"});
      continue;
    }
    if (!(g.spacing_v > 0.0) || !(g.spacing_h > 0.0)) out.push_back({p + ".spacing", "must be > 0"});
    if (g.elements.size() != static_cast<std::size_t>(g.rows) * g.cols) {
      out.push_back({p + ".elements", "grid size does not match rows x cols"});
      continue;
    }
    const auto expect = compute_element_positions(g);
    for (std::size_t e = 0; e < expect.size(); ++e) {
      if (distance(expect[e], g.elements[e]) > 1e-9) {
        out.push_back({p + ".elements", "element positions inconsistent with center/orientation"});
        break;
      }
    }
  }
  if (s.ris_active_prob.size() != s.riss.size())
    out.push_back({"ris_active_prob", "needs one entry per RIS"});
  for (std::size_t k = 0; k < s.ris_active_prob.size(); ++k) {
    const double p = s.ris_active_prob[k];
    if (!(p >= 0.0 && p <= 1.0))
      out.push_back({"ris_active_prob[" + std::to_string(k) + "]", "must be within [0, 1]"});
  }

  const auto& t = s.sf_table;
  if (t.sfs.empty()) out.push_back({"sf_table.sfs", "at least one SF is required"});
  if (t.rates.size() != t.sfs.size() || t.thresholds.size() != t.sfs.size())
    out.push_back({"sf_table", "sfs, rates and thresholds must have equal length"});
  if (!strictly(t.sfs, std::less<>{})) out.push_back({"sf_table.sfs", "must be strictly ascending"});
  if (!strictly(t.rates, std::greater<>{})) out.push_back({"sf_table.rates", "must be strictly descending"});
  if (!strictly(t.thresholds, std::greater<>{}))
    out.push_back({"sf_table.thresholds", "must be strictly descending"});

  const auto& r = s.radio;
  if (!(r.tx_power > 0.0)) out.push_back({"radio.tx_power", "must be > 0"});
  if (!(r.noise_power > 0.0)) out.push_back({"radio.noise_power", "must be > 0"});
  if (!(r.carrier_freq > 0.0)) out.push_back({"radio.carrier_freq", "must be > 0"});
  if (!(r.bandwidth > 0.0)) out.push_back({"radio.bandwidth", "must be > 0"});
  if (!(r.reflection_amplitude > 0.0 && r.reflection_amplitude <= 1.0))
    out.push_back({"radio.reflection_amplitude", "must be within (0, 1]"});
  if (r.pin_bits < 1 || r.pin_bits > 30) out.push_back({"radio.pin_bits", "must be within [1, 30]"});
  if (!(r.rician_factor >= 0.0)) out.push_back({"radio.rician_factor", "must be >= 0"});
  if (!(r.interference_sigma >= 0.0)) out.push_back({"radio.interference_sigma", "must be >= 0"});
  if (!(r.shadow_sigma >= 0.0)) out.push_back({"radio.shadow_sigma", "must be >= 0"});
  if (!(s.min_device_distance >= 0.0)) out.push_back({"min_device_distance", "must be >= 0"});
  return out;
}

void orient_riss(Scenario& s) {
  const Position3D u = s.ue_centroid();
  for (auto& g : s.riss) {
    g.orientation = compute_ris_orientation(s.bs, g.center, u);
    g.elements = compute_element_positions(g);
  }
}

std::vector<Position3D> sample_devices_in_disc(const Disc& disc, int count, double min_distance,
                                               double height, Rng& rng) {
  std::vector<Position3D> out;
  out.reserve(static_cast<std::size_t>(count));
  constexpr int kMaxAttempts = 100000;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > kMaxAttempts) throw GeometryError("cannot place devices with the requested spacing");
    const double r = disc.radius * std::sqrt(uniform01(rng));
    const double a = 2.0 * std::numbers::pi * uniform01(rng);
    const Position3D p{disc.cx + r * std::cos(a), disc.cy + r * std::sin(a), height};
    bool ok = true;
    for (const auto& q : out)
      if (distance_xy(p, q) < min_distance) {
        ok = false;
        break;
      }
    if (ok) out.push_back(p);
  }
  return out;
}

Scenario fig3_scenario() {
  Scenario s;
  s.bs = {40.0, 40.0, 20.0};
  s.ues = {{150.0, 150.0, 1.5}};
  s.devices = {{157.4, 140.5, 1.5}, {141.3, 156.8, 1.5}, {162.5, 146.6, 1.5}};
  for (const auto& [x, y] : {std::pair{115.0, 195.0}, std::pair{195.0, 115.0}, std::pair{95.0, 165.0}})
    s.riss.push_back(make_ris({x, y, 10.0}, 101, 101, 0.01, 0.01, 0.0));
  s.radio.tx_power = 0.1;
  s.radio.noise_power = 1e-13;
  s.radio.interference_sigma = 1.0;
  const double total = std::pow(10.0, -95.0 / 10.0) / 1000.0;
  s.radio.interference_mu = 0.5 * std::log(total - s.radio.noise_power) - 1.0;
  s.radio.carrier_freq = 5.9e9;
  s.radio.bandwidth = 40e6;
  s.radio.code_rate = 0.5;
  s.radio.rician_factor = 4.0;
  s.radio.antenna_gain = 1.0;
  s.radio.pathloss_exp = 3.7;
  s.radio.reflection_amplitude = 1.0;
  s.radio.pin_bits = 8;
  s.radio.shadow_sigma = 8.0 * std::log(10.0) / 10.0;
  s.sf_table = make_sf_table({7, 8, 9, 10, 11, 12}, {4500, 4000, 3500, 3000, 2500, 2000}, s.radio.bandwidth,
                             s.radio.code_rate);
  s.ris_active_prob.assign(s.riss.size(), 0.2);
  s.phase = {PhaseMode::OptimalForUEs, 170};
  s.device_area = {150.0, 150.0, 22.5};
  s.min_device_distance = 5.0;
  s.device_height = 1.5;
  orient_riss(s);
  return s;
}

}  // namespace e2boost
