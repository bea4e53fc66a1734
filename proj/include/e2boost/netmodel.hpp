#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "e2boost/rng.hpp"

namespace e2boost {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;  // height

  friend bool operator==(const Position3D&, const Position3D&) = default;
};

double distance(const Position3D& a, const Position3D& b);
double distance_xy(const Position3D& a, const Position3D& b);
Position3D centroid(const std::vector<Position3D>& points);

/// Planar RIS panel standing perpendicular to the ground.
///
/// Element (r, c), with 0-based row r along the panel's horizontal direction
/// and column c along the vertical, sits at
///   center + (r + 1 - ceil(rows/2)) * spacing_v * (cos phi, sin phi, 0)
///          + (c + 1 - ceil(cols/2)) * spacing_h * (0, 0, 1).
/// For a 101x101 panel the central element is (51, 51) in 1-based indexing.
struct RisGeometry {
  Position3D center;
  int rows = 101;
  int cols = 101;
  double spacing_v = 0.01;
  double spacing_h = 0.01;
  double orientation = 0.0;  // radians, angle between the panel and the X axis
  std::vector<Position3D> elements;  // row-major, rows * cols

  const Position3D& element(int r, int c) const { return elements[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t element_count() const { return elements.size(); }
};

/// Orientation of a RIS from the BS, RIS-center and UE-centroid XY positions.
/// Throws GeometryError when RB or RU has zero length.
double compute_ris_orientation(const Position3D& bs, const Position3D& ris_center,
                               const Position3D& ue_centroid);

std::vector<Position3D> compute_element_positions(const RisGeometry& geom);

/// Builds a panel and fills its element grid.
RisGeometry make_ris(const Position3D& center, int rows, int cols, double spacing_v,
                     double spacing_h, double orientation);

struct SfTable {
  std::vector<int> sfs;             // ascending
  std::vector<double> rates;        // bits/s, descending
  std::vector<double> thresholds;   // linear SINR, descending

  int size() const { return static_cast<int>(sfs.size()); }
};

/// Builds the table with rates from the chirp-spread-spectrum rate law.
SfTable make_sf_table(std::vector<int> sfs, std::vector<double> thresholds, double bandwidth,
                      double code_rate);

struct RadioConstants {
  double tx_power = 0.1;            // W
  double noise_power = 1e-13;       // W
  double interference_mu = 0.0;     // ln-domain mean
  double interference_sigma = 1.0;  // ln-domain std
  double carrier_freq = 5.9e9;      // Hz
  double bandwidth = 40e6;          // Hz
  double code_rate = 0.5;
  double rician_factor = 4.0;       // may be +inf
  double antenna_gain = 1.0;
  double pathloss_exp = 3.7;
  double reflection_amplitude = 1.0;
  int pin_bits = 8;
  std::optional<double> shadow_mu;  // ln-domain; unset = follow UMa NLoS at the device-BS distance
  double shadow_sigma = 1.8420680743952367;  // ln-domain (8 dB)

  /// Denominator of the SINR: mean interference power plus noise.
  double noise_plus_interference() const;
  double wavelength() const;
};

enum class PhaseMode { OptimalForUEs, Constant };

struct PhaseShiftSetting {
  PhaseMode mode = PhaseMode::OptimalForUEs;
  int rho = 170;  // used by PhaseMode::Constant

  friend bool operator==(const PhaseShiftSetting&, const PhaseShiftSetting&) = default;
};

/// Parses "optimal" or "constant:<rho>".
PhaseShiftSetting parse_phase_mode(const std::string& text);
std::string to_string(const PhaseShiftSetting& setting);

struct Disc {
  double cx = 150.0;
  double cy = 150.0;
  double radius = 22.5;
};

struct Scenario {
  Position3D bs;
  std::vector<Position3D> ues;
  std::vector<Position3D> devices;
  std::vector<RisGeometry> riss;
  SfTable sf_table;
  RadioConstants radio;
  std::vector<double> ris_active_prob;  // per RIS
  PhaseShiftSetting phase;
  Disc device_area;
  double min_device_distance = 5.0;
  double device_height = 1.5;

  int device_count() const { return static_cast<int>(devices.size()); }
  int ris_count() const { return static_cast<int>(riss.size()); }
  int sf_count() const { return sf_table.size(); }
  Position3D ue_centroid() const { return centroid(ues); }

  /// Shadow-fading ln-mean used for device n.
  double shadow_mu_for(int device) const;
};

struct Violation {
  std::string path;
  std::string message;
};

std::vector<Violation> validate_scenario(const Scenario& s);

/// Re-derives every RIS orientation and element grid from the BS and UE centroid.
void orient_riss(Scenario& s);

/// Uniform positions inside the disc with pairwise XY distance >= min_distance
/// (rejection sampling). Throws GeometryError if the packing cannot be met.
std::vector<Position3D> sample_devices_in_disc(const Disc& disc, int count, double min_distance,
                                               double height, Rng& rng);

/// The shipped fixed three-device layout (same content as scenarios/fig3.scenario).
Scenario fig3_scenario();

}  // namespace e2boost
