#pragma once

#include "spdc/crystal_optics.hpp"
#include "spdc/mode_image.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace spdc {

/// One geometric emission sample. The walk-off model uses the azimuth
/// convention x ~ sin(phi), y ~ cos(phi).
struct RaySample {
  double a = 0.0;       // birth depth in the crystal [m], 0 <= a <= L
  double phi = 0.0;     // emission azimuth [rad], [0, 2 pi)
  double theta = 0.0;   // internal emission polar angle [rad]
  // transverse position at the current reference plane [m]; the crystal exit
  // face when freshly sampled
  double exit_x = 0.0;
  double exit_y = 0.0;
  double dir_theta = 0.0;   // external propagation polar angle [rad]
  double dir_phi = 0.0;     // external propagation azimuth [rad]
};

/// Position plus direction slopes (dx/dz, dy/dz).
struct ParaxialRay {
  double x = 0.0;
  double y = 0.0;
  double sx = 0.0;
  double sy = 0.0;
};

ParaxialRay to_paraxial(const RaySample& s);
/// Writes position and direction of a paraxial ray back into a sample,
/// keeping its birth coordinates.
RaySample with_paraxial(RaySample s, const ParaxialRay& r);

/// x = sin(phi) (L - a) tan(theta), y = cos(phi) (L - a) tan(theta) - a tan(rho)
std::pair<double, double> geometric_exit_point(double length_m, double a, double theta, double phi,
                                               double rho);

/// Stratified grid of n_depth depth cells x n_azimuth azimuth cells (cell
/// centers). Outgoing directions are refracted into air with the given exit
/// index.
std::vector<RaySample> sample_geometric_mode(const CrystalSpec& spec, double theta_internal,
                                             double rho, double exit_index, int n_depth,
                                             int n_azimuth);

/// Moves every sample's position ballistically by distance_m along its direction.
void propagate(std::span<RaySample> samples, double distance_m);

/// Propagates each sample to plane_z and splats it bilinearly with unit
/// weight, applies the optional blur, then normalizes to a peak of 1.
ModeImage render_geometric(std::span<const RaySample> samples, double plane_z_m,
                           const ImageParams& params);

struct PumpSpec {
  double wavelength_nm = 405.0;
  double waist_um = 78.6;
  double power_mw = 40.0;
};

struct WaveGridParams {
  /// false: idler paired as k_i = -k_s; true: sum over the pump's transverse
  /// spectrum on a q_points x q_points grid spanning +-q_extent * 2 / waist.
  bool full_sum = false;
  int q_points = 9;
  double q_extent = 3.0;
  int supersample = 1;
};

/// Far-field |Phi|^2 image. Each pixel maps to an external direction via
/// tan(theta_x) = x / plane_z; the direction is refracted into the crystal to
/// get the signal transverse k. rho_override replaces the computed walk-off.
ModeImage render_wave(const CrystalSpec& spec, const PumpSpec& pump, const Wavelengths& wl,
                      double theta_pm, double plane_z_m, const WaveGridParams& grid,
                      const ImageParams& params, std::optional<double> rho_override = {});

/// Internal signal angle where the stationary-pairing mismatch vanishes for a
/// given pump angle; 0 when the pump angle is below the collinear solution.
double ring_emission_angle(const CrystalSpec& spec, const Wavelengths& wl, double theta_pm);

struct WidthSample {
  double azimuth = 0.0;   // radians, atan2(dy, dx) about the ring center
  double width_um = 0.0;  // 1/e^2 full width of the radial lobe
};

/// Radial 1/e^2 lobe widths in 360 azimuth bins around the fitted ring center.
std::vector<WidthSample> radial_width_profile(const ModeImage& image);

enum class RenderMethod { Geometric, Wave };

/// Everything needed to render one configured mode.
struct ModeConfig {
  CrystalSpec crystal;
  PumpSpec pump;
  Wavelengths wavelengths = Wavelengths::from_pump_signal(405.0, 780.0);
  double emission_angle_deg = 1.5;   // external
  double plane_z_mm = 50.0;
  std::optional<double> rho_override_deg;
  RenderMethod method = RenderMethod::Geometric;
  int n_depth = 200;
  int n_azimuth = 720;
  bool pump_blur = false;
  WaveGridParams wave;
  ImageParams image;

  double internal_emission_angle() const;
  double phasematch_angle() const;
  double walkoff() const;
};

std::vector<RaySample> mode_samples(const ModeConfig& cfg);
ModeImage render_mode(const ModeConfig& cfg);

} // namespace spdc
