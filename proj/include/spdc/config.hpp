#pragma once

#include "spdc/correction.hpp"
#include "spdc/image_io.hpp"
#include "spdc/image_metrics.hpp"
#include "spdc/mode_sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spdc {

struct LensSection {
  CorrectionSetup setup;
  /// 1/e^2 waist of the Gaussian used by the fiber-coupling proxy.
  double coupling_waist_um = 150.0;
};

struct SweepSection {
  SweepParameter parameter = SweepParameter::CrystalLength;
  std::vector<double> values;
};

/// One experiment as read from an INI file:
///
///   [crystal]     name, length_mm, catalog
///   [pump]        wavelength_nm, waist_um, power_mw
///   [wavelengths] signal_nm, idler_nm
///   [geometry]    emission_angle_deg, plane_z_mm, rho_override_deg
///   [render]      method, n_depth, n_azimuth, width, height, pitch_um,
///                 pump_blur, wave_full_sum, wave_q_points, wave_supersample
///   [lens]        focal_mm, distance_mm, offset_x_um, offset_y_um, camera_z_mm,
///                 width, height, pitch_um, blur_um (default: pump waist),
///                 coupling_waist_um
///   [sweep]       parameter, values
///   [output]      dir, format
///
/// Every section except [crystal] is optional. Unknown sections or keys are
/// rejected with a ConfigError naming them.
struct ExperimentConfig {
  std::string crystal_name;
  ModeConfig mode;
  std::optional<LensSection> lens;
  std::optional<SweepSection> sweep;
  std::filesystem::path output_dir = "out";
  ImageFormat format = ImageFormat::Pgm;
};

/// A relative catalog path resolves against base_dir (the config file's
/// directory); the output dir is left as written.
ExperimentConfig parse_config(std::istream& is, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<double> parse_value_list(const std::string& text);

/// Render parameters recorded in image sidecars.
MetadataParams describe(const ExperimentConfig& cfg);

} // namespace spdc
