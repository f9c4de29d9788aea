#pragma once

#include "spdc/mode_image.hpp"
#include "spdc/mode_sim.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace spdc {

struct RingFit {
  double center_x_um = 0.0;
  double center_y_um = 0.0;
  double radius_um = 0.0;   // 0 when the circle fit fell back to the centroid
};

/// Intensity-weighted centroid refined by one algebraic circle fit over the
/// pixels above half maximum. Throws AnalysisError on degenerate images
/// (fewer than 1% of pixels above 10% of the peak).
RingFit fit_ring(const ModeImage& image);

struct Point {
  double x_um = 0.0;
  double y_um = 0.0;
};

Point find_ring_center(const ModeImage& image);

enum class Axis { X, Y };

struct AxisLobes {
  std::array<double, 2> widths_um{};   // negative side, positive side
  std::array<double, 2> peak_pos_um{};
  double mean_um() const { return 0.5 * (widths_um[0] + widths_um[1]); }
};

/// The two lobes where the annulus crosses the axis line through center, each
/// measured as the full width at 1/e^2 of its own peak.
AxisLobes axis_lobes(const ModeImage& image, Point center, Axis axis);
double axis_thickness(const ModeImage& image, Point center, Axis axis);

struct AsymmetryReport {
  double center_x_um = 0.0;
  double center_y_um = 0.0;
  double width_x_a_um = 0.0;
  double width_y_b_um = 0.0;
  double af = 0.0;
};

AsymmetryReport asymmetry_factor(const ModeImage& image);

enum class SweepParameter { CrystalLength, EmissionAngle, PumpWaist };

SweepParameter parse_sweep_parameter(const std::string& name);
/// Column label with unit, e.g. "crystal_length_mm".
std::string sweep_label(SweepParameter p);
void apply_sweep_value(ModeConfig& cfg, SweepParameter p, double value);

struct SweepRow {
  double value = 0.0;
  AsymmetryReport report;
};

/// Renders and measures one configuration per value, ordered by value.
std::vector<SweepRow> sweep_af(SweepParameter p, std::vector<double> values,
                               const ModeConfig& fixed);

void write_sweep_csv(std::ostream& os, SweepParameter p, const std::vector<SweepRow>& rows);

} // namespace spdc
