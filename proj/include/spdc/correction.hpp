#pragma once

#include "spdc/image_metrics.hpp"
#include "spdc/mode_image.hpp"
#include "spdc/mode_sim.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace spdc {

struct LensSpec {
  double focal_mm = 100.0;
  double distance_mm = 100.0;   // crystal exit face to lens plane
  double offset_x_um = 0.0;
  double offset_y_um = 0.0;

  void validate() const;
};

/// Paraxial thin lens at its own plane: slopes change by -(position - offset) / f,
/// positions are unchanged.
ParaxialRay apply_lens(const ParaxialRay& ray, const LensSpec& lens);
/// Same map on samples that have already been propagated to the lens plane.
void apply_lens(std::span<RaySample> samples, const LensSpec& lens);

struct CorrectionSetup {
  LensSpec lens;
  /// Camera distance from the crystal exit face; defaults to the lens's back
  /// focal plane (distance + focal).
  std::optional<double> camera_z_mm;
  ImageParams image = [] {
    ImageParams p;
    p.width = p.height = 256;
    p.pitch_um = 27.0;
    return p;
  }();

  double camera_z() const { return camera_z_mm ? *camera_z_mm : lens.distance_mm + lens.focal_mm; }
  void validate() const;
};

/// Free space to the lens, lens, free space to the camera, then render.
ModeImage render_corrected(std::span<const RaySample> exit_samples, const CorrectionSetup& setup);

struct TraceRow {
  int iteration = 0;
  double offset_x_um = 0.0;
  double offset_y_um = 0.0;
  double af = 0.0;   // NaN when the ring could not be measured
};

struct OffsetResult {
  double offset_x_um = 0.0;
  double offset_y_um = 0.0;
  double af_before = 0.0;     // uncorrected mode at its own camera plane
  double af_after = 0.0;      // with the lens at the returned offset
  double af_centered = 0.0;   // with the lens on axis
  double grid_step_um = 0.0;
  bool flat = false;
  std::vector<TraceRow> trace;
};

/// Minimizes |AF| of the lens-corrected image over lateral lens offsets:
/// a 21 x 21 grid spanning +-max(L tan(rho), 10 um), then golden-section
/// refinement per axis to 1 um. Ties within 0.005 go to the smallest offset.
/// After images use setup.image, including its blur.
OffsetResult optimize_offset(const ModeConfig& cfg, const CorrectionSetup& setup);

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

struct CouplingEstimate {
  double efficiency = 0.0;
  double mode_waist_um = 0.0;
  Point center;
};

/// Gaussian-overlap proxy for single-mode-fiber coupling:
/// sum(I G) / sum(I), G unit-peak with 1/e^2 waist mode_waist_um.
CouplingEstimate smf_coupling_estimate(const ModeImage& image, double mode_waist_um, Point center);

/// Intensity-weighted centroid.
Point intensity_centroid(const ModeImage& image);

} // namespace spdc
