#include "spdc/correction.hpp"

#include "spdc/errors.hpp"
#include "spdc/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace spdc {

void LensSpec::validate() const {
  if (!(focal_mm > 0.0))
    throw ValidationError("lens focal_mm must be positive");
  if (!(distance_mm >= 0.0))
    throw ValidationError("lens distance_mm must be non-negative");
  if (!std::isfinite(offset_x_um) || !std::isfinite(offset_y_um))
    throw ValidationError("lens offsets must be finite");
}

void CorrectionSetup::validate() const {
  lens.validate();
  image.validate();
  if (!(camera_z() > lens.distance_mm))
    throw ValidationError("camera must sit behind the lens");
}

ParaxialRay apply_lens(const ParaxialRay& r, const LensSpec& lens) {
  const double f = lens.focal_mm * 1e-3;
  const double ox = lens.offset_x_um * 1e-6;
  const double oy = lens.offset_y_um * 1e-6;
  return {r.x, r.y, r.sx - (r.x - ox) / f, r.sy - (r.y - oy) / f};
}

void apply_lens(std::span<RaySample> samples, const LensSpec& lens) {
  for (auto& s : samples)
    s = with_paraxial(s, apply_lens(to_paraxial(s), lens));
}

ModeImage render_corrected(std::span<const RaySample> exit_samples, const CorrectionSetup& setup) {
  std::vector<RaySample> s(exit_samples.begin(), exit_samples.end());
  propagate(s, setup.lens.distance_mm * 1e-3);
  apply_lens(s, setup.lens);
  ModeImage img = render_geometric(s, (setup.camera_z() - setup.lens.distance_mm) * 1e-3,
                                   setup.image);
  img.plane_z_m = setup.camera_z() * 1e-3;
  return img;
}

namespace {

constexpr double kTie = 0.005;

struct Objective {
  std::span<const RaySample> samples;
  CorrectionSetup setup;
  std::vector<TraceRow>* trace;

  // Signed AF at an offset; NaN if the ring is not measurable there.
  double af(double ox, double oy) {
    CorrectionSetup s = setup;
    s.lens.offset_x_um = ox;
    s.lens.offset_y_um = oy;
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      v = asymmetry_factor(render_corrected(samples, s)).af;
    } catch (const AnalysisError&) {
    } catch (const EmptyImageError&) {
    }
    trace->push_back({static_cast<int>(trace->size()), ox, oy, v});
    return v;
  }
};

double cost(double af) { return std::isnan(af) ? std::numeric_limits<double>::infinity() : std::abs(af); }

// Golden-section search for the minimum of f on [lo, hi] down to tol.
template <class F>
std::pair<double, double> golden(F&& f, double lo, double hi, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

} // namespace

OffsetResult optimize_offset(const ModeConfig& cfg, const CorrectionSetup& setup) {
  setup.validate();
  OffsetResult res;
  res.af_before = asymmetry_factor(render_mode(cfg)).af;

  const auto samples = mode_samples(cfg);
  Objective obj{samples, setup, &res.trace};

  const double span_um = std::max(cfg.crystal.length_mm * 1e3 * std::tan(cfg.walkoff()), 10.0);
  constexpr int kGrid = 21;
  constexpr int kHalf = kGrid / 2;
  const double step = span_um / kHalf;
  res.grid_step_um = step;

  struct Cell {
    double ox, oy, af;
  };
  std::vector<Cell> cells;
  cells.reserve(kGrid * kGrid);
  for (int j = 0; j < kGrid; ++j)
    for (int i = 0; i < kGrid; ++i) {
      const double ox = (i - kHalf) * step;
      const double oy = (j - kHalf) * step;
      cells.push_back({ox, oy, obj.af(ox, oy)});
    }
  const Cell& centered = cells[kHalf * kGrid + kHalf];
  res.af_centered = centered.af;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double best = lo;
  for (const auto& c : cells) {
    if (std::isnan(c.af))
      continue;
    lo = std::min(lo, c.af);
    hi = std::max(hi, c.af);
    best = std::min(best, std::abs(c.af));
  }
  if (!std::isfinite(best))
    throw AnalysisError("corrected ring is not measurable at any lens offset");

  if (hi - lo < kTie) {
    res.flat = true;
    res.af_after = centered.af;
    return res;
  }

  // Smallest offset among the near-best cells.
  const Cell* pick = nullptr;
  for (const auto& c : cells) {
    if (cost(c.af) > best + kTie)
      continue;
    if (!pick || std::hypot(c.ox, c.oy) < std::hypot(pick->ox, pick->oy))
      pick = &c;
  }
  double ox = pick->ox, oy = pick->oy, af = pick->af;

  auto refine = [&](bool along_x) {
    auto f = [&](double t) { return cost(along_x ? obj.af(t, oy) : obj.af(ox, t)); };
    const double c0 = along_x ? ox : oy;
    const auto [t, ft] = golden(f, c0 - step, c0 + step, 1.0);
    if (ft < cost(af) - kTie) {
      (along_x ? ox : oy) = t;
      af = obj.af(ox, oy);
    }
  };
  refine(true);
  refine(false);

  res.offset_x_um = ox;
  res.offset_y_um = oy;
  res.af_after = af;
  return res;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iteration,offset_x_um,offset_y_um,af\n";
  for (const auto& r : trace)
    os << r.iteration << ',' << format_double(r.offset_x_um) << ','
       << format_double(r.offset_y_um) << ',' << (std::isnan(r.af) ? "nan" : format_double(r.af))
       << '\n';
}

Point intensity_centroid(const ModeImage& image) {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (int iy = 0; iy < image.height(); ++iy)
    for (int ix = 0; ix < image.width(); ++ix) {
      const double v = image.at(ix, iy);
      sw += v;
      sx += v * image.x_um(ix);
      sy += v * image.y_um(iy);
    }
  if (!(sw > 0.0))
    throw AnalysisError("empty image has no centroid");
  return {sx / sw, sy / sw};
}

CouplingEstimate smf_coupling_estimate(const ModeImage& image, double mode_waist_um, Point center) {
  if (!(mode_waist_um > 0.0))
    throw ValidationError("mode waist must be positive");
  double si = 0.0, sg = 0.0;
  const double k = 2.0 / (mode_waist_um * mode_waist_um);
  for (int iy = 0; iy < image.height(); ++iy) {
    const double dy = image.y_um(iy) - center.y_um;
    for (int ix = 0; ix < image.width(); ++ix) {
      const double v = image.at(ix, iy);
      if (v == 0.0)
        continue;
      const double dx = image.x_um(ix) - center.x_um;
      si += v;
      sg += v * std::exp(-k * (dx * dx + dy * dy));
    }
  }
  if (!(si > 0.0))
    throw AnalysisError("empty image");
  return {std::clamp(sg / si, 0.0, 1.0), mode_waist_um, center};
}

} // namespace spdc
