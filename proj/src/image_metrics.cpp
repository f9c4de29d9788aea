#include "spdc/image_metrics.hpp"

#include "spdc/errors.hpp"
#include "spdc/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace spdc {

namespace {

const char* axis_name(Axis a) { return a == Axis::X ? "x" : "y"; }

// Solves a 3x3 system by Gaussian elimination with partial pivoting.
bool solve3(std::array<std::array<double, 4>, 3> m, std::array<double, 3>& out) {
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c]))
        piv = r;
    if (std::abs(m[piv][c]) < 1e-300)
      return false;
    std::swap(m[c], m[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c)
        continue;
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k)
        m[r][k] -= f * m[c][k];
    }
  }
  for (int i = 0; i < 3; ++i)
    out[i] = m[i][3] / m[i][i];
  return std::isfinite(out[0]) && std::isfinite(out[1]) && std::isfinite(out[2]);
}

} // namespace

RingFit fit_ring(const ModeImage& image) {
  const double peak = image.max_value();
  if (!(peak > 0.0))
    throw AnalysisError("degenerate image: no positive intensity");
  std::size_t lit = 0;
  for (double v : image.data())
    if (v > 0.1 * peak)
      ++lit;
  const std::size_t total = image.data().size();
  if (lit * 100 < total)
    throw AnalysisError("degenerate image: fewer than 1% of pixels above 10% of peak");

  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (int iy = 0; iy < image.height(); ++iy)
    for (int ix = 0; ix < image.width(); ++ix) {
      const double v = image.at(ix, iy);
      sw += v;
      sx += v * image.x_um(ix);
      sy += v * image.y_um(iy);
    }
  RingFit fit{sx / sw, sy / sw, 0.0};

  // Kasa fit: x^2 + y^2 + D x + E y + F = 0, coordinates relative to the
  // centroid for conditioning.
  std::array<std::array<double, 4>, 3> m{};
  std::size_t n = 0;
  for (int iy = 0; iy < image.height(); ++iy)
    for (int ix = 0; ix < image.width(); ++ix) {
      if (!(image.at(ix, iy) > 0.5 * peak))
        continue;
      const double x = image.x_um(ix) - fit.center_x_um;
      const double y = image.y_um(iy) - fit.center_y_um;
      const double r2 = x * x + y * y;
      const std::array<double, 3> row{x, y, 1.0};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j)
          m[i][j] += row[i] * row[j];
        m[i][3] -= row[i] * r2;
      }
      ++n;
    }
  std::array<double, 3> sol{};
  if (n < 3 || !solve3(m, sol))
    return fit;
  const double cx = -0.5 * sol[0];
  const double cy = -0.5 * sol[1];
  const double r2 = cx * cx + cy * cy - sol[2];
  const double ax = fit.center_x_um + cx;
  const double ay = fit.center_y_um + cy;
  const bool inside = image.col_of(ax) >= 0.0 && image.col_of(ax) <= image.width() - 1 &&
                      image.row_of(ay) >= 0.0 && image.row_of(ay) <= image.height() - 1;
  if (!(r2 > 0.0) || !inside)
    return fit;
  return {ax, ay, std::sqrt(r2)};
}

Point find_ring_center(const ModeImage& image) {
  const RingFit f = fit_ring(image);
  return {f.center_x_um, f.center_y_um};
}

AxisLobes axis_lobes(const ModeImage& image, Point center, Axis axis) {
  const bool along_x = axis == Axis::X;
  const int n = along_x ? image.width() : image.height();
  const double fixed = along_x ? image.row_of(center.y_um) : image.col_of(center.x_um);
  const double c = along_x ? image.col_of(center.x_um) : image.row_of(center.y_um);

  std::vector<double> prof(n);
  for (int i = 0; i < n; ++i)
    prof[i] = along_x ? image.sample(i, fixed) : image.sample(fixed, i);
  const double line_max = *std::max_element(prof.begin(), prof.end());

  auto fail = [&](const std::string& why) {
    return AnalysisError(std::string("axis ") + axis_name(axis) + ": " + why);
  };
  if (!(line_max > 0.0))
    throw fail("fewer than two lobes detected (empty profile)");

  AxisLobes out;
  for (int side = 0; side < 2; ++side) {
    int peak = -1;
    for (int i = 0; i < n; ++i) {
      const bool on_side = side == 0 ? i < c : i > c;
      if (on_side && (peak < 0 || prof[i] > prof[peak]))
        peak = i;
    }
    if (peak < 0 || !(prof[peak] > 1e-3 * line_max))
      throw fail("fewer than two lobes detected");
    const double thr = prof[peak] * std::exp(-2.0);

    int r = peak;
    while (r + 1 < n && prof[r + 1] >= thr)
      ++r;
    int l = peak;
    while (l - 1 >= 0 && prof[l - 1] >= thr)
      --l;
    if (r + 1 >= n || l - 1 < 0)
      throw fail("lobe is truncated by the image edge");
    const double xr = r + (prof[r] - thr) / (prof[r] - prof[r + 1]);
    const double xl = l - (prof[l] - thr) / (prof[l] - prof[l - 1]);
    out.widths_um[side] = (xr - xl) * image.pitch_um();
    out.peak_pos_um[side] = along_x ? image.x_um(peak) : image.y_um(peak);
  }
  return out;
}

double axis_thickness(const ModeImage& image, Point center, Axis axis) {
  return axis_lobes(image, center, axis).mean_um();
}

AsymmetryReport asymmetry_factor(const ModeImage& image) {
  const Point c = find_ring_center(image);
  AsymmetryReport r;
  r.center_x_um = c.x_um;
  r.center_y_um = c.y_um;
  r.width_x_a_um = axis_thickness(image, c, Axis::X);
  r.width_y_b_um = axis_thickness(image, c, Axis::Y);
  r.af = 1.0 - r.width_x_a_um / r.width_y_b_um;
  return r;
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "crystal_length" || name == "crystal_length_mm")
    return SweepParameter::CrystalLength;
  if (name == "emission_angle" || name == "emission_angle_deg")
    return SweepParameter::EmissionAngle;
  if (name == "pump_waist" || name == "pump_waist_um")
    return SweepParameter::PumpWaist;
  throw ConfigError("unknown sweep parameter '" + name +
                    "' (expected crystal_length, emission_angle or pump_waist)");
}

std::string sweep_label(SweepParameter p) {
  switch (p) {
  case SweepParameter::CrystalLength:
    return "crystal_length_mm";
  case SweepParameter::EmissionAngle:
    return "emission_angle_deg";
  case SweepParameter::PumpWaist:
    return "pump_waist_um";
  }
  return "";
}

void apply_sweep_value(ModeConfig& cfg, SweepParameter p, double value) {
  switch (p) {
  case SweepParameter::CrystalLength:
    cfg.crystal.length_mm = value;
    break;
  case SweepParameter::EmissionAngle:
    cfg.emission_angle_deg = value;
    break;
  case SweepParameter::PumpWaist:
    cfg.pump.waist_um = value;
    break;
  }
}

std::vector<SweepRow> sweep_af(SweepParameter p, std::vector<double> values,
                               const ModeConfig& fixed) {
  if (values.empty())
    throw ConfigError("sweep needs at least one value");
  std::sort(values.begin(), values.end());
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double v : values) {
    ModeConfig cfg = fixed;
    apply_sweep_value(cfg, p, v);
    auto where = [&] { return sweep_label(p) + " = " + format_double(v) + ": "; };
    try {
      rows.push_back({v, asymmetry_factor(render_mode(cfg))});
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    } catch (const Error& e) {
      throw Error(where() + e.what());
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, SweepParameter p, const std::vector<SweepRow>& rows) {
  os << "parameter,value,af,width_x_a_um,width_y_b_um,center_x_um,center_y_um\n";
  for (const auto& r : rows)
    os << sweep_label(p) << ',' << format_double(r.value) << ',' << format_double(r.report.af)
       << ',' << format_double(r.report.width_x_a_um) << ','
       << format_double(r.report.width_y_b_um) << ',' << format_double(r.report.center_x_um)
       << ',' << format_double(r.report.center_y_um) << '\n';
}

} // namespace spdc
