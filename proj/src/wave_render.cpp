#include "spdc/errors.hpp"
#include "spdc/mode_sim.hpp"
#include "spdc/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace spdc {

double ring_emission_angle(const CrystalSpec& spec, const Wavelengths& wl, double theta_pm) {
  auto f = [&](double theta_s) { return longitudinal_mismatch(spec, wl, theta_pm, theta_s); };
  if (f(0.0) >= 0.0)
    return 0.0;
  const double ks = wavenumber(spec, wl.signal_nm, Ordinary{});
  const double ki = wavenumber(spec, wl.idler_nm, Ordinary{});
  double hi = std::min(0.5, std::asin(std::min(1.0, ki / ks)));
  if (f(hi) < 0.0)
    throw PhaseMatchError("emission ring lies beyond the supported angular range");
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

struct WaveContext {
  double kp, ks, ki, n_signal, length_m, rho, waist_um;
  const WaveGridParams* grid;
};

double signal_intensity(const WaveContext& c, double tan_x, double tan_y) {
  const double theta_ext = std::atan(std::hypot(tan_x, tan_y));
  const double phi = std::atan2(tan_y, tan_x);
  const double s_int = std::sin(theta_ext) / c.n_signal;
  const double theta_s = std::asin(s_int);
  const TransverseK ks_perp = transverse_k(c.ks, theta_s, phi);

  if (!c.grid->full_sum) {
    const TransverseK ki_perp = -ks_perp;
    const double kt = std::sqrt(ki_perp.norm2());
    if (kt >= c.ki)
      return 0.0;
    const double theta_i = std::asin(kt / c.ki);
    const auto m = mismatch_components(c.kp, c.ks, c.ki, theta_s, theta_i, phi,
                                       phi + std::numbers::pi);
    const double dk = mismatch_with_walkoff(m, c.kp, ks_perp, ki_perp, c.rho);
    return std::norm(phase_matching_amplitude(c.length_m, dk, 1.0));
  }

  const int n = c.grid->q_points;
  const double q_max = c.grid->q_extent * 2.0 / (c.waist_um * 1e-6);
  double acc = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double qy = n == 1 ? 0.0 : -q_max + 2.0 * q_max * iy / (n - 1);
    for (int ix = 0; ix < n; ++ix) {
      const double qx = n == 1 ? 0.0 : -q_max + 2.0 * q_max * ix / (n - 1);
      const TransverseK q{qx, qy};
      const TransverseK ki_perp{qx - ks_perp.kx, qy - ks_perp.ky};
      const double kt = std::sqrt(ki_perp.norm2());
      if (kt >= c.ki)
        continue;
      const double theta_i = std::asin(kt / c.ki);
      const double phi_i = std::atan2(ki_perp.ky, ki_perp.kx);
      const auto m = mismatch_components(c.kp, c.ks, c.ki, theta_s, theta_i, phi, phi_i);
      const double dk = mismatch_with_walkoff(m, c.kp, ks_perp, ki_perp, c.rho);
      acc += std::norm(phase_matching_amplitude(c.length_m, dk, pump_envelope(q, c.waist_um)));
    }
  }
  return acc;
}

// Width in pixels of the brightest lobe on the row through the optical axis.
double axis_lobe_width_px(const ModeImage& img) {
  const double fy = img.row_of(0.0);
  const double fx0 = std::max(0.0, img.col_of(0.0));
  std::vector<double> row(img.width());
  for (int x = 0; x < img.width(); ++x)
    row[x] = img.sample(x, fy);
  int peak = static_cast<int>(std::ceil(fx0));
  for (int x = peak; x < img.width(); ++x)
    if (row[x] > row[peak])
      peak = x;
  const double thr = row[peak] * std::exp(-2.0);
  int l = peak, r = peak;
  while (l > 0 && row[l - 1] > thr)
    --l;
  while (r < img.width() - 1 && row[r + 1] > thr)
    ++r;
  return r - l + 1;
}

} // namespace

ModeImage render_wave(const CrystalSpec& spec, const PumpSpec& pump, const Wavelengths& wl,
                      double theta_pm, double plane_z_m, const WaveGridParams& grid,
                      const ImageParams& params, std::optional<double> rho_override) {
  wl.validate();
  if (!(plane_z_m > 0.0))
    throw ValidationError("wave rendering needs a far-field plane at plane_z > 0");
  if (grid.supersample < 1)
    throw ValidationError("supersample must be >= 1");
  if (grid.full_sum && (grid.q_points < 1 || grid.q_points % 2 == 0))
    throw ValidationError("q_points must be a positive odd number");
  if (grid.full_sum && !(pump.waist_um > 0.0))
    throw ValidationError("pump waist must be positive");

  ModeImage img = ModeImage::from_params(params);
  img.plane_z_m = plane_z_m;

  // The angular span of the grid has to cover three ring radii.
  const double ring_int = ring_emission_angle(spec, wl, theta_pm);
  const double n_s = index_ordinary(spec, wl.signal_nm);
  const double ring_um = plane_z_m * 1e6 * std::tan(std::asin(n_s * std::sin(ring_int)));
  const double half_span =
      std::min({std::abs(img.x_um(-0.5)), std::abs(img.x_um(img.width() - 0.5)),
                std::abs(img.y_um(-0.5)), std::abs(img.y_um(img.height() - 0.5))});
  if (ring_um > 0.0 && 2.0 * half_span < 3.0 * ring_um) {
    std::ostringstream os;
    os << "image spans " << 2.0 * half_span << " um but the ring radius is " << ring_um
       << " um; need at least 3x";
    throw ValidationError(os.str());
  }

  const WaveContext ctx{wavenumber(spec, wl.pump_nm, Extraordinary{theta_pm}),
                        wavenumber(spec, wl.signal_nm, Ordinary{}),
                        wavenumber(spec, wl.idler_nm, Ordinary{}),
                        n_s,
                        spec.length_m(),
                        rho_override ? *rho_override : walkoff_angle(spec, wl.pump_nm, theta_pm),
                        pump.waist_um,
                        &grid};

  const int ss = grid.supersample;
  const double z_um = plane_z_m * 1e6;
  for (int iy = 0; iy < img.height(); ++iy)
    for (int ix = 0; ix < img.width(); ++ix) {
      double acc = 0.0;
      for (int sy = 0; sy < ss; ++sy)
        for (int sx = 0; sx < ss; ++sx) {
          const double x = img.x_um(ix + (sx + 0.5) / ss - 0.5);
          const double y = img.y_um(iy + (sy + 0.5) / ss - 0.5);
          acc += signal_intensity(ctx, x / z_um, y / z_um);
        }
      img.at(ix, iy) = acc / (ss * ss);
    }

  img.normalize();
  const double width_px = axis_lobe_width_px(img);
  if (width_px < 8.0) {
    std::ostringstream os;
    os << "emission ring is only " << width_px << " pixels wide; refine the pixel pitch";
    throw ResolutionError(os.str());
  }
  return img;
}

} // namespace spdc
