#include "spdc/mode_sim.hpp"

#include "spdc/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace spdc {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap_azimuth(double phi) {
  phi = std::fmod(phi, 2.0 * std::numbers::pi);
  if (phi < 0.0)
    phi += 2.0 * std::numbers::pi;
  return phi;
}

} // namespace

ParaxialRay to_paraxial(const RaySample& s) {
  const double t = std::tan(s.dir_theta);
  return {s.exit_x, s.exit_y, t * std::sin(s.dir_phi), t * std::cos(s.dir_phi)};
}

RaySample with_paraxial(RaySample s, const ParaxialRay& r) {
  s.exit_x = r.x;
  s.exit_y = r.y;
  s.dir_theta = std::atan(std::hypot(r.sx, r.sy));
  s.dir_phi = (r.sx == 0.0 && r.sy == 0.0) ? 0.0 : wrap_azimuth(std::atan2(r.sx, r.sy));
  return s;
}

std::pair<double, double> geometric_exit_point(double length_m, double a, double theta, double phi,
                                               double rho) {
  if (!(a >= 0.0 && a <= length_m))
    throw ValidationError("birth depth must lie within [0, L]");
  if (!(theta >= 0.0))
    throw ValidationError("emission angle must be non-negative");
  const double r = (length_m - a) * std::tan(theta);
  return {std::sin(phi) * r, std::cos(phi) * r - a * std::tan(rho)};
}

std::vector<RaySample> sample_geometric_mode(const CrystalSpec& spec, double theta_internal,
                                             double rho, double exit_index, int n_depth,
                                             int n_azimuth) {
  if (n_depth < 2 || n_azimuth < 2)
    throw ValidationError("n_depth and n_azimuth must be at least 2");
  const double s_ext = exit_index * std::sin(theta_internal);
  if (!(s_ext < 1.0))
    throw ValidationError("emission angle is totally internally reflected at the exit face");
  const double dir_theta = std::asin(s_ext);
  const double length = spec.length_m();

  std::vector<RaySample> out;
  out.reserve(static_cast<std::size_t>(n_depth) * n_azimuth);
  for (int i = 0; i < n_depth; ++i) {
    const double a = (i + 0.5) * length / n_depth;
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = (j + 0.5) * 2.0 * std::numbers::pi / n_azimuth;
      const auto [x, y] = geometric_exit_point(length, a, theta_internal, phi, rho);
      out.push_back({a, phi, theta_internal, x, y, dir_theta, phi});
    }
  }
  return out;
}

void propagate(std::span<RaySample> samples, double distance_m) {
  for (auto& s : samples) {
    const double t = std::tan(s.dir_theta) * distance_m;
    s.exit_x += t * std::sin(s.dir_phi);
    s.exit_y += t * std::cos(s.dir_phi);
  }
}

ModeImage render_geometric(std::span<const RaySample> samples, double plane_z_m,
                           const ImageParams& params) {
  ModeImage img = ModeImage::from_params(params);
  img.plane_z_m = plane_z_m;
  const int w = img.width();
  const int h = img.height();

  std::size_t inside = 0;
  double deposited = 0.0;
  for (const auto& s : samples) {
    const double t = std::tan(s.dir_theta) * plane_z_m;
    const double x_um = (s.exit_x + t * std::sin(s.dir_phi)) * 1e6;
    const double y_um = (s.exit_y + t * std::cos(s.dir_phi)) * 1e6;
    double fx = img.col_of(x_um);
    double fy = img.row_of(y_um);
    // Unit conversions leave ~1e-15 px of noise on exact grid nodes.
    if (std::abs(fx - std::round(fx)) < 1e-9)
      fx = std::round(fx);
    if (std::abs(fy - std::round(fy)) < 1e-9)
      fy = std::round(fy);
    if (!(fx >= 0.0 && fy >= 0.0 && fx <= w - 1 && fy <= h - 1))
      continue;
    int ix = static_cast<int>(std::floor(fx));
    int iy = static_cast<int>(std::floor(fy));
    if (ix == w - 1)
      --ix;
    if (iy == h - 1)
      --iy;
    const double dx = fx - ix;
    const double dy = fy - iy;
    const double w00 = (1 - dx) * (1 - dy);
    const double w10 = dx * (1 - dy);
    const double w01 = (1 - dx) * dy;
    const double w11 = dx * dy;
    img.at(ix, iy) += w00;
    img.at(ix + 1, iy) += w10;
    img.at(ix, iy + 1) += w01;
    img.at(ix + 1, iy + 1) += w11;
    deposited += (w00 + w10) + (w01 + w11);
    ++inside;
  }
  if (inside == 0)
    throw EmptyImageError("no samples fall inside the image grid");

  img.in_bounds = inside;
  img.deposited_weight = deposited;
  img.out_of_bounds_fraction =
      samples.empty() ? 0.0 : 1.0 - static_cast<double>(inside) / samples.size();
  if (img.out_of_bounds_fraction >= 0.01) {
    std::ostringstream os;
    os << "out-of-bounds fraction " << img.out_of_bounds_fraction << " exceeds 1%";
    img.warnings.push_back(os.str());
  }
  gaussian_blur(img, params.blur_waist_um);
  img.normalize();
  return img;
}

double ModeConfig::internal_emission_angle() const {
  const double n = index_ordinary(crystal, wavelengths.signal_nm);
  return std::asin(std::sin(emission_angle_deg * kDeg) / n);
}

double ModeConfig::phasematch_angle() const {
  return solve_phasematch_angle(crystal, wavelengths, internal_emission_angle());
}

double ModeConfig::walkoff() const {
  if (rho_override_deg)
    return *rho_override_deg * kDeg;
  return walkoff_angle(crystal, wavelengths.pump_nm, phasematch_angle());
}

std::vector<RaySample> mode_samples(const ModeConfig& cfg) {
  return sample_geometric_mode(cfg.crystal, cfg.internal_emission_angle(), cfg.walkoff(),
                               index_ordinary(cfg.crystal, cfg.wavelengths.signal_nm),
                               cfg.n_depth, cfg.n_azimuth);
}

ModeImage render_mode(const ModeConfig& cfg) {
  cfg.crystal.validate();
  cfg.wavelengths.validate();
  if (std::abs(cfg.pump.wavelength_nm - cfg.wavelengths.pump_nm) > 1e-9 * cfg.pump.wavelength_nm)
    throw ValidationError("pump wavelength disagrees with the wavelengths section");
  if (!(cfg.plane_z_mm >= 0.0))
    throw ValidationError("plane_z must be non-negative");

  if (cfg.method == RenderMethod::Geometric) {
    ImageParams p = cfg.image;
    p.blur_waist_um = cfg.pump_blur ? cfg.pump.waist_um : 0.0;
    const auto samples = mode_samples(cfg);
    return render_geometric(samples, cfg.plane_z_mm * 1e-3, p);
  }
  std::optional<double> rho;
  if (cfg.rho_override_deg)
    rho = *cfg.rho_override_deg * kDeg;
  return render_wave(cfg.crystal, cfg.pump, cfg.wavelengths, cfg.phasematch_angle(),
                     cfg.plane_z_mm * 1e-3, cfg.wave, cfg.image, rho);
}

} // namespace spdc
