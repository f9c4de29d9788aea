#include "spdc/errors.hpp"
#include "spdc/image_metrics.hpp"
#include "spdc/mode_sim.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace spdc;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ModeConfig wave_config(double length_mm) {
  ModeConfig m;
  m.crystal = CrystalCatalog::load_default().get("BBO-default", length_mm);
  m.method = RenderMethod::Wave;
  return m;
}

double y_asymmetry(const ModeImage& img) {
  double worst = 0.0;
  for (int iy = 0; iy < img.height(); ++iy)
    for (int ix = 0; ix < img.width(); ++ix)
      worst = std::max(worst, std::abs(img.at(ix, iy) - img.at(ix, img.height() - 1 - iy)));
  return worst;
}

ImageParams small_grid() {
  ImageParams p;
  p.width = p.height = 224;
  p.pitch_um = 20.0;
  return p;
}

} // namespace

TEST_CASE("forced zero walk-off gives a y-symmetric wave image") {
  auto m = wave_config(10.0);
  m.rho_override_deg = 0.0;
  CHECK(y_asymmetry(render_mode(m)) < 1e-6);

  m.wave.full_sum = true;
  m.wave.q_points = 5;
  m.image = small_grid();
  CHECK(y_asymmetry(render_mode(m)) < 1e-6);
}

TEST_CASE("the pump-spectrum sum carries the walk-off asymmetry") {
  auto m = wave_config(10.0);
  m.wave.full_sum = true;
  m.wave.q_points = 5;
  m.image = small_grid();
  CHECK(y_asymmetry(render_mode(m)) > 1e-3);
}

TEST_CASE("ring radius grows with detuning from collinear phase matching") {
  const auto m = wave_config(10.0);
  const double th0 = solve_phasematch_angle(m.crystal, m.wavelengths, 0.0);
  double prev = 0.0;
  for (double d : {0.03, 0.06, 0.09}) {
    const auto img = render_wave(m.crystal, m.pump, m.wavelengths, th0 + d * kDeg, 0.05, m.wave,
                                 m.image);
    const double r = fit_ring(img).radius_um;
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("on-axis intensity peaks at the collinear angle") {
  const auto m = wave_config(10.0);
  const double th0 = solve_phasematch_angle(m.crystal, m.wavelengths, 0.0);
  auto on_axis = [&](double th) {
    const auto img = render_wave(m.crystal, m.pump, m.wavelengths, th, 0.05, m.wave, m.image);
    return img.sample(img.col_of(0.0), img.row_of(0.0)) * img.raw_peak;
  };
  const double c0 = on_axis(th0);
  for (double d : {-0.05, -0.02, 0.02, 0.05})
    CHECK(on_axis(th0 + d * kDeg) < c0);
}

TEST_CASE("wave and geometric rings agree in radius") {
  for (double L : {4.0, 10.0}) {
    auto m = wave_config(L);
    const double rw = fit_ring(render_mode(m)).radius_um;
    m.method = RenderMethod::Geometric;
    m.pump_blur = true;
    const double rg = fit_ring(render_mode(m)).radius_um;
    CHECK(std::abs(rw - rg) / rg < 0.10);
  }
}

TEST_CASE("pump-spectrum sum and stationary pairing place the ring alike") {
  auto m = wave_config(4.0);
  m.image = small_grid();
  const double r0 = fit_ring(render_mode(m)).radius_um;
  m.wave.full_sum = true;
  m.wave.q_points = 5;
  const double r1 = fit_ring(render_mode(m)).radius_um;
  CHECK(std::abs(r0 - r1) / r0 < 0.05);
}

TEST_CASE("wave preconditions") {
  auto m = wave_config(10.0);
  m.plane_z_mm = 0.0;
  CHECK_THROWS_AS(render_mode(m), ValidationError);

  m = wave_config(10.0);
  m.image.width = m.image.height = 128;   // 1.28 mm span for a 1.3 mm ring
  CHECK_THROWS_AS(render_mode(m), ValidationError);

  m = wave_config(10.0);
  m.image.width = m.image.height = 32;
  m.image.pitch_um = 250.0;
  CHECK_THROWS_AS(render_mode(m), ResolutionError);

  m = wave_config(10.0);
  m.wave.full_sum = true;
  m.wave.q_points = 4;
  CHECK_THROWS_AS(render_mode(m), ValidationError);
}

TEST_CASE("wave render is deterministic") {
  auto m = wave_config(6.0);
  m.image = small_grid();
  m.wave.supersample = 2;
  CHECK(render_mode(m).data() == render_mode(m).data());
}
