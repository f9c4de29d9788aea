#pragma once

#include "spdc/mode_image.hpp"

#include <cmath>

namespace test {

/// Annulus with Gaussian radial cross-section. The radial sigma interpolates
/// between sigma_x on the x axis and sigma_y on the y axis.
inline spdc::ModeImage annulus(int n, double pitch_um, double radius_um, double sigma_x_um,
                               double sigma_y_um, double cx_um = 0.0, double cy_um = 0.0) {
  spdc::ModeImage img(n, n, pitch_um, -0.5 * (n - 1) * pitch_um, -0.5 * (n - 1) * pitch_um);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double x = img.x_um(ix) - cx_um;
      const double y = img.y_um(iy) - cy_um;
      const double r = std::hypot(x, y);
      const double c = r > 0 ? x / r : 1.0;
      const double s = r > 0 ? y / r : 0.0;
      const double sigma = std::hypot(sigma_x_um * c, sigma_y_um * s);
      img.at(ix, iy) = std::exp(-(r - radius_um) * (r - radius_um) / (2 * sigma * sigma));
    }
  return img;
}

} // namespace test
