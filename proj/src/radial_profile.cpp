#include "spdc/errors.hpp"
#include "spdc/image_metrics.hpp"
#include "spdc/mode_sim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace spdc {

std::vector<WidthSample> radial_width_profile(const ModeImage& image) {
  const RingFit ring = fit_ring(image);
  const double fx0 = image.col_of(ring.center_x_um);
  const double fy0 = image.row_of(ring.center_y_um);
  // Quarter-pixel radial steps out to the farthest corner.
  const double step = 0.25;
  const double r_max = std::hypot(std::max(fx0, image.width() - 1 - fx0),
                                  std::max(fy0, image.height() - 1 - fy0));
  const int n = static_cast<int>(std::ceil(r_max / step)) + 1;

  std::vector<WidthSample> out;
  out.reserve(360);
  std::vector<double> prof(n);
  for (int bin = 0; bin < 360; ++bin) {
    const double az = (bin + 0.5) * std::numbers::pi / 180.0;
    const double ca = std::cos(az), sa = std::sin(az);
    int peak = 0;
    for (int i = 0; i < n; ++i) {
      prof[i] = image.sample(fx0 + i * step * ca, fy0 + i * step * sa);
      if (prof[i] > prof[peak])
        peak = i;
    }
    if (!(prof[peak] > 0.0)) {
      std::ostringstream os;
      os << "no ring detected along azimuth " << (bin + 0.5) << " deg";
      throw AnalysisError(os.str());
    }
    const double thr = prof[peak] * std::exp(-2.0);
    int r = peak;
    while (r + 1 < n && prof[r + 1] >= thr)
      ++r;
    if (r + 1 >= n)
      throw AnalysisError("ring is truncated by the image edge");
    const double outer = r + (prof[r] - thr) / (prof[r] - prof[r + 1]);
    int l = peak;
    while (l > 0 && prof[l - 1] >= thr)
      --l;
    // A filled mode never drops below threshold inward; clip at the center.
    const double inner = l == 0 ? 0.0 : l - (prof[l] - thr) / (prof[l] - prof[l - 1]);
    out.push_back({az, (outer - inner) * step * image.pitch_um()});
  }
  return out;
}

} // namespace spdc
