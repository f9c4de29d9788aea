#include "spdc/mode_image.hpp"

#include "spdc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spdc {

void ImageParams::validate() const {
  if (width < 16 || height < 16)
    throw ValidationError("image must be at least 16x16 pixels");
  if (!(pitch_um > 0.0))
    throw ValidationError("pixel pitch must be positive");
  if (!(blur_waist_um >= 0.0))
    throw ValidationError("blur waist must be non-negative");
}

ModeImage::ModeImage(int width, int height, double pitch_um, double origin_x_um,
                     double origin_y_um)
    : width_(width), height_(height), pitch_um_(pitch_um), origin_x_um_(origin_x_um),
      origin_y_um_(origin_y_um),
      data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0) {}

ModeImage ModeImage::from_params(const ImageParams& p) {
  p.validate();
  const double ox = p.origin_x_um.value_or(-0.5 * (p.width - 1) * p.pitch_um);
  const double oy = p.origin_y_um.value_or(-0.5 * (p.height - 1) * p.pitch_um);
  return ModeImage(p.width, p.height, p.pitch_um, ox, oy);
}

double ModeImage::sample(double fx, double fy) const {
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= width_ - 1 && fy <= height_ - 1))
    return 0.0;
  int ix = static_cast<int>(std::floor(fx));
  int iy = static_cast<int>(std::floor(fy));
  if (ix == width_ - 1)
    --ix;
  if (iy == height_ - 1)
    --iy;
  const double dx = fx - ix;
  const double dy = fy - iy;
  return (1 - dx) * (1 - dy) * at(ix, iy) + dx * (1 - dy) * at(ix + 1, iy) +
         (1 - dx) * dy * at(ix, iy + 1) + dx * dy * at(ix + 1, iy + 1);
}

double ModeImage::max_value() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

double ModeImage::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

void ModeImage::normalize() {
  const double peak = max_value();
  if (!(peak > 0.0))
    throw EmptyImageError("image has no positive intensity");
  for (double& v : data_)
    v /= peak;
  raw_peak = peak;
}

void ModeImage::scale(double k) {
  for (double& v : data_)
    v *= k;
}

void gaussian_blur(ModeImage& image, double waist_um) {
  if (waist_um <= 0.0)
    return;
  const double sigma = 0.5 * waist_um / image.pitch_um();
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k)
    kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
  const double norm = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (double& k : kernel)
    k /= norm;

  const int w = image.width();
  const int h = image.height();
  std::vector<double> tmp(image.data().size(), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int xx = x + k;
        if (xx >= 0 && xx < w)
          acc += kernel[k + radius] * image.at(xx, y);
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int yy = y + k;
        if (yy >= 0 && yy < h)
          acc += kernel[k + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      image.at(x, y) = acc;
    }
}

} // namespace spdc
