#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace spdc {

/// Camera grid description. When the origin is unset the grid is centered on
/// the optical axis.
struct ImageParams {
  int width = 512;
  int height = 512;
  double pitch_um = 10.0;
  std::optional<double> origin_x_um;
  std::optional<double> origin_y_um;
  /// 1/e^2 waist of an optional Gaussian applied to the deposited image
  /// (the pump-waist convolution). 0 disables it.
  double blur_waist_um = 0.0;

  void validate() const;
};

/// Row-major intensity grid. Pixel (ix, iy) has its center at
/// (origin_x + ix * pitch, origin_y + iy * pitch); iy grows toward +y.
class ModeImage {
public:
  ModeImage() = default;
  ModeImage(int width, int height, double pitch_um, double origin_x_um, double origin_y_um);
  static ModeImage from_params(const ImageParams& params);

  int width() const { return width_; }
  int height() const { return height_; }
  double pitch_um() const { return pitch_um_; }
  double origin_x_um() const { return origin_x_um_; }
  double origin_y_um() const { return origin_y_um_; }

  double x_um(double ix) const { return origin_x_um_ + ix * pitch_um_; }
  double y_um(double iy) const { return origin_y_um_ + iy * pitch_um_; }
  double col_of(double x_um) const { return (x_um - origin_x_um_) / pitch_um_; }
  double row_of(double y_um) const { return (y_um - origin_y_um_) / pitch_um_; }

  double& at(int ix, int iy) { return data_[static_cast<std::size_t>(iy) * width_ + ix]; }
  double at(int ix, int iy) const { return data_[static_cast<std::size_t>(iy) * width_ + ix]; }
  /// Bilinear sample at fractional pixel coordinates; 0 outside the grid.
  double sample(double fx, double fy) const;

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double max_value() const;
  double sum() const;
  /// Divides by the peak; records the divisor in raw_peak. Throws
  /// EmptyImageError if the image has no positive pixel.
  void normalize();
  void scale(double k);

  // metadata
  double plane_z_m = 0.0;
  double raw_peak = 1.0;
  double deposited_weight = 0.0;
  std::size_t in_bounds = 0;
  double out_of_bounds_fraction = 0.0;
  std::vector<std::string> warnings;

private:
  int width_ = 0;
  int height_ = 0;
  double pitch_um_ = 1.0;
  double origin_x_um_ = 0.0;
  double origin_y_um_ = 0.0;
  std::vector<double> data_;
};

/// Separable Gaussian blur with a 1/e^2 intensity waist (sigma = waist / 2),
/// zero padding outside the grid.
void gaussian_blur(ModeImage& image, double waist_um);

} // namespace spdc
