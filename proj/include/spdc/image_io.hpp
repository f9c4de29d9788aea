#pragma once

#include "spdc/mode_image.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace spdc {

enum class ImageFormat { Pgm, Png, Csv };

ImageFormat parse_image_format(const std::string& name);
std::string extension(ImageFormat f);

/// Rounds every pixel to the nearest of 65536 levels over [0, 1], i.e. the
/// values a 16-bit export holds. Reading an exported file gives back exactly
/// these doubles.
ModeImage quantize16(const ModeImage& image);

/// 16-bit binary graymap (P5, maxval 65535, big-endian samples). Row 0 of the
/// file is the top of the image (largest y).
void write_pgm(std::ostream& os, const ModeImage& image);
void write_png(const std::filesystem::path& path, const ModeImage& image);
void write_csv_grid(std::ostream& os, const ModeImage& image);

using MetadataParams = std::vector<std::pair<std::string, std::string>>;

/// Text key = value sidecar with grid geometry, plane_z, render parameters and
/// out-of-bounds fraction.
void write_metadata(std::ostream& os, const ModeImage& image, const MetadataParams& params);

/// Writes image + "<stem>.meta" next to it. Returns the image path.
std::filesystem::path save_image(const std::filesystem::path& dir, const std::string& stem,
                                 const ModeImage& image, ImageFormat format,
                                 const MetadataParams& params);

/// Reads a PGM or PNG (by extension). Geometry comes from the "<stem>.meta"
/// sidecar when present, otherwise a centered 1 um grid. Throws FormatError.
ModeImage load_image(const std::filesystem::path& path);
ModeImage read_pgm(std::istream& is);

std::string format_double(double v);

} // namespace spdc
