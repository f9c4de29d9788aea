#include "spdc/image_io.hpp"

#include "spdc/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <png.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace spdc {

namespace fs = std::filesystem;

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

ImageFormat parse_image_format(const std::string& name) {
  if (name == "pgm")
    return ImageFormat::Pgm;
  if (name == "png")
    return ImageFormat::Png;
  if (name == "csv")
    return ImageFormat::Csv;
  throw ConfigError("unknown image format '" + name + "' (expected pgm, png or csv)");
}

std::string extension(ImageFormat f) {
  switch (f) {
  case ImageFormat::Pgm:
    return ".pgm";
  case ImageFormat::Png:
    return ".png";
  case ImageFormat::Csv:
    return ".csv";
  }
  return ".pgm";
}

namespace {

std::uint16_t level(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint16_t>(std::lround(c * 65535.0));
}

} // namespace

ModeImage quantize16(const ModeImage& image) {
  ModeImage q = image;
  for (double& v : q.data())
    v = level(v) / 65535.0;
  return q;
}

void write_pgm(std::ostream& os, const ModeImage& image) {
  os << "P5\n" << image.width() << ' ' << image.height() << "\n65535\n";
  std::vector<char> row(static_cast<std::size_t>(image.width()) * 2);
  for (int iy = image.height() - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < image.width(); ++ix) {
      const std::uint16_t v = level(image.at(ix, iy));
      row[2 * ix] = static_cast<char>(v >> 8);
      row[2 * ix + 1] = static_cast<char>(v & 0xff);
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

ModeImage read_pgm(std::istream& is) {
  auto next_token = [&]() {
    std::string tok;
    while (is) {
      int c = is.peek();
      if (c == '#') {
        std::string skip;
        std::getline(is, skip);
      } else if (std::isspace(c)) {
        is.get();
      } else {
        break;
      }
    }
    is >> tok;
    return tok;
  };
  if (next_token() != "P5")
    throw FormatError("not a binary PGM (P5) file");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw FormatError("malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw FormatError("invalid PGM dimensions or maxval");
  is.get();   // single whitespace before raster
  const int bytes = maxval > 255 ? 2 : 1;
  ModeImage img(w, h, 1.0, -0.5 * (w - 1), -0.5 * (h - 1));
  std::vector<unsigned char> row(static_cast<std::size_t>(w) * bytes);
  for (int iy = h - 1; iy >= 0; --iy) {
    is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
    if (is.gcount() != static_cast<std::streamsize>(row.size()))
      throw FormatError("truncated PGM raster");
    for (int ix = 0; ix < w; ++ix) {
      const unsigned v = bytes == 2 ? (row[2 * ix] << 8) | row[2 * ix + 1] : row[ix];
      img.at(ix, iy) = bytes == 2 && maxval == 65535 ? v / 65535.0
                                                     : static_cast<double>(v) / maxval;
    }
  }
  return img;
}

namespace {

// libpng prints to stderr by default; keep the message for the exception.
void png_fail(png_structp png, png_const_charp msg) {
  *static_cast<std::string*>(png_get_error_ptr(png)) = msg;
  png_longjmp(png, 1);
}
void png_quiet(png_structp, png_const_charp) {}

} // namespace

void write_png(const fs::path& path, const ModeImage& image) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp)
    throw Error("cannot open " + path.string() + " for writing");
  std::string msg;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &msg, png_fail, png_quiet);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("libpng failed writing " + path.string() + ": " + msg);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, image.width(), image.height(), 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(image.width()) * 2);
  for (int iy = image.height() - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < image.width(); ++ix) {
      const std::uint16_t v = level(image.at(ix, iy));
      row[2 * ix] = static_cast<png_byte>(v >> 8);
      row[2 * ix + 1] = static_cast<png_byte>(v & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

namespace {

ModeImage read_png(const fs::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "rb"), &std::fclose);
  if (!fp)
    throw FormatError("cannot open " + path.string());
  std::string msg;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &msg, png_fail, png_quiet);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("corrupt or truncated PNG " + path.string() + ": " + msg);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int depth = png_get_bit_depth(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || (depth != 16 && depth != 8)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("only 8/16-bit grayscale PNG is supported");
  }
  ModeImage img(w, h, 1.0, -0.5 * (w - 1), -0.5 * (h - 1));
  std::vector<png_byte> row(png_get_rowbytes(png, info));
  for (int iy = h - 1; iy >= 0; --iy) {
    png_read_row(png, row.data(), nullptr);
    for (int ix = 0; ix < w; ++ix)
      img.at(ix, iy) = depth == 16 ? ((row[2 * ix] << 8) | row[2 * ix + 1]) / 65535.0
                                   : row[ix] / 255.0;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

} // namespace

void write_csv_grid(std::ostream& os, const ModeImage& image) {
  for (int iy = image.height() - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < image.width(); ++ix) {
      if (ix)
        os << ',';
      os << format_double(image.at(ix, iy));
    }
    os << '\n';
  }
}

void write_metadata(std::ostream& os, const ModeImage& image, const MetadataParams& params) {
  os << "[image]\n";
  os << "width = " << image.width() << '\n';
  os << "height = " << image.height() << '\n';
  os << "pitch_um = " << format_double(image.pitch_um()) << '\n';
  os << "origin_x_um = " << format_double(image.origin_x_um()) << '\n';
  os << "origin_y_um = " << format_double(image.origin_y_um()) << '\n';
  os << "plane_z_m = " << format_double(image.plane_z_m) << '\n';
  os << "raw_peak = " << format_double(image.raw_peak) << '\n';
  os << "out_of_bounds_fraction = " << format_double(image.out_of_bounds_fraction) << '\n';
  std::string warnings;
  for (const auto& w : image.warnings)
    warnings += (warnings.empty() ? "" : "; ") + w;
  os << "warnings = " << warnings << '\n';
  if (!params.empty()) {
    os << "[parameters]\n";
    for (const auto& [k, v] : params)
      os << k << " = " << v << '\n';
  }
}

fs::path save_image(const fs::path& dir, const std::string& stem, const ModeImage& image,
                    ImageFormat format, const MetadataParams& params) {
  fs::create_directories(dir);
  const fs::path path = dir / (stem + extension(format));
  if (format == ImageFormat::Png) {
    write_png(path, image);
  } else {
    std::ofstream os(path, std::ios::binary);
    if (!os)
      throw Error("cannot open " + path.string() + " for writing");
    if (format == ImageFormat::Pgm)
      write_pgm(os, image);
    else
      write_csv_grid(os, image);
  }
  std::ofstream meta(dir / (stem + ".meta"));
  write_metadata(meta, image, params);
  return path;
}

ModeImage load_image(const fs::path& path) {
  ModeImage img;
  const auto ext = path.extension().string();
  if (ext == ".png") {
    img = read_png(path);
  } else {
    std::ifstream is(path, std::ios::binary);
    if (!is)
      throw FormatError("cannot open " + path.string());
    img = read_pgm(is);
  }

  fs::path meta = path;
  meta.replace_extension(".meta");
  if (!fs::exists(meta))
    return img;
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(meta.string(), tree);
    const auto& sec = tree.get_child("image");
    if (sec.get<int>("width") != img.width() || sec.get<int>("height") != img.height())
      throw FormatError("metadata sidecar does not match image dimensions");
    ModeImage geo(img.width(), img.height(), sec.get<double>("pitch_um"),
                  sec.get<double>("origin_x_um"), sec.get<double>("origin_y_um"));
    geo.data() = std::move(img.data());
    geo.plane_z_m = sec.get<double>("plane_z_m", 0.0);
    geo.out_of_bounds_fraction = sec.get<double>("out_of_bounds_fraction", 0.0);
    return geo;
  } catch (const boost::property_tree::ptree_error& e) {
    throw FormatError("unreadable metadata sidecar " + meta.string() + ": " + e.what());
  }
}

} // namespace spdc
