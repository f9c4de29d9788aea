#include "spdc/errors.hpp"
#include "spdc/image_io.hpp"
#include "spdc/image_metrics.hpp"
#include "synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace spdc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("spdc_io_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ModeImage noisy(int w, int h) {
  ModeImage img(w, h, 7.5, -30.0, 12.5);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : img.data())
    v = u(rng);
  img.at(0, 0) = 0.0;
  img.at(w - 1, h - 1) = 1.0;
  return img;
}

} // namespace

TEST_CASE("quantization levels") {
  ModeImage img(4, 1, 1.0, 0.0, 0.0);
  img.at(0, 0) = 0.0;
  img.at(1, 0) = 1.0;
  img.at(2, 0) = 0.5;
  img.at(3, 0) = 1.0 / 65535.0 * 0.49;
  const auto q = quantize16(img);
  CHECK(q.at(0, 0) == 0.0);
  CHECK(q.at(1, 0) == 1.0);
  CHECK(q.at(2, 0) == std::round(0.5 * 65535.0) / 65535.0);
  CHECK(q.at(3, 0) == 0.0);
  CHECK(quantize16(q).data() == q.data());
}

TEST_CASE("PGM round trip returns the quantized values") {
  const auto img = noisy(37, 21);
  std::stringstream ss;
  write_pgm(ss, img);
  const auto back = read_pgm(ss);
  REQUIRE(back.width() == 37);
  REQUIRE(back.height() == 21);
  CHECK(back.data() == quantize16(img).data());
}

TEST_CASE("PGM top row holds the largest y") {
  ModeImage img(2, 2, 1.0, 0.0, 0.0);
  img.at(0, 1) = 1.0;   // top-left
  std::stringstream ss;
  write_pgm(ss, img);
  const std::string s = ss.str();
  const std::string header = "P5\n2 2\n65535\n";
  REQUIRE(s.size() == header.size() + 8);
  CHECK(s.compare(0, header.size(), header) == 0);
  CHECK(static_cast<unsigned char>(s[header.size()]) == 0xFF);
  CHECK(static_cast<unsigned char>(s[header.size() + 1]) == 0xFF);
  for (std::size_t i = header.size() + 2; i < s.size(); ++i)
    CHECK(s[i] == 0);
}

TEST_CASE("malformed PGM input") {
  const auto img = noisy(8, 8);
  std::stringstream ss;
  write_pgm(ss, img);
  std::string s = ss.str();
  std::istringstream truncated(s.substr(0, s.size() - 5));
  CHECK_THROWS_AS(read_pgm(truncated), FormatError);
  std::istringstream wrong_magic("P2\n8 8\n65535\n");
  CHECK_THROWS_AS(read_pgm(wrong_magic), FormatError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_pgm(empty), FormatError);
}

TEST_CASE("PNG and PGM files round trip with geometry") {
  TempDir tmp;
  auto img = noisy(33, 17);
  img.plane_z_m = 0.05;
  img.out_of_bounds_fraction = 0.125;
  for (ImageFormat f : {ImageFormat::Pgm, ImageFormat::Png}) {
    const auto path = save_image(tmp.path, "img", img, f, {{"crystal", "BBO-default"}});
    CHECK(path.extension() == extension(f));
    CHECK(fs::exists(tmp.path / "img.meta"));
    const auto back = load_image(path);
    CHECK(back.data() == quantize16(img).data());
    CHECK(back.pitch_um() == img.pitch_um());
    CHECK(back.origin_x_um() == img.origin_x_um());
    CHECK(back.origin_y_um() == img.origin_y_um());
    CHECK(back.plane_z_m == img.plane_z_m);
    CHECK(back.out_of_bounds_fraction == img.out_of_bounds_fraction);
  }
}

TEST_CASE("analysis of a reloaded image matches the quantized original") {
  TempDir tmp;
  const auto img = test::annulus(200, 5.0, 300.0, 10.0, 17.0, 20.0, -15.0);
  const double af = asymmetry_factor(quantize16(img)).af;
  for (ImageFormat f : {ImageFormat::Pgm, ImageFormat::Png}) {
    const auto back = load_image(save_image(tmp.path, "ring", img, f, {}));
    CHECK(asymmetry_factor(back).af == af);
  }
}

TEST_CASE("missing sidecar gives a centered micron grid") {
  TempDir tmp;
  const auto img = noisy(10, 6);
  {
    std::ofstream os(tmp.path / "bare.pgm", std::ios::binary);
    write_pgm(os, img);
  }
  const auto back = load_image(tmp.path / "bare.pgm");
  CHECK(back.pitch_um() == 1.0);
  CHECK(back.x_um(0) + back.x_um(9) == doctest::Approx(0.0));
  CHECK(back.y_um(0) + back.y_um(5) == doctest::Approx(0.0));
}

TEST_CASE("unreadable files") {
  TempDir tmp;
  CHECK_THROWS_AS(load_image(tmp.path / "absent.pgm"), FormatError);
  {
    std::ofstream os(tmp.path / "junk.png", std::ios::binary);
    os << "not a png at all";
  }
  CHECK_THROWS_AS(load_image(tmp.path / "junk.png"), FormatError);
  const auto img = noisy(4, 4);
  {
    std::ofstream os(tmp.path / "a.pgm", std::ios::binary);
    write_pgm(os, img);
    std::ofstream meta(tmp.path / "a.meta");
    meta << "[image]\nwidth = 5\nheight = 4\npitch_um = 1\norigin_x_um = 0\norigin_y_um = 0\n";
  }
  CHECK_THROWS_AS(load_image(tmp.path / "a.pgm"), FormatError);
}

TEST_CASE("metadata sidecar content") {
  auto img = noisy(3, 2);
  img.plane_z_m = 0.05;
  img.warnings = {"first", "second"};
  std::ostringstream os;
  write_metadata(os, img, {{"crystal_length_mm", "10"}});
  const std::string s = os.str();
  CHECK(s.find("[image]\n") == 0);
  CHECK(s.find("width = 3\n") != std::string::npos);
  CHECK(s.find("pitch_um = 7.5\n") != std::string::npos);
  CHECK(s.find("plane_z_m = 0.05\n") != std::string::npos);
  CHECK(s.find("warnings = first; second\n") != std::string::npos);
  CHECK(s.find("[parameters]\ncrystal_length_mm = 10\n") != std::string::npos);
}

TEST_CASE("CSV grid export") {
  ModeImage img(3, 2, 1.0, 0.0, 0.0);
  img.at(0, 0) = 0.25;
  img.at(2, 1) = 1.0;
  std::ostringstream os;
  write_csv_grid(os, img);
  CHECK(os.str() == "0,0,1\n0.25,0,0\n");
}

TEST_CASE("format names") {
  CHECK(parse_image_format("pgm") == ImageFormat::Pgm);
  CHECK(parse_image_format("png") == ImageFormat::Png);
  CHECK(parse_image_format("csv") == ImageFormat::Csv);
  CHECK_THROWS_AS(parse_image_format("tiff"), ConfigError);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5e-7) == "-2.5e-07");
}
