#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Sandbox {
  fs::path dir;
  Sandbox() {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("spdc_cli_" + std::to_string(rd()));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  Run run(const std::string& args) const {
    const std::string cmd = "'" SPDCSIM_EXE "' " + args + " > '" + (dir / "stdout").string() +
                            "' 2> '" + (dir / "stderr").string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir / "stdout");
    r.err = slurp(dir / "stderr");
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

// Value of "key = value" in a report.
double field(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (line.rfind(key + " = ", 0) == 0)
      return std::stod(line.substr(key.size() + 3));
  FAIL("missing field " << key);
  return 0.0;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const std::string kMode = "[crystal]\nname = BBO-default\nlength_mm = 4\n"
                          "[render]\npump_blur = true\n";

} // namespace

TEST_CASE("usage errors exit with 2, help with 0") {
  Sandbox sb;
  CHECK(sb.run("--help").code == 0);
  CHECK(sb.run("").code == 2);
  CHECK(sb.run("frobnicate").code == 2);
  CHECK(sb.run("simulate").code == 2);
  CHECK(sb.run("simulate --config " + q(sb.dir / "absent.ini")).code == 2);
  const auto cfg = sb.write("m.ini", kMode);
  CHECK(sb.run("simulate --config " + q(cfg) + " --bogus").code == 2);
  CHECK(sb.run("simulate --config " + q(cfg) + " --format tiff").code == 2);
}

TEST_CASE("config problems exit with 2 and name the culprit") {
  Sandbox sb;
  auto r = sb.run("simulate --config " + q(sb.write("a.ini", "[crystal]\nname = LBO-custom\n")));
  CHECK(r.code == 2);
  CHECK(r.err.find("LBO-custom") != std::string::npos);
  r = sb.run("simulate --config " + q(sb.write("b.ini", kMode + "[render]\nsize = 3\n")));
  CHECK(r.code == 2);
  r = sb.run("simulate --config " + q(sb.write("c.ini", "[crystal]\nlength_mm = 3\n")));
  CHECK(r.code == 2);
  CHECK(r.err.find("name") != std::string::npos);
  r = sb.run("correct --config " + q(sb.write("d.ini", kMode)));
  CHECK(r.code == 2);
  CHECK(r.err.find("[lens]") != std::string::npos);
}

TEST_CASE("runtime failures exit with 1") {
  Sandbox sb;
  const auto bad = sb.write("bad.pgm", "P5\n4 4\n65535\nxx");
  auto r = sb.run("analyze " + q(bad));
  CHECK(r.code == 1);
  CHECK(r.err.find("truncated") != std::string::npos);
  CHECK(sb.run("analyze " + q(sb.dir / "none.png")).code == 1);
  // ring pushed entirely off a small camera
  const auto off = sb.write("off.ini", kMode + "width = 16\nheight = 16\n");
  CHECK(sb.run("simulate --config " + q(off) + " --out " + q(sb.dir / "o")).code == 1);
}

TEST_CASE("analyze reproduces the simulated AF exactly") {
  Sandbox sb;
  const auto cfg = sb.write("m.ini", kMode);
  for (const std::string fmt : {"pgm", "png"}) {
    const auto out = sb.dir / fmt;
    const auto sim = sb.run("simulate --config " + q(cfg) + " --out " + q(out) + " --format " + fmt);
    REQUIRE(sim.code == 0);
    const auto image = out / ("mode." + fmt);
    CHECK(fs::exists(image));
    CHECK(fs::exists(out / "mode.meta"));
    const auto ana = sb.run("analyze " + q(image));
    REQUIRE(ana.code == 0);
    CHECK(field(ana.out, "af") == field(sim.out, "af"));
    CHECK(field(ana.out, "center_y_um") == field(sim.out, "center_y_um"));
    CHECK(fs::exists(out / "analysis.csv"));
    CHECK(field(sim.out, "af") > 0.0);
  }
}

TEST_CASE("simulate without walk-off reports a symmetric mode") {
  Sandbox sb;
  const auto cfg = sb.write("s.ini", kMode + "[geometry]\nrho_override_deg = 0\n");
  const auto r = sb.run("simulate --config " + q(cfg) + " --out " + q(sb.dir / "s"));
  REQUIRE(r.code == 0);
  CHECK(std::abs(field(r.out, "af")) < 0.02);
}

TEST_CASE("sweep writes one row per value") {
  Sandbox sb;
  const auto cfg = sb.write("w.ini", kMode);
  auto r = sb.run("sweep --config " + q(cfg) + " --out " + q(sb.dir / "w") +
                  " --param crystal_length --values 6,2,4 --save-images");
  REQUIRE(r.code == 0);
  const std::string csv = slurp(sb.dir / "w" / "sweep.csv");
  CHECK(csv == r.out);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("parameter,value,af", 0) == 0);
  std::vector<std::string> rows;
  while (std::getline(is, line))
    rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("crystal_length_mm,2,", 0) == 0);
  CHECK(rows[2].rfind("crystal_length_mm,6,", 0) == 0);
  for (int i = 0; i < 3; ++i)
    CHECK(fs::exists(sb.dir / "w" / ("sweep_" + std::to_string(i) + ".pgm")));

  r = sb.run("sweep --config " + q(cfg) + " --out " + q(sb.dir / "one") +
             " --param emission_angle --values 1.5");
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 2);

  r = sb.run("sweep --config " + q(cfg) + " --out " + q(sb.dir / "none"));
  CHECK(r.code == 2);
  r = sb.run("sweep --config " + q(cfg) + " --param temperature --values 1");
  CHECK(r.code == 2);
  r = sb.run("sweep --config " + q(cfg) + " --out " + q(sb.dir / "neg") + " --values 2,-1");
  CHECK(r.code == 1);
  CHECK(r.err.find("crystal_length_mm = -1") != std::string::npos);
}

TEST_CASE("fit on rate tables") {
  Sandbox sb;
  auto r = sb.run("fit " + q(SPDC_FIXTURE_DIR "/rates_noiseless.csv"));
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "exponent") == doctest::Approx(0.72).epsilon(1e-6));
  CHECK(field(r.out, "points") == 6.0);
  r = sb.run("fit " + q(SPDC_FIXTURE_DIR "/rates_constant.csv"));
  REQUIRE(r.code == 0);
  CHECK(std::abs(field(r.out, "exponent")) < 1e-9);
  r = sb.run("fit " + q(SPDC_FIXTURE_DIR "/rates_malformed.csv"));
  CHECK(r.code != 0);
  CHECK(r.err.find("length_mm,rate") != std::string::npos);
}

TEST_CASE("correct writes its summary and artifacts") {
  Sandbox sb;
  const auto cfg = sb.write("c.ini", kMode + "[geometry]\nrho_override_deg = 0\n"
                                             "[lens]\nfocal_mm = 100\n");
  const auto r = sb.run("correct --config " + q(cfg) + " --out " + q(sb.dir / "c"));
  REQUIRE(r.code == 0);
  const auto out = sb.dir / "c";
  for (const char* f : {"summary.txt", "trace.csv", "before.pgm", "after.pgm", "after.meta"})
    CHECK(fs::exists(out / f));
  const std::string summary = slurp(out / "summary.txt");
  CHECK(summary == r.out);
  CHECK(std::abs(field(summary, "offset_x_um")) < 5.0);
  CHECK(std::abs(field(summary, "offset_y_um")) < 5.0);
  CHECK(std::abs(field(summary, "af_after")) < 0.02);
  CHECK(field(summary, "coupling_after") >= 0.0);
  CHECK(field(summary, "coupling_after") <= 1.0);
}
