#include "spdc/commands.hpp"

#include "spdc/config.hpp"
#include "spdc/correction.hpp"
#include "spdc/errors.hpp"
#include "spdc/image_io.hpp"
#include "spdc/image_metrics.hpp"
#include "spdc/rates.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace spdc {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::string param;
  std::string values;
  std::string input;
  bool save_images = false;
};

ExperimentConfig load_with_overrides(const Options& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (!o.out.empty())
    cfg.output_dir = o.out;
  if (!o.format.empty())
    cfg.format = parse_image_format(o.format);
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os)
    throw Error("cannot open " + path.string() + " for writing");
  return os;
}

void print_report(std::ostream& out, const AsymmetryReport& r) {
  out << "center_x_um = " << format_double(r.center_x_um) << '\n'
      << "center_y_um = " << format_double(r.center_y_um) << '\n'
      << "width_x_a_um = " << format_double(r.width_x_a_um) << '\n'
      << "width_y_b_um = " << format_double(r.width_y_b_um) << '\n'
      << "af = " << format_double(r.af) << '\n';
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_with_overrides(o);
  // Measure what the exported file holds so analyze reproduces it exactly.
  const ModeImage img = quantize16(render_mode(cfg.mode));
  for (const auto& w : img.warnings)
    err << "warning: " << w << '\n';
  const AsymmetryReport rep = asymmetry_factor(img);
  MetadataParams params = describe(cfg);
  params.emplace_back("af", format_double(rep.af));
  const fs::path path = save_image(cfg.output_dir, "mode", img, cfg.format, params);
  out << "wrote " << path.string() << '\n';
  print_report(out, rep);
  return 0;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const fs::path input = o.input;
  const ModeImage img = load_image(input);
  const AsymmetryReport rep = asymmetry_factor(img);
  print_report(out, rep);
  const fs::path dir = o.out.empty() ? input.parent_path() : fs::path(o.out);
  auto os = open_out(dir / "analysis.csv");
  os << "center_x_um,center_y_um,width_x_a_um,width_y_b_um,af\n"
     << format_double(rep.center_x_um) << ',' << format_double(rep.center_y_um) << ','
     << format_double(rep.width_x_a_um) << ',' << format_double(rep.width_y_b_um) << ','
     << format_double(rep.af) << '\n';
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load_with_overrides(o);
  SweepSection sweep = cfg.sweep.value_or(SweepSection{});
  if (!o.param.empty())
    sweep.parameter = parse_sweep_parameter(o.param);
  if (!o.values.empty())
    sweep.values = parse_value_list(o.values);
  if (sweep.values.empty())
    throw ConfigError("sweep needs values (--values or [sweep] values)");

  const auto rows = sweep_af(sweep.parameter, sweep.values, cfg.mode);
  auto os = open_out(cfg.output_dir / "sweep.csv");
  write_sweep_csv(os, sweep.parameter, rows);
  write_sweep_csv(out, sweep.parameter, rows);

  if (o.save_images) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ModeConfig m = cfg.mode;
      apply_sweep_value(m, sweep.parameter, rows[i].value);
      ExperimentConfig point = cfg;
      point.mode = m;
      save_image(cfg.output_dir, "sweep_" + std::to_string(i), quantize16(render_mode(m)),
                 cfg.format, describe(point));
    }
  }
  return 0;
}

int cmd_correct(const Options& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_with_overrides(o);
  if (!cfg.lens)
    throw ConfigError("correct needs a [lens] section in the config");
  const LensSection& lens = *cfg.lens;

  const OffsetResult res = optimize_offset(cfg.mode, lens.setup);
  if (res.flat)
    err << "warning: AF landscape is flat over the offset grid; reporting zero offset\n";

  const ModeImage before = render_mode(cfg.mode);
  CorrectionSetup at = lens.setup;
  at.lens.offset_x_um = res.offset_x_um;
  at.lens.offset_y_um = res.offset_y_um;
  const ModeImage after = render_corrected(mode_samples(cfg.mode), at);

  const auto c_before = smf_coupling_estimate(before, lens.coupling_waist_um,
                                              intensity_centroid(before));
  const auto c_after = smf_coupling_estimate(after, lens.coupling_waist_um,
                                             intensity_centroid(after));

  {
    auto os = open_out(cfg.output_dir / "trace.csv");
    write_trace_csv(os, res.trace);
  }
  save_image(cfg.output_dir, "before", quantize16(before), cfg.format, describe(cfg));
  MetadataParams ap = describe(cfg);
  ap.emplace_back("lens_focal_mm", format_double(at.lens.focal_mm));
  ap.emplace_back("lens_distance_mm", format_double(at.lens.distance_mm));
  ap.emplace_back("lens_offset_x_um", format_double(at.lens.offset_x_um));
  ap.emplace_back("lens_offset_y_um", format_double(at.lens.offset_y_um));
  save_image(cfg.output_dir, "after", quantize16(after), cfg.format, ap);

  std::ostringstream s;
  s << "af_before = " << format_double(res.af_before) << '\n'
    << "af_after = " << format_double(res.af_after) << '\n'
    << "af_centered_lens = " << format_double(res.af_centered) << '\n'
    << "offset_x_um = " << format_double(res.offset_x_um) << '\n'
    << "offset_y_um = " << format_double(res.offset_y_um) << '\n'
    << "grid_step_um = " << format_double(res.grid_step_um) << '\n'
    << "flat = " << (res.flat ? "true" : "false") << '\n'
    << "coupling_waist_um = " << format_double(lens.coupling_waist_um) << '\n'
    << "coupling_before = " << format_double(c_before.efficiency) << '\n'
    << "coupling_after = " << format_double(c_after.efficiency) << '\n'
    << "coupling_ratio = " << format_double(c_after.efficiency / c_before.efficiency) << '\n';
  auto os = open_out(cfg.output_dir / "summary.txt");
  os << s.str();
  out << s.str();
  return 0;
}

int cmd_fit(const Options& o, std::ostream& out) {
  const auto points = read_rate_csv(o.input);
  const PowerLawFit fit = power_law_fit(points);
  out << "points = " << points.size() << '\n'
      << "amplitude = " << format_double(fit.amplitude) << '\n'
      << "exponent = " << format_double(fit.exponent) << '\n'
      << "r_squared = " << format_double(fit.r_squared) << '\n';
  return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SPDC emission-profile simulator and asymmetry analysis", "spdcsim"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Render the configured mode and write it to disk");
  sim->add_option("--config", o.config, "Experiment INI file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", o.out, "Output directory (overrides [output] dir)");
  sim->add_option("--format", o.format, "Image format")->check(CLI::IsMember({"pgm", "png", "csv"}));

  auto* ana = app.add_subcommand("analyze", "Measure ring center, axis widths and AF of an image");
  ana->add_option("image", o.input, "PGM or PNG image")->required();
  ana->add_option("--out", o.out, "Directory for analysis.csv (default: next to the image)");

  auto* swp = app.add_subcommand("sweep", "AF versus one parameter");
  swp->add_option("--config", o.config, "Experiment INI file")->required()->check(CLI::ExistingFile);
  swp->add_option("--out", o.out, "Output directory");
  swp->add_option("--param", o.param, "crystal_length, emission_angle or pump_waist");
  swp->add_option("--values", o.values, "Comma-separated values");
  swp->add_option("--format", o.format, "Image format")->check(CLI::IsMember({"pgm", "png", "csv"}));
  swp->add_flag("--save-images", o.save_images, "Also write one image per sweep point");

  auto* cor = app.add_subcommand("correct", "Optimize the lateral offset of the correction lens");
  cor->add_option("--config", o.config, "Experiment INI file")->required()->check(CLI::ExistingFile);
  cor->add_option("--out", o.out, "Output directory");
  cor->add_option("--format", o.format, "Image format")->check(CLI::IsMember({"pgm", "png", "csv"}));

  auto* fit = app.add_subcommand("fit", "Power-law fit of coincidence rate versus crystal length");
  fit->add_option("csv", o.input, "Table with header length_mm,rate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim)
      return cmd_simulate(o, out, err);
    if (*ana)
      return cmd_analyze(o, out);
    if (*swp)
      return cmd_sweep(o, out);
    if (*cor)
      return cmd_correct(o, out, err);
    if (*fit)
      return cmd_fit(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

} // namespace spdc
