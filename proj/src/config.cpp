#include "spdc/config.hpp"

#include "spdc/errors.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>

namespace spdc {

namespace pt = boost::property_tree;

namespace {

// Key access for one INI section; remembers which keys were read so the rest
// can be reported as unknown.
class Section {
public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> text(const std::string& key) {
    known_.insert(key);
    if (!tree_)
      return std::nullopt;
    auto child = tree_->get_child_optional(key);
    if (!child)
      return std::nullopt;
    return boost::algorithm::trim_copy(child->data());
  }

  std::optional<double> number(const std::string& key) {
    auto t = text(key);
    if (!t)
      return std::nullopt;
    try {
      std::size_t used = 0;
      const double v = std::stod(*t, &used);
      if (used == t->size())
        return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(field(key) + ": expected a number, got '" + *t + "'");
  }

  std::optional<int> integer(const std::string& key) {
    auto t = text(key);
    if (!t)
      return std::nullopt;
    try {
      std::size_t used = 0;
      const int v = std::stoi(*t, &used);
      if (used == t->size())
        return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(field(key) + ": expected an integer, got '" + *t + "'");
  }

  std::optional<bool> boolean(const std::string& key) {
    auto t = text(key);
    if (!t)
      return std::nullopt;
    const std::string v = boost::algorithm::to_lower_copy(*t);
    if (v == "true" || v == "yes" || v == "1" || v == "on")
      return true;
    if (v == "false" || v == "no" || v == "0" || v == "off")
      return false;
    throw ConfigError(field(key) + ": expected true or false, got '" + *t + "'");
  }

  void reject_unknown() const {
    if (!tree_)
      return;
    for (const auto& [k, _] : *tree_)
      if (!known_.count(k))
        throw ConfigError("unknown key '" + k + "' in section [" + name_ + "]");
  }

  std::string field(const std::string& key) const { return name_ + "." + key; }

private:
  std::string name_;
  const pt::ptree* tree_;
  std::set<std::string> known_;
};

void require_positive(const Section& s, const std::string& key, double v) {
  if (!(v > 0.0))
    throw ConfigError(s.field(key) + " must be positive");
}

} // namespace

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::is_any_of(", "), boost::token_compress_on);
  std::vector<double> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (p.empty())
      continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(p, &used);
      if (used != p.size())
        throw std::invalid_argument(p);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("not a number in value list: '" + p + "'");
    }
  }
  if (out.empty())
    throw ConfigError("value list is empty");
  return out;
}

ExperimentConfig parse_config(std::istream& is, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  static const std::set<std::string> kSections{"crystal", "geometry", "lens",   "output",
                                               "pump",    "render",   "sweep",  "wavelengths"};
  for (const auto& [name, sub] : tree) {
    if (sub.empty() && !sub.data().empty())
      throw ConfigError("key '" + name + "' must belong to a section");
    if (!kSections.count(name))
      throw ConfigError("unknown section [" + name + "]");
  }
  std::map<std::string, Section> sec;
  for (const auto& name : kSections) {
    auto child = tree.get_child_optional(name);
    sec.emplace(name, Section(name, child ? &*child : nullptr));
  }

  ExperimentConfig cfg;
  ModeConfig& m = cfg.mode;

  auto& cr = sec.at("crystal");
  if (!cr.present())
    throw ConfigError("missing section [crystal]");
  auto name = cr.text("name");
  if (!name || name->empty())
    throw ConfigError("crystal.name is required");
  cfg.crystal_name = *name;
  const double length = cr.number("length_mm").value_or(10.0);
  require_positive(cr, "length_mm", length);
  CrystalCatalog catalog;
  if (auto path = cr.text("catalog")) {
    std::filesystem::path p = *path;
    if (p.is_relative())
      p = base_dir / p;
    catalog = CrystalCatalog::load(p);
  } else {
    catalog = CrystalCatalog::load_default();
  }
  m.crystal = catalog.get(*name, length);

  auto& pu = sec.at("pump");
  m.pump.wavelength_nm = pu.number("wavelength_nm").value_or(m.pump.wavelength_nm);
  m.pump.waist_um = pu.number("waist_um").value_or(m.pump.waist_um);
  m.pump.power_mw = pu.number("power_mw").value_or(m.pump.power_mw);
  require_positive(pu, "wavelength_nm", m.pump.wavelength_nm);
  require_positive(pu, "waist_um", m.pump.waist_um);
  require_positive(pu, "power_mw", m.pump.power_mw);

  auto& wl = sec.at("wavelengths");
  const double signal = wl.number("signal_nm").value_or(780.0);
  require_positive(wl, "signal_nm", signal);
  if (!(signal > m.pump.wavelength_nm))
    throw ConfigError("wavelengths.signal_nm must exceed the pump wavelength");
  m.wavelengths = Wavelengths::from_pump_signal(m.pump.wavelength_nm, signal);
  if (auto idler = wl.number("idler_nm")) {
    m.wavelengths.idler_nm = *idler;
    try {
      m.wavelengths.validate();
    } catch (const ValidationError& e) {
      throw ConfigError(std::string("wavelengths.idler_nm: ") + e.what());
    }
  }

  auto& ge = sec.at("geometry");
  m.emission_angle_deg = ge.number("emission_angle_deg").value_or(m.emission_angle_deg);
  m.plane_z_mm = ge.number("plane_z_mm").value_or(m.plane_z_mm);
  m.rho_override_deg = ge.number("rho_override_deg");
  if (!(m.emission_angle_deg >= 0.0 && m.emission_angle_deg < 90.0))
    throw ConfigError("geometry.emission_angle_deg must lie in [0, 90)");
  if (!(m.plane_z_mm >= 0.0))
    throw ConfigError("geometry.plane_z_mm must be non-negative");

  auto& re = sec.at("render");
  if (auto method = re.text("method")) {
    if (*method == "geometric")
      m.method = RenderMethod::Geometric;
    else if (*method == "wave")
      m.method = RenderMethod::Wave;
    else
      throw ConfigError("render.method must be geometric or wave, got '" + *method + "'");
  }
  m.n_depth = re.integer("n_depth").value_or(m.n_depth);
  m.n_azimuth = re.integer("n_azimuth").value_or(m.n_azimuth);
  m.image.width = re.integer("width").value_or(m.image.width);
  m.image.height = re.integer("height").value_or(m.image.height);
  m.image.pitch_um = re.number("pitch_um").value_or(m.image.pitch_um);
  m.pump_blur = re.boolean("pump_blur").value_or(m.pump_blur);
  m.wave.full_sum = re.boolean("wave_full_sum").value_or(m.wave.full_sum);
  m.wave.q_points = re.integer("wave_q_points").value_or(m.wave.q_points);
  m.wave.supersample = re.integer("wave_supersample").value_or(m.wave.supersample);
  if (m.n_depth < 2 || m.n_azimuth < 2)
    throw ConfigError("render.n_depth and render.n_azimuth must be at least 2");
  if (m.image.width < 16 || m.image.height < 16)
    throw ConfigError("render.width and render.height must be at least 16");
  require_positive(re, "pitch_um", m.image.pitch_um);

  auto& le = sec.at("lens");
  if (le.present()) {
    LensSection l;
    auto& s = l.setup;
    s.lens.focal_mm = le.number("focal_mm").value_or(s.lens.focal_mm);
    s.lens.distance_mm = le.number("distance_mm").value_or(s.lens.focal_mm);
    s.lens.offset_x_um = le.number("offset_x_um").value_or(0.0);
    s.lens.offset_y_um = le.number("offset_y_um").value_or(0.0);
    s.camera_z_mm = le.number("camera_z_mm");
    s.image.width = le.integer("width").value_or(s.image.width);
    s.image.height = le.integer("height").value_or(s.image.height);
    s.image.pitch_um = le.number("pitch_um").value_or(s.image.pitch_um);
    s.image.blur_waist_um = le.number("blur_um").value_or(m.pump.waist_um);
    l.coupling_waist_um = le.number("coupling_waist_um").value_or(l.coupling_waist_um);
    require_positive(le, "focal_mm", s.lens.focal_mm);
    require_positive(le, "pitch_um", s.image.pitch_um);
    require_positive(le, "coupling_waist_um", l.coupling_waist_um);
    if (!(s.lens.distance_mm >= 0.0))
      throw ConfigError("lens.distance_mm must be non-negative");
    if (!(s.image.blur_waist_um >= 0.0))
      throw ConfigError("lens.blur_um must be non-negative");
    if (s.image.width < 16 || s.image.height < 16)
      throw ConfigError("lens.width and lens.height must be at least 16");
    if (!(s.camera_z() > s.lens.distance_mm))
      throw ConfigError("lens.camera_z_mm must lie behind the lens");
    cfg.lens = l;
  }

  auto& sw = sec.at("sweep");
  if (sw.present()) {
    SweepSection s;
    if (auto p = sw.text("parameter"))
      s.parameter = parse_sweep_parameter(*p);
    if (auto v = sw.text("values"))
      s.values = parse_value_list(*v);
    cfg.sweep = s;
  }

  auto& out = sec.at("output");
  if (auto d = out.text("dir"))
    cfg.output_dir = *d;
  if (auto f = out.text("format"))
    cfg.format = parse_image_format(*f);

  for (const auto& [_, s] : sec)
    s.reject_unknown();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is)
    throw ConfigError("cannot open config " + path.string());
  return parse_config(is, path.parent_path());
}

MetadataParams describe(const ExperimentConfig& cfg) {
  const ModeConfig& m = cfg.mode;
  MetadataParams p{
      {"crystal", cfg.crystal_name},
      {"crystal_length_mm", format_double(m.crystal.length_mm)},
      {"pump_wavelength_nm", format_double(m.wavelengths.pump_nm)},
      {"signal_wavelength_nm", format_double(m.wavelengths.signal_nm)},
      {"idler_wavelength_nm", format_double(m.wavelengths.idler_nm)},
      {"pump_waist_um", format_double(m.pump.waist_um)},
      {"emission_angle_deg", format_double(m.emission_angle_deg)},
      {"render_method", m.method == RenderMethod::Geometric ? "geometric" : "wave"},
      {"n_depth", std::to_string(m.n_depth)},
      {"n_azimuth", std::to_string(m.n_azimuth)},
      {"pump_blur", m.pump_blur ? "true" : "false"},
  };
  if (m.rho_override_deg)
    p.emplace_back("rho_override_deg", format_double(*m.rho_override_deg));
  return p;
}

} // namespace spdc
