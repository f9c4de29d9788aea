#include "spdc/crystal_optics.hpp"

#include "spdc/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace spdc {

namespace {

std::string range_message(double lambda_nm, const SellmeierCoefficients& s) {
  std::ostringstream os;
  os << "wavelength " << lambda_nm << " nm outside valid range [" << s.min_nm << ", "
     << s.max_nm << "] nm";
  return os.str();
}

} // namespace

double SellmeierCoefficients::index(double lambda_nm) const {
  if (!(lambda_nm >= min_nm && lambda_nm <= max_nm))
    throw RangeError(range_message(lambda_nm, *this));
  const double um = lambda_nm * 1e-3;
  const double l2 = um * um;
  const double n2 = a + b / (l2 - c) - d * l2;
  if (!(n2 >= 1.0) || !std::isfinite(n2))
    throw RangeError(range_message(lambda_nm, *this) + ": non-physical index");
  return std::sqrt(n2);
}

void CrystalSpec::validate() const {
  if (!(length_mm > 0.0))
    throw ValidationError("crystal length must be positive");
  if (!(cut_angle_deg >= 0.0 && cut_angle_deg <= 90.0))
    throw ValidationError("cut angle must lie in [0, 90] degrees");
  if (ordinary.min_nm >= ordinary.max_nm || extraordinary.min_nm >= extraordinary.max_nm)
    throw ValidationError("empty Sellmeier validity range for crystal '" + name + "'");
}

Wavelengths Wavelengths::from_pump_signal(double pump_nm, double signal_nm) {
  if (!(pump_nm > 0.0) || !(signal_nm > pump_nm))
    throw ValidationError("signal wavelength must exceed the pump wavelength");
  Wavelengths wl;
  wl.pump_nm = pump_nm;
  wl.signal_nm = signal_nm;
  wl.idler_nm = 1.0 / (1.0 / pump_nm - 1.0 / signal_nm);
  return wl;
}

void Wavelengths::validate() const {
  if (!(pump_nm > 0.0 && signal_nm > 0.0 && idler_nm > 0.0))
    throw ValidationError("wavelengths must be positive");
  const double lhs = 1.0 / pump_nm;
  const double rhs = 1.0 / signal_nm + 1.0 / idler_nm;
  if (std::abs(lhs - rhs) > 1e-9 * lhs) {
    std::ostringstream os;
    os << "energy conservation violated: 1/" << pump_nm << " != 1/" << signal_nm << " + 1/"
       << idler_nm;
    throw ValidationError(os.str());
  }
}

double index_ordinary(const CrystalSpec& spec, double lambda_nm) {
  return spec.ordinary.index(lambda_nm);
}

double index_extraordinary(const CrystalSpec& spec, double lambda_nm, double theta) {
  const double no = spec.ordinary.index(lambda_nm);
  const double ne = spec.extraordinary.index(lambda_nm);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return 1.0 / std::sqrt(c * c / (no * no) + s * s / (ne * ne));
}

double walkoff_angle(const CrystalSpec& spec, double lambda_nm, double theta) {
  const double no = spec.ordinary.index(lambda_nm);
  const double ne = spec.extraordinary.index(lambda_nm);
  const double n = index_extraordinary(spec, lambda_nm, theta);
  const double tan_rho =
      0.5 * n * n * (1.0 / (ne * ne) - 1.0 / (no * no)) * std::sin(2.0 * theta);
  return std::atan(std::abs(tan_rho));
}

double wavenumber(const CrystalSpec& spec, double lambda_nm, const Polarization& pol) {
  const double n = std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Ordinary>)
          return index_ordinary(spec, lambda_nm);
        else
          return index_extraordinary(spec, lambda_nm, p.theta);
      },
      pol);
  return 2.0 * std::numbers::pi * n / (lambda_nm * 1e-9);
}

double idler_angle(const CrystalSpec& spec, const Wavelengths& wl, double signal_angle) {
  const double ks = wavenumber(spec, wl.signal_nm, Ordinary{});
  const double ki = wavenumber(spec, wl.idler_nm, Ordinary{});
  const double s = ks * std::sin(signal_angle) / ki;
  if (std::abs(s) > 1.0)
    throw PhaseMatchError("idler cannot carry the signal's transverse momentum");
  return std::asin(s);
}

double longitudinal_mismatch(const CrystalSpec& spec, const Wavelengths& wl, double theta_pump,
                             double signal_angle) {
  const double kp = wavenumber(spec, wl.pump_nm, Extraordinary{theta_pump});
  const double ks = wavenumber(spec, wl.signal_nm, Ordinary{});
  const double ki = wavenumber(spec, wl.idler_nm, Ordinary{});
  const double theta_i = idler_angle(spec, wl, signal_angle);
  return kp - ks * std::cos(signal_angle) - ki * std::cos(theta_i);
}

double solve_phasematch_angle(const CrystalSpec& spec, const Wavelengths& wl,
                              double emission_angle) {
  wl.validate();
  if (!(emission_angle >= 0.0))
    throw ValidationError("emission angle must be non-negative");

  // k_p^e decreases monotonically from the o-index to the e-index as theta
  // goes 0 -> pi/2, so the mismatch has at most one sign change.
  double lo = 0.0;
  double hi = std::numbers::pi / 2.0;
  double f_lo = longitudinal_mismatch(spec, wl, lo, emission_angle);
  const double f_hi = longitudinal_mismatch(spec, wl, hi, emission_angle);
  if (f_lo < 0.0 || f_hi > 0.0)
    throw PhaseMatchError("no type-I phase-matching angle in (0, pi/2) for crystal '" +
                          spec.name + "'");

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f_mid = longitudinal_mismatch(spec, wl, mid, emission_angle);
    if (std::abs(f_mid) < 1e-3 || hi - lo < 1e-15)
      break;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  if (std::abs(longitudinal_mismatch(spec, wl, mid, emission_angle)) >= 1.0)
    throw PhaseMatchError("phase-matching bisection did not converge below 1 rad/m");
  return mid;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

SellmeierCoefficients read_axis(const boost::property_tree::ptree& sec, const std::string& p,
                                const std::string& crystal) {
  SellmeierCoefficients s;
  try {
    s.a = sec.get<double>(p + "_A");
    s.b = sec.get<double>(p + "_B");
    s.c = sec.get<double>(p + "_C");
    s.d = sec.get<double>(p + "_D");
    s.min_nm = sec.get<double>("min_nm");
    s.max_nm = sec.get<double>("max_nm");
  } catch (const boost::property_tree::ptree_error& e) {
    throw ConfigError("crystal catalog entry '" + crystal + "': " + e.what());
  }
  return s;
}

} // namespace

CrystalCatalog CrystalCatalog::load(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read crystal catalog: " + std::string(e.what()));
  }
  static const std::set<std::string> known = {"description", "cut_angle_deg", "o_A", "o_B",
                                              "o_C", "o_D", "e_A", "e_B", "e_C", "e_D",
                                              "min_nm", "max_nm"};
  CrystalCatalog cat;
  for (const auto& [name, sec] : tree) {
    for (const auto& kv : sec)
      if (!known.count(kv.first))
        throw ConfigError("crystal catalog entry '" + name + "': unknown key '" + kv.first + "'");
    CrystalSpec spec;
    spec.name = name;
    spec.cut_angle_deg = sec.get<double>("cut_angle_deg", 0.0);
    spec.ordinary = read_axis(sec, "o", name);
    spec.extraordinary = read_axis(sec, "e", name);
    cat.entries_[name] = spec;
  }
  return cat;
}

std::filesystem::path default_crystal_catalog_path() {
  return std::filesystem::path(SPDC_DATA_DIR) / "crystals.ini";
}

CrystalCatalog CrystalCatalog::load_default() { return load(default_crystal_catalog_path()); }

CrystalSpec CrystalCatalog::get(const std::string& name, double length_mm) const {
  auto it = entries_.find(name);
  if (it == entries_.end())
    throw ConfigError("unknown crystal '" + name + "'");
  CrystalSpec spec = it->second;
  spec.length_mm = length_mm;
  spec.validate();
  return spec;
}

} // namespace spdc
