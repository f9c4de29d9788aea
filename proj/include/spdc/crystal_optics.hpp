#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>

namespace spdc {

/// Sellmeier coefficients for one principal index,
/// n^2 = A + B / (lambda^2 - C) - D lambda^2 with lambda in micrometers.
struct SellmeierCoefficients {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double min_nm = 0.0;   // validity range (vacuum wavelength)
  double max_nm = 1e9;

  /// Evaluates n(lambda). Throws RangeError outside [min_nm, max_nm] or if
  /// the expression gives an index below 1.
  double index(double lambda_nm) const;
};

/// Negative uniaxial crystal: geometry plus dispersion of both principal axes.
struct CrystalSpec {
  std::string name;
  double length_mm = 1.0;
  double cut_angle_deg = 0.0;   // optic axis vs. surface normal
  SellmeierCoefficients ordinary;
  SellmeierCoefficients extraordinary;

  double length_m() const { return length_mm * 1e-3; }
  void validate() const;
};

/// Vacuum wavelengths of the three interacting fields.
struct Wavelengths {
  double pump_nm = 405.0;
  double signal_nm = 810.0;
  double idler_nm = 810.0;

  /// Derives the idler from energy conservation.
  static Wavelengths from_pump_signal(double pump_nm, double signal_nm);

  /// Throws ValidationError unless 1/pump = 1/signal + 1/idler to 1e-9 relative.
  void validate() const;
};

struct Ordinary {};
struct Extraordinary {
  double theta = 0.0;   // radians from the optic axis
};
using Polarization = std::variant<Ordinary, Extraordinary>;

double index_ordinary(const CrystalSpec& spec, double lambda_nm);

/// Index-ellipsoid effective index, 1/n^2 = cos^2/n_o^2 + sin^2/n_e^2.
double index_extraordinary(const CrystalSpec& spec, double lambda_nm, double theta);

/// Poynting-vector walk-off of the extraordinary wave, reported as a positive
/// angle. The transverse displacement it causes is applied along -y.
double walkoff_angle(const CrystalSpec& spec, double lambda_nm, double theta);

/// k = 2 pi n / lambda, in rad/m.
double wavenumber(const CrystalSpec& spec, double lambda_nm, const Polarization& pol);

/// Internal idler angle paired with an internal signal angle by transverse
/// momentum conservation (k_s sin theta_s = k_i sin theta_i).
double idler_angle(const CrystalSpec& spec, const Wavelengths& wl, double signal_angle);

/// Longitudinal mismatch k_p^e(theta_pump) - k_s cos theta_s - k_i cos theta_i
/// for the type-I e -> o + o interaction, with the idler paired by idler_angle.
double longitudinal_mismatch(const CrystalSpec& spec, const Wavelengths& wl,
                             double theta_pump, double signal_angle);

/// Pump angle to the optic axis that zeroes the longitudinal mismatch for the
/// given internal signal emission angle. Bisection over (0, pi/2) until
/// |dk_z| < 1 rad/m. Throws PhaseMatchError when no root exists.
double solve_phasematch_angle(const CrystalSpec& spec, const Wavelengths& wl,
                              double emission_angle);

/// Named coefficient sets read from a plain-text key/value file.
class CrystalCatalog {
public:
  static CrystalCatalog load(const std::filesystem::path& path);
  static CrystalCatalog load_default();

  /// Returns a copy of the named entry with the given length. Throws
  /// ConfigError naming the crystal when it is unknown.
  CrystalSpec get(const std::string& name, double length_mm) const;
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }

private:
  std::map<std::string, CrystalSpec> entries_;
};

std::filesystem::path default_crystal_catalog_path();

} // namespace spdc
