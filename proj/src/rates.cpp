#include "spdc/rates.hpp"

#include "spdc/errors.hpp"
#include "spdc/image_io.hpp"

#include <boost/algorithm/string.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace spdc {

void ChannelStats::validate() const {
  if (coincidences < 0.0 || singles_signal < 0.0 || singles_idler < 0.0)
    throw ValidationError("counts must be non-negative");
  for (double v : {det_eff_signal, det_eff_idler, transmission_signal, transmission_idler})
    if (!(v > 0.0 && v <= 1.0))
      throw ValidationError("detector efficiencies and transmissions must lie in (0, 1]");
}

CollectionEfficiency collection_efficiency(const ChannelStats& s) {
  s.validate();
  if (!(s.singles_signal > 0.0) || !(s.singles_idler > 0.0))
    throw ValidationError("singles rates must be positive");
  CollectionEfficiency out;
  out.mu_signal = s.coincidences / (s.singles_idler * s.det_eff_signal * s.transmission_signal);
  out.mu_idler = s.coincidences / (s.singles_signal * s.det_eff_idler * s.transmission_idler);
  out.mu_combined = std::sqrt(out.mu_signal * out.mu_idler);
  if (s.coincidences > std::min(s.singles_signal, s.singles_idler))
    out.warnings.push_back("coincidences exceed a singles rate");
  if (out.mu_signal > 1.0 || out.mu_idler > 1.0)
    out.warnings.push_back("collection efficiency above 1: inputs are inconsistent");
  return out;
}

PowerLawFit power_law_fit(const std::vector<RatePoint>& points) {
  if (points.size() < 3)
    throw ValidationError("power-law fit needs at least 3 points");
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& p : points) {
    if (!(p.length_mm > 0.0) || !(p.rate > 0.0))
      throw ValidationError("lengths and rates must be positive");
    sx += std::log(p.length_mm);
    sy += std::log(p.rate);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(p.length_mm) - mx;
    const double dy = std::log(p.rate) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0))
    throw ValidationError("power-law fit needs at least two distinct lengths");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.amplitude = std::exp(intercept);
  double ss_res = 0.0;
  for (const auto& p : points) {
    const double e = std::log(p.rate) - (intercept + fit.exponent * std::log(p.length_mm));
    ss_res += e * e;
  }
  // A perfectly flat series is fitted exactly.
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

Improvement improvement_factor(const std::vector<RatePoint>& corrected,
                               const std::vector<RatePoint>& uncorrected) {
  if (corrected.size() != uncorrected.size() || corrected.empty())
    throw ValidationError("rate tables must share the same length grid");
  Improvement out;
  double sum = 0.0;
  for (std::size_t i = 0; i < corrected.size(); ++i) {
    if (corrected[i].length_mm != uncorrected[i].length_mm)
      throw ValidationError("rate tables must share the same length grid");
    if (!(uncorrected[i].rate > 0.0))
      throw ValidationError("uncorrected rates must be positive");
    const double r = corrected[i].rate / uncorrected[i].rate;
    out.ratios.push_back({corrected[i].length_mm, r});
    sum += r;
  }
  out.mean_ratio = sum / corrected.size();
  if (corrected.size() >= 3) {
    const auto fc = power_law_fit(corrected);
    const auto fu = power_law_fit(uncorrected);
    out.amplitude_ratio = fc.amplitude / fu.amplitude;
    out.exponent_corrected = fc.exponent;
    out.exponent_uncorrected = fu.exponent;
  }
  return out;
}

std::vector<RatePoint> read_rate_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw FormatError("empty rate table");
  boost::algorithm::trim(line);
  if (line != "length_mm,rate")
    throw FormatError("rate table header must be 'length_mm,rate', got '" + line + "'");
  std::vector<RatePoint> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    boost::algorithm::trim(line);
    if (line.empty())
      continue;
    std::vector<std::string> cols;
    boost::algorithm::split(cols, line, boost::is_any_of(","));
    if (cols.size() != 2)
      throw FormatError("line " + std::to_string(lineno) + ": expected 2 columns");
    try {
      std::size_t u = 0, v = 0;
      const double l = std::stod(cols[0], &u);
      const double r = std::stod(cols[1], &v);
      if (u != cols[0].size() || v != cols[1].size())
        throw std::invalid_argument("trailing characters");
      out.push_back({l, r});
    } catch (const std::exception&) {
      throw FormatError("line " + std::to_string(lineno) + ": not a number");
    }
  }
  return out;
}

std::vector<RatePoint> read_rate_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is)
    throw FormatError("cannot open " + path);
  return read_rate_csv(is);
}

void write_rate_csv(std::ostream& os, const std::vector<RatePoint>& points) {
  os << "length_mm,rate\n";
  for (const auto& p : points)
    os << format_double(p.length_mm) << ',' << format_double(p.rate) << '\n';
}

} // namespace spdc
