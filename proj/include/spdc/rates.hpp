#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spdc {

/// Reported brightness of the source, coincidences per second per mW of pump.
/// Reference only; nothing in the library predicts it.
inline constexpr double kReferenceBrightness = 0.517e6;

struct ChannelStats {
  double coincidences = 0.0;     // counts/s
  double singles_signal = 0.0;   // counts/s
  double singles_idler = 0.0;
  double det_eff_signal = 0.55;
  double det_eff_idler = 0.50;
  double transmission_signal = 0.645;
  double transmission_idler = 0.645;

  void validate() const;
};

struct CollectionEfficiency {
  double mu_signal = 0.0;
  double mu_idler = 0.0;
  double mu_combined = 0.0;
  std::vector<std::string> warnings;
};

/// mu_s = C / (s_i d_s t_s), mu_i = C / (s_s d_i t_i), combined = sqrt(mu_s mu_i).
CollectionEfficiency collection_efficiency(const ChannelStats& stats);

struct RatePoint {
  double length_mm = 0.0;
  double rate = 0.0;
};

struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  double r_squared = 0.0;
};

/// rate = amplitude * L^exponent by least squares on (ln L, ln rate).
PowerLawFit power_law_fit(const std::vector<RatePoint>& points);

struct Improvement {
  std::vector<RatePoint> ratios;   // rate holds corrected / uncorrected
  double mean_ratio = 0.0;
  double amplitude_ratio = 0.0;
  double exponent_corrected = 0.0;
  double exponent_uncorrected = 0.0;
};

Improvement improvement_factor(const std::vector<RatePoint>& corrected,
                               const std::vector<RatePoint>& uncorrected);

/// Header "length_mm,rate". Throws FormatError on anything else.
std::vector<RatePoint> read_rate_csv(std::istream& is);
std::vector<RatePoint> read_rate_csv(const std::string& path);
void write_rate_csv(std::ostream& os, const std::vector<RatePoint>& points);

} // namespace spdc
