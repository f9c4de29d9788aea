#include "spdc/phasematch.hpp"

#include "spdc/errors.hpp"

#include <cmath>

namespace spdc {

TransverseK transverse_k(double k, double theta, double phi) {
  const double kt = k * std::sin(theta);
  return {kt * std::cos(phi), kt * std::sin(phi)};
}

MismatchComponents mismatch_components(double kp, double ks, double ki, double theta_s,
                                       double theta_i, double phi_s, double phi_i) {
  MismatchComponents m;
  m.dkz = kp - ks * std::cos(theta_s) - ki * std::cos(theta_i);
  const TransverseK sum = transverse_k(ks, theta_s, phi_s) + transverse_k(ki, theta_i, phi_i);
  m.dkx = sum.kx;
  m.dky = sum.ky;
  return m;
}

double mismatch_with_walkoff(const MismatchComponents& dk, double kp, const TransverseK& ks_perp,
                             const TransverseK& ki_perp, double rho) {
  const TransverseK sum = ks_perp + ki_perp;
  return dk.dkz - sum.norm2() / (2.0 * kp) + dk.dky * std::tan(rho);
}

double pump_envelope(const TransverseK& ksum, double waist_um) {
  if (!(waist_um > 0.0))
    throw ValidationError("pump waist must be positive");
  const double w = waist_um * 1e-6;
  return std::exp(-ksum.norm2() * w * w / 4.0);
}

double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    // 1 - x^2/6 + x^4/120; the next term is below 1e-26 here.
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

std::complex<double> phase_matching_amplitude(double length_m, double dk, double envelope) {
  const double half = 0.5 * length_m * dk;
  return envelope * sinc(half) * std::polar(1.0, -half);
}

} // namespace spdc
