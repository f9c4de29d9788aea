#pragma once

#include <complex>

namespace spdc {

/// Transverse wave-vector components (rad/m). Azimuths here are measured from
/// +x toward +y.
struct TransverseK {
  double kx = 0.0;
  double ky = 0.0;

  double norm2() const { return kx * kx + ky * ky; }
  TransverseK operator+(const TransverseK& o) const { return {kx + o.kx, ky + o.ky}; }
  TransverseK operator-() const { return {-kx, -ky}; }
};

/// Transverse k of a photon travelling at polar angle theta, azimuth phi.
TransverseK transverse_k(double k, double theta, double phi);

struct MismatchComponents {
  double dkz = 0.0;
  double dkx = 0.0;
  double dky = 0.0;
};

/// Mismatch decomposition for arbitrary signal/idler azimuths:
///   dkz = kp - ks cos(theta_s) - ki cos(theta_i)
///   dkx = ks sin(theta_s) cos(phi_s) + ki sin(theta_i) cos(phi_i)
///   dky = ks sin(theta_s) sin(phi_s) + ki sin(theta_i) sin(phi_i)
/// i.e. dkx/dky are the summed transverse components along x and y.
MismatchComponents mismatch_components(double kp, double ks, double ki, double theta_s,
                                       double theta_i, double phi_s, double phi_i);

/// dk = dkz - |ks_perp + ki_perp|^2 / (2 kp) + dky tan(rho)
double mismatch_with_walkoff(const MismatchComponents& dk, double kp, const TransverseK& ks_perp,
                             const TransverseK& ki_perp, double rho);

/// Gaussian pump transverse amplitude exp(-|ksum|^2 w^2 / 4), w the 1/e^2
/// intensity waist. Throws ValidationError for waist <= 0.
double pump_envelope(const TransverseK& ksum, double waist_um);

/// sin(x)/x with sinc(0) = 1, series-evaluated near zero.
double sinc(double x);

/// envelope * sinc(L dk / 2) * exp(-i L dk / 2)
std::complex<double> phase_matching_amplitude(double length_m, double dk, double envelope);

} // namespace spdc
