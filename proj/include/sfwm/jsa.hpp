#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "sfwm/array.hpp"
#include "sfwm/parallel.hpp"

namespace sfwm {

enum class PumpShape { gaussian, sech2 };

// Pulsed main pump plus a monochromatic auxiliary pump. main_bandwidth is the
// standard deviation of the Gaussian spectral amplitude; the sech2 shape is
// scaled so its spectral intensity has the same rms width.
struct PumpSpec {
    double main_center_wavelength = 0.0;  // um
    double main_bandwidth = 0.0;          // rad/fs
    double aux_wavelength = 0.0;          // um
    PumpShape shape = PumpShape::gaussian;
};

// Throws InvalidModel unless everything is positive and the bandwidth stays
// below 0.2 of the carrier frequency.
void validate_pump(const PumpSpec& pump);

// Spectral amplitude at the main-pump frequency omega_m, peak 1 at the
// carrier, dimensionless.
double pump_amplitude(const PumpSpec& pump, double omega_m);

enum class ChannelRole { main, aux, signal, idler };

const char* channel_role_name(ChannelRole role);

// beta(omega) for one interacting wave, either a Taylor polynomial about
// omega_ref (beta = sum_k taylor[k]/k! (omega-omega_ref)^k) or a sampled
// table interpolated linearly. group_velocity is derived from the
// representation at construction; evaluation outside [omega_min, omega_max]
// throws OutOfWindow.
struct DispersionChannel {
    ChannelRole role = ChannelRole::main;
    double omega_ref = 0.0;            // rad/fs
    std::vector<double> taylor;        // [rad/um, fs/um, fs^2/um, ...]
    std::vector<double> sample_omega;  // strictly increasing, rad/fs
    std::vector<double> sample_beta;   // rad/um
    double group_velocity = 0.0;       // um/fs at omega_ref
    double omega_min = 0.0;
    double omega_max = 0.0;
};

DispersionChannel make_taylor_channel(ChannelRole role, double omega_ref,
                                      std::vector<double> taylor,
                                      double omega_min, double omega_max);

// Window is the sample range. The slope at omega_ref averages the adjacent
// secants when omega_ref falls on an interior node, which is exact for
// quadratic dispersion.
DispersionChannel make_sampled_channel(ChannelRole role, double omega_ref,
                                       std::vector<double> sample_omega,
                                       std::vector<double> sample_beta);

double channel_beta(const DispersionChannel& channel, double omega);

// d beta / d omega in fs/um at omega, from the same representation that
// channel_beta evaluates: the polynomial derivative for Taylor channels, the
// segment secant for sampled ones (adjacent secants averaged on interior
// nodes). Window rules match channel_beta.
double channel_slope(const DispersionChannel& channel, double omega);

struct ChannelSet {
    DispersionChannel main, aux, signal, idler;
};

// Requires exactly one channel per role.
ChannelSet make_channel_set(const std::vector<DispersionChannel>& channels);

// beta_m(omega_s + omega_i - omega_aux) + beta_a(omega_aux) - beta_s(omega_s)
// - beta_i(omega_i), in rad/um. Grouped as (m + a) - (s + i) so exchanging
// the signal and idler arguments along with their channels is exact.
double phase_mismatch(const ChannelSet& channels, double omega_s,
                      double omega_i, double omega_aux);

// z-dependent effective nonlinearity over [0, length], carried both as an
// eigen expansion A(z) = sum_k amp_k e^{i lambda_k z} and as uniform z
// samples so the two integration routes stay independent.
struct PhasematchEnvelope {
    double length = 0.0;  // um
    std::vector<EnvelopeTerm> terms;
    std::vector<double> z_grid;  // uniform, 0 to length inclusive
    std::vector<std::complex<double>> samples;
};

PhasematchEnvelope constant_envelope(double gamma0, double length,
                                     int n_samples = 4097);

PhasematchEnvelope guide_envelope(const ArraySpec& spec, int guide_index,
                                  int n_samples = 4097);

enum class PhiMethod { analytic, quadrature };

// Unnormalized Phi(dbeta) = integral of A(z) e^{i dbeta z} dz. The analytic
// route sums (e^{i(lambda_k+dbeta)L} - 1)/(i(lambda_k+dbeta)) per eigen term;
// the quadrature route applies the composite trapezoid rule to the samples.
// Phase convention: a constant envelope gives gamma0 L e^{i dbeta L/2}
// sinc(dbeta L/2); only |Phi| feeds the joint intensity and purity.
std::complex<double> phasematching_amplitude(const PhasematchEnvelope& envelope,
                                             double delta_beta,
                                             PhiMethod method);

// Axis windows in rad/fs. A window with lo >= hi is auto-sized: centered on
// the channel's omega_ref with half-width 2 sigma + 4 pi / (|1/v_s - 1/v_i|
// L), covering +-4 pump bandwidths along the frequency-matching diagonal and
// +-4 pi / L of phase mismatch across it.
struct JsaGridSpec {
    int n_signal = 256;
    int n_idler = 256;
    double signal_lo = 0.0, signal_hi = 0.0;
    double idler_lo = 0.0, idler_hi = 0.0;
};

// Axes are uniformly spaced; quadrature everywhere is the product rule with
// cell area step_s * step_i.
struct JsaGrid {
    Eigen::VectorXd signal_axis;  // rad/fs, strictly increasing
    Eigen::VectorXd idler_axis;
    Eigen::MatrixXcd amplitude;  // (signal index, idler index)
    bool normalized = false;
};

// Common step of a uniform strictly increasing axis; DegenerateGrid otherwise.
double axis_step(const Eigen::VectorXd& axis);

// f(omega_s, omega_i) = alpha(omega_s + omega_i - omega_aux) Phi(dbeta),
// L2-normalized so sum |f|^2 step_s step_i = 1. The full grid envelope must
// sit inside every channel window (OutOfWindow otherwise).
JsaGrid build_jsa(const PumpSpec& pump, const ChannelSet& channels,
                  const PhasematchEnvelope& envelope, const JsaGridSpec& grid,
                  PhiMethod method = PhiMethod::analytic,
                  const ExecPolicy& policy = {});

// |f|^2, the joint spectral intensity.
Eigen::MatrixXd intensity(const JsaGrid& jsa);

}  // namespace sfwm
