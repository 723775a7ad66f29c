#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sfwm/array.hpp"
#include "sfwm/coupler.hpp"
#include "sfwm/jsa.hpp"

namespace sfwm {

// Operating point shipped with the toolkit: quadratic dispersion per channel,
// group-velocity matched between the main pump and the pair, phasematched at
// the carriers, with the 20-guide array geometry.
struct ReferenceDesign {
    ChannelSet channels;
    PumpSpec pump;
    double device_length = 0.0;  // um
    double coupling = 0.0;       // rad/um between neighbouring guides
    int n_guides = 0;
    int excitation_guide = 0;
    int heralded_guide = 0;
};

ReferenceDesign reference_design();

// Uniform chain of the design with unit excitation in the injection guide.
ArraySpec reference_array(const ReferenceDesign& design);

// 2/v_m - 1/v_s - 1/v_i in fs/um from the stored channel group velocities.
double gvm_residual(const ChannelSet& channels);

// Same combination from the local slopes d beta / d omega at the given
// wavelengths instead of the stored carrier velocities.
double gvm_residual_at(const ChannelSet& channels, double lambda_m_um,
                       double lambda_s_um, double lambda_i_um);

struct PhasematchPoint {
    double lambda_s = 0.0;  // um
    double lambda_i = 0.0;  // um
    double lambda_m = 0.0;  // um
};

// Zero of the phase mismatch under energy conservation. Each candidate main
// wavelength fixes the line omega_s + omega_i = omega_m + omega_aux; the
// mismatch is bisected along that line, and the crossing whose local group
// velocities best balance 2/v_m against 1/v_s + 1/v_i is returned, with the
// main wavelength refined around the best candidate. Throws DegenerateFlat
// when the mismatch vanishes identically along a line (every point is a
// solution) and NoPhasematch when no line brackets a sign change.
PhasematchPoint find_phasematch_point(const ChannelSet& channels,
                                      double lambda_aux_um,
                                      double lambda_m_lo_um,
                                      double lambda_m_hi_um,
                                      int n_candidates = 129);

struct BandwidthOptimum {
    double bandwidth = 0.0;  // rad/fs
    double purity = 0.0;
    // The objective never moved by more than 1e-9 across the bracket; the
    // reported bandwidth is then the log-midpoint, not a maximizer.
    bool flat = false;
};

// Golden-section maximum of purity_of over log-bandwidth, converged to 1e-3
// relative in bandwidth. The bracket must span at least a factor of 10; a
// maximum pinned to a bracket edge throws BoundaryMaximum instead of
// returning a spurious interior value.
BandwidthOptimum maximize_purity_over_log_bandwidth(
    const std::function<double(double)>& purity_of, double bandwidth_lo,
    double bandwidth_hi);

// Purity objective assembled from the model: spectral purity of the JSA built
// with the given envelope on an auto-sized grid_size^2 grid, as a function of
// the main pump bandwidth.
BandwidthOptimum optimize_pump_bandwidth(const PumpSpec& pump,
                                         const ChannelSet& channels,
                                         const PhasematchEnvelope& envelope,
                                         int grid_size, double bandwidth_lo,
                                         double bandwidth_hi,
                                         const ExecPolicy& policy = {});

// Everything the end-to-end designer consumes. The coupler spec's wavelength
// must be the auxiliary pump wavelength; its width_aux and gap entries are
// starting values that the sweep and the gap solve overwrite.
struct DesignInputs {
    ChannelSet channels;
    PumpSpec pump;
    double lambda_m_lo = 0.0;  // um, main-pump search window
    double lambda_m_hi = 0.0;
    CouplerSpec coupler;
    double aux_width_lo = 0.0;  // um, anti-crossing sweep window
    double aux_width_hi = 0.0;
    int sweep_steps = 0;
    double target_lc = 0.0;  // um
    double gap_lo = 0.0;     // um, bracket for the gap solve
    double gap_hi = 0.0;
    int n_guides = 0;
    double device_length = 0.0;  // um
    int excitation_guide = 0;
    int heralded_guide = 0;
    double bandwidth_lo = 0.0;  // rad/fs, optimizer bracket
    double bandwidth_hi = 0.0;
    int grid_size = 256;
    int envelope_samples = 257;
    ExecPolicy policy;
    SlabSolveOptions slab;
};

// Reference inputs with the given core/cladding materials filled into the
// coupler cross-section (220 nm film, 300 nm narrow guide).
DesignInputs reference_design_inputs(const MaterialModel& core,
                                     const MaterialModel& cladding);

// One pipeline run. failed_step is -1 on success, otherwise the 1-based index
// of the first step that threw; every later step is skipped and its report
// fields stay at their defaults. steps collects one log line per completed
// step. Rerunning the same inputs reproduces every field bit for bit.
struct DesignReport {
    double gvm_residual = 0.0;  // fs/um, step 1
    double lambda_s = 0.0;      // um, step 2
    double lambda_i = 0.0;
    double lambda_m = 0.0;
    double lambda_a = 0.0;
    double aux_width = 0.0;    // um, step 3
    double gap = 0.0;          // um, step 4
    double achieved_lc = 0.0;  // um
    double optimal_bandwidth = 0.0;  // rad/fs, step 6
    double baseline_purity = 0.0;
    double apodized_purity = 0.0;
    bool bandwidth_flat = false;
    int failed_step = -1;
    std::string failure;  // error name and message of the failed step
    std::vector<std::string> steps;
};

// Steps, in order: 1 group-velocity matching, 2 phasematch point, 3 auxiliary
// guide width at the anti-crossing, 4 gap for the target coupling length,
// 5 array envelopes, 6 pump bandwidth and the two purities. The pump is
// re-centered on the step-2 main wavelength, the array coupling comes from
// the step-4 gap, and the baseline purity is quoted at the bandwidth that
// maximizes the apodized purity.
DesignReport run_design(const DesignInputs& inputs);

}  // namespace sfwm
