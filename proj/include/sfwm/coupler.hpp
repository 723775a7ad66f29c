#pragma once

#include <string>
#include <vector>

#include "sfwm/parallel.hpp"
#include "sfwm/slab.hpp"

namespace sfwm {

// Two-guide unit cell. The paired modes default to horizontal orders 0 (main,
// narrow) and 1 (aux, broad) at a shared vertical order.
struct CouplerSpec {
    double width_main = 0.0;  // um
    double width_aux = 0.0;   // um
    double gap = 0.0;         // um
    double height = 0.0;      // um
    MaterialModel core;
    MaterialModel clad;
    MaterialModel top;
    double wavelength = 0.0;  // um
    Polarization polarization = Polarization::TE;
    int vertical_order = 0;
    int order_main = 0;
    int order_aux = 1;
};

struct CouplerResult {
    double beta_even = 0.0;    // rad/um, higher supermode
    double beta_odd = 0.0;     // rad/um
    double coupling_C = 0.0;   // rad/um, (beta_even - beta_odd)/2
    double detuning = 0.0;     // rad/um, beta_main_iso - beta_aux_iso
};

// Supermode pair of the five-layer lateral stack clad|main|gap|aux|clad.
// Mode repulsion puts the pair strictly outside the isolated-guide indices,
// so each supermode is the nearest dispersion root beyond that interval; any
// additional root between them is surfaced as AmbiguousSupermodes.
CouplerResult supermodes(const CouplerSpec& spec,
                         const SlabSolveOptions& opts = {});

struct SweepPoint {
    double width_aux = 0.0;   // um
    double beta_even = 0.0;   // rad/um
    double beta_odd = 0.0;    // rad/um
    double splitting = 0.0;   // rad/um, beta_even - beta_odd
    bool ok = false;
    std::string error;        // set when ok is false
};

// Splitting vs broad-guide width; failed points are marked, not fatal.
std::vector<SweepPoint> anti_crossing_sweep(const CouplerSpec& base,
                                            double width_lo, double width_hi,
                                            int steps,
                                            const ExecPolicy& policy = {},
                                            const SlabSolveOptions& opts = {});

// Gap solving pi/C(gap) = target_Lc by bisection to 1e-4 um; C(gap) must be
// strictly monotone over the bracket (validated on 8 samples).
double gap_for_coupling_length(const CouplerSpec& base, double target_lc_um,
                               double gap_lo, double gap_hi,
                               const SlabSolveOptions& opts = {});

}  // namespace sfwm
