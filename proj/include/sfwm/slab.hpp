#pragma once

#include <vector>

#include "sfwm/materials.hpp"

namespace sfwm {

enum class Polarization { TE, TM };

// First and last layers are semi-infinite claddings; their thickness field is
// ignored. Interior thicknesses are in um and must be positive.
struct SlabLayer {
    double thickness = 0.0;
    MaterialModel material;
};

struct SlabStack {
    std::vector<SlabLayer> layers;
    Polarization polarization = Polarization::TE;
};

struct GuidedMode {
    double effective_index = 0.0;
    double beta = 0.0;  // rad/um
    int order = 0;      // 0 = highest effective index
    Polarization polarization = Polarization::TE;
    double wavelength = 0.0;  // um
};

struct SlabSolveOptions {
    int scan_points = 2000;       // sign-change scan resolution in n_eff
    double tol = 1e-10;           // bisection tolerance in n_eff
    int max_bisect_iters = 200;
    double edge_margin = 1e-9;    // keeps the scan inside the open interval
};

// Transfer-matrix mismatch at the top cladding; zero at a guided mode.
// Exposed so tests can probe root structure directly.
double slab_dispersion_function(const SlabStack& stack, double wavelength_um,
                                double n_eff_trial);

// All guided modes with max(cladding n) < n_eff < max(core n), sorted by
// descending effective index. An empty result is not an error.
std::vector<GuidedMode> find_guided_modes(const SlabStack& stack,
                                          double wavelength_um,
                                          const SlabSolveOptions& opts = {});

// Effective-index method for a rectangular channel: the vertical stack
// (top | core | clad) is solved at vertical_order, then its effective index
// forms the film of the horizontal stack (clad | film | clad) solved at
// horizontal_order with the polarization exchanged (quasi-TE uses the TM slab
// relation laterally, and vice versa).
GuidedMode effective_index_waveguide(double height_um, double width_um,
                                     const MaterialModel& core,
                                     const MaterialModel& clad,
                                     const MaterialModel& top,
                                     double wavelength_um, int vertical_order,
                                     int horizontal_order, Polarization pol,
                                     const SlabSolveOptions& opts = {});

}  // namespace sfwm
