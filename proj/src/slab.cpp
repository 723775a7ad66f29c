#include "sfwm/slab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sfwm/constants.hpp"
#include "sfwm/errors.hpp"

namespace sfwm {

namespace {

void validate_stack(const SlabStack& stack) {
    if (stack.layers.size() < 3) {
        throw InvalidModel("slab stack needs at least 3 layers");
    }
    for (std::size_t j = 1; j + 1 < stack.layers.size(); ++j) {
        if (!(stack.layers[j].thickness > 0.0)) {
            std::ostringstream os;
            os << "interior layer " << j << " must have positive thickness";
            throw InvalidModel(os.str());
        }
    }
}

// cos/cosh and sin/sinh branches unified through the sign of
// q = k0^2 (n^2 - n_eff^2); s carries the 1/kappa factor so q -> 0 is smooth.
void layer_cs(double q, double d, double& c, double& s) {
    if (q > 0.0) {
        const double kappa = std::sqrt(q);
        c = std::cos(kappa * d);
        s = std::sin(kappa * d) / kappa;
    } else if (q < 0.0) {
        const double gamma = std::sqrt(-q);
        c = std::cosh(gamma * d);
        s = std::sinh(gamma * d) / gamma;
    } else {
        c = 1.0;
        s = d;
    }
}

struct StackIndices {
    std::vector<double> n;       // per layer
    double clad_max = 0.0;       // max of first/last
    double core_max = 0.0;       // max of interior
};

StackIndices evaluate_indices(const SlabStack& stack, double wavelength_um) {
    StackIndices si;
    si.n.reserve(stack.layers.size());
    for (const auto& layer : stack.layers) {
        si.n.push_back(refractive_index(layer.material, wavelength_um));
    }
    si.clad_max = std::max(si.n.front(), si.n.back());
    si.core_max = 0.0;
    for (std::size_t j = 1; j + 1 < si.n.size(); ++j) {
        si.core_max = std::max(si.core_max, si.n[j]);
    }
    return si;
}

double dispersion_with_indices(const SlabStack& stack,
                               const StackIndices& si, double k0,
                               double n_eff) {
    const bool tm = stack.polarization == Polarization::TM;
    const double n0 = si.n.front();
    const double nt = si.n.back();
    // Fields decay into both claddings; the scan window keeps n_eff above
    // both cladding indices so these radicands are non-negative.
    const double g0 =
        std::sqrt(std::max(0.0, k0 * k0 * (n_eff * n_eff - n0 * n0)));
    const double gt =
        std::sqrt(std::max(0.0, k0 * k0 * (n_eff * n_eff - nt * nt)));

    // TE propagates (E, E'); TM propagates (H, H'/n^2).
    double v0 = 1.0;
    double v1 = tm ? g0 / (n0 * n0) : g0;

    for (std::size_t j = 1; j + 1 < stack.layers.size(); ++j) {
        const double n = si.n[j];
        const double d = stack.layers[j].thickness;
        const double q = k0 * k0 * (n * n - n_eff * n_eff);
        double c, s;
        layer_cs(q, d, c, s);
        double w0, w1;
        if (tm) {
            w0 = c * v0 + (n * n) * s * v1;
            w1 = -(q / (n * n)) * s * v0 + c * v1;
        } else {
            w0 = c * v0 + s * v1;
            w1 = -q * s * v0 + c * v1;
        }
        v0 = w0;
        v1 = w1;
        // Guard against cosh growth in thick evanescent layers; positive
        // scaling preserves the sign structure the root scan relies on.
        const double m = std::max(std::abs(v0), std::abs(v1));
        if (m > 1e12) {
            v0 /= m;
            v1 /= m;
        }
    }
    return tm ? v1 + (gt / (nt * nt)) * v0 : v1 + gt * v0;
}

}  // namespace

double slab_dispersion_function(const SlabStack& stack, double wavelength_um,
                                double n_eff_trial) {
    validate_stack(stack);
    const auto si = evaluate_indices(stack, wavelength_um);
    const double k0 = 2.0 * pi / wavelength_um;
    return dispersion_with_indices(stack, si, k0, n_eff_trial);
}

std::vector<GuidedMode> find_guided_modes(const SlabStack& stack,
                                          double wavelength_um,
                                          const SlabSolveOptions& opts) {
    validate_stack(stack);
    if (opts.scan_points < 2) {
        throw InvalidModel("scan grid needs at least 2 points");
    }
    const auto si = evaluate_indices(stack, wavelength_um);
    const double k0 = 2.0 * pi / wavelength_um;

    const double lo = si.clad_max + opts.edge_margin;
    const double hi = si.core_max - opts.edge_margin;
    std::vector<GuidedMode> modes;
    if (!(hi > lo)) return modes;

    auto D = [&](double n_eff) {
        return dispersion_with_indices(stack, si, k0, n_eff);
    };

    std::vector<double> roots;
    double x_prev = lo;
    double f_prev = D(x_prev);
    for (int i = 1; i <= opts.scan_points; ++i) {
        const double x =
            lo + (hi - lo) * static_cast<double>(i) / opts.scan_points;
        const double f = D(x);
        if (f_prev == 0.0) {
            roots.push_back(x_prev);
        } else if (f_prev * f < 0.0) {
            double a = x_prev, b = x, fa = f_prev;
            int it = 0;
            while (b - a > opts.tol) {
                if (++it > opts.max_bisect_iters) {
                    std::ostringstream os;
                    os << "bisection did not reach " << opts.tol << " within "
                       << opts.max_bisect_iters << " iterations near n_eff="
                       << 0.5 * (a + b);
                    throw NumericalFailure(os.str());
                }
                const double m = 0.5 * (a + b);
                const double fm = D(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if (fa * fm < 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x_prev = x;
        f_prev = f;
    }
    if (f_prev == 0.0) roots.push_back(x_prev);

    std::sort(roots.begin(), roots.end(), std::greater<double>());
    modes.reserve(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        GuidedMode m;
        m.effective_index = roots[i];
        m.beta = 2.0 * pi * roots[i] / wavelength_um;
        m.order = static_cast<int>(i);
        m.polarization = stack.polarization;
        m.wavelength = wavelength_um;
        modes.push_back(m);
    }
    return modes;
}

GuidedMode effective_index_waveguide(double height_um, double width_um,
                                     const MaterialModel& core,
                                     const MaterialModel& clad,
                                     const MaterialModel& top,
                                     double wavelength_um, int vertical_order,
                                     int horizontal_order, Polarization pol,
                                     const SlabSolveOptions& opts) {
    if (!(height_um > 0.0) || !(width_um > 0.0)) {
        throw InvalidModel("waveguide height and width must be positive");
    }
    SlabStack vertical;
    vertical.polarization = pol;
    vertical.layers = {{0.0, top}, {height_um, core}, {0.0, clad}};
    const auto vmodes = find_guided_modes(vertical, wavelength_um, opts);
    if (vertical_order < 0 ||
        static_cast<std::size_t>(vertical_order) >= vmodes.size()) {
        std::ostringstream os;
        os << "vertical slab supports " << vmodes.size()
           << " mode(s); order " << vertical_order << " requested";
        throw ModeCutoff(os.str());
    }
    const double n_film = vmodes[vertical_order].effective_index;

    // Lateral problem swaps the slab relation: quasi-TE continuity across the
    // sidewalls matches the TM matrix in the rotated frame.
    MaterialModel film = make_constant_material(
        "eim-film", n_film, 0.25 * wavelength_um, 4.0 * wavelength_um);
    SlabStack horizontal;
    horizontal.polarization =
        (pol == Polarization::TE) ? Polarization::TM : Polarization::TE;
    horizontal.layers = {{0.0, clad}, {width_um, film}, {0.0, clad}};
    const auto hmodes = find_guided_modes(horizontal, wavelength_um, opts);
    if (horizontal_order < 0 ||
        static_cast<std::size_t>(horizontal_order) >= hmodes.size()) {
        std::ostringstream os;
        os << "horizontal slab supports " << hmodes.size()
           << " mode(s); order " << horizontal_order << " requested";
        throw ModeCutoff(os.str());
    }
    GuidedMode m = hmodes[horizontal_order];
    m.polarization = pol;
    return m;
}

}  // namespace sfwm
