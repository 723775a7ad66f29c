#include "sfwm/coupler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "sfwm/constants.hpp"
#include "sfwm/errors.hpp"

namespace sfwm {

namespace {

void validate_spec(const CouplerSpec& spec) {
    if (!(spec.width_main > 0.0) || !(spec.width_aux > 0.0) ||
        !(spec.gap > 0.0) || !(spec.height > 0.0) ||
        !(spec.wavelength > 0.0)) {
        throw InvalidModel("coupler dimensions and wavelength must be positive");
    }
}

Polarization lateral_pol(Polarization pol) {
    return pol == Polarization::TE ? Polarization::TM : Polarization::TE;
}

struct LateralProblem {
    MaterialModel film;   // vertical-slab effective index as a material
    double n_clad = 0.0;
    double n_film = 0.0;
};

LateralProblem lateral_problem(const CouplerSpec& spec,
                               const SlabSolveOptions& opts) {
    SlabStack vertical;
    vertical.polarization = spec.polarization;
    vertical.layers = {{0.0, spec.top}, {spec.height, spec.core}, {0.0, spec.clad}};
    const auto vmodes = find_guided_modes(vertical, spec.wavelength, opts);
    if (spec.vertical_order < 0 ||
        static_cast<std::size_t>(spec.vertical_order) >= vmodes.size()) {
        std::ostringstream os;
        os << "vertical slab supports " << vmodes.size() << " mode(s); order "
           << spec.vertical_order << " requested";
        throw ModeCutoff(os.str());
    }
    LateralProblem lp;
    lp.n_film = vmodes[spec.vertical_order].effective_index;
    lp.film = make_constant_material("eim-film", lp.n_film,
                                     0.25 * spec.wavelength,
                                     4.0 * spec.wavelength);
    lp.n_clad = refractive_index(spec.clad, spec.wavelength);
    return lp;
}

std::vector<double> isolated_indices(const LateralProblem& lp,
                                     const CouplerSpec& spec, double width,
                                     const SlabSolveOptions& opts) {
    SlabStack s;
    s.polarization = lateral_pol(spec.polarization);
    s.layers = {{0.0, spec.clad}, {width, lp.film}, {0.0, spec.clad}};
    const auto modes = find_guided_modes(s, spec.wavelength, opts);
    std::vector<double> out;
    out.reserve(modes.size());
    for (const auto& m : modes) out.push_back(m.effective_index);
    return out;  // descending
}

double bisect_root(const std::function<double(double)>& D, double a, double b,
                   double fa, double tol) {
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = D(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

// All sign-change roots of D on [lo, hi] at the given scan resolution,
// ascending. Exact grid hits count once.
std::vector<double> scan_roots(const std::function<double(double)>& D,
                               double lo, double hi, int points, double tol) {
    std::vector<double> roots;
    double x_prev = lo;
    double f_prev = D(lo);
    for (int i = 1; i <= points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / points;
        const double f = D(x);
        if (f_prev == 0.0) {
            if (roots.empty() || x_prev - roots.back() > (hi - lo) / points) {
                roots.push_back(x_prev);
            }
        } else if (f_prev * f < 0.0) {
            const double r = bisect_root(D, x_prev, x, f_prev, tol);
            if (roots.empty() || r - roots.back() > tol) roots.push_back(r);
        }
        x_prev = x;
        f_prev = f;
    }
    if (f_prev == 0.0 &&
        (roots.empty() || x_prev - roots.back() > (hi - lo) / points)) {
        roots.push_back(x_prev);
    }
    return roots;
}

// Index of the grid cell whose midpoint minimizes |D|, skipping cells within
// `exclude_radius` of any value in `exclude`.
int min_abs_cell(const std::function<double(double)>& D, double lo, double hi,
                 int points, const std::vector<double>& exclude,
                 double exclude_radius) {
    int best = -1;
    double best_val = 0.0;
    for (int i = 0; i < points; ++i) {
        const double xm = lo + (hi - lo) * (i + 0.5) / points;
        bool skip = false;
        for (double e : exclude) {
            if (std::abs(xm - e) < exclude_radius) skip = true;
        }
        if (skip) continue;
        const double v = std::abs(D(xm));
        if (best < 0 || v < best_val) {
            best = i;
            best_val = v;
        }
    }
    return best;
}

}  // namespace

CouplerResult supermodes(const CouplerSpec& spec, const SlabSolveOptions& opts) {
    validate_spec(spec);
    const auto lp = lateral_problem(spec, opts);
    const auto main_orders = isolated_indices(lp, spec, spec.width_main, opts);
    const auto aux_orders = isolated_indices(lp, spec, spec.width_aux, opts);
    if (spec.order_main < 0 ||
        static_cast<std::size_t>(spec.order_main) >= main_orders.size()) {
        std::ostringstream os;
        os << "main guide supports " << main_orders.size()
           << " lateral mode(s); order " << spec.order_main << " requested";
        throw ModeCutoff(os.str());
    }
    if (spec.order_aux < 0 ||
        static_cast<std::size_t>(spec.order_aux) >= aux_orders.size()) {
        std::ostringstream os;
        os << "aux guide supports " << aux_orders.size()
           << " lateral mode(s); order " << spec.order_aux << " requested";
        throw ModeCutoff(os.str());
    }
    const double n_main = main_orders[static_cast<std::size_t>(spec.order_main)];
    const double n_aux = aux_orders[static_cast<std::size_t>(spec.order_aux)];
    const double iso_lo = std::min(n_main, n_aux);
    const double iso_hi = std::max(n_main, n_aux);

    // The pair's two supermodes are the only dispersion roots between the
    // midpoints toward the nearest unrelated isolated modes; everything else
    // stays near its own unperturbed index for the gaps considered here.
    std::vector<double> others;
    for (std::size_t i = 0; i < main_orders.size(); ++i) {
        if (static_cast<int>(i) != spec.order_main) others.push_back(main_orders[i]);
    }
    for (std::size_t i = 0; i < aux_orders.size(); ++i) {
        if (static_cast<int>(i) != spec.order_aux) others.push_back(aux_orders[i]);
    }
    const double lo_limit = lp.n_clad + opts.edge_margin;
    const double hi_limit = lp.n_film - opts.edge_margin;
    double guard_below = lo_limit;
    double guard_above = hi_limit;
    for (double o : others) {
        if (o < iso_lo) guard_below = std::max(guard_below, o);
        if (o > iso_hi) guard_above = std::min(guard_above, o);
    }
    const double lb = 0.5 * (guard_below + iso_lo);
    const double ub = 0.5 * (iso_hi + guard_above);

    SlabStack pair;
    pair.polarization = lateral_pol(spec.polarization);
    pair.layers = {{0.0, spec.clad},
                   {spec.width_main, lp.film},
                   {spec.gap, spec.clad},
                   {spec.width_aux, lp.film},
                   {0.0, spec.clad}};
    auto D = [&](double n_eff) {
        return slab_dispersion_function(pair, spec.wavelength, n_eff);
    };

    const int points = std::max(4096, opts.scan_points);
    std::vector<double> roots = scan_roots(D, lb, ub, points, opts.tol);

    if (roots.size() > 2) {
        std::ostringstream os;
        os << roots.size() << " dispersion roots in the supermode bracket ["
           << lb << ", " << ub << "]; cannot identify the pair";
        throw AmbiguousSupermodes(os.str());
    }

    // Fewer than two visible roots: the pair has closed up below the scan
    // resolution (vanishing splitting). Zoom onto the |D| minimum until the
    // two roots separate or provably coincide at double precision.
    if (roots.size() < 2) {
        const double cell = (ub - lb) / points;
        const int c = min_abs_cell(D, lb, ub, points, roots, 2.0 * cell);
        if (c < 0) {
            throw NumericalFailure("supermode bracket contains no candidates");
        }
        double w_lo = std::max(lb, lb + (c - 1) * cell);
        double w_hi = std::min(ub, lb + (c + 2) * cell);
        while (roots.size() < 2 && w_hi - w_lo > 1e-13) {
            const auto found = scan_roots(D, w_lo, w_hi, 128, opts.tol);
            for (double r : found) {
                bool dup = false;
                for (double q : roots) {
                    if (std::abs(q - r) <= opts.tol) dup = true;
                }
                if (!dup) roots.push_back(r);
            }
            if (roots.size() >= 2) break;
            const double sub = (w_hi - w_lo) / 128;
            const int cc = min_abs_cell(D, w_lo, w_hi, 128, roots, 2.0 * sub);
            if (cc < 0) break;
            const double nl = std::max(w_lo, w_lo + (cc - 1) * sub);
            const double nh = std::min(w_hi, w_lo + (cc + 2) * sub);
            w_lo = nl;
            w_hi = nh;
        }
        while (roots.size() < 2) {
            // Coincident pair at double precision: zero splitting.
            roots.push_back(roots.empty() ? 0.5 * (w_lo + w_hi) : roots.front());
        }
        std::sort(roots.begin(), roots.end());
        if (roots.size() > 2) {
            throw AmbiguousSupermodes(
                "supermode refinement uncovered more than two roots");
        }
    }

    const double k = 2.0 * pi / spec.wavelength;
    CouplerResult r;
    r.beta_even = k * roots[1];
    r.beta_odd = k * roots[0];
    r.coupling_C = 0.5 * (r.beta_even - r.beta_odd);
    r.detuning = k * (n_main - n_aux);
    return r;
}

std::vector<SweepPoint> anti_crossing_sweep(const CouplerSpec& base,
                                            double width_lo, double width_hi,
                                            int steps,
                                            const ExecPolicy& policy,
                                            const SlabSolveOptions& opts) {
    if (!(width_hi > width_lo) || steps < 2) {
        throw InvalidModel("sweep needs width_hi > width_lo and >= 2 steps");
    }
    std::vector<SweepPoint> out(static_cast<std::size_t>(steps));
    parallel_for(steps, policy, [&](std::int64_t i) {
        auto& pt = out[static_cast<std::size_t>(i)];
        pt.width_aux = width_lo + (width_hi - width_lo) *
                                      static_cast<double>(i) / (steps - 1);
        CouplerSpec spec = base;
        spec.width_aux = pt.width_aux;
        try {
            const auto r = supermodes(spec, opts);
            pt.beta_even = r.beta_even;
            pt.beta_odd = r.beta_odd;
            pt.splitting = r.beta_even - r.beta_odd;
            pt.ok = true;
        } catch (const Error& e) {
            pt.ok = false;
            pt.error = e.what();
        }
    });
    return out;
}

double gap_for_coupling_length(const CouplerSpec& base, double target_lc_um,
                               double gap_lo, double gap_hi,
                               const SlabSolveOptions& opts) {
    if (!(target_lc_um > 0.0)) {
        throw InvalidModel("target coupling length must be positive");
    }
    if (!(gap_hi > gap_lo) || !(gap_lo > 0.0)) {
        throw InvalidModel("gap bracket must satisfy 0 < gap_lo < gap_hi");
    }
    auto coupling_at = [&](double gap) {
        CouplerSpec spec = base;
        spec.gap = gap;
        return supermodes(spec, opts).coupling_C;
    };

    double samples[8];
    for (int i = 0; i < 8; ++i) {
        samples[i] = coupling_at(gap_lo + (gap_hi - gap_lo) * i / 7.0);
    }
    for (int i = 1; i < 8; ++i) {
        if (!(samples[i] < samples[i - 1])) {
            throw BracketError(
                "C(gap) is not strictly decreasing over the bracket");
        }
    }

    auto lc_err = [&](double gap) { return pi / coupling_at(gap) - target_lc_um; };
    double f_lo = lc_err(gap_lo);
    double f_hi = lc_err(gap_hi);
    if (f_lo == 0.0) return gap_lo;
    if (f_hi == 0.0) return gap_hi;
    if (f_lo * f_hi > 0.0) {
        std::ostringstream os;
        os << "pi/C spans [" << pi / samples[0] << ", " << pi / samples[7]
           << "] um over the gap bracket and does not straddle "
           << target_lc_um << " um";
        throw BracketError(os.str());
    }
    double lo = gap_lo, hi = gap_hi;
    while (hi - lo > 1e-4) {
        const double m = 0.5 * (lo + hi);
        const double fm = lc_err(m);
        if (fm == 0.0) return m;
        if (f_lo * fm < 0.0) {
            hi = m;
        } else {
            lo = m;
            f_lo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace sfwm
