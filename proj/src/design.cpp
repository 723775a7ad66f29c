#include "sfwm/design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "sfwm/constants.hpp"
#include "sfwm/errors.hpp"
#include "sfwm/schmidt.hpp"

namespace sfwm {

namespace {

constexpr double golden = 0.6180339887498949;  // (sqrt(5) - 1) / 2

double local_residual(const ChannelSet& channels, double omega_m,
                      double omega_s, double omega_i) {
    return 2.0 * channel_slope(channels.main, omega_m) -
           channel_slope(channels.signal, omega_s) -
           channel_slope(channels.idler, omega_i);
}

struct LineRoot {
    bool found = false;
    double omega_s = 0.0;
    double residual = 0.0;  // fs/um, local velocity balance at the root
};

// Root of the phase mismatch along the energy-conservation line of one
// candidate main frequency, omega_s + omega_i = omega_m + omega_aux. All
// samples exactly zero means every point on the line is phasematched, which
// no single crossing can represent.
LineRoot root_on_line(const ChannelSet& channels, double omega_m,
                      double omega_aux) {
    const double total = omega_m + omega_aux;
    double lo = std::max(channels.signal.omega_min,
                         total - channels.idler.omega_max);
    double hi = std::min(channels.signal.omega_max,
                         total - channels.idler.omega_min);
    LineRoot out;
    if (!(lo < hi)) return out;
    // Keeps omega_i = total - omega_s inside the idler window under rounding.
    const double margin = 1e-9 * (hi - lo);
    lo += margin;
    hi -= margin;

    auto mismatch = [&](double omega_s) {
        return phase_mismatch(channels, omega_s, total - omega_s, omega_aux);
    };

    const int n_scan = 257;
    std::array<double, n_scan> w{}, f{};
    bool all_zero = true;
    for (int j = 0; j < n_scan; ++j) {
        w[j] = lo + (hi - lo) * j / (n_scan - 1);
        f[j] = mismatch(w[j]);
        all_zero = all_zero && f[j] == 0.0;
    }
    if (all_zero) {
        throw DegenerateFlat(
            "phase mismatch vanishes along the whole frequency-matching "
            "line; every point is phasematched");
    }

    double root = 0.0;
    bool have = false;
    for (int j = 0; j < n_scan && !have; ++j) {
        if (f[j] == 0.0) {
            root = w[j];
            have = true;
        }
    }
    for (int j = 0; j + 1 < n_scan && !have; ++j) {
        if (std::signbit(f[j]) == std::signbit(f[j + 1])) continue;
        double a = w[j], b = w[j + 1], fa = f[j];
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            const double fm = mismatch(m);
            if (fm == 0.0) {
                a = b = m;
                break;
            }
            if (std::signbit(fm) == std::signbit(fa)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        root = 0.5 * (a + b);
        have = true;
    }
    if (!have) return out;

    out.found = true;
    out.omega_s = root;
    out.residual = local_residual(channels, omega_m, root, total - root);
    return out;
}

}  // namespace

ReferenceDesign reference_design() {
    const double wm0 = omega_from_wavelength(1.17);
    const double wa0 = omega_from_wavelength(1.37);
    // The nominal signal/idler carriers do not satisfy energy conservation
    // with the pump carriers exactly; both are shifted by the same amount so
    // that omega_s + omega_i = omega_m + omega_a holds.
    double ws0 = omega_from_wavelength(1.54);
    double wi0 = omega_from_wavelength(1.08);
    const double mismatch = (wm0 + wa0) - (ws0 + wi0);
    ws0 += 0.5 * mismatch;
    wi0 += 0.5 * mismatch;

    const double b1s = 4.2 / speed_of_light;
    const double b1i = 4.5 / speed_of_light;
    // Exact average makes 2/v_m = 1/v_s + 1/v_i hold to roundoff.
    const double b1m = 0.5 * (b1s + b1i);
    const double b1a = b1m;

    const double b0s = 1.80 * ws0 / speed_of_light;
    const double b0i = 2.35 * wi0 / speed_of_light;
    const double b0a = 2.10 * wa0 / speed_of_light;
    // Zero phase mismatch at the carriers by construction.
    const double b0m = (b0s + b0i) - b0a;

    auto window_lo = [](double lambda_hi_um) {
        return omega_from_wavelength(lambda_hi_um);
    };
    auto window_hi = [](double lambda_lo_um) {
        return omega_from_wavelength(lambda_lo_um);
    };

    ReferenceDesign d;
    d.channels = make_channel_set({
        make_taylor_channel(ChannelRole::main, wm0, {b0m, b1m, 2.0},
                            window_lo(1.32), window_hi(1.05)),
        make_taylor_channel(ChannelRole::aux, wa0, {b0a, b1a, 0.0},
                            window_lo(1.50), window_hi(1.25)),
        make_taylor_channel(ChannelRole::signal, ws0, {b0s, b1s, -1.0},
                            window_lo(1.70), window_hi(1.40)),
        make_taylor_channel(ChannelRole::idler, wi0, {b0i, b1i, 1.0},
                            window_lo(1.19), window_hi(0.98)),
    });
    d.pump.main_center_wavelength = 1.17;
    d.pump.main_bandwidth = 0.022413;
    d.pump.aux_wavelength = 1.37;
    d.device_length = 400.0;
    d.coupling = pi / 500.0;
    d.n_guides = 20;
    d.excitation_guide = 5;
    d.heralded_guide = 7;
    return d;
}

ArraySpec reference_array(const ReferenceDesign& design) {
    Eigen::VectorXcd excitation = Eigen::VectorXcd::Zero(design.n_guides);
    excitation[design.excitation_guide] = 1.0;
    return make_uniform_array(design.n_guides, design.coupling,
                              design.device_length, excitation);
}

double gvm_residual(const ChannelSet& channels) {
    return 2.0 / channels.main.group_velocity -
           1.0 / channels.signal.group_velocity -
           1.0 / channels.idler.group_velocity;
}

double gvm_residual_at(const ChannelSet& channels, double lambda_m_um,
                       double lambda_s_um, double lambda_i_um) {
    return local_residual(channels, omega_from_wavelength(lambda_m_um),
                          omega_from_wavelength(lambda_s_um),
                          omega_from_wavelength(lambda_i_um));
}

PhasematchPoint find_phasematch_point(const ChannelSet& channels,
                                      double lambda_aux_um,
                                      double lambda_m_lo_um,
                                      double lambda_m_hi_um,
                                      int n_candidates) {
    if (!(lambda_m_lo_um > 0.0) || !(lambda_m_hi_um > lambda_m_lo_um)) {
        throw InvalidModel("main wavelength window must be positive and ordered");
    }
    if (n_candidates < 3) {
        throw InvalidModel("phasematch search needs at least 3 candidates");
    }
    const double omega_aux = omega_from_wavelength(lambda_aux_um);
    channel_beta(channels.aux, omega_aux);  // aux window check up front

    double m_lo = std::max(channels.main.omega_min,
                           omega_from_wavelength(lambda_m_hi_um));
    double m_hi = std::min(channels.main.omega_max,
                           omega_from_wavelength(lambda_m_lo_um));
    if (!(m_lo < m_hi)) {
        throw NoPhasematch(
            "main-pump search window does not overlap the main channel window");
    }
    const double m_margin = 1e-9 * (m_hi - m_lo);
    m_lo += m_margin;
    m_hi -= m_margin;

    bool have = false;
    double best_omega_m = 0.0, best_omega_s = 0.0, best_residual = 0.0;
    auto probe = [&](double omega_m) {
        const LineRoot r = root_on_line(channels, omega_m, omega_aux);
        if (r.found &&
            (!have || std::abs(r.residual) < std::abs(best_residual))) {
            have = true;
            best_omega_m = omega_m;
            best_omega_s = r.omega_s;
            best_residual = r.residual;
        }
        return r.found ? std::abs(r.residual)
                       : std::numeric_limits<double>::infinity();
    };

    const double step = (m_hi - m_lo) / (n_candidates - 1);
    for (int j = 0; j < n_candidates; ++j) probe(m_lo + step * j);
    if (!have) {
        throw NoPhasematch(
            "phase mismatch does not change sign along any frequency-matching "
            "line in the search window");
    }

    // The velocity balance is piecewise smooth in the candidate frequency, so
    // a golden-section pass around the best grid point localizes the
    // crossing well below the candidate spacing.
    double a = std::max(m_lo, best_omega_m - step);
    double b = std::min(m_hi, best_omega_m + step);
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = probe(c);
    double fd = probe(d);
    for (int it = 0; it < 80 && b - a > 1e-12 * m_hi; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = probe(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = probe(d);
        }
    }

    PhasematchPoint point;
    point.lambda_m = wavelength_from_omega(best_omega_m);
    point.lambda_s = wavelength_from_omega(best_omega_s);
    point.lambda_i =
        wavelength_from_omega(best_omega_m + omega_aux - best_omega_s);
    return point;
}

BandwidthOptimum maximize_purity_over_log_bandwidth(
    const std::function<double(double)>& purity_of, double bandwidth_lo,
    double bandwidth_hi) {
    if (!(bandwidth_lo > 0.0) || !(bandwidth_hi > bandwidth_lo)) {
        throw InvalidModel("bandwidth bracket must be positive and ordered");
    }
    if (bandwidth_hi < 10.0 * bandwidth_lo) {
        throw InvalidModel("bandwidth bracket must span at least a factor of 10");
    }
    const double x_lo = std::log(bandwidth_lo);
    const double x_hi = std::log(bandwidth_hi);

    double best_x = 0.0;
    double best_p = -std::numeric_limits<double>::infinity();
    double p_min = std::numeric_limits<double>::infinity();
    double p_max = -std::numeric_limits<double>::infinity();
    auto eval = [&](double x) {
        const double p = purity_of(std::exp(x));
        p_min = std::min(p_min, p);
        p_max = std::max(p_max, p);
        if (p > best_p) {
            best_p = p;
            best_x = x;
        }
        return p;
    };

    // Coarse log-spaced scan places the maximum away from the bracket edges
    // before the golden section narrows it.
    constexpr int n_scan = 9;
    std::array<double, n_scan> xs{}, ps{};
    int best_j = 0;
    for (int j = 0; j < n_scan; ++j) {
        xs[j] = x_lo + (x_hi - x_lo) * j / (n_scan - 1);
        ps[j] = eval(xs[j]);
        if (ps[j] > ps[best_j]) best_j = j;
    }
    if (p_max - p_min <= 1e-9) {
        BandwidthOptimum out;
        out.bandwidth = std::exp(xs[n_scan / 2]);
        out.purity = ps[n_scan / 2];
        out.flat = true;
        return out;
    }
    if (best_j == 0 || best_j == n_scan - 1) {
        throw BoundaryMaximum(std::string("purity keeps improving toward the ") +
                              (best_j == 0 ? "lower" : "upper") +
                              " edge of the bandwidth bracket");
    }

    double a = xs[best_j - 1];
    double b = xs[best_j + 1];
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    // Interval width in log-bandwidth is relative width in bandwidth.
    while (b - a > 1e-3) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = eval(d);
        }
    }

    BandwidthOptimum out;
    out.bandwidth = std::exp(best_x);
    out.purity = best_p;
    return out;
}

BandwidthOptimum optimize_pump_bandwidth(const PumpSpec& pump,
                                         const ChannelSet& channels,
                                         const PhasematchEnvelope& envelope,
                                         int grid_size, double bandwidth_lo,
                                         double bandwidth_hi,
                                         const ExecPolicy& policy) {
    JsaGridSpec grid;
    grid.n_signal = grid_size;
    grid.n_idler = grid_size;
    auto purity_of = [&](double bandwidth) {
        PumpSpec p = pump;
        p.main_bandwidth = bandwidth;
        const JsaGrid jsa =
            build_jsa(p, channels, envelope, grid, PhiMethod::analytic, policy);
        return schmidt_decompose(jsa).purity;
    };
    return maximize_purity_over_log_bandwidth(purity_of, bandwidth_lo,
                                              bandwidth_hi);
}

DesignInputs reference_design_inputs(const MaterialModel& core,
                                     const MaterialModel& cladding) {
    const ReferenceDesign d = reference_design();
    DesignInputs in;
    in.channels = d.channels;
    in.pump = d.pump;
    in.lambda_m_lo = 1.10;
    in.lambda_m_hi = 1.24;
    in.coupler.width_main = 0.30;
    in.coupler.width_aux = 0.65;
    in.coupler.gap = 0.40;
    in.coupler.height = 0.22;
    in.coupler.core = core;
    in.coupler.clad = cladding;
    in.coupler.top = cladding;
    in.coupler.wavelength = d.pump.aux_wavelength;
    in.coupler.order_main = 0;
    in.coupler.order_aux = 1;
    in.aux_width_lo = 0.55;
    in.aux_width_hi = 0.80;
    in.sweep_steps = 26;
    in.target_lc = 500.0;
    in.gap_lo = 0.30;
    in.gap_hi = 1.20;
    in.n_guides = d.n_guides;
    in.device_length = d.device_length;
    in.excitation_guide = d.excitation_guide;
    in.heralded_guide = d.heralded_guide;
    // The auto grid spans 2 sigma + 4 pi / (|1/v_s - 1/v_i| L) per axis and
    // the main channel must hold twice that, so the top of the bracket is
    // capped where the grid still fits inside the main window.
    in.bandwidth_lo = 0.003;
    in.bandwidth_hi = 0.03;
    return in;
}

DesignReport run_design(const DesignInputs& in) {
    DesignReport rep;
    rep.lambda_a = in.pump.aux_wavelength;
    int step = 1;
    try {
        validate_pump(in.pump);
        if (in.coupler.wavelength != in.pump.aux_wavelength) {
            throw InvalidModel(
                "coupler wavelength must equal the auxiliary pump wavelength");
        }
        rep.gvm_residual = gvm_residual(in.channels);
        {
            std::ostringstream os;
            os << "1 group-velocity residual " << rep.gvm_residual << " fs/um";
            rep.steps.push_back(os.str());
        }

        step = 2;
        const PhasematchPoint pm = find_phasematch_point(
            in.channels, in.pump.aux_wavelength, in.lambda_m_lo, in.lambda_m_hi);
        rep.lambda_s = pm.lambda_s;
        rep.lambda_i = pm.lambda_i;
        rep.lambda_m = pm.lambda_m;
        {
            std::ostringstream os;
            os << "2 phasematch lambda_s " << pm.lambda_s << " lambda_i "
               << pm.lambda_i << " lambda_m " << pm.lambda_m << " um";
            rep.steps.push_back(os.str());
        }

        step = 3;
        const std::vector<SweepPoint> sweep =
            anti_crossing_sweep(in.coupler, in.aux_width_lo, in.aux_width_hi,
                                in.sweep_steps, in.policy, in.slab);
        int best = -1;
        for (std::size_t j = 0; j < sweep.size(); ++j) {
            if (!sweep[j].ok) continue;
            if (best < 0 || sweep[j].splitting < sweep[best].splitting) {
                best = static_cast<int>(j);
            }
        }
        if (best < 0) {
            std::string first_error;
            for (const auto& p : sweep) {
                if (!p.ok) {
                    first_error = p.error;
                    break;
                }
            }
            throw NumericalFailure(
                "anti-crossing sweep produced no valid points: " + first_error);
        }
        if (best == 0 || best + 1 == static_cast<int>(sweep.size())) {
            throw BracketError(
                "splitting minimum sits at the edge of the width sweep window");
        }
        auto split_of = [&](double width) {
            CouplerSpec cs = in.coupler;
            cs.width_aux = width;
            const CouplerResult r = supermodes(cs, in.slab);
            return r.beta_even - r.beta_odd;
        };
        {
            double a = sweep[best - 1].width_aux;
            double b = sweep[best + 1].width_aux;
            if (!sweep[best - 1].ok || !sweep[best + 1].ok) {
                a = b = sweep[best].width_aux;
            }
            double c = b - golden * (b - a);
            double d = a + golden * (b - a);
            double fc = split_of(c);
            double fd = split_of(d);
            while (b - a > 1e-4) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - golden * (b - a);
                    fc = split_of(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + golden * (b - a);
                    fd = split_of(d);
                }
            }
            rep.aux_width = 0.5 * (a + b);
        }
        {
            std::ostringstream os;
            os << "3 anti-crossing auxiliary width " << rep.aux_width << " um";
            rep.steps.push_back(os.str());
        }

        step = 4;
        CouplerSpec solved = in.coupler;
        solved.width_aux = rep.aux_width;
        rep.gap = gap_for_coupling_length(solved, in.target_lc, in.gap_lo,
                                          in.gap_hi, in.slab);
        solved.gap = rep.gap;
        const double coupling = supermodes(solved, in.slab).coupling_C;
        if (!(coupling > 0.0)) {
            throw NumericalFailure("solved coupler has non-positive coupling");
        }
        rep.achieved_lc = pi / coupling;
        {
            std::ostringstream os;
            os << "4 gap " << rep.gap << " um, coupling length "
               << rep.achieved_lc << " um";
            rep.steps.push_back(os.str());
        }

        step = 5;
        if (in.excitation_guide < 0 || in.excitation_guide >= in.n_guides) {
            throw IndexOutOfRange("excitation guide outside the array");
        }
        Eigen::VectorXcd excitation = Eigen::VectorXcd::Zero(in.n_guides);
        excitation[in.excitation_guide] = 1.0;
        const ArraySpec array = make_uniform_array(in.n_guides, coupling,
                                                   in.device_length, excitation);
        const PhasematchEnvelope apodized =
            guide_envelope(array, in.heralded_guide, in.envelope_samples);
        const PhasematchEnvelope uniform =
            constant_envelope(1.0, in.device_length, in.envelope_samples);
        {
            std::ostringstream os;
            os << "5 envelope from guide " << in.heralded_guide << " of "
               << in.n_guides << ", excitation in guide " << in.excitation_guide;
            rep.steps.push_back(os.str());
        }

        step = 6;
        PumpSpec pump = in.pump;
        pump.main_center_wavelength = rep.lambda_m;
        const BandwidthOptimum opt =
            optimize_pump_bandwidth(pump, in.channels, apodized, in.grid_size,
                                    in.bandwidth_lo, in.bandwidth_hi, in.policy);
        rep.optimal_bandwidth = opt.bandwidth;
        rep.apodized_purity = opt.purity;
        rep.bandwidth_flat = opt.flat;
        pump.main_bandwidth = opt.bandwidth;
        JsaGridSpec grid;
        grid.n_signal = in.grid_size;
        grid.n_idler = in.grid_size;
        const JsaGrid baseline = build_jsa(pump, in.channels, uniform, grid,
                                           PhiMethod::analytic, in.policy);
        rep.baseline_purity = schmidt_decompose(baseline).purity;
        {
            std::ostringstream os;
            os << "6 bandwidth " << rep.optimal_bandwidth
               << " rad/fs, apodized purity " << rep.apodized_purity
               << ", baseline purity " << rep.baseline_purity;
            rep.steps.push_back(os.str());
        }
    } catch (const Error& e) {
        rep.failed_step = step;
        rep.failure = e.what();
    }
    return rep;
}

}  // namespace sfwm
