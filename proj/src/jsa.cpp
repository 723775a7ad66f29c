#include "sfwm/jsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sfwm/constants.hpp"
#include "sfwm/errors.hpp"

namespace sfwm {

namespace {

void require_in_window(const DispersionChannel& channel, double omega) {
    if (omega < channel.omega_min || omega > channel.omega_max) {
        std::ostringstream os;
        os << channel_role_name(channel.role) << " frequency " << omega
           << " rad/fs outside window [" << channel.omega_min << ", "
           << channel.omega_max << "]";
        throw OutOfWindow(os.str());
    }
}

// Integral of e^{ixz} over [0, L]. The series keeps the removable
// singularity at x = 0 finite; its truncation error is below (xL)^4/120.
std::complex<double> finite_phase_integral(double x, double length) {
    const double xl = x * length;
    if (std::abs(xl) < 1e-4) {
        return length * std::complex<double>(1.0 - xl * xl / 6.0,
                                             0.5 * xl - xl * xl * xl / 24.0);
    }
    return (std::polar(1.0, xl) - std::complex<double>(1.0, 0.0)) /
           std::complex<double>(0.0, x);
}

void require_window(const DispersionChannel& channel, double lo, double hi) {
    if (lo < channel.omega_min || hi > channel.omega_max) {
        std::ostringstream os;
        os << channel_role_name(channel.role) << " range [" << lo << ", " << hi
           << "] rad/fs leaves the channel window [" << channel.omega_min
           << ", " << channel.omega_max << "]";
        throw OutOfWindow(os.str());
    }
}

// Half-width of the auto grid window; see JsaGridSpec. A vanishing
// signal/idler walk-off leaves no phasematching scale, so the window is
// capped at the far pump tail instead.
double default_half_width(const PumpSpec& pump, const ChannelSet& channels,
                          double length) {
    const double sigma = pump.main_bandwidth;
    const double walk_off = 1.0 / channels.signal.group_velocity -
                            1.0 / channels.idler.group_velocity;
    const double phase_half = walk_off != 0.0
                                  ? 4.0 * pi / (std::abs(walk_off) * length)
                                  : 50.0 * sigma;
    return 2.0 * sigma + phase_half;
}

}  // namespace

void validate_pump(const PumpSpec& pump) {
    if (!(pump.main_center_wavelength > 0.0) || !(pump.aux_wavelength > 0.0) ||
        !(pump.main_bandwidth > 0.0)) {
        throw InvalidModel("pump wavelengths and bandwidth must be positive");
    }
    const double carrier = omega_from_wavelength(pump.main_center_wavelength);
    if (!(pump.main_bandwidth < 0.2 * carrier)) {
        throw InvalidModel(
            "pump bandwidth must stay below 0.2 of the carrier frequency");
    }
}

double pump_amplitude(const PumpSpec& pump, double omega_m) {
    const double nu =
        omega_m - omega_from_wavelength(pump.main_center_wavelength);
    const double sigma = pump.main_bandwidth;
    if (pump.shape == PumpShape::gaussian) {
        return std::exp(-0.5 * (nu / sigma) * (nu / sigma));
    }
    // sech spectral amplitude; pi/sqrt(6) matches the rms width of the
    // Gaussian intensity for the same sigma
    return 1.0 / std::cosh(pi / std::sqrt(6.0) * nu / sigma);
}

const char* channel_role_name(ChannelRole role) {
    switch (role) {
        case ChannelRole::main:
            return "main";
        case ChannelRole::aux:
            return "aux";
        case ChannelRole::signal:
            return "signal";
        case ChannelRole::idler:
            return "idler";
    }
    return "unknown";
}

DispersionChannel make_taylor_channel(ChannelRole role, double omega_ref,
                                      std::vector<double> taylor,
                                      double omega_min, double omega_max) {
    if (taylor.empty()) {
        throw InvalidModel("taylor channel needs at least one coefficient");
    }
    if (!(omega_ref > 0.0)) {
        throw InvalidModel("channel reference frequency must be positive");
    }
    if (!(omega_min < omega_max)) {
        throw InvalidModel("channel window must satisfy omega_min < omega_max");
    }
    if (omega_ref < omega_min || omega_ref > omega_max) {
        throw InvalidModel("channel reference frequency must lie in the window");
    }
    DispersionChannel channel;
    channel.role = role;
    channel.omega_ref = omega_ref;
    channel.taylor = std::move(taylor);
    channel.omega_min = omega_min;
    channel.omega_max = omega_max;
    const double slope = channel_slope(channel, omega_ref);
    channel.group_velocity =
        slope != 0.0 ? 1.0 / slope : std::numeric_limits<double>::infinity();
    return channel;
}

DispersionChannel make_sampled_channel(ChannelRole role, double omega_ref,
                                       std::vector<double> sample_omega,
                                       std::vector<double> sample_beta) {
    if (sample_omega.size() < 2 || sample_omega.size() != sample_beta.size()) {
        throw InvalidModel(
            "sampled channel needs matching omega/beta tables with >= 2 rows");
    }
    for (std::size_t j = 1; j < sample_omega.size(); ++j) {
        if (!(sample_omega[j] > sample_omega[j - 1])) {
            throw InvalidModel("sample frequencies must increase strictly");
        }
    }
    if (omega_ref < sample_omega.front() || omega_ref > sample_omega.back()) {
        throw InvalidModel("channel reference frequency must lie in the table");
    }

    DispersionChannel channel;
    channel.role = role;
    channel.omega_ref = omega_ref;
    channel.omega_min = sample_omega.front();
    channel.omega_max = sample_omega.back();
    channel.sample_omega = std::move(sample_omega);
    channel.sample_beta = std::move(sample_beta);

    const double slope = channel_slope(channel, omega_ref);
    channel.group_velocity =
        slope != 0.0 ? 1.0 / slope : std::numeric_limits<double>::infinity();
    return channel;
}

double channel_beta(const DispersionChannel& channel, double omega) {
    require_in_window(channel, omega);
    if (!channel.taylor.empty()) {
        const double x = omega - channel.omega_ref;
        double beta = 0.0;
        double term = 1.0;  // x^k / k!
        for (std::size_t k = 0; k < channel.taylor.size(); ++k) {
            if (k > 0) term *= x / static_cast<double>(k);
            beta += channel.taylor[k] * term;
        }
        return beta;
    }
    const auto& w = channel.sample_omega;
    const auto& b = channel.sample_beta;
    auto seg = static_cast<std::size_t>(
        std::upper_bound(w.begin(), w.end(), omega) - w.begin());
    seg = std::min(std::max<std::size_t>(seg, 1), w.size() - 1) - 1;
    const double t = (omega - w[seg]) / (w[seg + 1] - w[seg]);
    return b[seg] + t * (b[seg + 1] - b[seg]);
}

double channel_slope(const DispersionChannel& channel, double omega) {
    require_in_window(channel, omega);
    if (!channel.taylor.empty()) {
        const double x = omega - channel.omega_ref;
        double slope = 0.0;
        double term = 1.0;  // x^(k-1) / (k-1)!
        for (std::size_t k = 1; k < channel.taylor.size(); ++k) {
            if (k > 1) term *= x / static_cast<double>(k - 1);
            slope += channel.taylor[k] * term;
        }
        return slope;
    }
    const auto& w = channel.sample_omega;
    const auto& b = channel.sample_beta;
    auto secant = [&](std::size_t j) {
        return (b[j + 1] - b[j]) / (w[j + 1] - w[j]);
    };
    const auto node = std::lower_bound(w.begin(), w.end(), omega);
    if (node != w.end() && *node == omega) {
        const auto k = static_cast<std::size_t>(node - w.begin());
        if (k == 0) return secant(0);
        if (k + 1 == w.size()) return secant(k - 1);
        return 0.5 * (secant(k - 1) + secant(k));
    }
    const auto seg = static_cast<std::size_t>(
        std::upper_bound(w.begin(), w.end(), omega) - w.begin() - 1);
    return secant(std::min(seg, w.size() - 2));
}

ChannelSet make_channel_set(const std::vector<DispersionChannel>& channels) {
    if (channels.size() != 4) {
        throw InvalidModel("channel set needs exactly four channels");
    }
    ChannelSet set;
    bool seen[4] = {false, false, false, false};
    for (const DispersionChannel& channel : channels) {
        const int r = static_cast<int>(channel.role);
        if (seen[r]) {
            throw InvalidModel(std::string("duplicate channel role ") +
                               channel_role_name(channel.role));
        }
        seen[r] = true;
        switch (channel.role) {
            case ChannelRole::main:
                set.main = channel;
                break;
            case ChannelRole::aux:
                set.aux = channel;
                break;
            case ChannelRole::signal:
                set.signal = channel;
                break;
            case ChannelRole::idler:
                set.idler = channel;
                break;
        }
    }
    return set;
}

double phase_mismatch(const ChannelSet& channels, double omega_s,
                      double omega_i, double omega_aux) {
    const double omega_m = omega_s + omega_i - omega_aux;
    const double bm = channel_beta(channels.main, omega_m);
    const double ba = channel_beta(channels.aux, omega_aux);
    const double bs = channel_beta(channels.signal, omega_s);
    const double bi = channel_beta(channels.idler, omega_i);
    return (bm + ba) - (bs + bi);
}

PhasematchEnvelope constant_envelope(double gamma0, double length,
                                     int n_samples) {
    if (!(gamma0 > 0.0)) {
        throw InvalidModel("nonlinearity strength must be positive");
    }
    PhasematchEnvelope env;
    env.length = length;
    env.z_grid = make_z_grid(length, n_samples);
    env.samples.assign(env.z_grid.size(), std::complex<double>(gamma0, 0.0));
    env.terms = {{0.0, {gamma0, 0.0}}};
    return env;
}

PhasematchEnvelope guide_envelope(const ArraySpec& spec, int guide_index,
                                  int n_samples) {
    PhasematchEnvelope env;
    env.length = spec.length;
    env.z_grid = make_z_grid(spec.length, n_samples);
    env.samples = envelope_of_guide(propagate(spec, env.z_grid), guide_index);
    env.terms = envelope_eigen_terms(spec, guide_index);
    return env;
}

std::complex<double> phasematching_amplitude(const PhasematchEnvelope& envelope,
                                             double delta_beta,
                                             PhiMethod method) {
    if (!(envelope.length > 0.0)) {
        throw InvalidModel("envelope length must be positive");
    }
    if (method == PhiMethod::analytic) {
        if (envelope.terms.empty()) {
            throw InvalidModel("envelope carries no eigen expansion");
        }
        std::complex<double> phi(0.0, 0.0);
        for (const EnvelopeTerm& term : envelope.terms) {
            phi += term.amp *
                   finite_phase_integral(term.lambda + delta_beta,
                                         envelope.length);
        }
        return phi;
    }
    if (envelope.samples.size() < 2 ||
        envelope.samples.size() != envelope.z_grid.size()) {
        throw InvalidModel("envelope carries no usable z samples");
    }
    const std::size_t n = envelope.samples.size();
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
        acc += w * envelope.samples[j] *
               std::polar(1.0, delta_beta * envelope.z_grid[j]);
    }
    return acc * (envelope.length / static_cast<double>(n - 1));
}

double axis_step(const Eigen::VectorXd& axis) {
    if (axis.size() < 2) {
        throw DegenerateGrid("axis needs at least two samples");
    }
    const double step = axis[1] - axis[0];
    if (!(step > 0.0)) {
        throw DegenerateGrid("axis must be strictly increasing");
    }
    for (Eigen::Index k = 1; k < axis.size(); ++k) {
        const double d = axis[k] - axis[k - 1];
        if (!(d > 0.0) || std::abs(d - step) > 1e-9 * step) {
            throw DegenerateGrid("axis must be uniform and strictly increasing");
        }
    }
    return step;
}

JsaGrid build_jsa(const PumpSpec& pump, const ChannelSet& channels,
                  const PhasematchEnvelope& envelope, const JsaGridSpec& grid,
                  PhiMethod method, const ExecPolicy& policy) {
    validate_pump(pump);
    if (grid.n_signal < 2 || grid.n_idler < 2) {
        throw InvalidModel("jsa grid needs at least 2x2 samples");
    }
    if (!(envelope.length > 0.0)) {
        throw InvalidModel("envelope length must be positive");
    }

    const double omega_aux = omega_from_wavelength(pump.aux_wavelength);

    double s_lo = grid.signal_lo, s_hi = grid.signal_hi;
    double i_lo = grid.idler_lo, i_hi = grid.idler_hi;
    if (!(s_lo < s_hi) || !(i_lo < i_hi)) {
        const double half = default_half_width(pump, channels, envelope.length);
        if (!(s_lo < s_hi)) {
            s_lo = channels.signal.omega_ref - half;
            s_hi = channels.signal.omega_ref + half;
        }
        if (!(i_lo < i_hi)) {
            i_lo = channels.idler.omega_ref - half;
            i_hi = channels.idler.omega_ref + half;
        }
    }

    // Containment up front so the per-point evaluation cannot throw mid-loop.
    require_window(channels.signal, s_lo, s_hi);
    require_window(channels.idler, i_lo, i_hi);
    require_window(channels.aux, omega_aux, omega_aux);
    require_window(channels.main, s_lo + i_lo - omega_aux,
                   s_hi + i_hi - omega_aux);

    JsaGrid out;
    out.signal_axis = Eigen::VectorXd::LinSpaced(grid.n_signal, s_lo, s_hi);
    out.idler_axis = Eigen::VectorXd::LinSpaced(grid.n_idler, i_lo, i_hi);
    out.amplitude.resize(grid.n_signal, grid.n_idler);

    parallel_for(grid.n_signal, policy, [&](std::int64_t r) {
        const double ws = out.signal_axis[static_cast<Eigen::Index>(r)];
        for (int c = 0; c < grid.n_idler; ++c) {
            const double wi = out.idler_axis[c];
            const double alpha = pump_amplitude(pump, ws + wi - omega_aux);
            const double dbeta = phase_mismatch(channels, ws, wi, omega_aux);
            out.amplitude(static_cast<Eigen::Index>(r), c) =
                alpha * phasematching_amplitude(envelope, dbeta, method);
        }
    });

    const double cell = axis_step(out.signal_axis) * axis_step(out.idler_axis);
    const double total = out.amplitude.squaredNorm() * cell;
    if (!(total > 0.0)) {
        throw NumericalFailure("jsa vanished on the whole grid");
    }
    out.amplitude /= std::sqrt(total);
    out.normalized = true;
    return out;
}

Eigen::MatrixXd intensity(const JsaGrid& jsa) {
    return jsa.amplitude.cwiseAbs2();
}

}  // namespace sfwm
