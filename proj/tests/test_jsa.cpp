#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <sfwm/constants.hpp>
#include <sfwm/design.hpp>
#include <sfwm/errors.hpp>
#include <sfwm/jsa.hpp>

using namespace sfwm;

namespace {

std::complex<double> constant_phi_closed_form(double gamma0, double length,
                                              double dbeta) {
    const double x = 0.5 * dbeta * length;
    const double s = x == 0.0 ? 1.0 : std::sin(x) / x;
    return gamma0 * length * s * std::polar(1.0, x);
}

// Root of tan x = x in (pi, 3 pi / 2); the first sinc^2 sidelobe sits there
// with height 1 / (1 + x^2).
double first_sidelobe_abscissa() {
    double lo = pi + 1e-6;
    double hi = 1.5 * pi - 1e-6;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::tan(mid) - mid < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Intensity along the frequency-matching anti-diagonal r + c = n - 1.
std::vector<double> antidiagonal_cut(const JsaGrid& jsa) {
    const Eigen::Index n = jsa.amplitude.rows();
    REQUIRE(jsa.amplitude.cols() == n);
    std::vector<double> cut(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) {
        cut[static_cast<std::size_t>(r)] = std::norm(jsa.amplitude(r, n - 1 - r));
    }
    return cut;
}

// Largest intensity outside the main lobe, over the peak intensity. The main
// lobe ends at the first local minimum on each side; a profile that decays
// monotonically to the edge has no sidelobe.
double sidelobe_ratio(const std::vector<double>& cut) {
    const std::size_t n = cut.size();
    std::size_t peak = 0;
    for (std::size_t j = 1; j < n; ++j) {
        if (cut[j] > cut[peak]) peak = j;
    }
    double side = 0.0;
    std::size_t j = peak;
    while (j + 1 < n && cut[j + 1] < cut[j]) ++j;
    for (std::size_t k = j + 1; k < n; ++k) side = std::max(side, cut[k]);
    j = peak;
    while (j > 0 && cut[j - 1] < cut[j]) --j;
    for (std::size_t k = j; k-- > 0;) side = std::max(side, cut[k]);
    return side / cut[peak];
}

// Direction of least spread of an intensity pattern, from the eigenvector of
// the smallest eigenvalue of its second-moment matrix. Radians in [0, pi).
double minor_axis_angle(const Eigen::MatrixXd& density,
                        const Eigen::VectorXd& signal_axis,
                        const Eigen::VectorXd& idler_axis) {
    double total = 0.0, ms = 0.0, mi = 0.0;
    for (Eigen::Index r = 0; r < density.rows(); ++r) {
        for (Eigen::Index c = 0; c < density.cols(); ++c) {
            total += density(r, c);
            ms += density(r, c) * signal_axis[r];
            mi += density(r, c) * idler_axis[c];
        }
    }
    ms /= total;
    mi /= total;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (Eigen::Index r = 0; r < density.rows(); ++r) {
        for (Eigen::Index c = 0; c < density.cols(); ++c) {
            const double ds = signal_axis[r] - ms;
            const double di = idler_axis[c] - mi;
            cov(0, 0) += density(r, c) * ds * ds;
            cov(0, 1) += density(r, c) * ds * di;
            cov(1, 1) += density(r, c) * di * di;
        }
    }
    cov(1, 0) = cov(0, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const Eigen::Vector2d v = es.eigenvectors().col(0);  // smallest first
    double angle = std::atan2(v[1], v[0]);
    if (angle < 0.0) angle += pi;
    if (angle >= pi) angle -= pi;
    return angle;
}

DispersionChannel quadratic_channel(ChannelRole role, double omega_ref,
                                    double b0, double b1, double b2) {
    return make_taylor_channel(role, omega_ref, {b0, b1, b2}, 0.3, 4.0);
}

}  // namespace

TEST_CASE("constant envelope matches the closed sinc form") {
    const double gamma0 = 0.7;
    const double length = 400.0;
    const PhasematchEnvelope env = constant_envelope(gamma0, length, 65537);

    const double unit = pi / length;
    const std::vector<double> dbetas = {0.0,    0.31 * unit, -0.5 * unit,
                                        unit,   -2.0 * unit, 2.34 * unit,
                                        -3.7 * unit, 10.0 * unit, -10.0 * unit};
    for (double db : dbetas) {
        CAPTURE(db);
        const std::complex<double> closed =
            constant_phi_closed_form(gamma0, length, db);
        const std::complex<double> analytic =
            phasematching_amplitude(env, db, PhiMethod::analytic);
        const std::complex<double> quad =
            phasematching_amplitude(env, db, PhiMethod::quadrature);
        CHECK(std::abs(analytic - closed) <= 1e-12 * gamma0 * length);
        CHECK(std::abs(quad - closed) <= 1e-6 * gamma0 * length);
    }
}

TEST_CASE("zero mismatch integrates the envelope exactly") {
    const PhasematchEnvelope env = constant_envelope(0.7, 400.0, 129);
    const std::complex<double> phi =
        phasematching_amplitude(env, 0.0, PhiMethod::analytic);
    CHECK(phi.real() == 0.7 * 400.0);
    CHECK(phi.imag() == 0.0);
}

TEST_CASE("analytic and quadrature integrals agree for an array envelope") {
    const ReferenceDesign d = reference_design();
    const ArraySpec spec = reference_array(d);
    const PhasematchEnvelope env =
        guide_envelope(spec, d.heralded_guide, 65537);

    const double unit = pi / d.device_length;
    const int n_sweep = 401;
    std::vector<std::complex<double>> analytic(n_sweep);
    std::vector<std::complex<double>> quad(n_sweep);
    double scale = 0.0;
    for (int j = 0; j < n_sweep; ++j) {
        const double db = (-10.0 + 20.0 * j / (n_sweep - 1)) * unit;
        analytic[j] = phasematching_amplitude(env, db, PhiMethod::analytic);
        quad[j] = phasematching_amplitude(env, db, PhiMethod::quadrature);
        scale = std::max(scale, std::abs(analytic[j]));
    }
    REQUIRE(scale > 0.0);
    double worst = 0.0;
    for (int j = 0; j < n_sweep; ++j) {
        worst = std::max(worst, std::abs(analytic[j] - quad[j]));
    }
    CHECK(worst <= 1e-6 * scale);
}

TEST_CASE("guide envelope carries consistent term and sample forms") {
    const ReferenceDesign d = reference_design();
    const ArraySpec spec = reference_array(d);
    const PhasematchEnvelope env = guide_envelope(spec, d.heralded_guide, 513);

    REQUIRE(env.terms.size() == static_cast<std::size_t>(d.n_guides));
    REQUIRE(env.samples.size() == env.z_grid.size());
    for (std::size_t j : {std::size_t{0}, std::size_t{171}, std::size_t{256},
                          std::size_t{512}}) {
        std::complex<double> rebuilt(0.0, 0.0);
        for (const EnvelopeTerm& t : env.terms) {
            rebuilt += t.amp * std::polar(1.0, t.lambda * env.z_grid[j]);
        }
        CHECK(std::abs(rebuilt - env.samples[j]) <= 1e-12);
    }
    // Unit excitation sits in a different guide, so the heralded amplitude
    // starts at zero.
    CHECK(std::abs(env.samples[0]) == 0.0);
}

TEST_CASE("phase mismatch vanishes at the design point") {
    const ReferenceDesign d = reference_design();
    const double wa0 = omega_from_wavelength(d.pump.aux_wavelength);

    CHECK(std::abs(phase_mismatch(d.channels, d.channels.signal.omega_ref,
                                  d.channels.idler.omega_ref, wa0)) < 1e-10);

    // Quadratic curvature leaves ~3e-4 rad/um at the nominal wavelengths,
    // two orders below the 4 pi / L phasematching bandwidth.
    const double dbeta_nominal =
        phase_mismatch(d.channels, omega_from_wavelength(1.54),
                       omega_from_wavelength(1.08), wa0);
    CHECK(std::abs(dbeta_nominal) < 1e-3);

    CHECK(std::abs(gvm_residual(d.channels)) < 1e-12);
}

TEST_CASE("identical constant channels cancel exactly") {
    const double b0 = 5.1;
    std::vector<DispersionChannel> chans;
    for (ChannelRole role : {ChannelRole::main, ChannelRole::aux,
                             ChannelRole::signal, ChannelRole::idler}) {
        chans.push_back(make_taylor_channel(role, 1.1, {b0}, 0.5, 3.5));
    }
    const ChannelSet set = make_channel_set(chans);
    CHECK(phase_mismatch(set, 1.0, 1.2, 1.1) == 0.0);
    CHECK(phase_mismatch(set, 0.8, 1.7, 0.9) == 0.0);
    CHECK(phase_mismatch(set, 1.3, 1.3, 1.55) == 0.0);
}

TEST_CASE("signal idler exchange is symmetric") {
    const DispersionChannel main =
        quadratic_channel(ChannelRole::main, 1.61, 7.7, 14.51, 2.0);
    const DispersionChannel aux =
        quadratic_channel(ChannelRole::aux, 1.37, 9.6, 14.51, 0.3);
    const ChannelSet ab = make_channel_set(
        {main, aux, quadratic_channel(ChannelRole::signal, 1.23, 7.4, 14.0, -1.0),
         quadratic_channel(ChannelRole::idler, 1.75, 13.7, 15.0, 1.0)});
    const ChannelSet ba = make_channel_set(
        {main, aux, quadratic_channel(ChannelRole::signal, 1.75, 13.7, 15.0, 1.0),
         quadratic_channel(ChannelRole::idler, 1.23, 7.4, 14.0, -1.0)});

    for (const auto& [ws, wi, wa] :
         std::vector<std::array<double, 3>>{{1.20, 1.78, 1.36},
                                            {1.26, 1.71, 1.39},
                                            {1.23, 1.75, 1.37}}) {
        CHECK(phase_mismatch(ab, ws, wi, wa) == phase_mismatch(ba, wi, ws, wa));
    }
}

TEST_CASE("evaluations outside a channel window are rejected") {
    const ReferenceDesign d = reference_design();
    CHECK_THROWS_AS(channel_beta(d.channels.signal, 0.9), OutOfWindow);
    CHECK_THROWS_AS(channel_beta(d.channels.signal, 1.5), OutOfWindow);

    // omega_m = omega_s + omega_i - omega_aux pushed below the main window.
    const double wa0 = omega_from_wavelength(d.pump.aux_wavelength);
    try {
        phase_mismatch(d.channels, d.channels.signal.omega_ref - 0.10,
                       d.channels.idler.omega_ref - 0.12, wa0);
        FAIL("expected OutOfWindow");
    } catch (const OutOfWindow& e) {
        CHECK(std::string(e.what()).find("main") != std::string::npos);
    }
}

TEST_CASE("sampled channels interpolate and report group velocity") {
    std::vector<double> ws, linear, quad;
    for (int j = 0; j <= 12; ++j) {
        const double w = 0.9 + 0.05 * j;
        ws.push_back(w);
        linear.push_back(3.0 + 2.0 * (w - 1.0));
        quad.push_back(1.0 + 3.0 * (w - 1.0) + 4.0 * (w - 1.0) * (w - 1.0));
    }

    const DispersionChannel lin =
        make_sampled_channel(ChannelRole::signal, ws[6], ws, linear);
    CHECK(lin.group_velocity == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(channel_beta(lin, 1.123) ==
          doctest::Approx(3.0 + 2.0 * 0.123).epsilon(1e-12));
    CHECK(channel_beta(lin, 0.9) == doctest::Approx(2.8).epsilon(1e-12));
    CHECK(channel_beta(lin, 1.5) == doctest::Approx(4.0).epsilon(1e-12));

    // Averaged adjacent secants are exact for quadratic dispersion at an
    // interior node: slope at the node w6 is 3 + 8 (w6 - 1) = 4.6.
    const double w6 = ws[6];
    const DispersionChannel qch =
        make_sampled_channel(ChannelRole::idler, w6, ws, quad);
    CHECK(1.0 / qch.group_velocity ==
          doctest::Approx(3.0 + 8.0 * (w6 - 1.0)).epsilon(1e-12));

    // Independent check of the stored slope against a central difference of
    // the interpolant itself, one node spacing wide.
    const double fd =
        (channel_beta(qch, ws[7]) - channel_beta(qch, ws[5])) / (ws[7] - ws[5]);
    CHECK(1.0 / qch.group_velocity == doctest::Approx(fd).epsilon(1e-6));

    CHECK_THROWS_AS(channel_beta(qch, 0.89), OutOfWindow);
    CHECK_THROWS_AS(channel_beta(qch, 1.51), OutOfWindow);

    CHECK_THROWS_AS(make_sampled_channel(ChannelRole::signal, 1.2,
                                         {1.0, 1.0, 1.2}, {1.0, 2.0, 3.0}),
                    InvalidModel);
    CHECK_THROWS_AS(
        make_sampled_channel(ChannelRole::signal, 1.2, {1.0, 1.3}, {1.0}),
        InvalidModel);
    CHECK_THROWS_AS(make_sampled_channel(ChannelRole::signal, 2.0, ws, linear),
                    InvalidModel);
}

TEST_CASE("pump validation and spectral shapes") {
    PumpSpec pump;
    pump.main_center_wavelength = 1.17;
    pump.main_bandwidth = 0.0224;
    pump.aux_wavelength = 1.37;
    CHECK_NOTHROW(validate_pump(pump));

    PumpSpec bad = pump;
    bad.main_bandwidth = -0.01;
    CHECK_THROWS_AS(validate_pump(bad), InvalidModel);
    // Carrier is ~1.61 rad/fs, so 0.33 rad/fs crosses the 0.2 ratio limit.
    bad.main_bandwidth = 0.33;
    CHECK_THROWS_AS(validate_pump(bad), InvalidModel);
    bad.main_bandwidth = 0.30;
    CHECK_NOTHROW(validate_pump(bad));
    bad = pump;
    bad.aux_wavelength = 0.0;
    CHECK_THROWS_AS(validate_pump(bad), InvalidModel);

    const double w0 = omega_from_wavelength(pump.main_center_wavelength);
    CHECK(pump_amplitude(pump, w0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pump_amplitude(pump, w0 + pump.main_bandwidth) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

    // The sech shape is scaled so both spectral intensities carry the same
    // rms width (sigma / sqrt(2) for the Gaussian).
    PumpSpec sech = pump;
    sech.shape = PumpShape::sech2;
    const double sigma = pump.main_bandwidth;
    for (const PumpSpec& p : {pump, sech}) {
        double total = 0.0, second = 0.0;
        const int n = 80001;
        for (int j = 0; j < n; ++j) {
            const double nu = -40.0 * sigma + 80.0 * sigma * j / (n - 1);
            const double a = pump_amplitude(p, w0 + nu);
            const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            total += w * a * a;
            second += w * a * a * nu * nu;
        }
        CHECK(std::sqrt(second / total) ==
              doctest::Approx(sigma / std::sqrt(2.0)).epsilon(1e-6));
    }
}

TEST_CASE("auto grid window follows the documented rule") {
    const ReferenceDesign d = reference_design();
    const PhasematchEnvelope env = constant_envelope(1.0, d.device_length, 65);
    const JsaGrid jsa = build_jsa(d.pump, d.channels, env, JsaGridSpec{});

    const double sigma = d.pump.main_bandwidth;
    const double walk_off = 1.0 / d.channels.signal.group_velocity -
                            1.0 / d.channels.idler.group_velocity;
    const double half =
        2.0 * sigma + 4.0 * pi / (std::abs(walk_off) * d.device_length);

    REQUIRE(jsa.signal_axis.size() == 256);
    REQUIRE(jsa.idler_axis.size() == 256);
    CHECK(jsa.signal_axis[0] ==
          doctest::Approx(d.channels.signal.omega_ref - half).epsilon(1e-12));
    CHECK(jsa.signal_axis[255] ==
          doctest::Approx(d.channels.signal.omega_ref + half).epsilon(1e-12));
    CHECK(jsa.idler_axis[0] ==
          doctest::Approx(d.channels.idler.omega_ref - half).epsilon(1e-12));

    JsaGridSpec explicit_spec;
    explicit_spec.n_signal = 32;
    explicit_spec.n_idler = 48;
    explicit_spec.signal_lo = d.channels.signal.omega_ref - 0.01;
    explicit_spec.signal_hi = d.channels.signal.omega_ref + 0.02;
    explicit_spec.idler_lo = d.channels.idler.omega_ref - 0.015;
    explicit_spec.idler_hi = d.channels.idler.omega_ref + 0.015;
    const JsaGrid jsa2 = build_jsa(d.pump, d.channels, env, explicit_spec);
    CHECK(jsa2.signal_axis.size() == 32);
    CHECK(jsa2.idler_axis.size() == 48);
    CHECK(jsa2.signal_axis[0] ==
          doctest::Approx(explicit_spec.signal_lo).epsilon(1e-12));
    CHECK(jsa2.signal_axis[31] ==
          doctest::Approx(explicit_spec.signal_hi).epsilon(1e-12));
}

TEST_CASE("built jsa is L2 normalized on its grid") {
    const ReferenceDesign d = reference_design();
    const ArraySpec spec = reference_array(d);
    const PhasematchEnvelope env = guide_envelope(spec, d.heralded_guide, 257);
    const JsaGrid jsa = build_jsa(d.pump, d.channels, env, JsaGridSpec{});

    REQUIRE(jsa.normalized);
    const double cell = axis_step(jsa.signal_axis) * axis_step(jsa.idler_axis);
    double total = 0.0;
    for (Eigen::Index r = 0; r < jsa.amplitude.rows(); ++r) {
        for (Eigen::Index c = 0; c < jsa.amplitude.cols(); ++c) {
            total += std::norm(jsa.amplitude(r, c));
        }
    }
    CHECK(std::abs(total * cell - 1.0) <= 1e-12);
    CHECK(intensity(jsa).maxCoeff() > 0.0);
}

TEST_CASE("constant envelope shows the first sinc sidelobes") {
    const ReferenceDesign d = reference_design();
    const PhasematchEnvelope env = constant_envelope(1.0, d.device_length, 65);
    const JsaGrid jsa = build_jsa(d.pump, d.channels, env, JsaGridSpec{});

    // Quadratic curvatures cancel along the anti-diagonal and the pump factor
    // is 1 there, so the cut is the bare phasematching profile.
    const double measured = sidelobe_ratio(antidiagonal_cut(jsa));
    const double x = first_sidelobe_abscissa();
    const double expected = 1.0 / (1.0 + x * x);
    CHECK(std::abs(measured - expected) < 0.004);
}

TEST_CASE("guided envelope suppresses the sidelobes tenfold") {
    const ReferenceDesign d = reference_design();
    const JsaGrid flat = build_jsa(
        d.pump, d.channels, constant_envelope(1.0, d.device_length, 65),
        JsaGridSpec{});
    const JsaGrid apodized = build_jsa(
        d.pump, d.channels,
        guide_envelope(reference_array(d), d.heralded_guide, 257),
        JsaGridSpec{});

    const double flat_ratio = sidelobe_ratio(antidiagonal_cut(flat));
    const double apod_ratio = sidelobe_ratio(antidiagonal_cut(apodized));
    REQUIRE(flat_ratio > 0.03);
    CHECK(apod_ratio <= flat_ratio / 10.0);
}

TEST_CASE("pump and phasematching axes are orthogonal under matched group "
          "velocities") {
    const ReferenceDesign d = reference_design();
    const PhasematchEnvelope env = constant_envelope(1.0, d.device_length, 65);
    const JsaGrid jsa = build_jsa(d.pump, d.channels, env, JsaGridSpec{});

    const double omega_aux = omega_from_wavelength(d.pump.aux_wavelength);
    const Eigen::Index ns = jsa.signal_axis.size();
    const Eigen::Index ni = jsa.idler_axis.size();
    Eigen::MatrixXd pump_int(ns, ni);
    Eigen::MatrixXd phi_int(ns, ni);
    for (Eigen::Index r = 0; r < ns; ++r) {
        for (Eigen::Index c = 0; c < ni; ++c) {
            const double ws = jsa.signal_axis[r];
            const double wi = jsa.idler_axis[c];
            const double a = pump_amplitude(d.pump, ws + wi - omega_aux);
            pump_int(r, c) = a * a;
            const double db = phase_mismatch(d.channels, ws, wi, omega_aux);
            phi_int(r, c) = std::norm(
                phasematching_amplitude(env, db, PhiMethod::analytic));
        }
    }
    const double a1 = minor_axis_angle(pump_int, jsa.signal_axis, jsa.idler_axis);
    const double a2 = minor_axis_angle(phi_int, jsa.signal_axis, jsa.idler_axis);
    double diff = std::abs(a1 - a2) * 180.0 / pi;
    if (diff > 90.0) diff = 180.0 - diff;
    CHECK(std::abs(diff - 90.0) <= 2.0);
}

TEST_CASE("tiny pump bandwidth collapses the jsa onto the frequency matching "
          "line") {
    ReferenceDesign d = reference_design();
    d.pump.main_bandwidth = 1e-5;
    const PhasematchEnvelope env = constant_envelope(1.0, d.device_length, 65);
    const JsaGrid jsa = build_jsa(d.pump, d.channels, env, JsaGridSpec{});

    const Eigen::Index n = jsa.amplitude.rows();
    REQUIRE(jsa.amplitude.cols() == n);
    double on_line = 0.0, total = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const double v = std::norm(jsa.amplitude(r, c));
            total += v;
            if (std::abs(static_cast<double>(r + c) -
                         static_cast<double>(n - 1)) <= 1.0) {
                on_line += v;
            }
        }
    }
    CHECK(on_line / total >= 1.0 - 1e-12);
}

TEST_CASE("grid windows must sit inside the channel windows") {
    const ReferenceDesign d = reference_design();
    const PhasematchEnvelope env = constant_envelope(1.0, d.device_length, 65);

    JsaGridSpec wide;
    wide.signal_lo = d.channels.signal.omega_ref - 0.01;
    wide.signal_hi = d.channels.signal.omega_ref + 0.12;
    wide.idler_lo = d.channels.idler.omega_ref - 0.01;
    wide.idler_hi = d.channels.idler.omega_ref + 0.01;
    CHECK_THROWS_AS(build_jsa(d.pump, d.channels, env, wide), OutOfWindow);

    // Each axis fits its own channel but the summed range leaves the main
    // window.
    JsaGridSpec sum;
    sum.signal_lo = d.channels.signal.omega_ref - 0.10;
    sum.signal_hi = d.channels.signal.omega_ref + 0.10;
    sum.idler_lo = d.channels.idler.omega_ref - 0.09;
    sum.idler_hi = d.channels.idler.omega_ref + 0.09;
    try {
        build_jsa(d.pump, d.channels, env, sum);
        FAIL("expected OutOfWindow");
    } catch (const OutOfWindow& e) {
        CHECK(std::string(e.what()).find("main") != std::string::npos);
    }

    PumpSpec shifted = d.pump;
    shifted.aux_wavelength = 1.52;
    try {
        build_jsa(shifted, d.channels, env, JsaGridSpec{});
        FAIL("expected OutOfWindow");
    } catch (const OutOfWindow& e) {
        CHECK(std::string(e.what()).find("aux") != std::string::npos);
    }
}

TEST_CASE("parallel and serial grid builds are identical") {
    const ReferenceDesign d = reference_design();
    const PhasematchEnvelope env =
        guide_envelope(reference_array(d), d.heralded_guide, 129);
    JsaGridSpec grid;
    grid.n_signal = 64;
    grid.n_idler = 64;

    ExecPolicy serial;
    ExecPolicy par;
    par.backend = Backend::openmp;
    const JsaGrid a =
        build_jsa(d.pump, d.channels, env, grid, PhiMethod::analytic, serial);
    const JsaGrid b =
        build_jsa(d.pump, d.channels, env, grid, PhiMethod::analytic, par);
    CHECK((a.amplitude - b.amplitude).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadrature assembly matches the analytic grid") {
    const ReferenceDesign d = reference_design();
    const PhasematchEnvelope env =
        guide_envelope(reference_array(d), d.heralded_guide, 8193);
    JsaGridSpec grid;
    grid.n_signal = 32;
    grid.n_idler = 32;

    const JsaGrid a =
        build_jsa(d.pump, d.channels, env, grid, PhiMethod::analytic);
    const JsaGrid q =
        build_jsa(d.pump, d.channels, env, grid, PhiMethod::quadrature);
    const double scale = a.amplitude.cwiseAbs().maxCoeff();
    CHECK((a.amplitude - q.amplitude).cwiseAbs().maxCoeff() <= 1e-4 * scale);
}

TEST_CASE("grid construction rejects degenerate input") {
    const ReferenceDesign d = reference_design();
    const PhasematchEnvelope env = constant_envelope(1.0, d.device_length, 65);

    JsaGridSpec tiny;
    tiny.n_signal = 1;
    CHECK_THROWS_AS(build_jsa(d.pump, d.channels, env, tiny), InvalidModel);

    CHECK_THROWS_AS(axis_step(Eigen::VectorXd::Constant(5, 1.0)),
                    DegenerateGrid);
    Eigen::VectorXd ragged(4);
    ragged << 0.0, 1.0, 2.0, 3.5;
    CHECK_THROWS_AS(axis_step(ragged), DegenerateGrid);
    CHECK(axis_step(Eigen::VectorXd::LinSpaced(64, 1.0, 2.0)) ==
          doctest::Approx(1.0 / 63.0).epsilon(1e-12));

    // A window far off the frequency-matching line underflows the pump factor
    // everywhere; the build must refuse to normalize a zero grid.
    ReferenceDesign narrow = d;
    narrow.pump.main_bandwidth = 1e-5;
    JsaGridSpec off;
    off.signal_lo = d.channels.signal.omega_ref + 0.001;
    off.signal_hi = d.channels.signal.omega_ref + 0.002;
    off.idler_lo = d.channels.idler.omega_ref + 0.001;
    off.idler_hi = d.channels.idler.omega_ref + 0.002;
    CHECK_THROWS_AS(build_jsa(narrow.pump, narrow.channels, env, off),
                    NumericalFailure);
}
