#include <complex>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfwm/cli_io.hpp"
#include "sfwm/constants.hpp"
#include "sfwm/design.hpp"
#include "sfwm/errors.hpp"
#include "sfwm/schmidt.hpp"

namespace {

std::filesystem::path ensure_out_dir(const sfwm::RunConfig& config) {
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

sfwm::CouplerSpec coupler_from(const sfwm::RunConfig& config) {
    const std::map<std::string, sfwm::MaterialModel> materials =
        sfwm::load_materials(config.materials_path);
    auto pick = [&](const std::string& name) {
        const auto it = materials.find(name);
        if (it == materials.end()) {
            throw sfwm::InvalidModel("material '" + name + "' not found in " +
                                     config.materials_path);
        }
        return it->second;
    };
    sfwm::CouplerSpec spec;
    spec.width_main = config.width_main;
    spec.width_aux = config.width_aux;
    spec.gap = config.gap;
    spec.height = config.height;
    spec.core = pick(config.core_material);
    spec.clad = pick(config.clad_material);
    spec.top = pick(config.top_material);
    spec.wavelength = config.aux_wavelength;
    return spec;
}

struct ModeRow {
    std::string guide;
    double width = 0.0;
    int order = 0;
    double n_eff = 0.0;
    double beta = 0.0;
};

// Horizontal mode ladder of one guide until cutoff, at most max_orders rows.
void collect_modes(const sfwm::CouplerSpec& spec, const std::string& label,
                   double width, int max_orders, std::vector<ModeRow>& rows) {
    for (int order = 0; order < max_orders; ++order) {
        try {
            const sfwm::GuidedMode mode = sfwm::effective_index_waveguide(
                spec.height, width, spec.core, spec.clad, spec.top,
                spec.wavelength, spec.vertical_order, order,
                spec.polarization);
            rows.push_back(
                {label, width, order, mode.effective_index, mode.beta});
        } catch (const sfwm::ModeCutoff&) {
            break;
        }
    }
}

// The mode table is aligned text unless --format csv is given explicitly;
// the config [output] format only steers file outputs.
int run_modes(const sfwm::RunConfig& config, bool csv) {
    const sfwm::CouplerSpec spec = coupler_from(config);
    std::vector<ModeRow> rows;
    collect_modes(spec, "main", spec.width_main, 8, rows);
    collect_modes(spec, "aux", spec.width_aux, 8, rows);
    if (csv) {
        std::cout << "guide,width_um,order,n_eff,beta_rad_um\n";
        for (const ModeRow& r : rows) {
            std::cout << r.guide << ',' << sfwm::format_double(r.width) << ','
                      << r.order << ',' << sfwm::format_double(r.n_eff) << ','
                      << sfwm::format_double(r.beta) << "\n";
        }
        return 0;
    }
    std::cout << std::left << std::setw(7) << "guide" << std::setw(10)
              << "width_um" << std::setw(7) << "order" << std::setw(12)
              << "n_eff" << "beta_rad_um\n";
    std::cout << std::fixed;
    for (const ModeRow& r : rows) {
        std::cout << std::setw(7) << r.guide << std::setw(10)
                  << std::setprecision(4) << r.width << std::setw(7) << r.order
                  << std::setw(12) << std::setprecision(6) << r.n_eff
                  << std::setprecision(6) << r.beta << "\n";
    }
    return 0;
}

int run_coupler_sweep(const sfwm::RunConfig& config) {
    const sfwm::CouplerSpec spec = coupler_from(config);
    const std::vector<sfwm::SweepPoint> points = sfwm::anti_crossing_sweep(
        spec, config.aux_width_lo, config.aux_width_hi, config.sweep_steps,
        sfwm::policy_from(config));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double to_index = spec.wavelength / (2.0 * sfwm::pi);
    std::vector<std::vector<double>> rows;
    for (const sfwm::SweepPoint& p : points) {
        if (p.ok) {
            rows.push_back({p.width_aux, p.beta_even * to_index,
                            p.beta_odd * to_index, p.splitting});
        } else {
            rows.push_back({p.width_aux, nan, nan, nan});
        }
    }
    const std::filesystem::path out =
        ensure_out_dir(config) / "coupler_sweep.csv";
    sfwm::write_table_csv(
        out.string(), {"width_aux", "n_eff_even", "n_eff_odd", "splitting"},
        rows);
    std::cout << "wrote " << out.string() << " (" << rows.size()
              << " points)\n";
    return 0;
}

int run_gap_solve(const sfwm::RunConfig& config) {
    sfwm::CouplerSpec spec = coupler_from(config);
    const double gap = sfwm::gap_for_coupling_length(
        spec, config.target_lc, config.gap_lo, config.gap_hi);
    spec.gap = gap;
    const sfwm::CouplerResult pair = sfwm::supermodes(spec);
    std::cout << "gap_um = " << sfwm::format_double(gap) << "\n";
    std::cout << "achieved_lc_um = "
              << sfwm::format_double(sfwm::pi / pair.coupling_C) << "\n";
    return 0;
}

int run_diffraction(const sfwm::RunConfig& config) {
    const sfwm::ArraySpec spec = sfwm::array_from(config);
    const std::vector<double> z =
        sfwm::make_z_grid(config.device_length, config.z_samples);
    const sfwm::AmplitudeEnvelope env =
        sfwm::propagate(spec, z, sfwm::policy_from(config));
    std::vector<std::string> columns = {"z_um"};
    for (int g = 0; g < spec.n_guides; ++g) {
        columns.push_back("power_" + std::to_string(g));
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < env.z_grid.size(); ++k) {
        std::vector<double> row = {env.z_grid[k]};
        for (int g = 0; g < spec.n_guides; ++g) {
            row.push_back(std::norm(
                env.amplitudes(g, static_cast<Eigen::Index>(k))));
        }
        rows.push_back(std::move(row));
    }
    const std::filesystem::path out =
        ensure_out_dir(config) / "diffraction.csv";
    sfwm::write_table_csv(out.string(), columns, rows);
    std::cout << "wrote " << out.string() << " (" << rows.size()
              << " z samples, " << spec.n_guides << " guides)\n";
    return 0;
}

sfwm::JsaGrid build_grid(const sfwm::RunConfig& config,
                         const std::string& envelope_kind,
                         sfwm::PhiMethod method) {
    const sfwm::ChannelSet channels = sfwm::reference_design().channels;
    const sfwm::PumpSpec pump = sfwm::pump_from(config);
    sfwm::PhasematchEnvelope envelope;
    if (envelope_kind == "constant") {
        envelope = sfwm::constant_envelope(sfwm::pi / config.target_lc,
                                           config.device_length,
                                           config.z_samples);
    } else {
        envelope = sfwm::guide_envelope(sfwm::array_from(config),
                                        config.heralded_guide,
                                        config.z_samples);
    }
    sfwm::JsaGridSpec grid;
    grid.n_signal = config.n_signal;
    grid.n_idler = config.n_idler;
    return sfwm::build_jsa(pump, channels, envelope, grid, method,
                           sfwm::policy_from(config));
}

int run_jsa(const sfwm::RunConfig& config, const std::string& envelope_kind,
            const std::string& method_name) {
    const sfwm::PhiMethod method = method_name == "quadrature"
                                       ? sfwm::PhiMethod::quadrature
                                       : sfwm::PhiMethod::analytic;
    const sfwm::JsaGrid grid = build_grid(config, envelope_kind, method);
    const std::filesystem::path dir = ensure_out_dir(config);
    if (config.format == "json") {
        const std::filesystem::path out = dir / "jsa.json";
        sfwm::write_grid_json(grid, out.string());
        std::cout << "wrote " << out.string() << "\n";
    } else {
        const std::filesystem::path out = dir / "jsa.csv";
        sfwm::write_grid_csv(grid, out.string());
        std::cout << "wrote " << out.string() << "\n";
    }
    return 0;
}

int run_purity(const sfwm::RunConfig& config, const std::string& envelope_kind,
               int requested_modes) {
    const sfwm::JsaGrid grid =
        build_grid(config, envelope_kind, sfwm::PhiMethod::analytic);
    sfwm::SchmidtOptions options;
    options.max_modes = std::max(8, requested_modes);
    const sfwm::SchmidtResult schmidt = sfwm::schmidt_decompose(grid, options);
    std::cout << "purity = " << sfwm::format_double(schmidt.purity) << "\n";
    std::cout << "schmidt_number = "
              << sfwm::format_double(schmidt.schmidt_number) << "\n";
    const std::size_t shown =
        std::min<std::size_t>(8, schmidt.coefficients.size());
    for (std::size_t k = 0; k < shown; ++k) {
        std::cout << "q_" << k << " = "
                  << sfwm::format_double(schmidt.coefficients[k]) << "\n";
    }
    if (requested_modes > 0) {
        const int n_modes = std::min<int>(
            requested_modes, static_cast<int>(schmidt.signal_modes.cols()));
        const std::filesystem::path dir = ensure_out_dir(config);
        auto write_modes = [&](const Eigen::MatrixXcd& modes,
                               const Eigen::VectorXd& axis,
                               const std::string& name) {
            std::vector<std::string> columns = {"omega"};
            for (int m = 0; m < n_modes; ++m) {
                columns.push_back("re_" + std::to_string(m));
                columns.push_back("im_" + std::to_string(m));
            }
            std::vector<std::vector<double>> rows;
            for (Eigen::Index j = 0; j < axis.size(); ++j) {
                std::vector<double> row = {axis[j]};
                for (int m = 0; m < n_modes; ++m) {
                    row.push_back(modes(j, m).real());
                    row.push_back(modes(j, m).imag());
                }
                rows.push_back(std::move(row));
            }
            const std::filesystem::path out = dir / name;
            sfwm::write_table_csv(out.string(), columns, rows);
            std::cout << "wrote " << out.string() << "\n";
        };
        write_modes(schmidt.signal_modes, grid.signal_axis,
                    "schmidt_signal_modes.csv");
        write_modes(schmidt.idler_modes, grid.idler_axis,
                    "schmidt_idler_modes.csv");
    }
    return 0;
}

int run_design_cmd(const sfwm::RunConfig& config) {
    const sfwm::DesignInputs inputs = sfwm::design_inputs_from(config);
    const sfwm::DesignReport report = sfwm::run_design(inputs);
    const std::filesystem::path out =
        ensure_out_dir(config) / "design_report.json";
    sfwm::write_report_json(report, out.string());
    for (const std::string& step : report.steps) {
        std::cout << "step " << step << "\n";
    }
    if (report.failed_step >= 0) {
        std::cout << "failed at step " << report.failed_step << ": "
                  << report.failure << "\n";
        std::cout << "wrote " << out.string() << "\n";
        return 3;
    }
    std::cout << "signal " << sfwm::format_double(report.lambda_s)
              << " um, idler " << sfwm::format_double(report.lambda_i)
              << " um, main pump " << sfwm::format_double(report.lambda_m)
              << " um\n";
    std::cout << "aux width " << sfwm::format_double(report.aux_width)
              << " um, gap " << sfwm::format_double(report.gap)
              << " um, coupling length "
              << sfwm::format_double(report.achieved_lc) << " um\n";
    std::cout << "bandwidth " << sfwm::format_double(report.optimal_bandwidth)
              << " rad/fs, purity " << sfwm::format_double(report.apodized_purity)
              << " (uniform " << sfwm::format_double(report.baseline_purity)
              << ")\n";
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"design and simulation of heralded photon-pair sources in "
                 "coupled waveguide arrays"};
    app.require_subcommand(1);

    std::string config_path;
    std::string materials_override, format_override, out_override;
    int threads_override = -1;
    app.add_option("--config", config_path, "run configuration file")
        ->required();
    app.add_option("--materials", materials_override,
                   "override the materials library path");
    app.add_option("--format", format_override, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out_override, "output directory");
    app.add_option("--threads", threads_override,
                   "cap on worker threads, 0 = auto")
        ->check(CLI::NonNegativeNumber);

    app.add_subcommand("modes",
                       "print the guided-mode table for both guide widths");
    app.add_subcommand("coupler-sweep",
                       "sweep the broad-guide width across the anti-crossing");
    app.add_subcommand("gap-solve",
                       "solve the gap that hits the target coupling length");
    auto* diffraction_cmd = app.add_subcommand(
        "diffraction", "propagate the array excitation and tabulate powers");
    (void)diffraction_cmd;

    std::string method = "analytic";
    std::string envelope_kind = "guide";
    auto* jsa_cmd =
        app.add_subcommand("jsa", "compute the joint spectral amplitude");
    jsa_cmd->add_option("--method", method, "integration route for Phi")
        ->check(CLI::IsMember({"analytic", "quadrature"}));
    jsa_cmd
        ->add_option("--envelope", envelope_kind,
                     "nonlinearity profile along z")
        ->check(CLI::IsMember({"guide", "constant"}));

    int schmidt_modes = 0;
    auto* purity_cmd = app.add_subcommand(
        "purity", "Schmidt decomposition of the joint amplitude");
    purity_cmd->add_option("--modes", schmidt_modes,
                           "write the first k Schmidt mode pairs as CSV")
        ->check(CLI::NonNegativeNumber);
    purity_cmd
        ->add_option("--envelope", envelope_kind,
                     "nonlinearity profile along z")
        ->check(CLI::IsMember({"guide", "constant"}));

    app.add_subcommand("design",
                       "run the full design flow and write the report");

    CLI11_PARSE(app, argc, argv);

    try {
        sfwm::RunConfig config = sfwm::parse_config(config_path);
        if (!materials_override.empty()) {
            config.materials_path = materials_override;
        }
        if (!format_override.empty()) config.format = format_override;
        if (!out_override.empty()) config.output_dir = out_override;
        if (threads_override >= 0) config.threads = threads_override;

        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "modes") return run_modes(config, format_override == "csv");
        if (name == "coupler-sweep") return run_coupler_sweep(config);
        if (name == "gap-solve") return run_gap_solve(config);
        if (name == "diffraction") return run_diffraction(config);
        if (name == "jsa") return run_jsa(config, envelope_kind, method);
        if (name == "purity") return run_purity(config, envelope_kind,
                                                schmidt_modes);
        if (name == "design") return run_design_cmd(config);
        std::cerr << "error: unknown subcommand " << name << "\n";
        return 2;
    } catch (const sfwm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
