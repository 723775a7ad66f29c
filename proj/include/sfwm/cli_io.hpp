#pragma once

#include <map>
#include <string>
#include <vector>

#include "sfwm/design.hpp"
#include "sfwm/jsa.hpp"
#include "sfwm/schmidt.hpp"

namespace sfwm {

// All file and console handling lives in this module and the command-line
// front end built on it; the physics modules never touch the filesystem.

struct ConfigValue {
    std::string text;
    int line = 0;
};

struct ConfigSection {
    int line = 0;
    std::map<std::string, ConfigValue> entries;
};

// Sectioned key = value text. Lines starting with # or ; are comments,
// [name] opens a section, keys before any section or repeated keys are
// ParseError with the offending line.
struct ConfigDoc {
    std::string path;
    std::map<std::string, ConfigSection> sections;
};

ConfigDoc read_config_doc(const std::string& path);

// One run of the toolkit. Dispersion channels are the shipped reference set;
// the pump, device geometry, and search windows come from the file.
struct RunConfig {
    std::string config_dir;  // directory of the parsed file

    std::string materials_path;  // resolved against config_dir
    std::string core_material = "silicon";
    std::string clad_material = "silica";
    std::string top_material = "silica";

    double height = 0.0;      // um
    double width_main = 0.0;  // um
    double width_aux = 0.0;   // um
    double gap = 0.0;         // um
    int n_guides = 0;
    double device_length = 0.0;  // um
    double target_lc = 0.0;      // um

    double main_wavelength = 0.0;  // um
    double aux_wavelength = 0.0;   // um
    double bandwidth = 0.0;        // rad/fs
    std::string pump_shape = "gaussian";

    std::vector<double> excitation;  // length n_guides
    int heralded_guide = 0;

    int n_signal = 256;
    int n_idler = 256;
    int z_samples = 257;

    double lambda_m_lo = 1.10;  // um
    double lambda_m_hi = 1.24;
    double aux_width_lo = 0.55;  // um
    double aux_width_hi = 0.80;
    int sweep_steps = 26;
    double gap_lo = 0.30;  // um
    double gap_hi = 1.20;
    double bandwidth_lo = 0.003;  // rad/fs
    double bandwidth_hi = 0.03;

    std::string output_dir = ".";
    std::string format = "csv";  // csv | json
    int threads = 0;             // 0 = runtime decides
};

// Syntax and number-format problems throw ParseError naming the line and
// field; everything else is collected and thrown as one ValidationError so
// a bad file reports every violation at once.
RunConfig parse_config(const std::string& path);

// Material library file: one section per material, type = sellmeier
// (strengths/resonances lists, resonance wavelengths in um) or constant.
std::map<std::string, MaterialModel> load_materials(const std::string& path);

// Assembly of domain inputs from a validated config. The dispersion channels
// are reference_design()'s; the design excitation must light exactly one
// guide.
PumpSpec pump_from(const RunConfig& config);
ArraySpec array_from(const RunConfig& config);
ExecPolicy policy_from(const RunConfig& config);
DesignInputs design_inputs_from(const RunConfig& config);

// 17-significant-digit rendering shared by every writer, so output is
// bit-stable and round-trips doubles exactly.
std::string format_double(double value);

// Generic numeric table, header + rows, LF endings.
void write_table_csv(const std::string& path,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

// Grid CSV columns: omega_s, omega_i, re_f, im_f, jsi; signal-major rows. An
// empty grid writes the header only. The reader rebuilds the axes from the
// row blocks; the normalized flag is not carried by CSV and comes back
// false.
void write_grid_csv(const JsaGrid& grid, const std::string& path);
JsaGrid read_grid_csv(const std::string& path);

// JSON document with axes, row-major re/im arrays, and the normalized flag;
// the full struct round-trips.
void write_grid_json(const JsaGrid& grid, const std::string& path);
JsaGrid read_grid_json(const std::string& path);

void write_report_json(const DesignReport& report, const std::string& path);
DesignReport read_report_json(const std::string& path);

}  // namespace sfwm
