#include "sfwm/cli_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sfwm/constants.hpp"
#include "sfwm/errors.hpp"

namespace sfwm {

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string where(const std::string& path, int line) {
    return path + ":" + std::to_string(line);
}

double parse_double_token(const std::string& path, int line,
                          const std::string& field, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError(where(path, line) + ": " + field + ": not a number: '" +
                         text + "'");
    }
    return x;
}

long parse_int_token(const std::string& path, int line,
                     const std::string& field, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const long x = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError(where(path, line) + ": " + field +
                         ": not an integer: '" + text + "'");
    }
    return x;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(text.substr(start)));
            break;
        }
        out.push_back(trim(text.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

// Typed lookups over a parsed doc. Missing keys are reported by the caller;
// malformed values throw ParseError immediately with their line.
class FieldReader {
public:
    explicit FieldReader(const ConfigDoc& doc) : doc_(doc) {}

    const ConfigValue* find(const std::string& section, const std::string& key) {
        known_[section].insert(key);
        const auto s = doc_.sections.find(section);
        if (s == doc_.sections.end()) return nullptr;
        const auto k = s->second.entries.find(key);
        return k == s->second.entries.end() ? nullptr : &k->second;
    }

    bool get_string(const std::string& section, const std::string& key,
                    std::string& out) {
        const ConfigValue* v = find(section, key);
        if (!v) return false;
        out = v->text;
        return true;
    }

    bool get_double(const std::string& section, const std::string& key,
                    double& out) {
        const ConfigValue* v = find(section, key);
        if (!v) return false;
        out = parse_double_token(doc_.path, v->line, tag(section, key), v->text);
        return true;
    }

    bool get_int(const std::string& section, const std::string& key, int& out) {
        const ConfigValue* v = find(section, key);
        if (!v) return false;
        out = static_cast<int>(
            parse_int_token(doc_.path, v->line, tag(section, key), v->text));
        return true;
    }

    bool get_list(const std::string& section, const std::string& key,
                  std::vector<double>& out) {
        const ConfigValue* v = find(section, key);
        if (!v) return false;
        out.clear();
        for (const std::string& token : split_commas(v->text)) {
            out.push_back(
                parse_double_token(doc_.path, v->line, tag(section, key), token));
        }
        return true;
    }

    // Typo protection: every key the schema never asked about is a violation.
    void flag_unknown(std::vector<std::string>& issues) const {
        for (const auto& [section, body] : doc_.sections) {
            const auto k = known_.find(section);
            if (k == known_.end()) {
                issues.push_back("[" + section + "]: unknown section");
                continue;
            }
            for (const auto& [key, value] : body.entries) {
                if (!k->second.count(key)) {
                    issues.push_back(tag(section, key) + ": unknown key (line " +
                                     std::to_string(value.line) + ")");
                }
            }
        }
    }

    static std::string tag(const std::string& section, const std::string& key) {
        return "[" + section + "] " + key;
    }

private:
    const ConfigDoc& doc_;
    std::map<std::string, std::set<std::string>> known_;
};

}  // namespace

ConfigDoc read_config_doc(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path);
    ConfigDoc doc;
    doc.path = path;
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.size() < 3 || line.back() != ']') {
                throw ParseError(where(path, line_no) + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ParseError(where(path, line_no) + ": empty section name");
            }
            if (doc.sections.count(section)) {
                throw ParseError(where(path, line_no) + ": duplicate section [" +
                                 section + "]");
            }
            doc.sections[section].line = line_no;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(where(path, line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError(where(path, line_no) + ": empty key");
        }
        if (section.empty()) {
            throw ParseError(where(path, line_no) + ": key before any [section]");
        }
        ConfigSection& sec = doc.sections[section];
        if (sec.entries.count(key)) {
            throw ParseError(where(path, line_no) + ": duplicate key '" + key +
                             "' in [" + section + "]");
        }
        sec.entries[key] = ConfigValue{value, line_no};
    }
    return doc;
}

RunConfig parse_config(const std::string& path) {
    const ConfigDoc doc = read_config_doc(path);
    FieldReader r(doc);
    RunConfig c;
    c.config_dir = std::filesystem::path(path).parent_path().string();

    std::vector<std::string> issues;
    auto missing = [&](const char* section, const char* key) {
        issues.push_back(FieldReader::tag(section, key) + ": missing");
    };
    auto need_positive = [&](const char* section, const char* key,
                             double& slot) {
        if (!r.get_double(section, key, slot)) {
            missing(section, key);
        } else if (!(slot > 0.0)) {
            issues.push_back(FieldReader::tag(section, key) +
                             ": must be positive");
        }
    };
    auto optional_positive = [&](const char* section, const char* key,
                                 double& slot) {
        if (r.get_double(section, key, slot) && !(slot > 0.0)) {
            issues.push_back(FieldReader::tag(section, key) +
                             ": must be positive");
        }
    };
    auto window = [&](const char* section, const char* lo_key,
                      const char* hi_key, double& lo, double& hi) {
        optional_positive(section, lo_key, lo);
        optional_positive(section, hi_key, hi);
        if (lo > 0.0 && hi > 0.0 && !(lo < hi)) {
            issues.push_back(FieldReader::tag(section, lo_key) + " and " +
                             FieldReader::tag(section, hi_key) +
                             ": window must satisfy lo < hi");
        }
    };

    std::string materials;
    if (r.get_string("files", "materials", materials)) {
        std::filesystem::path p(materials);
        if (p.is_relative() && !c.config_dir.empty()) {
            p = std::filesystem::path(c.config_dir) / p;
        }
        c.materials_path = p.string();
        if (!std::filesystem::exists(p)) {
            issues.push_back("[files] materials: file not found: " + p.string());
        }
    } else {
        missing("files", "materials");
    }

    r.get_string("materials", "core", c.core_material);
    r.get_string("materials", "cladding", c.clad_material);
    r.get_string("materials", "top", c.top_material);

    need_positive("geometry", "height", c.height);
    need_positive("geometry", "width_main", c.width_main);
    need_positive("geometry", "width_aux", c.width_aux);
    need_positive("geometry", "gap", c.gap);
    need_positive("geometry", "device_length", c.device_length);
    need_positive("geometry", "target_lc", c.target_lc);
    if (!r.get_int("geometry", "n_guides", c.n_guides)) {
        missing("geometry", "n_guides");
    } else if (c.n_guides < 2) {
        issues.push_back("[geometry] n_guides: must be at least 2");
    }

    need_positive("pump", "main_wavelength", c.main_wavelength);
    need_positive("pump", "aux_wavelength", c.aux_wavelength);
    need_positive("pump", "bandwidth", c.bandwidth);
    if (r.get_string("pump", "shape", c.pump_shape) &&
        c.pump_shape != "gaussian" && c.pump_shape != "sech2") {
        issues.push_back("[pump] shape: must be gaussian or sech2");
    }

    const bool have_excitation = r.get_list("array", "excitation", c.excitation);
    if (!have_excitation) missing("array", "excitation");
    const bool have_heralded = r.get_int("array", "heralded_guide",
                                         c.heralded_guide);
    if (!have_heralded) missing("array", "heralded_guide");

    auto at_least = [&](const char* section, const char* key, int& slot,
                        int bound) {
        if (r.get_int(section, key, slot) && slot < bound) {
            issues.push_back(FieldReader::tag(section, key) +
                             ": must be at least " + std::to_string(bound));
        }
    };
    at_least("grid", "n_signal", c.n_signal, 2);
    at_least("grid", "n_idler", c.n_idler, 2);
    at_least("grid", "z_samples", c.z_samples, 2);

    window("design", "lambda_m_lo", "lambda_m_hi", c.lambda_m_lo, c.lambda_m_hi);
    window("design", "aux_width_lo", "aux_width_hi", c.aux_width_lo,
           c.aux_width_hi);
    window("design", "gap_lo", "gap_hi", c.gap_lo, c.gap_hi);
    window("design", "bandwidth_lo", "bandwidth_hi", c.bandwidth_lo,
           c.bandwidth_hi);
    at_least("design", "sweep_steps", c.sweep_steps, 3);

    r.get_string("output", "dir", c.output_dir);
    if (r.get_string("output", "format", c.format) && c.format != "csv" &&
        c.format != "json") {
        issues.push_back("[output] format: must be csv or json");
    }
    if (r.get_int("run", "threads", c.threads) && c.threads < 0) {
        issues.push_back("[run] threads: must be >= 0");
    }

    if (have_excitation && c.n_guides >= 2 &&
        static_cast<int>(c.excitation.size()) != c.n_guides) {
        issues.push_back("[array] excitation: length " +
                         std::to_string(c.excitation.size()) +
                         " does not match [geometry] n_guides = " +
                         std::to_string(c.n_guides));
    }
    if (have_excitation &&
        std::all_of(c.excitation.begin(), c.excitation.end(),
                    [](double a) { return a == 0.0; })) {
        issues.push_back("[array] excitation: must not be identically zero");
    }
    if (have_heralded && c.n_guides >= 2 &&
        (c.heralded_guide < 0 || c.heralded_guide >= c.n_guides)) {
        issues.push_back("[array] heralded_guide: outside 0.." +
                         std::to_string(c.n_guides - 1));
    }

    r.flag_unknown(issues);
    if (!issues.empty()) throw ValidationError(issues);
    return c;
}

std::map<std::string, MaterialModel> load_materials(const std::string& path) {
    const ConfigDoc doc = read_config_doc(path);
    std::vector<std::string> issues;
    std::map<std::string, MaterialModel> out;

    for (const auto& [name, sec] : doc.sections) {
        auto text = [&](const char* key, std::string& slot) {
            const auto it = sec.entries.find(key);
            if (it == sec.entries.end()) {
                issues.push_back("[" + name + "] " + key + ": missing");
                return false;
            }
            slot = it->second.text;
            return true;
        };
        auto number = [&](const char* key, double& slot) {
            const auto it = sec.entries.find(key);
            if (it == sec.entries.end()) {
                issues.push_back("[" + name + "] " + key + ": missing");
                return false;
            }
            slot = parse_double_token(path, it->second.line,
                                      "[" + name + "] " + key, it->second.text);
            return true;
        };
        auto list = [&](const char* key, std::vector<double>& slot) {
            const auto it = sec.entries.find(key);
            if (it == sec.entries.end()) {
                issues.push_back("[" + name + "] " + key + ": missing");
                return false;
            }
            slot.clear();
            for (const std::string& token : split_commas(it->second.text)) {
                slot.push_back(parse_double_token(path, it->second.line,
                                                  "[" + name + "] " + key,
                                                  token));
            }
            return true;
        };

        std::string type;
        if (!text("type", type)) continue;
        double lo = 0.0, hi = 0.0;
        if (type == "sellmeier") {
            std::vector<double> strengths, resonances;
            if (!list("strengths", strengths) || !list("resonances", resonances) ||
                !number("lambda_min", lo) || !number("lambda_max", hi)) {
                continue;
            }
            if (strengths.size() != resonances.size()) {
                issues.push_back("[" + name +
                                 "] strengths and resonances differ in length");
                continue;
            }
            std::vector<SellmeierTerm> terms;
            for (std::size_t j = 0; j < strengths.size(); ++j) {
                terms.push_back({strengths[j], resonances[j] * resonances[j]});
            }
            try {
                out[name] = make_sellmeier_material(name, terms, lo, hi);
            } catch (const Error& e) {
                issues.push_back("[" + name + "] " + e.what());
            }
        } else if (type == "constant") {
            double index = 0.0;
            if (!number("index", index) || !number("lambda_min", lo) ||
                !number("lambda_max", hi)) {
                continue;
            }
            try {
                out[name] = make_constant_material(name, index, lo, hi);
            } catch (const Error& e) {
                issues.push_back("[" + name + "] " + e.what());
            }
        } else {
            issues.push_back("[" + name +
                             "] type: must be sellmeier or constant");
        }
    }
    if (!issues.empty()) throw ValidationError(issues);
    return out;
}

PumpSpec pump_from(const RunConfig& config) {
    PumpSpec p;
    p.main_center_wavelength = config.main_wavelength;
    p.main_bandwidth = config.bandwidth;
    p.aux_wavelength = config.aux_wavelength;
    p.shape = config.pump_shape == "sech2" ? PumpShape::sech2
                                           : PumpShape::gaussian;
    return p;
}

ArraySpec array_from(const RunConfig& config) {
    Eigen::VectorXcd excitation(static_cast<Eigen::Index>(config.excitation.size()));
    for (Eigen::Index j = 0; j < excitation.size(); ++j) {
        excitation[j] = config.excitation[static_cast<std::size_t>(j)];
    }
    return make_uniform_array(config.n_guides, pi / config.target_lc,
                              config.device_length, excitation);
}

ExecPolicy policy_from(const RunConfig& config) {
    ExecPolicy p;
    if (config.threads == 1 || !openmp_available()) {
        p.backend = Backend::serial;
        return p;
    }
    p.backend = Backend::openmp;
    p.threads = config.threads;
    return p;
}

DesignInputs design_inputs_from(const RunConfig& config) {
    const std::map<std::string, MaterialModel> materials =
        load_materials(config.materials_path);
    auto lookup = [&](const std::string& name) {
        const auto it = materials.find(name);
        if (it == materials.end()) {
            throw InvalidModel("material '" + name + "' not found in " +
                               config.materials_path);
        }
        return it->second;
    };

    int lit = -1;
    for (std::size_t j = 0; j < config.excitation.size(); ++j) {
        if (config.excitation[j] == 0.0) continue;
        if (lit >= 0) {
            throw InvalidModel("design runs need a single-guide excitation");
        }
        lit = static_cast<int>(j);
    }
    if (lit < 0) {
        throw InvalidModel("design runs need a single-guide excitation");
    }
    if (config.n_signal != config.n_idler) {
        throw InvalidModel("design runs need a square spectral grid");
    }

    const ReferenceDesign d = reference_design();
    DesignInputs in;
    in.channels = d.channels;
    in.pump = pump_from(config);
    in.lambda_m_lo = config.lambda_m_lo;
    in.lambda_m_hi = config.lambda_m_hi;
    in.coupler.width_main = config.width_main;
    in.coupler.width_aux = config.width_aux;
    in.coupler.gap = config.gap;
    in.coupler.height = config.height;
    in.coupler.core = lookup(config.core_material);
    in.coupler.clad = lookup(config.clad_material);
    in.coupler.top = lookup(config.top_material);
    in.coupler.wavelength = config.aux_wavelength;
    in.coupler.order_main = 0;
    in.coupler.order_aux = 1;
    in.aux_width_lo = config.aux_width_lo;
    in.aux_width_hi = config.aux_width_hi;
    in.sweep_steps = config.sweep_steps;
    in.target_lc = config.target_lc;
    in.gap_lo = config.gap_lo;
    in.gap_hi = config.gap_hi;
    in.n_guides = config.n_guides;
    in.device_length = config.device_length;
    in.excitation_guide = lit;
    in.heralded_guide = config.heralded_guide;
    in.bandwidth_lo = config.bandwidth_lo;
    in.bandwidth_hi = config.bandwidth_hi;
    in.grid_size = config.n_signal;
    in.envelope_samples = config.z_samples;
    in.policy = policy_from(config);
    return in;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf);
}

namespace {

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

// JSON numbers cannot be nan or inf; those serialize as null and read back
// as quiet nan.
void put_json_number(std::ostream& out, double value) {
    if (std::isfinite(value)) {
        out << format_double(value);
    } else {
        out << "null";
    }
}

void put_json_array(std::ostream& out, const double* data, std::size_t n) {
    out << '[';
    for (std::size_t j = 0; j < n; ++j) {
        if (j) out << ", ";
        put_json_number(out, data[j]);
    }
    out << ']';
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        const unsigned char u = static_cast<unsigned char>(c);
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (u < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", u);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

double json_number(const nlohmann::json& j, const std::string& path,
                   const char* key) {
    if (!j.contains(key)) {
        throw ParseError(path + ": missing field " + key);
    }
    if (j[key].is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!j[key].is_number()) {
        throw ParseError(path + ": field " + key + " is not a number");
    }
    return j[key].get<double>();
}

std::vector<double> json_number_array(const nlohmann::json& j,
                                      const std::string& path,
                                      const char* key) {
    if (!j.contains(key) || !j[key].is_array()) {
        throw ParseError(path + ": missing array " + key);
    }
    std::vector<double> out;
    out.reserve(j[key].size());
    for (const auto& v : j[key]) {
        if (v.is_null()) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
        } else if (v.is_number()) {
            out.push_back(v.get<double>());
        } else {
            throw ParseError(path + ": array " + key + " holds a non-number");
        }
    }
    return out;
}

}  // namespace

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_for_write(path);
    for (std::size_t j = 0; j < columns.size(); ++j) {
        out << (j ? "," : "") << columns[j];
    }
    out << "\n";
    for (const std::vector<double>& row : rows) {
        if (row.size() != columns.size()) {
            throw InvalidModel("table row width does not match the header");
        }
        for (std::size_t j = 0; j < row.size(); ++j) {
            out << (j ? "," : "") << format_double(row[j]);
        }
        out << "\n";
    }
    finish_write(out, path);
}

void write_grid_csv(const JsaGrid& grid, const std::string& path) {
    if (grid.amplitude.rows() != grid.signal_axis.size() ||
        grid.amplitude.cols() != grid.idler_axis.size()) {
        throw InvalidModel("grid amplitude shape does not match the axes");
    }
    std::ofstream out = open_for_write(path);
    out << "omega_s,omega_i,re_f,im_f,jsi\n";
    for (Eigen::Index r = 0; r < grid.signal_axis.size(); ++r) {
        for (Eigen::Index c = 0; c < grid.idler_axis.size(); ++c) {
            const std::complex<double> f = grid.amplitude(r, c);
            out << format_double(grid.signal_axis[r]) << ','
                << format_double(grid.idler_axis[c]) << ','
                << format_double(f.real()) << ',' << format_double(f.imag())
                << ',' << format_double(std::norm(f)) << "\n";
        }
    }
    finish_write(out, path);
}

JsaGrid read_grid_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) ||
        trim(line) != "omega_s,omega_i,re_f,im_f,jsi") {
        throw ParseError(path + ":1: expected grid header");
    }
    std::vector<double> ws, wi;
    std::vector<std::complex<double>> amp;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::vector<std::string> cells = split_commas(t);
        if (cells.size() != 5) {
            throw ParseError(where(path, line_no) + ": expected 5 columns");
        }
        ws.push_back(parse_double_token(path, line_no, "omega_s", cells[0]));
        wi.push_back(parse_double_token(path, line_no, "omega_i", cells[1]));
        const double re = parse_double_token(path, line_no, "re_f", cells[2]);
        const double im = parse_double_token(path, line_no, "im_f", cells[3]);
        parse_double_token(path, line_no, "jsi", cells[4]);
        amp.emplace_back(re, im);
    }
    JsaGrid grid;
    if (amp.empty()) return grid;

    // Rows are signal-major: the idler axis is the run of rows sharing the
    // first signal value.
    std::size_t n_i = 1;
    while (n_i < ws.size() && ws[n_i] == ws[0]) ++n_i;
    if (ws.size() % n_i != 0) {
        throw ParseError(path + ": ragged grid blocks");
    }
    const std::size_t n_s = ws.size() / n_i;
    grid.signal_axis.resize(static_cast<Eigen::Index>(n_s));
    grid.idler_axis.resize(static_cast<Eigen::Index>(n_i));
    grid.amplitude.resize(static_cast<Eigen::Index>(n_s),
                          static_cast<Eigen::Index>(n_i));
    for (std::size_t c = 0; c < n_i; ++c) {
        grid.idler_axis[static_cast<Eigen::Index>(c)] = wi[c];
    }
    for (std::size_t r = 0; r < n_s; ++r) {
        grid.signal_axis[static_cast<Eigen::Index>(r)] = ws[r * n_i];
        for (std::size_t c = 0; c < n_i; ++c) {
            const std::size_t k = r * n_i + c;
            if (ws[k] != grid.signal_axis[static_cast<Eigen::Index>(r)] ||
                wi[k] != grid.idler_axis[static_cast<Eigen::Index>(c)]) {
                throw ParseError(path + ": inconsistent grid axes");
            }
            grid.amplitude(static_cast<Eigen::Index>(r),
                           static_cast<Eigen::Index>(c)) = amp[k];
        }
    }
    grid.normalized = false;
    return grid;
}

void write_grid_json(const JsaGrid& grid, const std::string& path) {
    if (grid.amplitude.rows() != grid.signal_axis.size() ||
        grid.amplitude.cols() != grid.idler_axis.size()) {
        throw InvalidModel("grid amplitude shape does not match the axes");
    }
    const Eigen::Index n_s = grid.signal_axis.size();
    const Eigen::Index n_i = grid.idler_axis.size();
    std::vector<double> re(static_cast<std::size_t>(n_s * n_i));
    std::vector<double> im(re.size());
    for (Eigen::Index r = 0; r < n_s; ++r) {
        for (Eigen::Index c = 0; c < n_i; ++c) {
            const std::size_t k = static_cast<std::size_t>(r * n_i + c);
            re[k] = grid.amplitude(r, c).real();
            im[k] = grid.amplitude(r, c).imag();
        }
    }
    std::ofstream out = open_for_write(path);
    out << "{\n";
    out << "  \"n_signal\": " << n_s << ",\n";
    out << "  \"n_idler\": " << n_i << ",\n";
    out << "  \"normalized\": " << (grid.normalized ? "true" : "false")
        << ",\n";
    out << "  \"signal_axis\": ";
    put_json_array(out, grid.signal_axis.data(), static_cast<std::size_t>(n_s));
    out << ",\n  \"idler_axis\": ";
    put_json_array(out, grid.idler_axis.data(), static_cast<std::size_t>(n_i));
    out << ",\n  \"amplitude_re\": ";
    put_json_array(out, re.data(), re.size());
    out << ",\n  \"amplitude_im\": ";
    put_json_array(out, im.data(), im.size());
    out << "\n}\n";
    finish_write(out, path);
}

JsaGrid read_grid_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        JsaGrid grid;
        const auto n_s = j.at("n_signal").get<Eigen::Index>();
        const auto n_i = j.at("n_idler").get<Eigen::Index>();
        if (n_s < 0 || n_i < 0) {
            throw ParseError(path + ": negative grid size");
        }
        grid.normalized = j.at("normalized").get<bool>();
        const std::vector<double> sig = json_number_array(j, path, "signal_axis");
        const std::vector<double> idl = json_number_array(j, path, "idler_axis");
        const std::vector<double> re = json_number_array(j, path, "amplitude_re");
        const std::vector<double> im = json_number_array(j, path, "amplitude_im");
        if (static_cast<Eigen::Index>(sig.size()) != n_s ||
            static_cast<Eigen::Index>(idl.size()) != n_i ||
            re.size() != static_cast<std::size_t>(n_s * n_i) ||
            im.size() != re.size()) {
            throw ParseError(path + ": grid arrays disagree with the sizes");
        }
        grid.signal_axis =
            Eigen::Map<const Eigen::VectorXd>(sig.data(), n_s);
        grid.idler_axis = Eigen::Map<const Eigen::VectorXd>(idl.data(), n_i);
        grid.amplitude.resize(n_s, n_i);
        for (Eigen::Index r = 0; r < n_s; ++r) {
            for (Eigen::Index c = 0; c < n_i; ++c) {
                const std::size_t k = static_cast<std::size_t>(r * n_i + c);
                grid.amplitude(r, c) = {re[k], im[k]};
            }
        }
        return grid;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_report_json(const DesignReport& report, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << "{\n";
    auto field = [&](const char* key, double value, bool comma = true) {
        out << "  \"" << key << "\": ";
        put_json_number(out, value);
        out << (comma ? ",\n" : "\n");
    };
    field("gvm_residual", report.gvm_residual);
    field("lambda_s", report.lambda_s);
    field("lambda_i", report.lambda_i);
    field("lambda_m", report.lambda_m);
    field("lambda_a", report.lambda_a);
    field("aux_width", report.aux_width);
    field("gap", report.gap);
    field("achieved_lc", report.achieved_lc);
    field("optimal_bandwidth", report.optimal_bandwidth);
    field("baseline_purity", report.baseline_purity);
    field("apodized_purity", report.apodized_purity);
    out << "  \"bandwidth_flat\": " << (report.bandwidth_flat ? "true" : "false")
        << ",\n";
    out << "  \"failed_step\": " << report.failed_step << ",\n";
    out << "  \"failure\": \"" << json_escape(report.failure) << "\",\n";
    out << "  \"steps\": [";
    for (std::size_t j = 0; j < report.steps.size(); ++j) {
        out << (j ? ",\n    \"" : "\n    \"") << json_escape(report.steps[j])
            << "\"";
    }
    out << (report.steps.empty() ? "]\n" : "\n  ]\n");
    out << "}\n";
    finish_write(out, path);
}

DesignReport read_report_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        DesignReport r;
        r.gvm_residual = json_number(j, path, "gvm_residual");
        r.lambda_s = json_number(j, path, "lambda_s");
        r.lambda_i = json_number(j, path, "lambda_i");
        r.lambda_m = json_number(j, path, "lambda_m");
        r.lambda_a = json_number(j, path, "lambda_a");
        r.aux_width = json_number(j, path, "aux_width");
        r.gap = json_number(j, path, "gap");
        r.achieved_lc = json_number(j, path, "achieved_lc");
        r.optimal_bandwidth = json_number(j, path, "optimal_bandwidth");
        r.baseline_purity = json_number(j, path, "baseline_purity");
        r.apodized_purity = json_number(j, path, "apodized_purity");
        r.bandwidth_flat = j.at("bandwidth_flat").get<bool>();
        r.failed_step = j.at("failed_step").get<int>();
        r.failure = j.at("failure").get<std::string>();
        for (const auto& s : j.at("steps")) {
            r.steps.push_back(s.get<std::string>());
        }
        return r;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace sfwm
