#include "nkpa/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "nkpa/checksum.hpp"
#include "nkpa/constants.hpp"
#include "nkpa/units.hpp"

namespace nkpa::io {
namespace {

using units::Dimension;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& require_object(const json& parent, const std::string& key, const std::string& path) {
    const auto it = parent.find(key);
    if (it == parent.end()) throw ValidationError(fmt::format("missing required field '{}'", join(path, key)));
    if (!it->is_object()) throw ValidationError(fmt::format("field '{}' must be an object", join(path, key)));
    return *it;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.contains(k)) throw ValidationError(fmt::format("unknown field '{}'", join(path, k)));
    }
}

/// Number or {"value", "unit"} converted to SI; angular frequencies come back in rad/s.
double quantity_value(const json& q, Dimension dim, const std::string& field, bool angular) {
    if (q.is_number()) {
        const double v = q.get<double>();
        if (!std::isfinite(v)) throw ValidationError(fmt::format("field '{}' is not finite", field));
        return v;
    }
    if (!q.is_object()) {
        throw ValidationError(fmt::format("field '{}' must be a number or {{\"value\", \"unit\"}}", field));
    }
    reject_unknown(q, {"value", "unit"}, field);
    const auto v = q.find("value");
    if (v == q.end() || !v->is_number()) {
        throw ValidationError(fmt::format("field '{}.value' must be a number", field));
    }
    std::string unit;
    if (const auto u = q.find("unit"); u != q.end()) {
        if (!u->is_string()) throw ValidationError(fmt::format("field '{}.unit' must be a string", field));
        unit = u->get<std::string>();
    } else if (dim != Dimension::Dimensionless) {
        throw ValidationError(fmt::format("field '{}' is missing its unit", field));
    }
    const double x = v->get<double>();
    if (angular && unit == "rad/s") {
        if (!std::isfinite(x)) throw ValidationError(fmt::format("field '{}' is not finite", field));
        return x;
    }
    const double si = units::to_si(x, unit, dim, field);
    return angular ? constants::two_pi * si : si;
}

double quantity(const json& parent, const std::string& key, Dimension dim, const std::string& path,
                bool angular = false) {
    const auto it = parent.find(key);
    const std::string field = join(path, key);
    if (it == parent.end()) throw ValidationError(fmt::format("missing required field '{}'", field));
    return quantity_value(*it, dim, field, angular);
}

std::optional<double> optional_quantity(const json& parent, const std::string& key, Dimension dim,
                                        const std::string& path, bool angular = false) {
    const auto it = parent.find(key);
    if (it == parent.end() || it->is_null()) return std::nullopt;
    return quantity_value(*it, dim, join(path, key), angular);
}

json tagged(double value, const char* unit) { return json{{"value", value}, {"unit", unit}}; }

std::string number(double x) { return fmt::format("{:.17g}", x); }

// --- line-oriented text -------------------------------------------------------

struct Line {
    std::size_t number;
    std::string_view text;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> out;
    std::size_t n = 1;
    while (!text.empty()) {
        const auto pos = text.find('\n');
        std::string_view line = text.substr(0, pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back({n++, line});
        if (pos == std::string_view::npos) break;
        text.remove_prefix(pos + 1);
    }
    return out;
}

std::vector<std::string_view> split(std::string_view s, bool comma) {
    std::vector<std::string_view> out;
    if (comma) {
        while (true) {
            const auto pos = s.find(',');
            out.push_back(trim(s.substr(0, pos)));
            if (pos == std::string_view::npos) break;
            s.remove_prefix(pos + 1);
        }
        return out;
    }
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

[[noreturn]] void fail_at(const std::string& source, std::size_t line, const std::string& msg) {
    throw ValidationError(fmt::format("{}:{}: {}", source, line, msg));
}

double parse_number(std::string_view token, const std::string& source, std::size_t line) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        fail_at(source, line, fmt::format("cannot parse number '{}'", token));
    }
    if (!std::isfinite(v)) fail_at(source, line, fmt::format("non-finite value '{}'", token));
    return v;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> row_lines;
    std::map<std::string, std::string> metadata;
    std::map<std::string, std::size_t> metadata_lines;
};

/// Header row, then numeric rows. "# key=value" lines become metadata; other
/// "#" lines are comments.
CsvTable parse_csv(std::string_view text, const std::string& source) {
    CsvTable t;
    for (const auto& [n, raw] : split_lines(text)) {
        const auto line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string_view::npos) {
                const std::string key(trim(body.substr(0, eq)));
                t.metadata[key] = std::string(trim(body.substr(eq + 1)));
                t.metadata_lines[key] = n;
            }
            continue;
        }
        const auto cells = split(line, true);
        if (t.header.empty()) {
            for (const auto c : cells) t.header.emplace_back(lower(c));
            continue;
        }
        if (cells.size() != t.header.size()) {
            fail_at(source, n, fmt::format("expected {} columns, found {}", t.header.size(), cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto c : cells) row.push_back(parse_number(c, source, n));
        t.rows.push_back(std::move(row));
        t.row_lines.push_back(n);
    }
    if (t.header.empty()) throw ValidationError(fmt::format("{}: empty file, header row expected", source));
    return t;
}

std::size_t column(const CsvTable& t, const std::vector<std::string>& names, const std::string& source,
                   bool required = true) {
    for (const auto& name : names) {
        const auto it = std::find(t.header.begin(), t.header.end(), name);
        if (it != t.header.end()) return static_cast<std::size_t>(it - t.header.begin());
    }
    if (required) throw ValidationError(fmt::format("{}:1: missing column '{}'", source, names.front()));
    return static_cast<std::size_t>(-1);
}

void check_increasing(const std::vector<double>& axis, const std::vector<std::size_t>& lines, const std::string& source,
                      const char* what) {
    for (std::size_t k = 1; k < axis.size(); ++k) {
        if (!(axis[k] > axis[k - 1])) fail_at(source, lines[k], fmt::format("{} not strictly increasing", what));
    }
}

bool has_suffix(const std::string& s, std::string_view suffix) {
    const auto l = lower(s);
    return l.size() >= suffix.size() && l.compare(l.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json estimate_json(const Estimate& e) { return json{{"value", e.value}, {"sigma", e.sigma}}; }

Estimate estimate_from(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("value") || !j.contains("sigma")) {
        throw ValidationError(fmt::format("field '{}' must be {{\"value\", \"sigma\"}}", path));
    }
    return {j.at("value").get<double>(), j.at("sigma").get<double>()};
}

json diagnostics_json(const FitDiagnostics& d) {
    return json{{"iterations", d.iterations},
                {"converged", d.converged},
                {"message", d.message},
                {"points", d.points},
                {"chi_square", d.chi_square},
                {"reduced_chi_square", d.reduced_chi_square},
                {"rms_residual", d.rms_residual},
                {"relative_residual", d.relative_residual},
                {"warnings", d.warnings}};
}

FitDiagnostics diagnostics_from(const json& j) {
    FitDiagnostics d;
    d.iterations = j.at("iterations").get<int>();
    d.converged = j.at("converged").get<bool>();
    d.message = j.at("message").get<std::string>();
    d.points = j.at("points").get<std::size_t>();
    d.chi_square = j.at("chi_square").get<double>();
    d.reduced_chi_square = j.at("reduced_chi_square").get<double>();
    d.rms_residual = j.at("rms_residual").get<double>();
    d.relative_residual = j.at("relative_residual").get<double>();
    d.warnings = j.at("warnings").get<std::vector<std::string>>();
    return d;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("{}: {}", path, std::strerror(errno)));
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError(fmt::format("{}: read failed", path));
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("{}: {}", path, std::strerror(errno)));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError(fmt::format("{}: write failed: {}", path, std::strerror(errno)));
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

namespace {
json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("{}: invalid JSON: {}", source, e.what()));
    }
}
}  // namespace

// --- device specification ---------------------------------------------------

DeviceSpec parse_device_spec(const json& doc) {
    if (!doc.is_object()) throw ValidationError("device spec must be a JSON object");
    reject_unknown(doc, {"$schema", "schema_version", "name", "description", "film", "geometry", "circuit", "reported"},
                   "");
    if (const auto v = doc.find("schema_version"); v != doc.end() && (!v->is_number_integer() || v->get<int>() != 1)) {
        throw ValidationError("unsupported 'schema_version' (expected 1)");
    }
    DeviceSpec spec;
    if (const auto n = doc.find("name"); n != doc.end()) {
        if (!n->is_string()) throw ValidationError("field 'name' must be a string");
        spec.name = n->get<std::string>();
    }

    const auto& film = require_object(doc, "film", "");
    reject_unknown(film, {"sheet_inductance", "thickness", "dead_width_per_side", "critical_current_density"}, "film");
    spec.film.sheet_inductance = quantity(film, "sheet_inductance", Dimension::SheetInductance, "film");
    spec.film.thickness = quantity(film, "thickness", Dimension::Length, "film");
    spec.film.dead_width_per_side =
        optional_quantity(film, "dead_width_per_side", Dimension::Length, "film").value_or(0.0);
    spec.film.critical_current_density =
        quantity(film, "critical_current_density", Dimension::CurrentDensity, "film");

    const auto& geo = require_object(doc, "geometry", "");
    reject_unknown(geo, {"width", "length"}, "geometry");
    spec.geometry.width = quantity(geo, "width", Dimension::Length, "geometry");
    spec.geometry.length = quantity(geo, "length", Dimension::Length, "geometry");

    const auto& cir = require_object(doc, "circuit", "");
    reject_unknown(cir,
                   {"shunt_capacitance", "resonant_frequency", "parasitic_inductance", "external_coupling_rate",
                    "intrinsic_loss_rate"},
                   "circuit");
    spec.circuit.parasitic_inductance = quantity(cir, "parasitic_inductance", Dimension::Inductance, "circuit");
    spec.circuit.external_coupling_rate =
        quantity(cir, "external_coupling_rate", Dimension::Frequency, "circuit", true);
    spec.circuit.intrinsic_loss_rate = quantity(cir, "intrinsic_loss_rate", Dimension::Frequency, "circuit", true);
    const bool has_c = cir.contains("shunt_capacitance");
    const bool has_f = cir.contains("resonant_frequency");
    if (has_c == has_f) {
        throw ValidationError("exactly one of 'circuit.shunt_capacitance' and 'circuit.resonant_frequency' is required");
    }
    if (has_c) {
        spec.circuit.shunt_capacitance = quantity(cir, "shunt_capacitance", Dimension::Capacitance, "circuit");
    } else {
        const double w0 = quantity(cir, "resonant_frequency", Dimension::Frequency, "circuit", true);
        validate(spec.film);
        validate(spec.geometry, spec.film);
        if (!(w0 > 0.0)) throw ValidationError("field 'circuit.resonant_frequency' must be positive");
        const double l_total = bridge_inductance(spec.geometry, spec.film) + spec.circuit.parasitic_inductance;
        spec.circuit.shunt_capacitance = 1.0 / (w0 * w0 * l_total);
    }

    if (const auto r = doc.find("reported"); r != doc.end()) {
        if (!r->is_object()) throw ValidationError("field 'reported' must be an object");
        reject_unknown(*r, {"impedance", "participation_ratio", "characteristic_current", "resonant_frequency", "kerr"},
                       "reported");
        spec.reported.impedance = optional_quantity(*r, "impedance", Dimension::Resistance, "reported");
        spec.reported.participation_ratio =
            optional_quantity(*r, "participation_ratio", Dimension::Dimensionless, "reported");
        spec.reported.characteristic_current =
            optional_quantity(*r, "characteristic_current", Dimension::Current, "reported");
        spec.reported.resonant_frequency =
            optional_quantity(*r, "resonant_frequency", Dimension::Frequency, "reported", true);
        spec.reported.kerr = optional_quantity(*r, "kerr", Dimension::Frequency, "reported", true);
    }
    validate(spec);
    return spec;
}

DeviceSpec read_device_spec(const std::string& path) {
    const auto doc = parse_json_text(read_text_file(path), path);
    try {
        return parse_device_spec(doc);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path, e.what()));
    }
}

json device_spec_to_json(const DeviceSpec& s) {
    json j;
    j["schema_version"] = 1;
    j["name"] = s.name;
    j["film"] = {{"sheet_inductance", tagged(s.film.sheet_inductance, "H/sq")},
                 {"thickness", tagged(s.film.thickness, "m")},
                 {"dead_width_per_side", tagged(s.film.dead_width_per_side, "m")},
                 {"critical_current_density", tagged(s.film.critical_current_density, "A/m2")}};
    j["geometry"] = {{"width", tagged(s.geometry.width, "m")}, {"length", tagged(s.geometry.length, "m")}};
    j["circuit"] = {{"shunt_capacitance", tagged(s.circuit.shunt_capacitance, "F")},
                    {"parasitic_inductance", tagged(s.circuit.parasitic_inductance, "H")},
                    {"external_coupling_rate", tagged(s.circuit.external_coupling_rate, "rad/s")},
                    {"intrinsic_loss_rate", tagged(s.circuit.intrinsic_loss_rate, "rad/s")}};
    json r = json::object();
    if (s.reported.impedance) r["impedance"] = tagged(*s.reported.impedance, "Ohm");
    if (s.reported.participation_ratio) r["participation_ratio"] = *s.reported.participation_ratio;
    if (s.reported.characteristic_current) r["characteristic_current"] = tagged(*s.reported.characteristic_current, "A");
    if (s.reported.resonant_frequency) r["resonant_frequency"] = tagged(*s.reported.resonant_frequency, "rad/s");
    if (s.reported.kerr) r["kerr"] = tagged(*s.reported.kerr, "rad/s");
    if (!r.empty()) j["reported"] = r;
    return j;
}

json to_json(const DerivedCircuit& c) {
    return json{{"bridge_inductance_h", c.bridge_inductance},
                {"total_inductance_h", c.total_inductance},
                {"parasitic_inductance_h", c.parasitic_inductance()},
                {"shunt_capacitance_f", c.shunt_capacitance()},
                {"participation_ratio", c.participation_ratio},
                {"impedance_ohm", c.impedance},
                {"resonant_frequency_rad_s", c.resonant_frequency},
                {"resonant_frequency_hz", c.resonant_frequency / constants::two_pi},
                {"zero_point_current_a", c.zero_point_current},
                {"characteristic_current_a", c.characteristic_current},
                {"kerr_rad_s", c.kerr},
                {"kerr_hz", c.kerr / constants::two_pi},
                {"external_coupling_rate_rad_s", c.external_coupling_rate},
                {"intrinsic_loss_rate_rad_s", c.intrinsic_loss_rate},
                {"total_decay_rate_hz", c.total_decay_rate() / constants::two_pi}};
}

json to_json(const CircuitReport& r) {
    json j;
    j["circuit"] = to_json(r.circuit);
    j["alpha_source"] = r.alpha_source == AlphaSource::Geometry ? "geometry" : "file";
    j["kerr_zero_point_route_rad_s"] = r.kerr_zero_point_route;
    j["kerr_zero_point_route_hz"] = r.kerr_zero_point_route / constants::two_pi;
    j["kerr_route_relative_error"] = r.kerr_route_relative_error;
    j["geometry_participation_ratio"] = r.geometry_participation_ratio;
    j["specified_participation_ratio"] =
        r.specified_participation_ratio ? json(*r.specified_participation_ratio) : json(nullptr);
    j["participation_ratios_disagree"] = r.participation_ratios_disagree;
    j["kerr_at_reported_values_hz"] =
        r.kerr_at_reported_values ? json(*r.kerr_at_reported_values / constants::two_pi) : json(nullptr);
    j["reported_kerr_hz"] = r.reported_kerr ? json(*r.reported_kerr / constants::two_pi) : json(nullptr);
    j["notes"] = r.notes;
    return j;
}

json to_json(const BridgeDesign& d) {
    return json{{"width_m", d.geometry.width},
                {"length_m", d.geometry.length},
                {"shunt_capacitance_f", d.shunt_capacitance},
                {"iterations", d.iterations},
                {"circuit", to_json(d.circuit)}};
}

// --- drive -------------------------------------------------------------------

DriveConfig parse_drive(const json& doc) {
    if (!doc.is_object()) throw ValidationError("drive config must be a JSON object");
    reject_unknown(doc, {"$schema", "schema_version", "description", "pump1", "pump2"}, "");
    DriveConfig d;
    const auto tone = [&](const char* key, double& f, double& p, double& ph) {
        const auto& t = require_object(doc, key, "");
        reject_unknown(t, {"frequency", "power", "phase"}, key);
        f = quantity(t, "frequency", Dimension::Frequency, key, true);
        const auto pit = t.find("power");
        if (pit == t.end()) throw ValidationError(fmt::format("missing required field '{}.power'", key));
        p = quantity_value(*pit, Dimension::Power, join(key, "power"), false);
        ph = 0.0;
        if (const auto it = t.find("phase"); it != t.end()) {
            if (it->is_number()) {
                ph = it->get<double>();
            } else if (it->is_object() && it->contains("unit") && it->at("unit") == "deg") {
                ph = it->at("value").get<double>() * constants::two_pi / 360.0;
            } else if (it->is_object() && it->contains("unit") && it->at("unit") == "rad") {
                ph = it->at("value").get<double>();
            } else {
                throw ValidationError(fmt::format("field '{}.phase' must be a number (rad) or value with unit rad|deg",
                                                  key));
            }
        }
    };
    tone("pump1", d.pump1_frequency, d.pump1_power, d.pump1_phase);
    tone("pump2", d.pump2_frequency, d.pump2_power, d.pump2_phase);
    validate(d);
    return d;
}

DriveConfig read_drive(const std::string& path) {
    const auto doc = parse_json_text(read_text_file(path), path);
    try {
        return parse_drive(doc);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path, e.what()));
    }
}

json to_json(const DriveConfig& d) {
    const auto tone = [](double f, double p, double ph) {
        return json{{"frequency", tagged(f, "rad/s")}, {"power", tagged(p, "W")}, {"phase", ph}};
    };
    return json{{"schema_version", 1},
                {"pump1", tone(d.pump1_frequency, d.pump1_power, d.pump1_phase)},
                {"pump2", tone(d.pump2_frequency, d.pump2_power, d.pump2_phase)}};
}

json to_json(const PumpState& p) {
    return json{{"photons_pump1", std::norm(p.amplitude_b)},
                {"photons_pump2", std::norm(p.amplitude_c)},
                {"cross_kerr_shift_rad_s", p.cross_kerr_shift},
                {"parametric_strength_re_rad_s", p.parametric_strength.real()},
                {"parametric_strength_im_rad_s", p.parametric_strength.imag()},
                {"effective_detuning_rad_s", p.effective_detuning},
                {"center_frequency_rad_s", p.center_frequency},
                {"stable", p.stable},
                {"iterations", p.iterations},
                {"warnings", p.warnings}};
}

// --- traces ------------------------------------------------------------------

ReflectionTrace parse_touchstone_1port(std::string_view text, const std::string& source) {
    double freq_scale = 1e9;
    TouchstoneFormat format = TouchstoneFormat::MA;
    bool seen_options = false;
    ReflectionTrace t;
    std::vector<std::size_t> lines;
    for (const auto& [n, raw] : split_lines(text)) {
        auto line = raw.substr(0, raw.find('!'));
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (seen_options) fail_at(source, n, "duplicate option line");
            if (!t.frequency.empty()) fail_at(source, n, "option line after data");
            seen_options = true;
            const auto tokens = split(line.substr(1), false);
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                const auto tok = lower(tokens[i]);
                if (tok == "hz") freq_scale = 1.0;
                else if (tok == "khz") freq_scale = 1e3;
                else if (tok == "mhz") freq_scale = 1e6;
                else if (tok == "ghz") freq_scale = 1e9;
                else if (tok == "s") continue;
                else if (tok == "y" || tok == "z" || tok == "h" || tok == "g")
                    fail_at(source, n, fmt::format("unsupported parameter type '{}' (only S)", tokens[i]));
                else if (tok == "ri") format = TouchstoneFormat::RI;
                else if (tok == "ma") format = TouchstoneFormat::MA;
                else if (tok == "db") format = TouchstoneFormat::DB;
                else if (tok == "r") {
                    if (i + 1 >= tokens.size()) fail_at(source, n, "reference impedance missing after 'R'");
                    const double z = parse_number(tokens[++i], source, n);
                    if (!(z > 0.0)) fail_at(source, n, "reference impedance must be positive");
                } else {
                    fail_at(source, n, fmt::format("unrecognised option '{}'", tokens[i]));
                }
            }
            continue;
        }
        const auto cells = split(line, false);
        if (cells.size() != 3) {
            fail_at(source, n, fmt::format("one-port data row needs 3 values, found {}", cells.size()));
        }
        const double f = parse_number(cells[0], source, n) * freq_scale;
        const double a = parse_number(cells[1], source, n);
        const double b = parse_number(cells[2], source, n);
        std::complex<double> s;
        switch (format) {
            case TouchstoneFormat::RI: s = {a, b}; break;
            case TouchstoneFormat::MA: s = std::polar(a, b * constants::two_pi / 360.0); break;
            case TouchstoneFormat::DB: s = std::polar(std::pow(10.0, a / 20.0), b * constants::two_pi / 360.0); break;
        }
        if (!t.frequency.empty() && !(f > t.frequency.back())) fail_at(source, n, "frequency not strictly increasing");
        t.frequency.push_back(f);
        t.s11.push_back(s);
        lines.push_back(n);
    }
    if (t.frequency.empty()) throw ValidationError(fmt::format("{}: no data rows", source));
    return t;
}

ReflectionTrace read_touchstone_1port(const std::string& path) {
    return parse_touchstone_1port(read_text_file(path), path);
}

std::string format_touchstone_1port(const ReflectionTrace& trace, TouchstoneFormat format) {
    std::string out;
    const char* tag = format == TouchstoneFormat::RI ? "RI" : format == TouchstoneFormat::MA ? "MA" : "DB";
    out += fmt::format("! one-port reflection, {} points\n# Hz S {} R 50\n", trace.frequency.size(), tag);
    for (std::size_t k = 0; k < trace.frequency.size(); ++k) {
        const auto s = trace.s11[k];
        double a = s.real(), b = s.imag();
        if (format != TouchstoneFormat::RI) {
            a = format == TouchstoneFormat::MA ? std::abs(s) : 20.0 * std::log10(std::abs(s));
            b = std::arg(s) * 360.0 / constants::two_pi;
        }
        out += fmt::format("{} {} {}\n", number(trace.frequency[k]), number(a), number(b));
    }
    return out;
}

ReflectionTrace parse_reflection_csv(std::string_view text, const std::string& source) {
    const auto t = parse_csv(text, source);
    const auto cf = column(t, {"frequency_hz", "frequency"}, source);
    const auto cr = column(t, {"s11_re", "re"}, source);
    const auto ci = column(t, {"s11_im", "im"}, source);
    const auto cs = column(t, {"sigma"}, source, false);
    ReflectionTrace r;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        r.frequency.push_back(t.rows[k][cf]);
        r.s11.emplace_back(t.rows[k][cr], t.rows[k][ci]);
        if (cs != static_cast<std::size_t>(-1)) {
            if (!(t.rows[k][cs] > 0.0)) fail_at(source, t.row_lines[k], "sigma must be positive");
            r.sigma.push_back(t.rows[k][cs]);
        }
    }
    check_increasing(r.frequency, t.row_lines, source, "frequency");
    if (r.frequency.empty()) throw ValidationError(fmt::format("{}: no data rows", source));
    return r;
}

std::string format_reflection_csv(const ReflectionTrace& trace) {
    const bool sig = !trace.sigma.empty();
    std::string out = sig ? "frequency_hz,s11_re,s11_im,sigma\n" : "frequency_hz,s11_re,s11_im\n";
    for (std::size_t k = 0; k < trace.frequency.size(); ++k) {
        out += fmt::format("{},{},{}", number(trace.frequency[k]), number(trace.s11[k].real()),
                           number(trace.s11[k].imag()));
        out += sig ? fmt::format(",{}\n", number(trace.sigma[k])) : "\n";
    }
    return out;
}

ReflectionTrace read_reflection_trace(const std::string& path) {
    if (has_suffix(path, ".s1p") || has_suffix(path, ".ts")) return read_touchstone_1port(path);
    return parse_reflection_csv(read_text_file(path), path);
}

void write_reflection_trace(const ReflectionTrace& trace, const std::string& path) {
    if (has_suffix(path, ".s1p") || has_suffix(path, ".ts")) {
        write_text_file(path, format_touchstone_1port(trace));
    } else {
        write_text_file(path, format_reflection_csv(trace));
    }
}

NoiseTrace parse_noise_csv(std::string_view text, const std::string& source) {
    const auto t = parse_csv(text, source);
    const auto meta = [&](const std::string& rad, const std::string& hz, bool required) -> std::optional<double> {
        for (const auto& [key, scale] : {std::pair{rad, 1.0}, std::pair{hz, constants::two_pi}}) {
            if (key.empty()) continue;
            const auto it = t.metadata.find(key);
            if (it != t.metadata.end()) return parse_number(it->second, source, t.metadata_lines.at(key)) * scale;
        }
        if (required) throw ValidationError(fmt::format("{}: missing metadata '# {}=...'", source, hz.empty() ? rad : hz));
        return std::nullopt;
    };
    NoiseTrace n;
    n.band.bandwidth = *meta("bandwidth_hz", "", true);
    n.band.signal_frequency = *meta("signal_frequency_rad_s", "signal_frequency_hz", true);
    n.pump1_frequency = meta("pump1_frequency_rad_s", "pump1_frequency_hz", false);
    n.pump2_frequency = meta("pump2_frequency_rad_s", "pump2_frequency_hz", false);
    if (const auto wi = meta("idler_frequency_rad_s", "idler_frequency_hz", false)) {
        n.band.idler_frequency = *wi;
    } else if (n.pump1_frequency && n.pump2_frequency) {
        n.band.idler_frequency = idler_frequency(*n.pump1_frequency, *n.pump2_frequency, n.band.signal_frequency);
    } else {
        throw ValidationError(fmt::format("{}: need idler frequency or both pump frequencies in metadata", source));
    }
    const auto ct = column(t, {"temperature_k", "temperature"}, source);
    const auto cp = column(t, {"psd_quanta", "psd"}, source);
    const auto cs = column(t, {"sigma"}, source, false);
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        n.temperature.push_back(t.rows[k][ct]);
        n.psd.push_back(t.rows[k][cp]);
        if (!(t.rows[k][ct] > 0.0)) fail_at(source, t.row_lines[k], "temperature must be positive");
        if (cs != static_cast<std::size_t>(-1)) {
            if (!(t.rows[k][cs] > 0.0)) fail_at(source, t.row_lines[k], "sigma must be positive");
            n.sigma.push_back(t.rows[k][cs]);
        }
    }
    check_increasing(n.temperature, t.row_lines, source, "temperature");
    try {
        validate(n);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", source, e.what()));
    }
    return n;
}

NoiseTrace read_noise_trace(const std::string& path) { return parse_noise_csv(read_text_file(path), path); }

std::string format_noise_csv(const NoiseTrace& n) {
    std::string out;
    out += fmt::format("# bandwidth_hz={}\n", number(n.band.bandwidth));
    out += fmt::format("# signal_frequency_rad_s={}\n", number(n.band.signal_frequency));
    out += fmt::format("# idler_frequency_rad_s={}\n", number(n.band.idler_frequency));
    if (n.pump1_frequency) out += fmt::format("# pump1_frequency_rad_s={}\n", number(*n.pump1_frequency));
    if (n.pump2_frequency) out += fmt::format("# pump2_frequency_rad_s={}\n", number(*n.pump2_frequency));
    const bool sig = !n.sigma.empty();
    out += sig ? "temperature_k,psd_quanta,sigma\n" : "temperature_k,psd_quanta\n";
    for (std::size_t k = 0; k < n.temperature.size(); ++k) {
        out += fmt::format("{},{}", number(n.temperature[k]), number(n.psd[k]));
        out += sig ? fmt::format(",{}\n", number(n.sigma[k])) : "\n";
    }
    return out;
}

std::vector<FieldMeasurement> parse_field_sweep_csv(std::string_view text, const std::string& source) {
    const auto t = parse_csv(text, source);
    const auto cb = column(t, {"field_t", "field"}, source);
    const auto cp = column(t, {"psd_quanta", "psd"}, source);
    const auto cs = column(t, {"sigma"}, source, false);
    std::vector<FieldMeasurement> out;
    std::vector<double> axis;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        FieldMeasurement m;
        m.field = t.rows[k][cb];
        m.psd = t.rows[k][cp];
        if (cs != static_cast<std::size_t>(-1)) {
            if (t.rows[k][cs] < 0.0) fail_at(source, t.row_lines[k], "sigma must be non-negative");
            m.sigma = t.rows[k][cs];
        }
        axis.push_back(m.field);
        out.push_back(m);
    }
    check_increasing(axis, t.row_lines, source, "field");
    if (out.empty()) throw ValidationError(fmt::format("{}: no data rows", source));
    return out;
}

std::vector<FieldMeasurement> read_field_sweep(const std::string& path) {
    return parse_field_sweep_csv(read_text_file(path), path);
}

std::string format_field_sweep_csv(const std::vector<FieldMeasurement>& sweep) {
    std::string out = "field_t,psd_quanta,sigma\n";
    for (const auto& m : sweep) out += fmt::format("{},{},{}\n", number(m.field), number(m.psd), number(m.sigma));
    return out;
}

std::string format_gain_spectrum_csv(const GainSpectrum& s, double center) {
    std::string out = "frequency_hz,detuning_hz,gain_db,signal_re,signal_im,idler_re,idler_im\n";
    for (std::size_t k = 0; k < s.frequency.size(); ++k) {
        out += fmt::format("{},{},{},{},{},{},{}\n", number(s.frequency[k] / constants::two_pi),
                           number((s.frequency[k] - center) / constants::two_pi), number(s.power_gain_db[k]),
                           number(s.signal[k].real()), number(s.signal[k].imag()), number(s.idler[k].real()),
                           number(s.idler[k].imag()));
    }
    return out;
}

std::string format_phase_sweep_csv(const PhaseSweep& s) {
    std::string out = "relative_phase_rad,gain_db,response_re,response_im\n";
    for (std::size_t k = 0; k < s.relative_phase.size(); ++k) {
        out += fmt::format("{},{},{},{}\n", number(s.relative_phase[k]), number(s.gain_db[k]),
                           number(s.response[k].real()), number(s.response[k].imag()));
    }
    return out;
}

// --- calibration results -----------------------------------------------------

json to_json(const CalibrationRecord& r) {
    json j;
    j["schema"] = "nkpa-calibration";
    j["schema_version"] = CalibrationRecord::schema_version;
    j["input_checksums"] = r.input_checksums;
    if (r.reflection) {
        j["reflection"] = {{"resonant_frequency_rad_s", estimate_json(r.reflection->resonant_frequency)},
                           {"external_coupling_rate_rad_s", estimate_json(r.reflection->external_coupling_rate)},
                           {"intrinsic_loss_rate_rad_s", estimate_json(r.reflection->intrinsic_loss_rate)},
                           {"diagnostics", diagnostics_json(r.reflection->diagnostics)}};
    }
    if (r.noise) {
        j["noise"] = {{"system_gain", estimate_json(r.noise->system_gain)},
                      {"added_noise_quanta", estimate_json(r.noise->added_noise)},
                      {"output_noise_at_zero_quanta", estimate_json(r.noise->output_noise_at_zero)},
                      {"diagnostics", diagnostics_json(r.noise->diagnostics)}};
    }
    if (r.noise_band) {
        j["noise_band"] = {{"bandwidth_hz", r.noise_band->bandwidth},
                           {"signal_frequency_rad_s", r.noise_band->signal_frequency},
                           {"idler_frequency_rad_s", r.noise_band->idler_frequency}};
    }
    if (r.chain) {
        const auto& in = r.chain->inputs;
        json c{{"inputs",
                {{"measured_added_noise", estimate_json(in.measured_added_noise)},
                 {"amplifier_gain", estimate_json(in.amplifier_gain)},
                 {"chain_noise", estimate_json(in.chain_noise)},
                 {"transmission", estimate_json(in.transmission)}}},
               {"amplifier_added_noise", estimate_json(r.chain->amplifier_added_noise)}};
        if (r.chain->band) c["band"] = {{"low", r.chain->band->low}, {"high", r.chain->band->high}};
        j["chain"] = c;
    }
    if (!r.field_sweep.empty()) {
        json arr = json::array();
        for (const auto& p : r.field_sweep) {
            arr.push_back({{"field_t", p.field}, {"added_noise_quanta", estimate_json(p.added_noise)}});
        }
        j["field_sweep"] = arr;
    }
    return j;
}

CalibrationRecord record_from_json(const json& j) {
    if (!j.is_object() || j.value("schema", "") != "nkpa-calibration") {
        throw ValidationError("not a calibration record (schema tag missing)");
    }
    if (j.value("schema_version", 0) != CalibrationRecord::schema_version) {
        throw ValidationError("unsupported calibration record schema_version");
    }
    CalibrationRecord r;
    try {
        r.input_checksums = j.at("input_checksums").get<std::map<std::string, std::string>>();
        if (const auto it = j.find("reflection"); it != j.end()) {
            ReflectionFit f;
            f.resonant_frequency = estimate_from(it->at("resonant_frequency_rad_s"), "reflection.resonant_frequency_rad_s");
            f.external_coupling_rate =
                estimate_from(it->at("external_coupling_rate_rad_s"), "reflection.external_coupling_rate_rad_s");
            f.intrinsic_loss_rate =
                estimate_from(it->at("intrinsic_loss_rate_rad_s"), "reflection.intrinsic_loss_rate_rad_s");
            f.diagnostics = diagnostics_from(it->at("diagnostics"));
            r.reflection = f;
        }
        if (const auto it = j.find("noise"); it != j.end()) {
            NoiseFit f;
            f.system_gain = estimate_from(it->at("system_gain"), "noise.system_gain");
            f.added_noise = estimate_from(it->at("added_noise_quanta"), "noise.added_noise_quanta");
            f.output_noise_at_zero =
                estimate_from(it->at("output_noise_at_zero_quanta"), "noise.output_noise_at_zero_quanta");
            f.diagnostics = diagnostics_from(it->at("diagnostics"));
            r.noise = f;
        }
        if (const auto it = j.find("noise_band"); it != j.end()) {
            r.noise_band = NoiseBand{it->at("bandwidth_hz").get<double>(), it->at("signal_frequency_rad_s").get<double>(),
                                     it->at("idler_frequency_rad_s").get<double>()};
        }
        if (const auto it = j.find("chain"); it != j.end()) {
            ChainNoiseResult c;
            const auto& in = it->at("inputs");
            c.inputs.measured_added_noise = estimate_from(in.at("measured_added_noise"), "chain.inputs.measured_added_noise");
            c.inputs.amplifier_gain = estimate_from(in.at("amplifier_gain"), "chain.inputs.amplifier_gain");
            c.inputs.chain_noise = estimate_from(in.at("chain_noise"), "chain.inputs.chain_noise");
            c.inputs.transmission = estimate_from(in.at("transmission"), "chain.inputs.transmission");
            c.amplifier_added_noise = estimate_from(it->at("amplifier_added_noise"), "chain.amplifier_added_noise");
            if (const auto b = it->find("band"); b != it->end()) {
                c.band = NoiseBandRange{b->at("low").get<double>(), b->at("high").get<double>()};
            }
            r.chain = c;
        }
        if (const auto it = j.find("field_sweep"); it != j.end()) {
            for (const auto& p : *it) {
                r.field_sweep.push_back(
                    {p.at("field_t").get<double>(), estimate_from(p.at("added_noise_quanta"), "field_sweep[]")});
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(fmt::format("malformed calibration record: {}", e.what()));
    }
    return r;
}

std::string format_results(const CalibrationRecord& record) { return canonical_dump(to_json(record)); }

void write_results(const CalibrationRecord& record, const std::string& path) {
    write_text_file(path, format_results(record));
}

CalibrationRecord read_results(const std::string& path) {
    const auto doc = parse_json_text(read_text_file(path), path);
    try {
        return record_from_json(doc);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path, e.what()));
    }
}

void record_input(CalibrationRecord& record, const std::string& path) {
    record.input_checksums[path] = sha256_file(path);
}

std::vector<std::string> verify_checksums(const CalibrationRecord& record) {
    std::vector<std::string> bad;
    for (const auto& [path, digest] : record.input_checksums) {
        try {
            if (sha256_file(path) != digest) bad.push_back(path);
        } catch (const IoError&) {
            bad.push_back(path);
        }
    }
    return bad;
}

}  // namespace nkpa::io
