// nkpa: command-line front end over the C API.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "nkpa/nkpa.h"

namespace {

using json = nlohmann::json;
constexpr double two_pi = 6.283185307179586476925286766559;

/// Carries a C API status out to main() for the exit-code contract.
struct Failure {
    nkpa_status status;
    std::string message;
};

void check(nkpa_status s) {
    if (s != NKPA_OK) throw Failure{s, nkpa_last_error()};
}

int exit_code(nkpa_status s) {
    switch (s) {
        case NKPA_OK: return 0;
        case NKPA_ERR_INVALID_ARGUMENT:
        case NKPA_ERR_VALIDATION:
        case NKPA_ERR_DEPENDENCY: return 2;
        case NKPA_ERR_SOLVER:
        case NKPA_ERR_PUMP_UNSTABLE:
        case NKPA_ERR_DIVERGENT_GAIN:
        case NKPA_ERR_NO_SOLUTION: return 3;
        case NKPA_ERR_IO: return 4;
        case NKPA_ERR_INTERNAL: return 1;
    }
    return 1;
}

template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
    T** out() { return &p; }
    operator T*() const { return p; }
};

using Device = Handle<nkpa_device, nkpa_device_free>;
using Circuit = Handle<nkpa_circuit, nkpa_circuit_free>;
using Pump = Handle<nkpa_pump, nkpa_pump_free>;
using Spectrum = Handle<nkpa_spectrum, nkpa_spectrum_free>;
using Record = Handle<nkpa_record, nkpa_record_free>;

std::string take_string(char* s) {
    std::string out(s);
    nkpa_string_free(s);
    return out;
}

double quantity(const std::string& text, const char* dimension) {
    double v = 0.0;
    check(nkpa_parse_quantity(text.c_str(), dimension, &v));
    return v;
}

double angular(const std::string& text) { return two_pi * quantity(text, "frequency"); }

/// "start:stop:count" with units on start/stop, or a comma-separated list.
std::vector<double> axis(const std::string& text, const char* dimension) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw Failure{NKPA_ERR_VALIDATION, "range must be start:stop:count"};
        const double a = quantity(parts[0], dimension);
        const double b = quantity(parts[1], dimension);
        const long n = std::stol(parts[2]);
        if (n < 1) throw Failure{NKPA_ERR_VALIDATION, "range count must be positive"};
        for (long k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
        if (n > 1) out.back() = b;
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(quantity(p, dimension));
    return out;
}

std::pair<double, double> pair_of(const std::string& text, const char* dimension) {
    const auto v = axis(text, dimension);
    if (v.size() != 2) throw Failure{NKPA_ERR_VALIDATION, fmt::format("expected two comma-separated values in '{}'", text)};
    return {v[0], v[1]};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw Failure{NKPA_ERR_IO, fmt::format("{}: cannot write", path.string())};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

double mhz(double omega) { return omega / two_pi / 1e6; }
double dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }

json drive_json(const nkpa_drive& d) {
    return json{{"pump1_frequency_hz", d.pump1_frequency / two_pi}, {"pump2_frequency_hz", d.pump2_frequency / two_pi},
                {"pump1_power_w", d.pump1_power},                   {"pump2_power_w", d.pump2_power},
                {"pump1_phase_rad", d.pump1_phase},                 {"pump2_phase_rad", d.pump2_phase}};
}

struct Options {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 1;

    std::string alpha_from = "geometry";

    std::string drive;
    std::optional<double> gain_db;
    std::string pump_power;
    std::string pump_detuning = "133.5MHz";
    double power_ratio = 1.0;
    double power_offset_db = 0.0;
    std::size_t points = 2001;
    std::size_t phase_points = 721;

    std::string trace;
    std::string record;
    std::string f0, kappa_ext, kappa_int;

    std::optional<double> lambda;
    std::optional<double> chain_noise;
    double nkpa_gain_db = 26.0;
    std::string lambda_range;
    std::string chain_noise_range;
    std::string field_sweep;
    std::string base_temperature = "58mK";

    std::string shift;
    double target_gain_db = 26.0;

    std::string kerr;
    std::optional<double> alpha;
    std::string frequency;

    std::string model;
    std::string span;
    double noise = 0.0;
    std::string format = "s1p";
    std::string temperatures = "58mK:608mK:12";
    double system_gain = 1.0e3;
    std::string added_noise = "0.59";
    std::string bandwidth = "1MHz";
    std::string signal_frequency = "7.45GHz";
    std::string idler_frequency;
    std::string fields = "0mT:427mT:15";
};

std::filesystem::path out_path(const Options& o, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec) throw Failure{NKPA_ERR_IO, fmt::format("{}: {}", o.out, ec.message())};
    return std::filesystem::path(o.out) / name;
}

void load_circuit(const Options& o, Device& dev, Circuit& circuit, nkpa_alpha_source src = NKPA_ALPHA_GEOMETRY) {
    if (o.config.empty()) throw Failure{NKPA_ERR_VALIDATION, "--config <device.json> is required"};
    check(nkpa_device_read(o.config.c_str(), dev.out()));
    check(nkpa_circuit_derive(dev, src, circuit.out()));
}

nkpa_drive resolve_drive(const Options& o, const nkpa_circuit* circuit) {
    nkpa_drive d{};
    nkpa_circuit_params c{};
    check(nkpa_circuit_get(circuit, &c));
    if (!o.drive.empty()) {
        check(nkpa_drive_read(o.drive.c_str(), &d));
    } else if (o.gain_db) {
        check(nkpa_tune_drive(circuit, angular(o.pump_detuning), *o.gain_db, o.power_ratio, &d));
    } else if (!o.pump_power.empty()) {
        const double p = quantity(o.pump_power, "power");
        const double half = angular(o.pump_detuning);
        d = {c.resonant_frequency - half, c.resonant_frequency + half, p, p * o.power_ratio, 0.0, 0.0};
    } else {
        throw Failure{NKPA_ERR_VALIDATION, "one of --drive, --gain-db or --pump-power is required"};
    }
    const double scale = std::pow(10.0, o.power_offset_db / 10.0);
    d.pump1_power *= scale;
    d.pump2_power *= scale;
    return d;
}

// --- subcommands -------------------------------------------------------------

void cmd_derive(const Options& o) {
    const auto src = o.alpha_from == "file" ? NKPA_ALPHA_FILE : NKPA_ALPHA_GEOMETRY;
    Device dev;
    if (o.config.empty()) throw Failure{NKPA_ERR_VALIDATION, "--config <device.json> is required"};
    check(nkpa_device_read(o.config.c_str(), dev.out()));
    char* text = nullptr;
    check(nkpa_circuit_report_json(dev, src, &text));
    const std::string report = take_string(text);
    const auto j = json::parse(report);
    const auto& c = j.at("circuit");
    fmt::print("alpha source          : {}\n", j.at("alpha_source").get<std::string>());
    fmt::print("resonant frequency    : {:.6f} GHz\n", c.at("resonant_frequency_hz").get<double>() / 1e9);
    fmt::print("impedance Z_r         : {:.3f} Ohm\n", c.at("impedance_ohm").get<double>());
    fmt::print("participation alpha   : {:.6f}\n", c.at("participation_ratio").get<double>());
    fmt::print("I*                    : {:.6g} A\n", c.at("characteristic_current_a").get<double>());
    fmt::print("I_zpf                 : {:.6g} A\n", c.at("zero_point_current_a").get<double>());
    fmt::print("K / 2pi (closed form) : {:.6f} MHz\n", c.at("kerr_hz").get<double>() / 1e6);
    fmt::print("K / 2pi (zero point)  : {:.6f} MHz\n", j.at("kerr_zero_point_route_hz").get<double>() / 1e6);
    fmt::print("route relative error  : {:.3g}\n", j.at("kerr_route_relative_error").get<double>());
    fmt::print("alpha (geometry)      : {:.6f}\n", j.at("geometry_participation_ratio").get<double>());
    if (!j.at("specified_participation_ratio").is_null()) {
        fmt::print("alpha (file)          : {:.6f}\n", j.at("specified_participation_ratio").get<double>());
    }
    if (!j.at("kerr_at_reported_values_hz").is_null()) {
        fmt::print("K / 2pi at reported   : {:.6f} MHz\n", j.at("kerr_at_reported_values_hz").get<double>() / 1e6);
    }
    for (const auto& n : j.at("notes")) fmt::print("note: {}\n", n.get<std::string>());
    write_file(out_path(o, "derived_circuit.json"), report);
}

void cmd_simulate_gain(const Options& o) {
    Device dev;
    Circuit circuit;
    load_circuit(o, dev, circuit);
    const auto d = resolve_drive(o, circuit);
    Pump pump;
    check(nkpa_pump_solve(circuit, &d, pump.out()));
    Spectrum spec;
    check(nkpa_spectrum_compute(circuit, pump, nullptr, o.points, spec.out()));
    check(nkpa_spectrum_write_csv(spec, out_path(o, "gain_spectrum.csv").c_str()));
    double peak = -INFINITY, peak_f = 0.0;
    for (std::size_t k = 0; k < nkpa_spectrum_size(spec); ++k) {
        nkpa_gain_point p{};
        check(nkpa_spectrum_point(spec, k, &p));
        if (p.gain_db > peak) {
            peak = p.gain_db;
            peak_f = p.frequency;
        }
    }
    nkpa_pump_info pi{};
    check(nkpa_pump_get(pump, circuit, &pi));
    double center_db = 0.0;
    check(nkpa_center_gain_db(circuit, pump, &center_db));
    json summary{{"drive", drive_json(d)},
                 {"peak_gain_db", peak},
                 {"peak_frequency_hz", peak_f / two_pi},
                 {"center_gain_db", center_db},
                 {"pump",
                  {{"photons_pump1", pi.photons_pump1},
                   {"photons_pump2", pi.photons_pump2},
                   {"cross_kerr_shift_hz", pi.cross_kerr_shift / two_pi},
                   {"parametric_strength_hz", std::hypot(pi.parametric_strength_re, pi.parametric_strength_im) / two_pi},
                   {"threshold_hz", pi.threshold / two_pi},
                   {"effective_detuning_hz", pi.effective_detuning / two_pi}}}};
    if (center_db > 0.5) {
        nkpa_bandwidth_info bw{};
        check(nkpa_bandwidth(circuit, pump, &bw));
        double nadd = 0.0;
        check(nkpa_ideal_added_noise(circuit, pump, pi.center_frequency, &nadd));
        nkpa_compression_info cp{};
        check(nkpa_compression(circuit, pump, &cp));
        summary["bandwidth_3db_hz"] = (bw.upper - bw.lower) / two_pi;
        summary["gain_bandwidth_hz"] = std::sqrt(bw.peak_gain) * (bw.upper - bw.lower) / two_pi;
        summary["added_noise_quanta"] = nadd;
        summary["input_1db_compression_dbm"] = dbm(cp.input_power_1db);
        fmt::print("3 dB bandwidth        : {:.4f} MHz\n", (bw.upper - bw.lower) / two_pi / 1e6);
        fmt::print("added noise           : {:.6f} quanta\n", nadd);
        fmt::print("1 dB compression      : {:.2f} dBm\n", dbm(cp.input_power_1db));
    }
    write_file(out_path(o, "gain_summary.json"), dump(summary));
    check(nkpa_drive_write(&d, out_path(o, "drive.json").c_str()));
    fmt::print("pump power            : {:.3f} dBm + {:.3f} dBm\n", dbm(d.pump1_power), dbm(d.pump2_power));
    fmt::print("peak gain             : {:.4f} dB at {:.6f} GHz\n", peak, peak_f / two_pi / 1e9);
}

void cmd_simulate_ps(const Options& o) {
    Device dev;
    Circuit circuit;
    load_circuit(o, dev, circuit);
    const auto d = resolve_drive(o, circuit);
    Pump pump;
    check(nkpa_pump_solve(circuit, &d, pump.out()));
    const std::size_t n = std::max<std::size_t>(o.phase_points, 2);
    std::vector<double> phases(n), gain(n);
    for (std::size_t k = 0; k < n; ++k) phases[k] = -M_PI + two_pi * static_cast<double>(k) / static_cast<double>(n - 1);
    check(nkpa_phase_sweep(circuit, pump, phases.data(), n, gain.data(), out_path(o, "phase_sweep.csv").c_str()));
    const auto [mn, mx] = std::minmax_element(gain.begin(), gain.end());
    json summary{{"drive", drive_json(d)},
                 {"max_gain_db", *mx},
                 {"min_gain_db", *mn},
                 {"max_phase_rad", phases[static_cast<std::size_t>(mx - gain.begin())]},
                 {"min_phase_rad", phases[static_cast<std::size_t>(mn - gain.begin())]},
                 {"gain_product_db", *mx + *mn}};
    write_file(out_path(o, "phase_summary.json"), dump(summary));
    fmt::print("max gain              : {:.4f} dB\n", *mx);
    fmt::print("min gain              : {:.4f} dB\n", *mn);
    fmt::print("G_max * G_min         : {:.6f} dB\n", *mx + *mn);
}

void open_record(const Options& o, Record& rec) {
    if (o.record.empty()) {
        check(nkpa_record_new(rec.out()));
    } else {
        check(nkpa_record_read(o.record.c_str(), rec.out()));
    }
}

void cmd_fit_s11(const Options& o) {
    if (o.trace.empty()) throw Failure{NKPA_ERR_VALIDATION, "--trace <file> is required"};
    Record rec;
    open_record(o, rec);
    std::optional<nkpa_reflection_guess> guess;
    if (!o.f0.empty() || !o.kappa_ext.empty() || !o.kappa_int.empty()) {
        if (o.f0.empty() || o.kappa_ext.empty() || o.kappa_int.empty()) {
            throw Failure{NKPA_ERR_VALIDATION, "--f0, --kappa-ext and --kappa-int must be given together"};
        }
        guess = nkpa_reflection_guess{angular(o.f0), angular(o.kappa_ext), angular(o.kappa_int)};
    }
    nkpa_reflection_result r{};
    check(nkpa_fit_reflection_file(o.trace.c_str(), guess ? &*guess : nullptr, rec, &r));
    check(nkpa_record_write(rec, out_path(o, "calibration.json").c_str()));
    fmt::print("f0                    : {:.9f} +/- {:.3g} GHz\n", r.resonant_frequency.value / two_pi / 1e9,
               r.resonant_frequency.sigma / two_pi / 1e9);
    fmt::print("kappa_ext / 2pi       : {:.6f} +/- {:.3g} MHz\n", mhz(r.external_coupling_rate.value),
               mhz(r.external_coupling_rate.sigma));
    fmt::print("kappa_int / 2pi       : {:.6f} +/- {:.3g} MHz\n", mhz(r.intrinsic_loss_rate.value),
               mhz(r.intrinsic_loss_rate.sigma));
    fmt::print("relative residual     : {:.3g}\n", r.relative_residual);
    if (r.warnings > 0) {
        char* text = nullptr;
        check(nkpa_record_to_json(rec, &text));
        const auto j = json::parse(take_string(text));
        for (const auto& w : j.at("reflection").at("diagnostics").at("warnings")) {
            fmt::print(stderr, "warning: {}\n", w.get<std::string>());
        }
    }
}

void cmd_fit_noise(const Options& o) {
    Record rec;
    open_record(o, rec);
    std::optional<nkpa_noise_result> noise;
    if (!o.trace.empty()) {
        nkpa_noise_result r{};
        check(nkpa_fit_noise_file(o.trace.c_str(), rec, &r));
        noise = r;
        fmt::print("system gain           : {:.6g} +/- {:.3g}\n", r.system_gain.value, r.system_gain.sigma);
        fmt::print("added noise           : {:.4f} +/- {:.4f} quanta\n", r.added_noise.value, r.added_noise.sigma);
        fmt::print("output noise at T=0   : {:.4f} +/- {:.4f} quanta\n", r.output_noise_at_zero.value,
                   r.output_noise_at_zero.sigma);
    }
    if (o.lambda || o.chain_noise) {
        double nadd = 0.0, nadd_sigma = 0.0;
        if (noise) {
            nadd = noise->added_noise.value;
            nadd_sigma = noise->added_noise.sigma;
        } else {
            char* text = nullptr;
            check(nkpa_record_to_json(rec, &text));
            const auto j = json::parse(take_string(text));
            if (!j.contains("noise")) {
                throw Failure{NKPA_ERR_DEPENDENCY, "chain-noise back-out needs a noise fit (--trace or --record)"};
            }
            nadd = j.at("noise").at("added_noise_quanta").at("value").get<double>();
            nadd_sigma = j.at("noise").at("added_noise_quanta").at("sigma").get<double>();
        }
        nkpa_chain_inputs in{};
        in.measured_added_noise = {nadd, nadd_sigma};
        in.amplifier_gain = {std::pow(10.0, o.nkpa_gain_db / 10.0), 0.0};
        in.chain_noise = {o.chain_noise.value_or(0.0), 0.0};
        in.transmission = {o.lambda.value_or(1.0), 0.0};
        if (!o.lambda_range.empty() || !o.chain_noise_range.empty()) {
            in.with_band = 1;
            const auto [l0, l1] = o.lambda_range.empty() ? std::pair{in.transmission.value, in.transmission.value}
                                                          : pair_of(o.lambda_range, "dimensionless");
            const auto [n0, n1] = o.chain_noise_range.empty() ? std::pair{in.chain_noise.value, in.chain_noise.value}
                                                               : pair_of(o.chain_noise_range, "dimensionless");
            in.transmission_low = l0;
            in.transmission_high = l1;
            in.chain_noise_low = n0;
            in.chain_noise_high = n1;
        }
        nkpa_chain_result r{};
        check(nkpa_chain_noise(&in, rec, &r));
        fmt::print("amplifier added noise : {:.4f} +/- {:.4f} quanta\n", r.amplifier_added_noise.value,
                   r.amplifier_added_noise.sigma);
        if (in.with_band) fmt::print("band over grid        : [{:.4f}, {:.4f}] quanta\n", r.band_low, r.band_high);
    }
    if (!o.field_sweep.empty()) {
        std::size_t n = 0;
        check(nkpa_field_sweep_file(o.field_sweep.c_str(), quantity(o.base_temperature, "temperature"), rec, &n));
        fmt::print("field sweep points    : {}\n", n);
    }
    if (o.trace.empty() && !o.lambda && !o.chain_noise && o.field_sweep.empty()) {
        throw Failure{NKPA_ERR_VALIDATION, "nothing to do: give --trace, --lambda/--chain-noise or --field-sweep"};
    }
    check(nkpa_record_write(rec, out_path(o, "calibration.json").c_str()));
}

void cmd_compensate(const Options& o) {
    Device dev;
    Circuit circuit;
    load_circuit(o, dev, circuit);
    const auto d = resolve_drive(o, circuit);
    if (o.shift.empty()) throw Failure{NKPA_ERR_VALIDATION, "--shift <frequency> is required"};
    nkpa_circuit_params c{};
    check(nkpa_circuit_get(circuit, &c));
    const double shifted = c.resonant_frequency + angular(o.shift);
    nkpa_retune_info r{};
    check(nkpa_retune(circuit, &d, shifted, o.target_gain_db, &r, nullptr));
    check(nkpa_drive_write(&r.drive, out_path(o, "retuned_drive.json").c_str()));
    json summary{{"original_drive", drive_json(d)},
                 {"retuned_drive", drive_json(r.drive)},
                 {"resonance_shift_hz", (shifted - c.resonant_frequency) / two_pi},
                 {"power_adjustment_db", r.power_adjustment_db},
                 {"achieved_gain_db", r.achieved_gain_db}};
    write_file(out_path(o, "compensation.json"), dump(summary));
    fmt::print("resonance shift       : {:.4f} MHz\n", (shifted - c.resonant_frequency) / two_pi / 1e6);
    fmt::print("pump frequencies      : {:.6f} / {:.6f} GHz\n", r.drive.pump1_frequency / two_pi / 1e9,
               r.drive.pump2_frequency / two_pi / 1e9);
    fmt::print("power adjustment      : {:+.4f} dB\n", r.power_adjustment_db);
    fmt::print("restored gain         : {:.4f} dB\n", r.achieved_gain_db);
}

void cmd_design(const Options& o) {
    Device dev;
    if (o.config.empty()) throw Failure{NKPA_ERR_VALIDATION, "--config <device.json> is required"};
    check(nkpa_device_read(o.config.c_str(), dev.out()));
    Circuit circuit;
    check(nkpa_circuit_derive(dev, NKPA_ALPHA_GEOMETRY, circuit.out()));
    nkpa_circuit_params c{};
    check(nkpa_circuit_get(circuit, &c));
    const double alpha = o.alpha.value_or(c.participation_ratio);
    const double omega = o.frequency.empty() ? c.resonant_frequency : angular(o.frequency);
    double lo = 0.0, hi = 0.0;
    check(nkpa_design_kerr_range(dev, alpha, omega, &lo, &hi));
    fmt::print("achievable K / 2pi    : {:.6g} Hz .. {:.6g} Hz ({:.2f} decades)\n", lo / two_pi, hi / two_pi,
               std::log10(hi / lo));
    json result{{"participation_ratio", alpha},
                {"resonant_frequency_hz", omega / two_pi},
                {"kerr_range_hz", {lo / two_pi, hi / two_pi}}};
    if (!o.kerr.empty()) {
        char* text = nullptr;
        check(nkpa_design_bridge(dev, alpha, omega, angular(o.kerr), &text));
        const auto d = json::parse(take_string(text));
        result["design"] = d;
        fmt::print("bridge width          : {:.4f} nm\n", d.at("width_m").get<double>() * 1e9);
        fmt::print("bridge length         : {:.4f} nm\n", d.at("length_m").get<double>() * 1e9);
        fmt::print("shunt capacitance     : {:.4f} fF\n", d.at("shunt_capacitance_f").get<double>() * 1e15);
    }
    write_file(out_path(o, "design.json"), dump(result));
}

void cmd_synth(const Options& o) {
    if (o.model == "reflection") {
        const double w0 = angular(o.f0.empty() ? "7.45GHz" : o.f0);
        const double ke = angular(o.kappa_ext.empty() ? "57.0375MHz" : o.kappa_ext);
        const double ki = angular(o.kappa_int.empty() ? "1.8625MHz" : o.kappa_int);
        const double span = o.span.empty() ? 5.0 * (ke + ki) : angular(o.span);
        const auto path = out_path(o, o.format == "csv" ? "reflection.csv" : "reflection.s1p");
        check(nkpa_synth_reflection(w0, ke, ki, span, o.points, o.noise, o.seed, path.c_str()));
        fmt::print("wrote {}\n", path.string());
    } else if (o.model == "noise") {
        const auto temps = axis(o.temperatures, "temperature");
        const double ws = angular(o.signal_frequency);
        const double wi = o.idler_frequency.empty() ? ws : angular(o.idler_frequency);
        const auto path = out_path(o, "noise.csv");
        check(nkpa_synth_noise(temps.data(), temps.size(), o.system_gain, quantity(o.added_noise, "dimensionless"),
                               quantity(o.bandwidth, "frequency"), ws, wi, o.noise, o.seed, path.c_str()));
        fmt::print("wrote {}\n", path.string());
    } else if (o.model == "field-sweep") {
        const auto fields = axis(o.fields, "field");
        auto nadd = axis(o.added_noise, "dimensionless");
        if (nadd.size() == 1) nadd.assign(fields.size(), nadd.front());
        if (nadd.size() != fields.size()) {
            throw Failure{NKPA_ERR_VALIDATION, "--added-noise must give one value or one per field point"};
        }
        const double ws = angular(o.signal_frequency);
        const double wi = o.idler_frequency.empty() ? ws : angular(o.idler_frequency);
        const auto path = out_path(o, "field_sweep.csv");
        check(nkpa_synth_field_sweep(fields.data(), nadd.data(), fields.size(), o.system_gain,
                                     quantity(o.bandwidth, "frequency"), ws, wi,
                                     quantity(o.base_temperature, "temperature"), o.noise, o.seed, path.c_str()));
        fmt::print("wrote {}\n", path.string());
    } else {
        throw Failure{NKPA_ERR_VALIDATION, fmt::format("unknown model '{}' (reflection | noise | field-sweep)", o.model)};
    }
}

void add_drive_options(CLI::App* app, Options& o) {
    app->add_option("--drive", o.drive, "Drive config JSON");
    app->add_option("--gain-db", o.gain_db, "Tune the pump power for this centre gain (dB)");
    app->add_option("--pump-power", o.pump_power, "Per-tone pump power, e.g. -99dBm (pumps centred on f0)");
    app->add_option("--pump-detuning", o.pump_detuning, "Pump offset from the centre, e.g. 133.5MHz");
    app->add_option("--power-ratio", o.power_ratio, "P2 / P1");
    app->add_option("--power-offset-db", o.power_offset_db, "Extra power applied to both tones (dB)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kerr nanobridge parametric amplifier modelling and calibration"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(nkpa_version()));
    Options o;
    app.add_option("--config", o.config, "Device specification JSON");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--seed", o.seed, "Seed for synthetic noise");

    auto* derive = app.add_subcommand("derive", "Derive the lumped circuit and Kerr coefficient");
    derive->add_option("--alpha-from", o.alpha_from, "Participation ratio source")
        ->check(CLI::IsMember({"file", "geometry"}));

    auto* gain = app.add_subcommand("simulate-gain", "Phase-preserving gain spectrum");
    add_drive_options(gain, o);
    gain->add_option("--points", o.points, "Grid points over +/- kappa_tot");

    auto* ps = app.add_subcommand("simulate-ps", "Phase-sensitive (degenerate) gain vs probe phase");
    add_drive_options(ps, o);
    ps->add_option("--phase-points", o.phase_points, "Phase grid points over [-pi, pi]");

    auto* s11 = app.add_subcommand("fit-s11", "Fit a reflection trace");
    s11->add_option("--trace", o.trace, "Touchstone (.s1p) or CSV trace");
    s11->add_option("--record", o.record, "Existing calibration record to extend");
    s11->add_option("--f0", o.f0, "Initial resonance guess, e.g. 7.45GHz");
    s11->add_option("--kappa-ext", o.kappa_ext, "Initial kappa_ext/2pi guess");
    s11->add_option("--kappa-int", o.kappa_int, "Initial kappa_int/2pi guess");

    auto* noise = app.add_subcommand("fit-noise", "Noise thermometry, chain back-out and field sweep");
    noise->add_option("--trace", o.trace, "Thermometry CSV");
    noise->add_option("--record", o.record, "Existing calibration record to extend");
    noise->add_option("--lambda", o.lambda, "Input-line transmission");
    noise->add_option("--chain-noise", o.chain_noise, "Follow-up chain noise N_sys (quanta)");
    noise->add_option("--nkpa-gain-db", o.nkpa_gain_db, "Amplifier gain for the back-out (dB)");
    noise->add_option("--lambda-range", o.lambda_range, "lo,hi");
    noise->add_option("--chain-noise-range", o.chain_noise_range, "lo,hi");
    noise->add_option("--field-sweep", o.field_sweep, "Field-sweep CSV to reduce");
    noise->add_option("--base-temperature", o.base_temperature, "Stage temperature of the field sweep");

    auto* comp = app.add_subcommand("compensate", "Retune the pumps after a resonance shift");
    add_drive_options(comp, o);
    comp->add_option("--shift", o.shift, "Resonance shift, e.g. -26MHz")->required();
    comp->add_option("--target-gain-db", o.target_gain_db, "Gain to restore (dB)");

    auto* design = app.add_subcommand("design", "Bridge geometry for a target Kerr coefficient");
    design->add_option("--kerr", o.kerr, "Target K/2pi, e.g. 100kHz");
    design->add_option("--alpha", o.alpha, "Target participation ratio");
    design->add_option("--frequency", o.frequency, "Target resonance, e.g. 7.45GHz");

    auto* synth = app.add_subcommand("synth", "Synthetic traces for round-trip tests");
    synth->add_option("--model", o.model, "reflection | noise | field-sweep")->required();
    synth->add_option("--noise", o.noise, "Noise level (absolute for S11, relative for noise models)");
    synth->add_option("--f0", o.f0, "Resonance");
    synth->add_option("--kappa-ext", o.kappa_ext, "kappa_ext/2pi");
    synth->add_option("--kappa-int", o.kappa_int, "kappa_int/2pi");
    synth->add_option("--span", o.span, "Frequency span (cyclic)");
    synth->add_option("--points", o.points, "Trace points");
    synth->add_option("--format", o.format, "s1p | csv")->check(CLI::IsMember({"s1p", "csv"}));
    synth->add_option("--temperatures", o.temperatures, "start:stop:count or list");
    synth->add_option("--system-gain", o.system_gain, "Linear system gain");
    synth->add_option("--added-noise", o.added_noise, "Added noise (quanta), one value or a list");
    synth->add_option("--bandwidth", o.bandwidth, "Detection bandwidth");
    synth->add_option("--signal-frequency", o.signal_frequency, "Signal frequency");
    synth->add_option("--idler-frequency", o.idler_frequency, "Idler frequency (default: signal)");
    synth->add_option("--fields", o.fields, "start:stop:count or list, e.g. 0mT:427mT:15");
    synth->add_option("--base-temperature", o.base_temperature, "Stage temperature");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (derive->parsed()) cmd_derive(o);
        else if (gain->parsed()) cmd_simulate_gain(o);
        else if (ps->parsed()) cmd_simulate_ps(o);
        else if (s11->parsed()) cmd_fit_s11(o);
        else if (noise->parsed()) cmd_fit_noise(o);
        else if (comp->parsed()) cmd_compensate(o);
        else if (design->parsed()) cmd_design(o);
        else if (synth->parsed()) cmd_synth(o);
    } catch (const Failure& f) {
        fmt::print(stderr, "error ({}): {}\n", nkpa_status_name(f.status), f.message);
        return exit_code(f.status);
    } catch (const json::exception& e) {
        fmt::print(stderr, "error (internal): {}\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error (validation): {}\n", e.what());
        return 2;
    }
    return 0;
}
