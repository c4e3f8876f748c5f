#include "nkpa/nkpa.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <new>
#include <string>

#include "nkpa/amplifier.hpp"
#include "nkpa/calibration.hpp"
#include "nkpa/circuit_model.hpp"
#include "nkpa/constants.hpp"
#include "nkpa/io.hpp"
#include "nkpa/synth.hpp"
#include "nkpa/units.hpp"

struct nkpa_device {
    nkpa::DeviceSpec spec;
};

struct nkpa_circuit {
    nkpa::DerivedCircuit circuit;
};

struct nkpa_pump {
    nkpa::PumpState state;
};

struct nkpa_spectrum {
    nkpa::GainSpectrum spectrum;
    double center = 0.0;
};

struct nkpa_record {
    nkpa::CalibrationRecord record;
};

namespace {

thread_local std::string last_error;

nkpa_status fail(nkpa_status s, const char* what) {
    last_error = what;
    return s;
}

template <class F>
nkpa_status guard(F&& f) {
    try {
        last_error.clear();
        f();
        return NKPA_OK;
    } catch (const nkpa::PumpUnstableError& e) {
        return fail(NKPA_ERR_PUMP_UNSTABLE, e.what());
    } catch (const nkpa::DivergentGainError& e) {
        return fail(NKPA_ERR_DIVERGENT_GAIN, e.what());
    } catch (const nkpa::NoSolutionError& e) {
        return fail(NKPA_ERR_NO_SOLUTION, e.what());
    } catch (const nkpa::Error& e) {
        switch (e.kind()) {
            case nkpa::ErrorKind::Validation: return fail(NKPA_ERR_VALIDATION, e.what());
            case nkpa::ErrorKind::Solver: return fail(NKPA_ERR_SOLVER, e.what());
            case nkpa::ErrorKind::Io: return fail(NKPA_ERR_IO, e.what());
            case nkpa::ErrorKind::Dependency: return fail(NKPA_ERR_DEPENDENCY, e.what());
        }
        return fail(NKPA_ERR_INTERNAL, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(NKPA_ERR_VALIDATION, e.what());
    } catch (const std::bad_alloc&) {
        return fail(NKPA_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(NKPA_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(NKPA_ERR_INTERNAL, "unknown exception");
    }
}

#define NKPA_REQUIRE(cond)                                                                   \
    do {                                                                                     \
        if (!(cond)) return fail(NKPA_ERR_INVALID_ARGUMENT, "invalid argument: " #cond);     \
    } while (0)

char* dup_string(const std::string& s) {
    auto* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

nkpa::DriveConfig from_c(const nkpa_drive& d) {
    nkpa::DriveConfig c;
    c.pump1_frequency = d.pump1_frequency;
    c.pump2_frequency = d.pump2_frequency;
    c.pump1_power = d.pump1_power;
    c.pump2_power = d.pump2_power;
    c.pump1_phase = d.pump1_phase;
    c.pump2_phase = d.pump2_phase;
    return c;
}

nkpa_drive to_c(const nkpa::DriveConfig& c) {
    return {c.pump1_frequency, c.pump2_frequency, c.pump1_power, c.pump2_power, c.pump1_phase, c.pump2_phase};
}

nkpa_estimate to_c(const nkpa::Estimate& e) { return {e.value, e.sigma}; }
nkpa::Estimate from_c(const nkpa_estimate& e) { return {e.value, e.sigma}; }

nkpa::DesignConstraints constraints_for(const nkpa::DeviceSpec& spec, double alpha, double omega) {
    nkpa::DesignConstraints c;
    c.film = spec.film;
    c.parasitic_inductance = spec.circuit.parasitic_inductance;
    c.resonant_frequency = omega;
    c.participation_ratio = alpha;
    c.external_coupling_rate = spec.circuit.external_coupling_rate;
    c.intrinsic_loss_rate = spec.circuit.intrinsic_loss_rate;
    return c;
}

}  // namespace

extern "C" {

const char* nkpa_version(void) { return "0.1.0"; }

const char* nkpa_status_name(nkpa_status s) {
    switch (s) {
        case NKPA_OK: return "ok";
        case NKPA_ERR_INVALID_ARGUMENT: return "invalid-argument";
        case NKPA_ERR_VALIDATION: return "validation";
        case NKPA_ERR_SOLVER: return "solver";
        case NKPA_ERR_PUMP_UNSTABLE: return "pump-unstable";
        case NKPA_ERR_DIVERGENT_GAIN: return "divergent-gain";
        case NKPA_ERR_NO_SOLUTION: return "no-solution";
        case NKPA_ERR_IO: return "io";
        case NKPA_ERR_DEPENDENCY: return "dependency";
        case NKPA_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* nkpa_last_error(void) { return last_error.c_str(); }

void nkpa_string_free(char* s) { std::free(s); }

nkpa_status nkpa_parse_quantity(const char* text, const char* dimension, double* out) {
    NKPA_REQUIRE(text && dimension && out);
    return guard([&] {
        using nkpa::units::Dimension;
        static const std::map<std::string, Dimension> dims{
            {"frequency", Dimension::Frequency},     {"power", Dimension::Power},
            {"temperature", Dimension::Temperature}, {"field", Dimension::MagneticField},
            {"length", Dimension::Length},           {"inductance", Dimension::Inductance},
            {"current", Dimension::Current},         {"dimensionless", Dimension::Dimensionless}};
        const auto d = dims.find(dimension);
        if (d == dims.end()) throw nkpa::ValidationError(std::string("unknown dimension '") + dimension + "'");
        const std::string s(text);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw nkpa::ValidationError("cannot parse quantity '" + s + "'");
        }
        auto unit = s.substr(used);
        unit.erase(0, unit.find_first_not_of(' '));
        unit.erase(unit.find_last_not_of(' ') + 1);
        *out = unit.empty() ? v : nkpa::units::to_si(v, unit, d->second, s);
        if (!std::isfinite(*out)) throw nkpa::ValidationError("non-finite quantity '" + s + "'");
    });
}

// --- circuit model -----------------------------------------------------------

nkpa_status nkpa_device_read(const char* path, nkpa_device** out) {
    NKPA_REQUIRE(path && out);
    return guard([&] { *out = new nkpa_device{nkpa::io::read_device_spec(path)}; });
}

nkpa_status nkpa_device_parse(const char* json_text, nkpa_device** out) {
    NKPA_REQUIRE(json_text && out);
    return guard([&] {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::parse_error& e) {
            throw nkpa::ValidationError(std::string("invalid JSON: ") + e.what());
        }
        *out = new nkpa_device{nkpa::io::parse_device_spec(doc)};
    });
}

void nkpa_device_free(nkpa_device* device) { delete device; }

nkpa_status nkpa_circuit_derive(const nkpa_device* device, nkpa_alpha_source source, nkpa_circuit** out) {
    NKPA_REQUIRE(device && out);
    return guard([&] {
        const auto src = source == NKPA_ALPHA_FILE ? nkpa::AlphaSource::Specified : nkpa::AlphaSource::Geometry;
        *out = new nkpa_circuit{nkpa::derive_circuit(device->spec, src)};
    });
}

nkpa_status nkpa_circuit_get(const nkpa_circuit* circuit, nkpa_circuit_params* out) {
    NKPA_REQUIRE(circuit && out);
    const auto& c = circuit->circuit;
    *out = {c.bridge_inductance,  c.total_inductance,     c.participation_ratio,
            c.impedance,          c.resonant_frequency,   c.zero_point_current,
            c.characteristic_current, c.kerr,             c.external_coupling_rate,
            c.intrinsic_loss_rate};
    return NKPA_OK;
}

void nkpa_circuit_free(nkpa_circuit* circuit) { delete circuit; }

nkpa_status nkpa_circuit_report_json(const nkpa_device* device, nkpa_alpha_source source, char** out_json) {
    NKPA_REQUIRE(device && out_json);
    return guard([&] {
        const auto src = source == NKPA_ALPHA_FILE ? nkpa::AlphaSource::Specified : nkpa::AlphaSource::Geometry;
        *out_json = dup_string(nkpa::io::canonical_dump(nkpa::io::to_json(nkpa::describe_circuit(device->spec, src))));
    });
}

nkpa_status nkpa_kerr_coefficient(double omega, double alpha, double impedance, double i_star, double* out) {
    NKPA_REQUIRE(out);
    return guard([&] { *out = nkpa::kerr_coefficient(omega, alpha, impedance, i_star); });
}

nkpa_status nkpa_design_kerr_range(const nkpa_device* device, double participation_ratio, double resonant_frequency,
                                   double* low, double* high) {
    NKPA_REQUIRE(device && low && high);
    return guard([&] {
        const auto [lo, hi] =
            nkpa::achievable_kerr_range(constraints_for(device->spec, participation_ratio, resonant_frequency));
        *low = lo;
        *high = hi;
    });
}

nkpa_status nkpa_design_bridge(const nkpa_device* device, double participation_ratio, double resonant_frequency,
                               double target_kerr, char** out_json) {
    NKPA_REQUIRE(device && out_json);
    return guard([&] {
        const auto d = nkpa::design_bridge_for_kerr(
            target_kerr, constraints_for(device->spec, participation_ratio, resonant_frequency));
        *out_json = dup_string(nkpa::io::canonical_dump(nkpa::io::to_json(d)));
    });
}

// --- amplifier dynamics ------------------------------------------------------

nkpa_status nkpa_drive_read(const char* path, nkpa_drive* out) {
    NKPA_REQUIRE(path && out);
    return guard([&] { *out = to_c(nkpa::io::read_drive(path)); });
}

nkpa_status nkpa_drive_write(const nkpa_drive* drive, const char* path) {
    NKPA_REQUIRE(drive && path);
    return guard([&] {
        const auto d = from_c(*drive);
        nkpa::validate(d);
        nkpa::io::write_text_file(path, nkpa::io::canonical_dump(nkpa::io::to_json(d)));
    });
}

nkpa_status nkpa_tune_drive(const nkpa_circuit* circuit, double pump_half_separation, double target_gain_db,
                            double power_ratio, nkpa_drive* out) {
    NKPA_REQUIRE(circuit && out);
    return guard([&] {
        nkpa::TuneOptions o;
        o.power_ratio = power_ratio;
        *out = to_c(nkpa::tune_drive_for_gain(circuit->circuit, pump_half_separation, target_gain_db, o));
    });
}

nkpa_status nkpa_pump_solve(const nkpa_circuit* circuit, const nkpa_drive* drive, nkpa_pump** out) {
    NKPA_REQUIRE(circuit && drive && out);
    return guard([&] { *out = new nkpa_pump{nkpa::pump_steady_state(circuit->circuit, from_c(*drive))}; });
}

nkpa_status nkpa_pump_get(const nkpa_pump* pump, const nkpa_circuit* circuit, nkpa_pump_info* out) {
    NKPA_REQUIRE(pump && circuit && out);
    const auto& s = pump->state;
    *out = {std::norm(s.amplitude_b),
            std::norm(s.amplitude_c),
            s.cross_kerr_shift,
            s.parametric_strength.real(),
            s.parametric_strength.imag(),
            s.effective_detuning,
            s.center_frequency,
            s.threshold(circuit->circuit.total_decay_rate())};
    return NKPA_OK;
}

void nkpa_pump_free(nkpa_pump* pump) { delete pump; }

nkpa_status nkpa_spectrum_compute(const nkpa_circuit* circuit, const nkpa_pump* pump, const double* grid, size_t n,
                                  nkpa_spectrum** out) {
    NKPA_REQUIRE(circuit && pump && out && n >= 2);
    return guard([&] {
        std::vector<double> g = grid ? std::vector<double>(grid, grid + n)
                                     : nkpa::default_grid(circuit->circuit, pump->state, n);
        *out = new nkpa_spectrum{nkpa::gain_spectrum(circuit->circuit, pump->state, g), pump->state.center_frequency};
    });
}

size_t nkpa_spectrum_size(const nkpa_spectrum* spectrum) { return spectrum ? spectrum->spectrum.frequency.size() : 0; }

nkpa_status nkpa_spectrum_point(const nkpa_spectrum* spectrum, size_t index, nkpa_gain_point* out) {
    NKPA_REQUIRE(spectrum && out && index < spectrum->spectrum.frequency.size());
    const auto& s = spectrum->spectrum;
    *out = {s.frequency[index],    s.signal[index].real(), s.signal[index].imag(),
            s.idler[index].real(), s.idler[index].imag(),  s.power_gain_db[index]};
    return NKPA_OK;
}

nkpa_status nkpa_spectrum_write_csv(const nkpa_spectrum* spectrum, const char* path) {
    NKPA_REQUIRE(spectrum && path);
    return guard([&] {
        nkpa::io::write_text_file(path, nkpa::io::format_gain_spectrum_csv(spectrum->spectrum, spectrum->center));
    });
}

void nkpa_spectrum_free(nkpa_spectrum* spectrum) { delete spectrum; }

nkpa_status nkpa_center_gain_db(const nkpa_circuit* circuit, const nkpa_pump* pump, double* out) {
    NKPA_REQUIRE(circuit && pump && out);
    return guard([&] { *out = 10.0 * std::log10(nkpa::center_gain(circuit->circuit, pump->state)); });
}

nkpa_status nkpa_bandwidth(const nkpa_circuit* circuit, const nkpa_pump* pump, nkpa_bandwidth_info* out) {
    NKPA_REQUIRE(circuit && pump && out);
    return guard([&] {
        const auto b = nkpa::three_db_bandwidth(circuit->circuit, pump->state);
        *out = {b.peak_gain, b.lower, b.upper};
    });
}

nkpa_status nkpa_ideal_added_noise(const nkpa_circuit* circuit, const nkpa_pump* pump, double probe_frequency,
                                   double* out) {
    NKPA_REQUIRE(circuit && pump && out);
    return guard([&] { *out = nkpa::ideal_added_noise(circuit->circuit, pump->state, probe_frequency); });
}

nkpa_status nkpa_compression(const nkpa_circuit* circuit, const nkpa_pump* pump, nkpa_compression_info* out) {
    NKPA_REQUIRE(circuit && pump && out);
    return guard([&] {
        const auto c = nkpa::compression_point(circuit->circuit, pump->state);
        *out = {c.input_power_1db, c.small_signal_gain_db, c.gain_at_p1db};
    });
}

nkpa_status nkpa_phase_sweep(const nkpa_circuit* circuit, const nkpa_pump* pump, const double* phases, size_t n,
                             double* gain_db, const char* csv_path) {
    NKPA_REQUIRE(circuit && pump && phases && n > 0);
    return guard([&] {
        const auto s = nkpa::phase_sensitive_gain(circuit->circuit, pump->state, std::span<const double>(phases, n));
        if (gain_db) std::copy(s.gain_db.begin(), s.gain_db.end(), gain_db);
        if (csv_path) nkpa::io::write_text_file(csv_path, nkpa::io::format_phase_sweep_csv(s));
    });
}

nkpa_status nkpa_retune(const nkpa_circuit* circuit, const nkpa_drive* drive, double shifted_resonance,
                        double target_gain_db, nkpa_retune_info* out, nkpa_circuit** shifted) {
    NKPA_REQUIRE(circuit && drive && out);
    return guard([&] {
        const auto r = nkpa::retune_for_field_shift(circuit->circuit, from_c(*drive), shifted_resonance, target_gain_db);
        *out = {to_c(r.drive), r.power_adjustment_db, r.achieved_gain_db};
        if (shifted) *shifted = new nkpa_circuit{r.circuit};
    });
}

// --- calibration -------------------------------------------------------------

nkpa_status nkpa_record_new(nkpa_record** out) {
    NKPA_REQUIRE(out);
    return guard([&] { *out = new nkpa_record{}; });
}

nkpa_status nkpa_record_read(const char* path, nkpa_record** out) {
    NKPA_REQUIRE(path && out);
    return guard([&] { *out = new nkpa_record{nkpa::io::read_results(path)}; });
}

nkpa_status nkpa_record_write(const nkpa_record* record, const char* path) {
    NKPA_REQUIRE(record && path);
    return guard([&] { nkpa::io::write_results(record->record, path); });
}

nkpa_status nkpa_record_to_json(const nkpa_record* record, char** out_json) {
    NKPA_REQUIRE(record && out_json);
    return guard([&] { *out_json = dup_string(nkpa::io::format_results(record->record)); });
}

nkpa_status nkpa_record_verify(const nkpa_record* record, int* ok) {
    NKPA_REQUIRE(record && ok);
    return guard([&] {
        const auto bad = nkpa::io::verify_checksums(record->record);
        *ok = bad.empty() ? 1 : 0;
        if (!bad.empty()) {
            std::string msg = "checksum mismatch:";
            for (const auto& p : bad) msg += " " + p;
            last_error = msg;
        }
    });
}

void nkpa_record_free(nkpa_record* record) { delete record; }

nkpa_status nkpa_fit_reflection_file(const char* path, const nkpa_reflection_guess* guess, nkpa_record* record,
                                     nkpa_reflection_result* out) {
    NKPA_REQUIRE(path && out);
    return guard([&] {
        const auto trace = nkpa::io::read_reflection_trace(path);
        std::optional<nkpa::ReflectionGuess> g;
        if (guess) g = nkpa::ReflectionGuess{guess->resonant_frequency, guess->external_coupling_rate,
                                             guess->intrinsic_loss_rate};
        const auto fit = nkpa::fit_reflection(trace, g);
        *out = {to_c(fit.resonant_frequency), to_c(fit.external_coupling_rate), to_c(fit.intrinsic_loss_rate),
                fit.diagnostics.relative_residual, fit.diagnostics.iterations,
                static_cast<int>(fit.diagnostics.warnings.size())};
        if (record) {
            record->record.reflection = fit;
            nkpa::io::record_input(record->record, path);
        }
    });
}

nkpa_status nkpa_fit_noise_file(const char* path, nkpa_record* record, nkpa_noise_result* out) {
    NKPA_REQUIRE(path && out);
    return guard([&] {
        const auto trace = nkpa::io::read_noise_trace(path);
        const auto fit = nkpa::fit_noise_thermometry(trace);
        *out = {to_c(fit.system_gain), to_c(fit.added_noise), to_c(fit.output_noise_at_zero),
                fit.diagnostics.reduced_chi_square};
        if (record) {
            record->record.noise = fit;
            record->record.noise_band = trace.band;
            nkpa::io::record_input(record->record, path);
        }
    });
}

nkpa_status nkpa_chain_noise(const nkpa_chain_inputs* inputs, nkpa_record* record, nkpa_chain_result* out) {
    NKPA_REQUIRE(inputs && out);
    return guard([&] {
        nkpa::ChainNoiseResult r;
        r.inputs = {from_c(inputs->measured_added_noise), from_c(inputs->amplifier_gain), from_c(inputs->chain_noise),
                    from_c(inputs->transmission)};
        r.amplifier_added_noise = nkpa::nkpa_added_noise(r.inputs);
        *out = {to_c(r.amplifier_added_noise), r.amplifier_added_noise.value, r.amplifier_added_noise.value};
        if (inputs->with_band) {
            r.band = nkpa::nkpa_noise_band(r.inputs.measured_added_noise.value, r.inputs.amplifier_gain.value,
                                           inputs->transmission_low, inputs->transmission_high,
                                           inputs->chain_noise_low, inputs->chain_noise_high);
            out->band_low = r.band->low;
            out->band_high = r.band->high;
        }
        if (record) record->record.chain = r;
    });
}

nkpa_status nkpa_field_sweep_file(const char* path, double base_temperature, nkpa_record* record, size_t* points) {
    NKPA_REQUIRE(path && record && points);
    return guard([&] {
        const auto m = nkpa::io::read_field_sweep(path);
        record->record.field_sweep = nkpa::field_sweep_reduction(m, record->record, base_temperature);
        nkpa::io::record_input(record->record, path);
        *points = record->record.field_sweep.size();
    });
}

nkpa_status nkpa_bose_einstein(double temperature, double omega, double* out) {
    NKPA_REQUIRE(out);
    return guard([&] { *out = nkpa::bose_einstein_occupancy(temperature, omega); });
}

// --- synthetic data ----------------------------------------------------------

nkpa_status nkpa_synth_reflection(double resonant_frequency, double external_coupling_rate,
                                  double intrinsic_loss_rate, double span, size_t points, double noise_level,
                                  uint64_t seed, const char* path) {
    NKPA_REQUIRE(path && points >= 4 && span > 0.0);
    return guard([&] {
        constexpr double two_pi = nkpa::constants::two_pi;
        const auto f = nkpa::synth::linspace((resonant_frequency - 0.5 * span) / two_pi,
                                             (resonant_frequency + 0.5 * span) / two_pi, points);
        const auto t = nkpa::synth::reflection_trace(
            {resonant_frequency, external_coupling_rate, intrinsic_loss_rate}, f, noise_level, seed);
        nkpa::io::write_reflection_trace(t, path);
    });
}

nkpa_status nkpa_synth_noise(const double* temperature, size_t points, double system_gain, double added_noise,
                             double bandwidth_hz, double signal_frequency, double idler_frequency,
                             double relative_noise, uint64_t seed, const char* path) {
    NKPA_REQUIRE(temperature && path && points > 0);
    return guard([&] {
        const nkpa::NoiseBand band{bandwidth_hz, signal_frequency, idler_frequency};
        const auto t = nkpa::synth::noise_trace(std::vector<double>(temperature, temperature + points), system_gain,
                                                added_noise, band, relative_noise, seed);
        nkpa::io::write_text_file(path, nkpa::io::format_noise_csv(t));
    });
}

nkpa_status nkpa_synth_field_sweep(const double* field, const double* added_noise, size_t points,
                                   double system_gain, double bandwidth_hz, double signal_frequency,
                                   double idler_frequency, double base_temperature, double relative_noise,
                                   uint64_t seed, const char* path) {
    NKPA_REQUIRE(field && added_noise && path && points > 0);
    return guard([&] {
        const nkpa::NoiseBand band{bandwidth_hz, signal_frequency, idler_frequency};
        const auto m = nkpa::synth::field_sweep(std::vector<double>(field, field + points),
                                                std::vector<double>(added_noise, added_noise + points), system_gain,
                                                band, base_temperature, relative_noise, seed);
        nkpa::io::write_text_file(path, nkpa::io::format_field_sweep_csv(m));
    });
}

}  // extern "C"
