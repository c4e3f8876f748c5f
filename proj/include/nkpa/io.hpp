#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nkpa/amplifier.hpp"
#include "nkpa/calibration.hpp"
#include "nkpa/circuit_model.hpp"

namespace nkpa::io {

using json = nlohmann::json;

// Quantities in input documents are either a bare number in SI (angular
// frequencies for rates) or {"value": x, "unit": "..."}. Cyclic frequency
// units (Hz..GHz) are converted to rad/s; "rad/s" is taken verbatim.

[[nodiscard]] std::string read_text_file(const std::string& path);
/// Writes the whole string; failures raise IoError with the OS message.
void write_text_file(const std::string& path, std::string_view content);

/// Stable, pretty-printed form with sorted keys and a trailing newline.
[[nodiscard]] std::string canonical_dump(const json& j);

// --- device specification ---------------------------------------------------

[[nodiscard]] DeviceSpec parse_device_spec(const json& document);
[[nodiscard]] DeviceSpec read_device_spec(const std::string& path);
[[nodiscard]] json device_spec_to_json(const DeviceSpec& spec);

[[nodiscard]] json to_json(const DerivedCircuit& circuit);
[[nodiscard]] json to_json(const CircuitReport& report);
[[nodiscard]] json to_json(const BridgeDesign& design);

// --- drive -------------------------------------------------------------------

[[nodiscard]] DriveConfig parse_drive(const json& document);
[[nodiscard]] DriveConfig read_drive(const std::string& path);
[[nodiscard]] json to_json(const DriveConfig& drive);
[[nodiscard]] json to_json(const PumpState& pump);

// --- traces ------------------------------------------------------------------

enum class TouchstoneFormat { RI, MA, DB };

/// One-port Touchstone v1. Errors carry "<source>:<line>:".
[[nodiscard]] ReflectionTrace parse_touchstone_1port(std::string_view text, const std::string& source = "<string>");
[[nodiscard]] ReflectionTrace read_touchstone_1port(const std::string& path);
[[nodiscard]] std::string format_touchstone_1port(const ReflectionTrace& trace,
                                                  TouchstoneFormat format = TouchstoneFormat::RI);

/// CSV with header frequency_hz,s11_re,s11_im[,sigma].
[[nodiscard]] ReflectionTrace parse_reflection_csv(std::string_view text, const std::string& source = "<string>");
[[nodiscard]] std::string format_reflection_csv(const ReflectionTrace& trace);

/// Touchstone for *.s1p / *.ts, CSV otherwise.
[[nodiscard]] ReflectionTrace read_reflection_trace(const std::string& path);
void write_reflection_trace(const ReflectionTrace& trace, const std::string& path);

/// CSV with "# key=value" metadata lines (bandwidth_hz, signal_frequency_hz,
/// idler_frequency_hz, optional pump1_frequency_hz / pump2_frequency_hz) and
/// header temperature_k,psd_quanta[,sigma].
[[nodiscard]] NoiseTrace parse_noise_csv(std::string_view text, const std::string& source = "<string>");
[[nodiscard]] NoiseTrace read_noise_trace(const std::string& path);
[[nodiscard]] std::string format_noise_csv(const NoiseTrace& trace);

/// CSV with header field_t,psd_quanta[,sigma].
[[nodiscard]] std::vector<FieldMeasurement> parse_field_sweep_csv(std::string_view text,
                                                                  const std::string& source = "<string>");
[[nodiscard]] std::vector<FieldMeasurement> read_field_sweep(const std::string& path);
[[nodiscard]] std::string format_field_sweep_csv(const std::vector<FieldMeasurement>& sweep);

[[nodiscard]] std::string format_gain_spectrum_csv(const GainSpectrum& spectrum, double center_frequency);
[[nodiscard]] std::string format_phase_sweep_csv(const PhaseSweep& sweep);

// --- calibration results -----------------------------------------------------

[[nodiscard]] json to_json(const CalibrationRecord& record);
[[nodiscard]] CalibrationRecord record_from_json(const json& document);
[[nodiscard]] std::string format_results(const CalibrationRecord& record);
void write_results(const CalibrationRecord& record, const std::string& path);
[[nodiscard]] CalibrationRecord read_results(const std::string& path);

/// Adds the SHA-256 of `path` to the record's input checksums.
void record_input(CalibrationRecord& record, const std::string& path);

/// Paths whose current contents no longer match the recorded checksum
/// (missing files included). Empty when everything verifies.
[[nodiscard]] std::vector<std::string> verify_checksums(const CalibrationRecord& record);

}  // namespace nkpa::io
