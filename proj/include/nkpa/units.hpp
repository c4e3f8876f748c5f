#pragma once

#include <cmath>
#include <string>
#include <string_view>

namespace nkpa::units {

/// Physical dimension of a quantity appearing in an input document.
enum class Dimension {
    Frequency,          // Hz, converted to angular (rad/s) by callers that need it
    Inductance,         // H
    SheetInductance,    // H per square
    Length,             // m
    Current,            // A
    CurrentDensity,     // A/m^2
    Capacitance,        // F
    Resistance,         // Ohm
    Power,              // W
    Temperature,        // K
    MagneticField,      // T
    Dimensionless,
};

[[nodiscard]] std::string_view dimension_name(Dimension d);

/// Converts `value` expressed in `unit` to SI. Throws ValidationError naming
/// `field` when the unit is unknown or belongs to another dimension.
/// Power in dBm is converted as P[W] = 10^(dBm/10) * 1e-3.
[[nodiscard]] double to_si(double value, std::string_view unit, Dimension d, const std::string& field);

[[nodiscard]] inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
[[nodiscard]] double watt_to_dbm(double watt);
[[nodiscard]] inline double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }
[[nodiscard]] double linear_power_to_db(double g);

}  // namespace nkpa::units
