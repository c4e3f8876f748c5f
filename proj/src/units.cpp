#include "nkpa/units.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "nkpa/error.hpp"

namespace nkpa::units {
namespace {

struct UnitEntry {
    std::string_view symbol;
    Dimension dimension;
    double scale;
};

// Accepted unit table. "u" is accepted as an ASCII spelling of the micro prefix.
constexpr std::array<UnitEntry, 37> unit_table{{
    {"Hz", Dimension::Frequency, 1.0},
    {"kHz", Dimension::Frequency, 1e3},
    {"MHz", Dimension::Frequency, 1e6},
    {"GHz", Dimension::Frequency, 1e9},
    {"H", Dimension::Inductance, 1.0},
    {"nH", Dimension::Inductance, 1e-9},
    {"pH", Dimension::Inductance, 1e-12},
    {"H/sq", Dimension::SheetInductance, 1.0},
    {"nH/sq", Dimension::SheetInductance, 1e-9},
    {"pH/sq", Dimension::SheetInductance, 1e-12},
    {"m", Dimension::Length, 1.0},
    {"µm", Dimension::Length, 1e-6},
    {"um", Dimension::Length, 1e-6},
    {"nm", Dimension::Length, 1e-9},
    {"A", Dimension::Current, 1.0},
    {"mA", Dimension::Current, 1e-3},
    {"µA", Dimension::Current, 1e-6},
    {"uA", Dimension::Current, 1e-6},
    {"A/m2", Dimension::CurrentDensity, 1.0},
    {"A/m^2", Dimension::CurrentDensity, 1.0},
    {"F", Dimension::Capacitance, 1.0},
    {"pF", Dimension::Capacitance, 1e-12},
    {"fF", Dimension::Capacitance, 1e-15},
    {"Ohm", Dimension::Resistance, 1.0},
    {"W", Dimension::Power, 1.0},
    {"mW", Dimension::Power, 1e-3},
    {"K", Dimension::Temperature, 1.0},
    {"mK", Dimension::Temperature, 1e-3},
    {"T", Dimension::MagneticField, 1.0},
    {"mT", Dimension::MagneticField, 1e-3},
    {"1", Dimension::Dimensionless, 1.0},
    {"", Dimension::Dimensionless, 1.0},
    {"%", Dimension::Dimensionless, 1e-2},
    {"µT", Dimension::MagneticField, 1e-6},
    {"uT", Dimension::MagneticField, 1e-6},
    {"pH/□", Dimension::SheetInductance, 1e-12},
    {"nH/□", Dimension::SheetInductance, 1e-9},
}};

}  // namespace

std::string_view dimension_name(Dimension d) {
    switch (d) {
        case Dimension::Frequency: return "frequency";
        case Dimension::Inductance: return "inductance";
        case Dimension::SheetInductance: return "sheet inductance";
        case Dimension::Length: return "length";
        case Dimension::Current: return "current";
        case Dimension::CurrentDensity: return "current density";
        case Dimension::Capacitance: return "capacitance";
        case Dimension::Resistance: return "resistance";
        case Dimension::Power: return "power";
        case Dimension::Temperature: return "temperature";
        case Dimension::MagneticField: return "magnetic field";
        case Dimension::Dimensionless: return "dimensionless";
    }
    return "unknown";
}

double to_si(double value, std::string_view unit, Dimension d, const std::string& field) {
    if (!std::isfinite(value)) {
        throw ValidationError(field + ": value is not finite");
    }
    if (d == Dimension::Power && unit == "dBm") {
        return dbm_to_watt(value);
    }
    for (const auto& entry : unit_table) {
        if (entry.symbol != unit) continue;
        if (entry.dimension != d) {
            throw ValidationError(field + ": unit '" + std::string(unit) + "' is a " +
                                  std::string(dimension_name(entry.dimension)) + " unit, expected " +
                                  std::string(dimension_name(d)));
        }
        return value * entry.scale;
    }
    throw ValidationError(field + ": unknown unit '" + std::string(unit) + "'");
}

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }

double linear_power_to_db(double g) { return 10.0 * std::log10(g); }

}  // namespace nkpa::units
