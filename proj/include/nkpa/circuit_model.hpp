#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nkpa/error.hpp"

namespace nkpa {

// All quantities in SI. Rates and frequencies are angular (rad/s).

struct FilmProperties {
    double sheet_inductance = 0.0;          ///< H per square
    double thickness = 0.0;                 ///< m
    double dead_width_per_side = 0.0;       ///< m, non-superconducting edge on each side
    double critical_current_density = 0.0;  ///< A/m^2, sets I* from the effective cross-section
};

struct NanobridgeGeometry {
    double width = 0.0;   ///< m, lithographic width
    double length = 0.0;  ///< m
};

struct LumpedCircuit {
    double shunt_capacitance = 0.0;       ///< F
    double parasitic_inductance = 0.0;    ///< H, linear inductance in series with the bridge
    double external_coupling_rate = 0.0;  ///< rad/s
    double intrinsic_loss_rate = 0.0;     ///< rad/s
};

/// Independently reported device numbers (e.g. from a publication or a
/// separate simulation). Used for cross-checks only, never as inputs to the
/// geometry route.
struct ReportedValues {
    std::optional<double> impedance;               ///< Ohm
    std::optional<double> participation_ratio;
    std::optional<double> characteristic_current;  ///< A
    std::optional<double> resonant_frequency;      ///< rad/s
    std::optional<double> kerr;                    ///< rad/s
};

struct DeviceSpec {
    std::string name;
    FilmProperties film;
    NanobridgeGeometry geometry;
    LumpedCircuit circuit;
    ReportedValues reported;
};

/// Where the participation ratio comes from when deriving the circuit.
enum class AlphaSource {
    Geometry,   ///< L_k0 from sheet inductance and bridge geometry
    Specified,  ///< alpha taken from `reported.participation_ratio`, L_k0 = alpha/(1-alpha) * L_parasitic
};

struct DerivedCircuit {
    double bridge_inductance = 0.0;       ///< L_k0, H
    double total_inductance = 0.0;        ///< H
    double participation_ratio = 0.0;     ///< alpha = L_k0 / L_total
    double impedance = 0.0;               ///< Z_r = sqrt(L_total / C), Ohm
    double resonant_frequency = 0.0;      ///< omega_0, rad/s
    double zero_point_current = 0.0;      ///< I_zpf, A
    double characteristic_current = 0.0;  ///< I*, A
    double kerr = 0.0;                    ///< K, rad/s
    double external_coupling_rate = 0.0;  ///< kappa_ext, rad/s
    double intrinsic_loss_rate = 0.0;     ///< kappa_int, rad/s

    [[nodiscard]] double total_decay_rate() const { return external_coupling_rate + intrinsic_loss_rate; }
    [[nodiscard]] double shunt_capacitance() const { return 1.0 / (impedance * resonant_frequency); }
    [[nodiscard]] double parasitic_inductance() const { return total_inductance - bridge_inductance; }
};

void validate(const FilmProperties& film);
void validate(const NanobridgeGeometry& geometry, const FilmProperties& film);
void validate(const LumpedCircuit& circuit);
void validate(const DeviceSpec& spec);

/// Lithographic width minus the dead width on both edges.
[[nodiscard]] double effective_width(const NanobridgeGeometry& geometry, const FilmProperties& film);

/// Kinetic inductance of the bridge: sheet inductance times the number of
/// squares of the effective (dead-width corrected) strip.
[[nodiscard]] double bridge_inductance(const NanobridgeGeometry& geometry, const FilmProperties& film);

/// I* = J* * w_eff * t.
[[nodiscard]] double characteristic_current(const NanobridgeGeometry& geometry, const FilmProperties& film);

/// Inverse of the I* rule: the current density that gives `i_star` for an
/// effective width and thickness.
[[nodiscard]] double calibrate_current_density(double i_star, double effective_width, double thickness);

/// K = (3/2) hbar omega^3 alpha / (Z I*^2), returned in rad/s.
[[nodiscard]] double kerr_coefficient(double omega, double alpha, double impedance, double i_star);

/// I_zpf = sqrt(alpha hbar omega / (2 L_k0)).
[[nodiscard]] double zero_point_current(double alpha, double omega, double bridge_inductance);

/// K = 6 (L_k0 / I*^2) I_zpf^4 / hbar, the zero-point-current route, in rad/s.
[[nodiscard]] double kerr_from_zero_point(double bridge_inductance, double i_star, double i_zpf);

/// Full lumped-element derivation. Throws ValidationError for an
/// inconsistent spec (alpha outside (0, 1], I_zpf >= I*, or the two Kerr
/// routes disagreeing beyond round-off).
[[nodiscard]] DerivedCircuit derive_circuit(const DeviceSpec& spec, AlphaSource source = AlphaSource::Geometry);

/// Derivation plus cross-checks, for reporting.
struct CircuitReport {
    DerivedCircuit circuit;
    AlphaSource alpha_source = AlphaSource::Geometry;
    double kerr_zero_point_route = 0.0;     ///< rad/s
    double kerr_route_relative_error = 0.0;
    double geometry_participation_ratio = 0.0;
    std::optional<double> specified_participation_ratio;
    bool participation_ratios_disagree = false;
    /// kerr_coefficient() at the reported (Z, alpha, I*, omega), when all four are present.
    std::optional<double> kerr_at_reported_values;
    std::optional<double> reported_kerr;
    std::vector<std::string> notes;
};

[[nodiscard]] CircuitReport describe_circuit(const DeviceSpec& spec, AlphaSource source = AlphaSource::Geometry);

/// Re-derives the circuit after the resonance moved to `resonant_frequency`,
/// attributing the whole shift to a change of the bridge kinetic inductance
/// (shunt capacitance, parasitic inductance, I* and the decay rates fixed).
[[nodiscard]] DerivedCircuit shift_resonance(const DerivedCircuit& circuit, double resonant_frequency);

// --- design inversion ------------------------------------------------------

struct DesignConstraints {
    FilmProperties film;
    double parasitic_inductance = 0.0;      ///< H
    double resonant_frequency = 0.0;        ///< rad/s, operating band centre
    double participation_ratio = 0.0;       ///< target alpha, in (0, 1)
    double external_coupling_rate = 0.0;    ///< carried into the derived circuit
    double intrinsic_loss_rate = 0.0;
    double min_characteristic_current = 2e-6;   ///< A
    double max_characteristic_current = 10e-3;  ///< A
    double relative_tolerance = 1e-12;          ///< on the bridge width
};

struct BridgeDesign {
    NanobridgeGeometry geometry;
    double shunt_capacitance = 0.0;
    DerivedCircuit circuit;
    int iterations = 0;
};

/// Target K outside the achievable bracket.
class NoSolutionError : public SolverError {
public:
    NoSolutionError(const std::string& what, double low, double high)
        : SolverError(what), low_(low), high_(high) {}
    [[nodiscard]] double bracket_low() const noexcept { return low_; }
    [[nodiscard]] double bracket_high() const noexcept { return high_; }

private:
    double low_;
    double high_;
};

/// Achievable K range [low, high] (rad/s) for the constraints.
[[nodiscard]] std::pair<double, double> achievable_kerr_range(const DesignConstraints& constraints);

/// Finds the bridge geometry whose derived K equals `target_kerr` (rad/s).
/// Bisects on the bridge width; for every trial width the length is chosen
/// to keep alpha and omega_0 at their targets.
[[nodiscard]] BridgeDesign design_bridge_for_kerr(double target_kerr, const DesignConstraints& constraints);

}  // namespace nkpa
