#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "nkpa/circuit_model.hpp"
#include "nkpa/error.hpp"

namespace nkpa {

using complex = std::complex<double>;

/// Two-tone pump. Frequencies in rad/s, powers in W at the device input,
/// phases in rad. The phases are those of the intracavity pump fields.
struct DriveConfig {
    double pump1_frequency = 0.0;
    double pump2_frequency = 0.0;
    double pump1_power = 0.0;
    double pump2_power = 0.0;
    double pump1_phase = 0.0;
    double pump2_phase = 0.0;

    /// (omega_p1 + omega_p2) / 2: the gain centre and the frame of the linearised dynamics.
    [[nodiscard]] double center_frequency() const { return 0.5 * (pump1_frequency + pump2_frequency); }
    [[nodiscard]] double total_power() const { return pump1_power + pump2_power; }
};

void validate(const DriveConfig& drive);

/// Solved classical pump and the parameters it imprints on the small-signal
/// dynamics. |amplitude|^2 is the intracavity photon number of each tone.
struct PumpState {
    complex amplitude_b;           ///< tone 1, arg = phi_1
    complex amplitude_c;           ///< tone 2, arg = phi_2
    double cross_kerr_shift = 0.0; ///< K (|B|^2 + |C|^2), rad/s
    complex parametric_strength;   ///< epsilon = K B C, rad/s
    double effective_detuning = 0.0;  ///< omega_0 + cross_kerr_shift - omega_center, rad/s
    double center_frequency = 0.0;    ///< rad/s
    bool stable = false;
    int iterations = 0;
    std::vector<std::string> warnings;

    /// sqrt(Delta_eff^2 + (kappa/2)^2): |epsilon| at the parametric instability.
    [[nodiscard]] double threshold(double total_decay_rate) const;
};

/// The pump has no stable steady state on the branch connected to zero
/// power (fold/bistability, no convergence, or parametric oscillation).
class PumpUnstableError : public SolverError {
public:
    PumpUnstableError(const std::string& what, PumpState last) : SolverError(what), last_(std::move(last)) {}
    [[nodiscard]] const PumpState& last_iterate() const noexcept { return last_; }

private:
    PumpState last_;
};

/// |epsilon| at or above threshold for the linearised dynamics.
class DivergentGainError : public SolverError {
public:
    using SolverError::SolverError;
};

struct PumpSolverOptions {
    int continuation_steps = 32;  ///< initial number of power steps from zero
    int max_refinements = 12;     ///< step halvings allowed before declaring a fold
    int max_iterations = 5000;    ///< damped fixed-point iterations per step
    double damping = 0.5;         ///< initial relaxation factor
    double tolerance = 1e-13;     ///< relative residual
};

/// Steady state of the two pump tones including self- and cross-Kerr pulls.
/// Follows the branch connected to zero power by power continuation with a
/// damped fixed-point iteration at every step. Throws PumpUnstableError.
[[nodiscard]] PumpState pump_steady_state(const DerivedCircuit& circuit, const DriveConfig& drive,
                                          const PumpSolverOptions& options = {});

/// Unpumped one-port reflection 1 - kappa_ext / (i (omega - omega_0) + kappa/2).
[[nodiscard]] complex reflection_response(double omega, double resonant_frequency, double external_coupling_rate,
                                          double intrinsic_loss_rate);

[[nodiscard]] complex reflection_coefficient(const DerivedCircuit& circuit, double probe_frequency);

/// Output at the probe frequency per unit input amplitude at each port:
/// signal (same frequency, external port), idler (mirror frequency, external
/// port, phase conjugated), and the two corresponding internal-loss ports.
/// Same phase convention as reflection_coefficient().
struct Scattering {
    complex signal;
    complex idler;
    complex loss_signal;
    complex loss_idler;
};

/// Linearised scattering at absolute probe frequency (rad/s). The self-Kerr
/// term of the fluctuations is dropped. Throws DivergentGainError.
[[nodiscard]] Scattering scattering(const DerivedCircuit& circuit, const PumpState& pump, double probe_frequency);

struct GainSpectrum {
    std::vector<double> frequency;  ///< rad/s, strictly increasing
    std::vector<complex> signal;    ///< g_s
    std::vector<complex> idler;     ///< g_i
    std::vector<double> power_gain_db;  ///< 20 log10 |g_s|
};

[[nodiscard]] GainSpectrum gain_spectrum(const DerivedCircuit& circuit, const PumpState& pump,
                                         std::span<const double> grid);

/// `points` evenly spaced probe frequencies over +/- kappa_tot around the gain centre.
[[nodiscard]] std::vector<double> default_grid(const DerivedCircuit& circuit, const PumpState& pump,
                                               std::size_t points = 2001);

struct PhaseSweep {
    std::vector<double> relative_phase;  ///< phi_probe - (phi_1 + phi_2)/2, rad
    std::vector<complex> response;       ///< output amplitude per unit input amplitude
    std::vector<double> gain_db;
};

/// Degenerate (probe at the gain centre) response for a probe of absolute
/// phase `probe_phase`: g_s + g_i exp(-2 i phi_probe).
[[nodiscard]] complex quadrature_response(const DerivedCircuit& circuit, const PumpState& pump, double probe_phase);

[[nodiscard]] PhaseSweep phase_sensitive_gain(const DerivedCircuit& circuit, const PumpState& pump,
                                              std::span<const double> relative_phase);

/// Input-referred added noise in quanta at the probe frequency, from vacuum
/// entering the idler and loss ports. Lossless limit (1 - 1/G)/2.
[[nodiscard]] double ideal_added_noise(const DerivedCircuit& circuit, const PumpState& pump, double probe_frequency);

/// Power gain |g_s|^2 at the gain centre.
[[nodiscard]] double center_gain(const DerivedCircuit& circuit, const PumpState& pump);

struct Bandwidth {
    double peak_gain = 0.0;     ///< linear power gain at the centre
    double lower = 0.0;         ///< rad/s, half-power points
    double upper = 0.0;
    [[nodiscard]] double width() const { return upper - lower; }
};

/// -3 dB points of |g_s|^2 around the gain centre, located by bisection.
[[nodiscard]] Bandwidth three_db_bandwidth(const DerivedCircuit& circuit, const PumpState& pump);

struct TuneOptions {
    double power_ratio = 1.0;      ///< P2 / P1
    double pump1_phase = 0.0;
    double pump2_phase = 0.0;
    double gain_tolerance_db = 1e-4;
};

/// Pumps at omega_c -/+ `pump_half_separation`, with omega_c re-centred on
/// the Kerr-shifted resonance (Delta_eff = 0) and the pump power bisected
/// until the centre gain equals `target_gain_db`. Throws NoSolutionError.
[[nodiscard]] DriveConfig tune_drive_for_gain(const DerivedCircuit& circuit, double pump_half_separation,
                                              double target_gain_db, const TuneOptions& options = {});

struct CompressionResult {
    double input_power_1db = 0.0;      ///< W
    double small_signal_gain_db = 0.0;
    double gain_at_p1db = 0.0;         ///< dB
};

/// Quasi-static saturation: the intracavity signal photon number adds to the
/// cross-Kerr detuning, K(|B|^2+|C|^2) -> K(|B|^2+|C|^2+n_sig), solved
/// self-consistently at each input power. Probe at the gain centre. The
/// 1-dB point is bracketed on a 1 dB power grid between `min_power` and
/// `max_power` (W) and refined by bisection to 0.01 dB.
[[nodiscard]] CompressionResult compression_point(const DerivedCircuit& circuit, const PumpState& pump,
                                                  double min_power = 1e-24, double max_power = 1e-6);

/// Centre gain (dB) at signal input power `input_power` (W) under the
/// quasi-static saturation model.
[[nodiscard]] double saturated_gain_db(const DerivedCircuit& circuit, const PumpState& pump, double input_power);

struct RetuneResult {
    DriveConfig drive;
    DerivedCircuit circuit;          ///< circuit with the shifted resonance
    double power_adjustment_db = 0.0;
    double achieved_gain_db = 0.0;
};

/// Moves the pumps with a resonance shift to `shifted_resonance` (rad/s) and
/// re-solves the pump power to restore `target_gain_db` at the centre.
/// A zero shift returns the input drive unchanged.
[[nodiscard]] RetuneResult retune_for_field_shift(const DerivedCircuit& circuit, const DriveConfig& drive,
                                                  double shifted_resonance, double target_gain_db);

}  // namespace nkpa
