#pragma once

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nkpa/error.hpp"

namespace nkpa {

// ---------------------------------------------------------------------------
// Reflection fitting

/// VNA one-port trace. Frequencies in Hz (cyclic), strictly increasing.
struct ReflectionTrace {
    std::vector<double> frequency;
    std::vector<std::complex<double>> s11;
    /// Optional per-point standard deviation of each of Re and Im; empty for uniform weights.
    std::vector<double> sigma;
};

void validate(const ReflectionTrace& trace);

/// Starting point for the reflection fit; all rates and frequencies in rad/s.
struct ReflectionGuess {
    double resonant_frequency = 0.0;
    double external_coupling_rate = 0.0;
    double intrinsic_loss_rate = 0.0;
};

struct FitDiagnostics {
    int iterations = 0;
    bool converged = false;
    std::string message;
    std::size_t points = 0;
    double chi_square = 0.0;
    double reduced_chi_square = 0.0;
    double rms_residual = 0.0;
    /// rms residual relative to rms data magnitude
    double relative_residual = 0.0;
    std::vector<std::string> warnings;
};

struct Estimate {
    double value = 0.0;
    double sigma = 0.0;
};

struct ReflectionFit {
    Estimate resonant_frequency;      ///< rad/s
    Estimate external_coupling_rate;  ///< rad/s
    Estimate intrinsic_loss_rate;     ///< rad/s
    FitDiagnostics diagnostics;

    [[nodiscard]] double total_decay_rate() const {
        return external_coupling_rate.value + intrinsic_loss_rate.value;
    }
};

/// Initial guess from an algebraic circle fit of the trace: the circle
/// diameter gives kappa_ext/kappa, the angular position along the circle
/// gives omega_0 and kappa by linear regression.
[[nodiscard]] ReflectionGuess estimate_reflection_guess(const ReflectionTrace& trace);

/// Complex least-squares fit of 1 - kappa_ext/(i(omega - omega_0) + kappa/2)
/// with kappa_ext, kappa_int >= 0. Throws SolverError on non-convergence.
[[nodiscard]] ReflectionFit fit_reflection(const ReflectionTrace& trace,
                                           const std::optional<ReflectionGuess>& guess = std::nullopt);

// ---------------------------------------------------------------------------
// Noise thermometry

/// 1 / (exp(hbar omega / k_B T) - 1). Throws ValidationError for T <= 0 or omega <= 0.
[[nodiscard]] double bose_einstein_occupancy(double temperature, double omega);

/// omega_p1 + omega_p2 - omega_s: four-wave-mixing idler about the two-tone centre.
[[nodiscard]] double idler_frequency(double pump1_frequency, double pump2_frequency, double signal_frequency);

/// Detection settings shared by every point of a thermometry sweep.
struct NoiseBand {
    double bandwidth = 0.0;         ///< Hz, spectrum-analyser resolution bandwidth
    double signal_frequency = 0.0;  ///< rad/s
    double idler_frequency = 0.0;   ///< rad/s
};

void validate(const NoiseBand& band);

/// Output power (W): BW G (N_s hbar w_s + N_i hbar w_i + n_q hbar w_s + N_add hbar w_s), n_q = 1/2.
[[nodiscard]] double noise_psd_model(double temperature, double system_gain, double added_noise, const NoiseBand& band);

/// Same model normalised by BW hbar omega_s, i.e. in quanta at the signal frequency.
[[nodiscard]] double noise_psd_quanta(double temperature, double system_gain, double added_noise,
                                      const NoiseBand& band);

/// Input occupancy seen by the amplifier chain, in signal quanta:
/// N_s + (omega_i/omega_s) N_i + n_q.
[[nodiscard]] double input_noise_quanta(double temperature, const NoiseBand& band);

struct NoiseTrace {
    std::vector<double> temperature;  ///< K, strictly positive
    std::vector<double> psd;          ///< quanta at the signal frequency (P / (BW hbar omega_s))
    std::vector<double> sigma;        ///< optional per-point standard deviation, same units
    NoiseBand band;
    std::optional<double> pump1_frequency;  ///< rad/s, drive metadata if known
    std::optional<double> pump2_frequency;
};

void validate(const NoiseTrace& trace);

struct NoiseFit {
    Estimate system_gain;
    Estimate added_noise;                 ///< quanta
    /// Zero-temperature output noise referred to the input: n_q + N_add.
    Estimate output_noise_at_zero;
    FitDiagnostics diagnostics;
};

/// Two-parameter weighted least squares of the thermometry model for
/// (G_sys, N_add). Throws SolverError when the sweep is ill-conditioned
/// (input occupancy spans less than a factor of 3).
[[nodiscard]] NoiseFit fit_noise_thermometry(const NoiseTrace& trace);

// ---------------------------------------------------------------------------
// Amplifier added noise behind a lossy input and a noisy follow-up chain

struct ChainNoiseInputs {
    Estimate measured_added_noise;  ///< N_add referred to the VTS, quanta
    Estimate amplifier_gain;        ///< G_NKPA, linear power gain
    Estimate chain_noise;           ///< N_sys, quanta
    Estimate transmission;          ///< lambda, 0 < lambda <= 1
};

/// N_NKPA = lambda (N_add + n_q) - N_sys / G - n_q with first-order
/// uncertainty propagation over the supplied sigmas.
[[nodiscard]] Estimate nkpa_added_noise(const ChainNoiseInputs& inputs);

struct NoiseBandRange {
    double low = 0.0;
    double high = 0.0;
};

/// Min/max of N_NKPA over a grid of lambda and N_sys values.
[[nodiscard]] NoiseBandRange nkpa_noise_band(double measured_added_noise, double amplifier_gain, double lambda_low,
                                             double lambda_high, double chain_noise_low, double chain_noise_high,
                                             int grid_points = 25);

// ---------------------------------------------------------------------------
// Calibration record and magnetic-field sweep reduction

struct ChainNoiseResult {
    ChainNoiseInputs inputs;
    Estimate amplifier_added_noise;  ///< N_NKPA
    std::optional<NoiseBandRange> band;
};

struct FieldNoisePoint {
    double field = 0.0;        ///< T
    Estimate added_noise;      ///< quanta
};

struct CalibrationRecord {
    static constexpr int schema_version = 1;
    std::optional<ReflectionFit> reflection;
    std::optional<NoiseFit> noise;
    std::optional<NoiseBand> noise_band;
    std::optional<ChainNoiseResult> chain;
    std::vector<FieldNoisePoint> field_sweep;
    /// input path -> SHA-256 of its contents at the time of the fit
    std::map<std::string, std::string> input_checksums;
};

struct FieldMeasurement {
    double field = 0.0;  ///< T
    double psd = 0.0;    ///< quanta at the signal frequency
    double sigma = 0.0;  ///< optional, 0 if unknown
};

/// Inverts the thermometry model point by point at the calibrated G_sys and
/// fixed base temperature: N_add = psd/G - N_s - (w_i/w_s) N_i - n_q.
/// Throws DependencyError if the record has no noise calibration.
[[nodiscard]] std::vector<FieldNoisePoint> field_sweep_reduction(std::span<const FieldMeasurement> measurements,
                                                                 const CalibrationRecord& record,
                                                                 double base_temperature);

}  // namespace nkpa
