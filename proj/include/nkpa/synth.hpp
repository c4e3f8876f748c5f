#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nkpa/calibration.hpp"

namespace nkpa::synth {

/// Standard normal deviates from mt19937_64 via Box-Muller, so sequences are
/// identical across standard libraries for the same seed.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}
    double operator()();

private:
    double uniform();
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// `n` evenly spaced values over [first, last], endpoints exact.
[[nodiscard]] std::vector<double> linspace(double first, double last, std::size_t n);

struct ReflectionTruth {
    double resonant_frequency = 0.0;      ///< rad/s
    double external_coupling_rate = 0.0;  ///< rad/s
    double intrinsic_loss_rate = 0.0;     ///< rad/s
};

/// Forward model sampled at `frequency` (Hz) plus complex Gaussian noise of
/// rms magnitude `noise_level` (each quadrature sigma = level/sqrt(2)). With
/// noise, the per-point sigma is stored in the trace.
[[nodiscard]] ReflectionTrace reflection_trace(const ReflectionTruth& truth, const std::vector<double>& frequency,
                                               double noise_level, std::uint64_t seed);

/// Thermometry model (quanta) with multiplicative Gaussian noise of relative
/// size `relative_noise`; sigma = relative_noise * model.
[[nodiscard]] NoiseTrace noise_trace(const std::vector<double>& temperature, double system_gain, double added_noise,
                                     const NoiseBand& band, double relative_noise, std::uint64_t seed);

/// Output noise at a fixed stage temperature for a field-dependent added
/// noise, same noise model as noise_trace().
[[nodiscard]] std::vector<FieldMeasurement> field_sweep(const std::vector<double>& field,
                                                        const std::vector<double>& added_noise, double system_gain,
                                                        const NoiseBand& band, double base_temperature,
                                                        double relative_noise, std::uint64_t seed);

}  // namespace nkpa::synth
