#include "nkpa/synth.hpp"

#include <cmath>

#include "nkpa/amplifier.hpp"
#include "nkpa/constants.hpp"
#include "nkpa/error.hpp"

namespace nkpa::synth {

double NormalSource::uniform() {
    // 53 random bits -> (0, 1)
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalSource::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(constants::two_pi * u2);
    has_spare_ = true;
    return r * std::cos(constants::two_pi * u2);
}

std::vector<double> linspace(double first, double last, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {first};
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = first + (last - first) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    out.back() = last;
    return out;
}

ReflectionTrace reflection_trace(const ReflectionTruth& truth, const std::vector<double>& frequency,
                                 double noise_level, std::uint64_t seed) {
    if (!(noise_level >= 0.0)) throw ValidationError("synthetic reflection: noise level must be non-negative");
    if (!(truth.resonant_frequency > 0.0) || !(truth.external_coupling_rate > 0.0) || truth.intrinsic_loss_rate < 0.0) {
        throw ValidationError("synthetic reflection: invalid truth parameters");
    }
    NormalSource normal(seed);
    ReflectionTrace t;
    t.frequency = frequency;
    const double s = noise_level / std::sqrt(2.0);
    for (const double f : frequency) {
        auto v = reflection_response(constants::two_pi * f, truth.resonant_frequency, truth.external_coupling_rate,
                                     truth.intrinsic_loss_rate);
        if (noise_level > 0.0) {
            const double re = normal();
            const double im = normal();
            v += std::complex<double>(s * re, s * im);
            t.sigma.push_back(s);
        }
        t.s11.push_back(v);
    }
    return t;
}

NoiseTrace noise_trace(const std::vector<double>& temperature, double system_gain, double added_noise,
                       const NoiseBand& band, double relative_noise, std::uint64_t seed) {
    if (!(relative_noise >= 0.0)) throw ValidationError("synthetic noise: relative noise must be non-negative");
    NormalSource normal(seed);
    NoiseTrace t;
    t.band = band;
    t.temperature = temperature;
    for (const double temp : temperature) {
        const double model = noise_psd_quanta(temp, system_gain, added_noise, band);
        t.psd.push_back(model * (1.0 + relative_noise * normal()));
        if (relative_noise > 0.0) t.sigma.push_back(relative_noise * model);
    }
    return t;
}

std::vector<FieldMeasurement> field_sweep(const std::vector<double>& field, const std::vector<double>& added_noise,
                                          double system_gain, const NoiseBand& band, double base_temperature,
                                          double relative_noise, std::uint64_t seed) {
    if (field.size() != added_noise.size()) {
        throw ValidationError("synthetic field sweep: field and added-noise lengths differ");
    }
    if (!(relative_noise >= 0.0)) throw ValidationError("synthetic field sweep: relative noise must be non-negative");
    NormalSource normal(seed);
    std::vector<FieldMeasurement> out;
    for (std::size_t k = 0; k < field.size(); ++k) {
        const double model = noise_psd_quanta(base_temperature, system_gain, added_noise[k], band);
        out.push_back({field[k], model * (1.0 + relative_noise * normal()), relative_noise * model});
    }
    return out;
}

}  // namespace nkpa::synth
