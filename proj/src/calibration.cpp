#include "nkpa/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "nkpa/amplifier.hpp"
#include "nkpa/constants.hpp"
#include "nkpa/least_squares.hpp"

namespace nkpa {
namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

double weight_of(const std::vector<double>& sigma, std::size_t k) { return sigma.empty() ? 1.0 : 1.0 / sigma[k]; }

FitDiagnostics diagnostics_from(const LeastSquaresResult& r, std::size_t points, double data_rms) {
    FitDiagnostics d;
    d.iterations = r.iterations;
    d.converged = r.converged;
    d.message = r.message;
    d.points = points;
    d.chi_square = r.cost;
    const auto dof = r.residual.size() - r.parameters.size();
    d.reduced_chi_square = dof > 0 ? r.cost / static_cast<double>(dof) : 0.0;
    d.rms_residual = std::sqrt(r.cost / static_cast<double>(std::max<Eigen::Index>(1, r.residual.size())));
    d.relative_residual = data_rms > 0.0 ? d.rms_residual / data_rms : d.rms_residual;
    return d;
}

}  // namespace

void validate(const ReflectionTrace& t) {
    if (t.frequency.size() != t.s11.size()) {
        throw ValidationError("reflection trace: frequency and S11 lengths differ");
    }
    if (!t.sigma.empty() && t.sigma.size() != t.frequency.size()) {
        throw ValidationError("reflection trace: sigma length differs from frequency length");
    }
    if (t.frequency.size() < 4) {
        throw ValidationError("reflection trace: at least 4 points are required");
    }
    for (std::size_t k = 0; k < t.frequency.size(); ++k) {
        if (!std::isfinite(t.frequency[k]) || !std::isfinite(t.s11[k].real()) || !std::isfinite(t.s11[k].imag())) {
            throw ValidationError(fmt::format("reflection trace: non-finite value at point {}", k));
        }
        if (k > 0 && !(t.frequency[k] > t.frequency[k - 1])) {
            throw ValidationError(fmt::format("reflection trace: frequency not strictly increasing at point {}", k));
        }
        if (!t.sigma.empty() && !(t.sigma[k] > 0.0)) {
            throw ValidationError(fmt::format("reflection trace: sigma must be positive (point {})", k));
        }
    }
}

ReflectionGuess estimate_reflection_guess(const ReflectionTrace& trace) {
    validate(trace);
    const std::size_t n = trace.s11.size();
    const double span = constants::two_pi * (trace.frequency.back() - trace.frequency.front());
    ReflectionGuess fallback;
    {
        // Deepest point along the real axis marks the resonance of an over- or under-coupled dip.
        std::size_t k_min = 0;
        for (std::size_t k = 1; k < n; ++k) {
            if (trace.s11[k].real() < trace.s11[k_min].real()) k_min = k;
        }
        fallback.resonant_frequency = constants::two_pi * trace.frequency[k_min];
        fallback.external_coupling_rate = span / 10.0;
        fallback.intrinsic_loss_rate = span / 1000.0;
    }

    // Algebraic (Kasa) circle fit.
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = trace.s11[k].real();
        const double y = trace.s11[k].imag();
        a(k, 0) = x;
        a(k, 1) = y;
        a(k, 2) = 1.0;
        b(k) = -(x * x + y * y);
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    const cd center{-0.5 * c(0), -0.5 * c(1)};
    const double r2 = 0.25 * (c(0) * c(0) + c(1) * c(1)) - c(2);
    if (!(r2 > 0.0) || !std::isfinite(r2)) return fallback;
    const double radius = std::sqrt(r2);
    const double coupling_fraction = std::clamp(radius, 1e-6, 1.0);

    // On the model circle (S - c)/r = (i x - 1)/(i x + 1), x = 2 (omega - omega_0) / kappa.
    // The off-resonant point S = 1 fixes the orientation.
    const cd orient = (1.0 - center) / std::abs(1.0 - center);
    std::vector<double> xs, ws;
    for (std::size_t k = 0; k < n; ++k) {
        const cd z = (trace.s11[k] - center) / (radius * orient);
        const cd zz = z / std::abs(z);
        const double x = (I * (1.0 + zz) / (zz - 1.0)).real();
        if (std::isfinite(x) && std::abs(x) < 2.0) {
            xs.push_back(x);
            ws.push_back(constants::two_pi * trace.frequency[k]);
        }
    }
    if (xs.size() < 3) return fallback;
    // Regress x = slope * omega + intercept.
    const double mw = std::accumulate(ws.begin(), ws.end(), 0.0) / static_cast<double>(ws.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (ws[k] - mw) * (xs[k] - mx);
        sxx += (ws[k] - mw) * (ws[k] - mw);
    }
    const double slope = sxy / sxx;
    if (!(slope > 0.0) || !std::isfinite(slope)) return fallback;
    const double kappa = 2.0 / slope;
    ReflectionGuess g;
    g.resonant_frequency = mw - mx / slope;
    g.external_coupling_rate = coupling_fraction * kappa;
    g.intrinsic_loss_rate = std::max(0.0, kappa - g.external_coupling_rate);
    return g;
}

ReflectionFit fit_reflection(const ReflectionTrace& trace, const std::optional<ReflectionGuess>& guess_in) {
    validate(trace);
    const ReflectionGuess guess = guess_in ? *guess_in : estimate_reflection_guess(trace);
    const double kappa_scale = guess.external_coupling_rate + guess.intrinsic_loss_rate;
    if (!(kappa_scale > 0.0) || !(guess.resonant_frequency > 0.0)) {
        throw ValidationError("reflection fit: initial guess needs positive resonance and decay rates");
    }
    const std::size_t n = trace.frequency.size();
    std::vector<double> omega(n);
    for (std::size_t k = 0; k < n; ++k) omega[k] = constants::two_pi * trace.frequency[k];

    // Parameters: (omega_0 - omega_guess)/kappa_s, kappa_ext/kappa_s, kappa_int/kappa_s.
    const auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
        const double w0 = guess.resonant_frequency + p(0) * kappa_scale;
        const double ke = p(1) * kappa_scale;
        const double ki = p(2) * kappa_scale;
        r.resize(2 * static_cast<Eigen::Index>(n));
        J.resize(2 * static_cast<Eigen::Index>(n), 3);
        for (std::size_t k = 0; k < n; ++k) {
            const double w = weight_of(trace.sigma, k);
            const cd d = I * (omega[k] - w0) + 0.5 * (ke + ki);
            const cd d2 = d * d;
            const cd diff = (1.0 - ke / d - trace.s11[k]) * w;
            const cd dw0 = -I * ke / d2 * kappa_scale * w;
            const cd dke = (-1.0 / d + 0.5 * ke / d2) * kappa_scale * w;
            const cd dki = 0.5 * ke / d2 * kappa_scale * w;
            const auto row = static_cast<Eigen::Index>(2 * k);
            r(row) = diff.real();
            r(row + 1) = diff.imag();
            J(row, 0) = dw0.real();
            J(row + 1, 0) = dw0.imag();
            J(row, 1) = dke.real();
            J(row + 1, 1) = dke.imag();
            J(row, 2) = dki.real();
            J(row + 1, 2) = dki.imag();
        }
    };
    const auto project = [](Eigen::VectorXd& p) {
        p(1) = std::max(p(1), 0.0);
        p(2) = std::max(p(2), 0.0);
    };
    Eigen::VectorXd start(3);
    start << 0.0, guess.external_coupling_rate / kappa_scale, guess.intrinsic_loss_rate / kappa_scale;
    const auto result = levenberg_marquardt(residuals, start, {}, project);

    double data_rms = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = weight_of(trace.sigma, k);
        data_rms += std::norm(trace.s11[k]) * w * w;
    }
    data_rms = std::sqrt(data_rms / static_cast<double>(2 * n));

    ReflectionFit fit;
    fit.diagnostics = diagnostics_from(result, n, data_rms);
    if (!result.converged || !result.parameters.allFinite()) {
        throw SolverError(fmt::format("reflection fit did not converge after {} iterations ({}); rms residual {:.3g}",
                                      result.iterations, result.message, fit.diagnostics.rms_residual));
    }
    const Eigen::MatrixXd cov = parameter_covariance(result, trace.sigma.empty());
    const auto& p = result.parameters;
    fit.resonant_frequency = {guess.resonant_frequency + p(0) * kappa_scale, std::sqrt(cov(0, 0)) * kappa_scale};
    fit.external_coupling_rate = {p(1) * kappa_scale, std::sqrt(cov(1, 1)) * kappa_scale};
    fit.intrinsic_loss_rate = {p(2) * kappa_scale, std::sqrt(cov(2, 2)) * kappa_scale};

    const double lo = omega.front();
    const double hi = omega.back();
    const double w0 = fit.resonant_frequency.value;
    const double kappa = fit.total_decay_rate();
    if (w0 < lo || w0 > hi) {
        fit.diagnostics.warnings.push_back("fitted resonance lies outside the measured span");
    } else if ((hi - lo) < 3.0 * kappa) {
        fit.diagnostics.warnings.push_back(
            fmt::format("trace spans {:.2f} linewidths; at least 3 are needed for a reliable fit", (hi - lo) / kappa));
    }
    return fit;
}

double bose_einstein_occupancy(double temperature, double omega) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ValidationError(fmt::format("occupancy: temperature must be positive (got {:g} K)", temperature));
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw ValidationError(fmt::format("occupancy: frequency must be positive (got {:g} rad/s)", omega));
    }
    const double x = constants::hbar * omega / (constants::k_boltzmann * temperature);
    return 1.0 / std::expm1(x);
}

double idler_frequency(double pump1_frequency, double pump2_frequency, double signal_frequency) {
    return pump1_frequency + pump2_frequency - signal_frequency;
}

void validate(const NoiseBand& band) {
    if (!(band.bandwidth > 0.0) || !std::isfinite(band.bandwidth)) {
        throw ValidationError("noise band: detection bandwidth must be positive");
    }
    if (!(band.signal_frequency > 0.0) || !(band.idler_frequency > 0.0)) {
        throw ValidationError("noise band: signal and idler frequencies must be positive");
    }
}

double input_noise_quanta(double temperature, const NoiseBand& band) {
    return bose_einstein_occupancy(temperature, band.signal_frequency) +
           band.idler_frequency / band.signal_frequency * bose_einstein_occupancy(temperature, band.idler_frequency) +
           constants::vacuum_quanta;
}

double noise_psd_model(double temperature, double system_gain, double added_noise, const NoiseBand& band) {
    validate(band);
    const double ws = band.signal_frequency;
    const double wi = band.idler_frequency;
    const double ns = bose_einstein_occupancy(temperature, ws);
    const double ni = bose_einstein_occupancy(temperature, wi);
    return band.bandwidth * system_gain * constants::hbar *
           (ns * ws + ni * wi + constants::vacuum_quanta * ws + added_noise * ws);
}

double noise_psd_quanta(double temperature, double system_gain, double added_noise, const NoiseBand& band) {
    validate(band);
    return system_gain * (input_noise_quanta(temperature, band) + added_noise);
}

void validate(const NoiseTrace& t) {
    validate(t.band);
    if (t.temperature.size() != t.psd.size()) {
        throw ValidationError("noise trace: temperature and psd lengths differ");
    }
    if (!t.sigma.empty() && t.sigma.size() != t.psd.size()) {
        throw ValidationError("noise trace: sigma length differs from psd length");
    }
    for (std::size_t k = 0; k < t.temperature.size(); ++k) {
        if (!(t.temperature[k] > 0.0) || !std::isfinite(t.temperature[k])) {
            throw ValidationError(fmt::format("noise trace: temperature must be positive (point {})", k));
        }
        if (!std::isfinite(t.psd[k])) {
            throw ValidationError(fmt::format("noise trace: non-finite psd (point {})", k));
        }
        if (k > 0 && !(t.temperature[k] > t.temperature[k - 1])) {
            throw ValidationError(fmt::format("noise trace: temperature not strictly increasing at point {}", k));
        }
        if (!t.sigma.empty() && !(t.sigma[k] > 0.0)) {
            throw ValidationError(fmt::format("noise trace: sigma must be positive (point {})", k));
        }
    }
    if (t.pump1_frequency && t.pump2_frequency) {
        const double expected = idler_frequency(*t.pump1_frequency, *t.pump2_frequency, t.band.signal_frequency);
        if (std::abs(expected - t.band.idler_frequency) > 1e-9 * t.band.signal_frequency) {
            throw ValidationError(fmt::format(
                "noise trace: idler frequency {:.12g} rad/s inconsistent with pumps (expected {:.12g} rad/s)",
                t.band.idler_frequency, expected));
        }
    }
}

NoiseFit fit_noise_thermometry(const NoiseTrace& trace) {
    validate(trace);
    const std::size_t n = trace.temperature.size();
    if (n < 4) {
        throw ValidationError("noise thermometry: at least 4 temperature points are required");
    }
    std::vector<double> occ(n);
    for (std::size_t k = 0; k < n; ++k) occ[k] = input_noise_quanta(trace.temperature[k], trace.band);
    const auto [mn, mx] = std::minmax_element(occ.begin(), occ.end());
    if (*mx < 3.0 * *mn) {
        throw SolverError(fmt::format(
            "noise thermometry: ill-conditioned sweep, input occupancy only spans a factor {:.3g} (need >= 3)",
            *mx / *mn));
    }

    // Weighted linear regression psd = a occ + b gives the starting point (G = a, N_add = b/a).
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = std::pow(weight_of(trace.sigma, k), 2);
        sw += w;
        sx += w * occ[k];
        sy += w * trace.psd[k];
        sxx += w * occ[k] * occ[k];
        sxy += w * occ[k] * trace.psd[k];
    }
    const double slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / sw;
    if (!(slope > 0.0) || !std::isfinite(slope)) {
        throw SolverError("noise thermometry: output noise does not increase with temperature");
    }
    const double gain_scale = slope;

    const auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
        const double g = p(0) * gain_scale;
        r.resize(static_cast<Eigen::Index>(n));
        J.resize(static_cast<Eigen::Index>(n), 2);
        for (std::size_t k = 0; k < n; ++k) {
            const double w = weight_of(trace.sigma, k);
            const auto i = static_cast<Eigen::Index>(k);
            r(i) = w * (g * (occ[k] + p(1)) - trace.psd[k]);
            J(i, 0) = w * gain_scale * (occ[k] + p(1));
            J(i, 1) = w * g;
        }
    };
    const auto project = [](Eigen::VectorXd& p) { p(0) = std::max(p(0), 1e-12); };
    Eigen::VectorXd start(2);
    start << 1.0, intercept / slope;
    const auto result = levenberg_marquardt(residuals, start, {}, project);

    double data_rms = 0.0;
    for (std::size_t k = 0; k < n; ++k) data_rms += std::pow(trace.psd[k] * weight_of(trace.sigma, k), 2);
    data_rms = std::sqrt(data_rms / static_cast<double>(n));

    NoiseFit fit;
    fit.diagnostics = diagnostics_from(result, n, data_rms);
    if (!result.converged || !result.parameters.allFinite()) {
        throw SolverError(fmt::format("noise thermometry fit did not converge ({})", result.message));
    }
    const Eigen::MatrixXd cov = parameter_covariance(result, trace.sigma.empty());
    fit.system_gain = {result.parameters(0) * gain_scale, std::sqrt(cov(0, 0)) * gain_scale};
    fit.added_noise = {result.parameters(1), std::sqrt(cov(1, 1))};
    fit.output_noise_at_zero = {constants::vacuum_quanta + fit.added_noise.value, fit.added_noise.sigma};
    if (fit.added_noise.value < 0.0) {
        fit.diagnostics.warnings.push_back("fitted added noise is negative; check the temperature calibration");
    }
    return fit;
}

Estimate nkpa_added_noise(const ChainNoiseInputs& in) {
    const double lambda = in.transmission.value;
    const double g = in.amplifier_gain.value;
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw ValidationError(fmt::format("chain noise: transmission {:g} outside (0, 1]", lambda));
    }
    if (!(g > 1.0) || !std::isfinite(g)) {
        throw ValidationError(fmt::format("chain noise: amplifier gain {:g} must exceed 1", g));
    }
    if (!std::isfinite(in.measured_added_noise.value) || !(in.chain_noise.value >= 0.0)) {
        throw ValidationError("chain noise: added noise must be finite and chain noise non-negative");
    }
    const double nq = constants::vacuum_quanta;
    const double n_add = in.measured_added_noise.value;
    const double n_sys = in.chain_noise.value;
    Estimate out;
    out.value = lambda * (n_add + nq) - n_sys / g - nq;
    const double d_nadd = lambda * in.measured_added_noise.sigma;
    const double d_lambda = (n_add + nq) * in.transmission.sigma;
    const double d_nsys = in.chain_noise.sigma / g;
    const double d_g = n_sys / (g * g) * in.amplifier_gain.sigma;
    out.sigma = std::sqrt(d_nadd * d_nadd + d_lambda * d_lambda + d_nsys * d_nsys + d_g * d_g);
    return out;
}

NoiseBandRange nkpa_noise_band(double measured_added_noise, double amplifier_gain, double lambda_low,
                               double lambda_high, double chain_noise_low, double chain_noise_high, int grid_points) {
    if (grid_points < 2) throw ValidationError("chain noise band: need at least 2 grid points per axis");
    NoiseBandRange band{INFINITY, -INFINITY};
    for (int i = 0; i < grid_points; ++i) {
        const double lambda = lambda_low + (lambda_high - lambda_low) * i / (grid_points - 1);
        for (int j = 0; j < grid_points; ++j) {
            const double nsys = chain_noise_low + (chain_noise_high - chain_noise_low) * j / (grid_points - 1);
            const double v = nkpa_added_noise({{measured_added_noise, 0.0}, {amplifier_gain, 0.0}, {nsys, 0.0},
                                               {lambda, 0.0}})
                                 .value;
            band.low = std::min(band.low, v);
            band.high = std::max(band.high, v);
        }
    }
    return band;
}

std::vector<FieldNoisePoint> field_sweep_reduction(std::span<const FieldMeasurement> measurements,
                                                   const CalibrationRecord& record, double base_temperature) {
    if (!record.noise || !record.noise_band) {
        throw DependencyError("field sweep reduction needs a noise-thermometry calibration (G_sys and noise band)");
    }
    const auto& gain = record.noise->system_gain;
    if (!(gain.value > 0.0)) {
        throw DependencyError("field sweep reduction: calibrated system gain is not positive");
    }
    const double input = input_noise_quanta(base_temperature, *record.noise_band);
    std::vector<FieldNoisePoint> out;
    out.reserve(measurements.size());
    for (const auto& m : measurements) {
        if (!std::isfinite(m.psd) || !std::isfinite(m.field) || !(m.sigma >= 0.0)) {
            throw ValidationError("field sweep: non-finite measurement");
        }
        FieldNoisePoint p;
        p.field = m.field;
        p.added_noise.value = m.psd / gain.value - input;
        const double a = m.sigma / gain.value;
        const double b = m.psd * gain.sigma / (gain.value * gain.value);
        p.added_noise.sigma = std::sqrt(a * a + b * b);
        out.push_back(p);
    }
    return out;
}

}  // namespace nkpa
