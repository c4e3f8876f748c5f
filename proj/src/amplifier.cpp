#include "nkpa/amplifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "nkpa/constants.hpp"
#include "nkpa/units.hpp"

namespace nkpa {
namespace {

using std::norm;
constexpr complex I{0.0, 1.0};

// Per-tone inputs of the pump balance equations.
struct ToneInputs {
    double detuning;  // omega_0 - omega_j
    double flux;      // kappa_ext * P_j / (hbar omega_j), photons/s^2 scale
};

struct PumpBalance {
    std::array<ToneInputs, 2> tones;
    double half_kappa_sq;
    double kerr;

    // Kerr-pulled detuning of tone j: self pull K/2 n_j, cross pull K n_k.
    [[nodiscard]] double pulled(int j, const std::array<double, 2>& n) const {
        const int k = 1 - j;
        return tones[j].detuning + 0.5 * kerr * (n[j] + 2.0 * n[k]);
    }

    [[nodiscard]] std::array<double, 2> map(const std::array<double, 2>& n, double scale) const {
        std::array<double, 2> out{};
        for (int j = 0; j < 2; ++j) {
            const double d = pulled(j, n);
            out[j] = scale * tones[j].flux / (half_kappa_sq + d * d);
        }
        return out;
    }

    // det(I - dPhi/dn); positive on the branch connected to zero power.
    [[nodiscard]] double residual_jacobian_det(const std::array<double, 2>& n, double scale) const {
        std::array<std::array<double, 2>, 2> jac{};
        for (int j = 0; j < 2; ++j) {
            const double d = pulled(j, n);
            const double den = half_kappa_sq + d * d;
            const double common = -scale * tones[j].flux * 2.0 * d / (den * den);
            jac[j][j] = common * 0.5 * kerr;
            jac[j][1 - j] = common * kerr;
        }
        return (1.0 - jac[0][0]) * (1.0 - jac[1][1]) - jac[0][1] * jac[1][0];
    }
};

struct StepResult {
    std::array<double, 2> n{};
    bool converged = false;
    int iterations = 0;
};

StepResult damped_fixed_point(const PumpBalance& balance, double scale, std::array<double, 2> n,
                              const PumpSolverOptions& opt) {
    StepResult out;
    double relax = opt.damping;
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iterations; ++it) {
        const auto phi = balance.map(n, scale);
        const double r0 = phi[0] - n[0];
        const double r1 = phi[1] - n[1];
        const double res = std::hypot(r0, r1);
        const double ref = std::max(std::hypot(phi[0], phi[1]), std::numeric_limits<double>::min());
        out.iterations = it + 1;
        if (res <= opt.tolerance * ref) {
            out.n = phi;
            out.converged = true;
            return out;
        }
        if (res > previous) {
            relax = std::max(relax * 0.5, 1e-6);
        } else {
            relax = std::min(relax * 1.05, 1.0);
        }
        previous = res;
        n[0] = std::max(0.0, n[0] + relax * r0);
        n[1] = std::max(0.0, n[1] + relax * r1);
    }
    out.n = n;
    return out;
}

PumpState assemble_state(const DerivedCircuit& circuit, const DriveConfig& drive, const std::array<double, 2>& n) {
    PumpState s;
    s.center_frequency = drive.center_frequency();
    s.amplitude_b = std::polar(std::sqrt(n[0]), drive.pump1_phase);
    s.amplitude_c = std::polar(std::sqrt(n[1]), drive.pump2_phase);
    s.cross_kerr_shift = circuit.kerr * (n[0] + n[1]);
    s.parametric_strength = circuit.kerr * s.amplitude_b * s.amplitude_c;
    s.effective_detuning = circuit.resonant_frequency + s.cross_kerr_shift - s.center_frequency;
    return s;
}

bool above_threshold(const PumpState& s, double kappa) {
    return norm(s.parametric_strength) >= s.effective_detuning * s.effective_detuning + 0.25 * kappa * kappa;
}

// Solves the classical pump balance; the parametric threshold is checked by the caller.
PumpState solve_pump(const DerivedCircuit& circuit, const DriveConfig& drive, const PumpSolverOptions& opt) {
    validate(drive);
    const double kappa = circuit.total_decay_rate();
    PumpBalance balance{};
    balance.half_kappa_sq = 0.25 * kappa * kappa;
    balance.kerr = circuit.kerr;
    balance.tones[0] = {circuit.resonant_frequency - drive.pump1_frequency,
                        circuit.external_coupling_rate * drive.pump1_power /
                            (constants::hbar * drive.pump1_frequency)};
    balance.tones[1] = {circuit.resonant_frequency - drive.pump2_frequency,
                        circuit.external_coupling_rate * drive.pump2_power /
                            (constants::hbar * drive.pump2_frequency)};

    std::vector<std::string> warnings;
    const double pumps[2] = {drive.pump1_frequency, drive.pump2_frequency};
    for (int j = 0; j < 2; ++j) {
        if (std::abs(pumps[j] - circuit.resonant_frequency) <= kappa) {
            warnings.push_back(fmt::format(
                "pump {} is detuned by {:.4g} MHz, within one linewidth ({:.4g} MHz) of the resonance; the two-tone "
                "separation assumed by the linearised model is marginal",
                j + 1, (pumps[j] - circuit.resonant_frequency) / constants::two_pi / 1e6,
                kappa / constants::two_pi / 1e6));
        }
    }

    std::array<double, 2> n{0.0, 0.0};
    int total_iterations = 0;
    if (drive.pump1_power > 0.0 || drive.pump2_power > 0.0) {
        const double base_step = 1.0 / std::max(1, opt.continuation_steps);
        double step = base_step;
        double s = 0.0;
        int refinements = 0;
        while (s < 1.0) {
            const double s_try = std::min(1.0, s + step);
            // Linear-in-power predictor from the previous point.
            std::array<double, 2> guess = n;
            if (s > 0.0) {
                guess = {n[0] * s_try / s, n[1] * s_try / s};
            }
            const auto r = damped_fixed_point(balance, s_try, guess, opt);
            total_iterations += r.iterations;
            const double det = r.converged ? balance.residual_jacobian_det(r.n, s_try) : -1.0;
            const double jump = std::hypot(r.n[0] - guess[0], r.n[1] - guess[1]);
            const double scale = std::max(std::hypot(r.n[0], r.n[1]), std::numeric_limits<double>::min());
            const bool continuous = s == 0.0 || jump <= 0.3 * scale;
            if (r.converged && det > 0.0 && continuous) {
                n = r.n;
                s = s_try;
                step = std::min(base_step, step * 2.0);
                continue;
            }
            if (++refinements > opt.max_refinements * 8 || step < base_step * std::ldexp(1.0, -opt.max_refinements)) {
                PumpState last = assemble_state(circuit, drive, r.converged ? r.n : n);
                last.stable = false;
                last.iterations = total_iterations;
                last.warnings = warnings;
                throw PumpUnstableError(
                    fmt::format("pump steady state is bistable or does not converge at {:.6g} of the requested power "
                                "(det = {:.3g}, converged = {})",
                                s_try, det, r.converged),
                    std::move(last));
            }
            step *= 0.5;
        }
    }
    PumpState state = assemble_state(circuit, drive, n);
    state.iterations = total_iterations;
    state.warnings = std::move(warnings);
    state.stable = !above_threshold(state, kappa);
    return state;
}

struct Matrix2 {
    complex a, b, c, d;
};

// Inverse of the linearised drift matrix at signal offset delta from the pump centre.
Matrix2 drift_inverse(double half_kappa, double detuning, complex epsilon, double delta) {
    const complex m00 = half_kappa + I * (detuning - delta);
    const complex m01 = I * epsilon;
    const complex m10 = -I * std::conj(epsilon);
    const complex m11 = half_kappa - I * (detuning + delta);
    const complex det = m00 * m11 - m01 * m10;
    return {m11 / det, -m01 / det, -m10 / det, m00 / det};
}

void require_below_threshold(const DerivedCircuit& circuit, const PumpState& pump) {
    if (above_threshold(pump, circuit.total_decay_rate())) {
        throw DivergentGainError(fmt::format(
            "|epsilon| = {:.6g} rad/s is at or above the parametric threshold {:.6g} rad/s",
            std::abs(pump.parametric_strength), pump.threshold(circuit.total_decay_rate())));
    }
}

double gain_db_from(complex g) { return 20.0 * std::log10(std::abs(g)); }

}  // namespace

void validate(const DriveConfig& d) {
    if (!(d.pump1_frequency > 0.0) || !(d.pump2_frequency > 0.0) || !std::isfinite(d.pump1_frequency) ||
        !std::isfinite(d.pump2_frequency)) {
        throw ValidationError("drive: pump frequencies must be positive and finite");
    }
    if (!(d.pump1_power >= 0.0) || !(d.pump2_power >= 0.0) || !std::isfinite(d.pump1_power) ||
        !std::isfinite(d.pump2_power)) {
        throw ValidationError("drive: pump powers must be non-negative and finite");
    }
    if (!std::isfinite(d.pump1_phase) || !std::isfinite(d.pump2_phase)) {
        throw ValidationError("drive: pump phases must be finite");
    }
}

double PumpState::threshold(double total_decay_rate) const {
    return std::hypot(effective_detuning, 0.5 * total_decay_rate);
}

PumpState pump_steady_state(const DerivedCircuit& circuit, const DriveConfig& drive,
                            const PumpSolverOptions& options) {
    PumpState state = solve_pump(circuit, drive, options);
    if (!state.stable) {
        const double eps = std::abs(state.parametric_strength);
        const double thr = state.threshold(circuit.total_decay_rate());
        throw PumpUnstableError(
            fmt::format("pump drives the cavity past the parametric threshold (|epsilon| = {:.6g}, threshold "
                        "{:.6g} rad/s)",
                        eps, thr),
            std::move(state));
    }
    return state;
}

complex reflection_response(double omega, double resonant_frequency, double external_coupling_rate,
                            double intrinsic_loss_rate) {
    const double kappa = external_coupling_rate + intrinsic_loss_rate;
    return 1.0 - external_coupling_rate / (I * (omega - resonant_frequency) + 0.5 * kappa);
}

complex reflection_coefficient(const DerivedCircuit& circuit, double probe_frequency) {
    return reflection_response(probe_frequency, circuit.resonant_frequency, circuit.external_coupling_rate,
                               circuit.intrinsic_loss_rate);
}

Scattering scattering(const DerivedCircuit& circuit, const PumpState& pump, double probe_frequency) {
    require_below_threshold(circuit, pump);
    const double ke = circuit.external_coupling_rate;
    const double ki = circuit.intrinsic_loss_rate;
    const auto inv = drift_inverse(0.5 * circuit.total_decay_rate(), pump.effective_detuning,
                                   pump.parametric_strength, probe_frequency - pump.center_frequency);
    // The drift equations are written for e^{-i omega t} phasors; conjugate to
    // the e^{+i omega t} convention of reflection_response().
    const double loss = -std::sqrt(ke * ki);
    return {std::conj(1.0 - ke * inv.a), std::conj(-ke * inv.b), std::conj(loss * inv.a), std::conj(loss * inv.b)};
}

GainSpectrum gain_spectrum(const DerivedCircuit& circuit, const PumpState& pump, std::span<const double> grid) {
    require_below_threshold(circuit, pump);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw ValidationError("gain spectrum: frequency grid must be strictly increasing");
        }
    }
    GainSpectrum out;
    out.frequency.assign(grid.begin(), grid.end());
    out.signal.resize(grid.size());
    out.idler.resize(grid.size());
    out.power_gain_db.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto s = scattering(circuit, pump, grid[i]);
        out.signal[i] = s.signal;
        out.idler[i] = s.idler;
        out.power_gain_db[i] = gain_db_from(s.signal);
    }
    return out;
}

std::vector<double> default_grid(const DerivedCircuit& circuit, const PumpState& pump, std::size_t points) {
    if (points < 2) {
        throw ValidationError("frequency grid needs at least two points");
    }
    const double kappa = circuit.total_decay_rate();
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = pump.center_frequency - kappa + 2.0 * kappa * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return grid;
}

complex quadrature_response(const DerivedCircuit& circuit, const PumpState& pump, double probe_phase) {
    require_below_threshold(circuit, pump);
    const double ke = circuit.external_coupling_rate;
    const auto inv =
        drift_inverse(0.5 * circuit.total_decay_rate(), pump.effective_detuning, pump.parametric_strength, 0.0);
    const complex gs = 1.0 - ke * inv.a;
    const complex gi = -ke * inv.b;
    return std::conj(gs + gi * std::exp(-2.0 * I * probe_phase));
}

PhaseSweep phase_sensitive_gain(const DerivedCircuit& circuit, const PumpState& pump,
                                std::span<const double> relative_phase) {
    require_below_threshold(circuit, pump);
    const double mean_pump_phase = 0.5 * (std::arg(pump.amplitude_b) + std::arg(pump.amplitude_c));
    // arg() folds the pump phases; use the phase of epsilon, which is all the response depends on.
    const double eps_phase = pump.parametric_strength == complex{} ? 2.0 * mean_pump_phase
                                                                    : std::arg(pump.parametric_strength);
    PhaseSweep out;
    out.relative_phase.assign(relative_phase.begin(), relative_phase.end());
    out.response.reserve(relative_phase.size());
    out.gain_db.reserve(relative_phase.size());
    for (double dphi : relative_phase) {
        const complex r = quadrature_response(circuit, pump, dphi + 0.5 * eps_phase);
        out.response.push_back(r);
        out.gain_db.push_back(gain_db_from(r));
    }
    return out;
}

double ideal_added_noise(const DerivedCircuit& circuit, const PumpState& pump, double probe_frequency) {
    const auto s = scattering(circuit, pump, probe_frequency);
    return (norm(s.idler) + norm(s.loss_signal) + norm(s.loss_idler)) / (2.0 * norm(s.signal));
}

double center_gain(const DerivedCircuit& circuit, const PumpState& pump) {
    return norm(scattering(circuit, pump, pump.center_frequency).signal);
}

Bandwidth three_db_bandwidth(const DerivedCircuit& circuit, const PumpState& pump) {
    Bandwidth bw;
    bw.peak_gain = center_gain(circuit, pump);
    const double half = 0.5 * bw.peak_gain;
    const double kappa = circuit.total_decay_rate();
    const auto gain_at = [&](double delta) {
        return norm(scattering(circuit, pump, pump.center_frequency + delta).signal);
    };
    const auto edge = [&](double sign) {
        double inner = 0.0;
        double outer = sign * kappa * 1e-6;
        while (gain_at(outer) > half) {
            inner = outer;
            outer *= 2.0;
            if (std::abs(outer) > 1e3 * kappa) {
                throw SolverError("3 dB bandwidth: gain does not fall to half its centre value");
            }
        }
        for (int it = 0; it < 200 && std::abs(outer - inner) > 1e-13 * kappa; ++it) {
            const double mid = 0.5 * (inner + outer);
            (gain_at(mid) > half ? inner : outer) = mid;
        }
        return pump.center_frequency + 0.5 * (inner + outer);
    };
    bw.lower = edge(-1.0);
    bw.upper = edge(1.0);
    return bw;
}

namespace {

DriveConfig make_drive(double center, double half_sep, double p1, const TuneOptions& o) {
    return {center - half_sep, center + half_sep, p1, p1 * o.power_ratio, o.pump1_phase, o.pump2_phase};
}

struct CenteredPump {
    DriveConfig drive;
    PumpState pump;
    double gain = 0.0;  // linear, +inf at or above threshold
};

// Re-centres the pumps so that the cross-Kerr-shifted resonance sits at the
// pump centre (Delta_eff = 0) for pump-1 power p1.
CenteredPump centered_pump(const DerivedCircuit& circuit, double half_sep, double p1, const TuneOptions& o) {
    CenteredPump out;
    double center = circuit.resonant_frequency;
    const double kappa = circuit.total_decay_rate();
    for (int it = 0; it < 200; ++it) {
        out.drive = make_drive(center, half_sep, p1, o);
        out.pump = solve_pump(circuit, out.drive, {});
        const double next = circuit.resonant_frequency + out.pump.cross_kerr_shift;
        const bool done = std::abs(next - center) <= 1e-13 * kappa + 1e-15 * circuit.resonant_frequency;
        center = next;
        if (done) break;
    }
    out.drive = make_drive(center, half_sep, p1, o);
    out.pump = solve_pump(circuit, out.drive, {});
    if (above_threshold(out.pump, kappa)) {
        out.gain = std::numeric_limits<double>::infinity();
    } else {
        out.gain = center_gain(circuit, out.pump);
    }
    return out;
}

}  // namespace

DriveConfig tune_drive_for_gain(const DerivedCircuit& circuit, double pump_half_separation, double target_gain_db,
                                const TuneOptions& o) {
    if (!(pump_half_separation > 0.0)) {
        throw ValidationError("tune: pump half separation must be positive");
    }
    if (!(o.power_ratio > 0.0) || !std::isfinite(o.power_ratio)) {
        throw ValidationError("tune: power ratio must be positive");
    }
    if (!(target_gain_db > 0.0) || !std::isfinite(target_gain_db)) {
        throw ValidationError("tune: target gain must be positive (dB)");
    }
    const double target = units::db_to_linear_power(target_gain_db);
    const auto evaluate = [&](double log_p) -> double {
        try {
            return centered_pump(circuit, pump_half_separation, std::exp(log_p), o).gain;
        } catch (const PumpUnstableError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double lo = std::log(1e-30);
    double hi = std::log(1e-22);
    while (evaluate(hi) < target) {
        lo = hi;
        hi += std::log(10.0);
        if (hi > std::log(1.0)) {
            throw NoSolutionError(fmt::format("tune: {:.3g} dB centre gain not reached below 1 W of pump", target_gain_db),
                                  0.0, 1.0);
        }
    }
    double log_p = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        log_p = 0.5 * (lo + hi);
        const double g = evaluate(log_p);
        if (std::isfinite(g) && std::abs(units::linear_power_to_db(g) - target_gain_db) < o.gain_tolerance_db) {
            break;
        }
        (g < target ? lo : hi) = log_p;
    }
    const auto result = centered_pump(circuit, pump_half_separation, std::exp(log_p), o);
    if (!std::isfinite(result.gain) ||
        std::abs(units::linear_power_to_db(result.gain) - target_gain_db) > 10.0 * o.gain_tolerance_db) {
        throw NoSolutionError(fmt::format("tune: could not settle on {:.3g} dB centre gain", target_gain_db),
                              std::exp(lo), std::exp(hi));
    }
    return result.drive;
}

namespace {

// Intracavity signal photon number under the quasi-static saturation model.
double saturated_signal_photons(const DerivedCircuit& circuit, const PumpState& pump, double input_power) {
    const double half_kappa = 0.5 * circuit.total_decay_rate();
    const double flux = circuit.external_coupling_rate * input_power / (constants::hbar * pump.center_frequency);
    const auto photons_at = [&](double n) {
        const auto inv = drift_inverse(half_kappa, pump.effective_detuning + circuit.kerr * n,
                                       pump.parametric_strength, 0.0);
        return flux * norm(inv.a);
    };
    const auto residual = [&](double n) { return n - photons_at(n); };
    if (input_power <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = std::max(photons_at(0.0), std::numeric_limits<double>::min());
    for (int it = 0; residual(hi) < 0.0; ++it) {
        lo = hi;
        hi *= 2.0;
        if (it > 2000) throw SolverError("compression: signal photon number diverges");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double saturated_gain_db(const DerivedCircuit& circuit, const PumpState& pump, double input_power) {
    require_below_threshold(circuit, pump);
    const double n = saturated_signal_photons(circuit, pump, input_power);
    PumpState loaded = pump;
    loaded.effective_detuning += circuit.kerr * n;
    loaded.cross_kerr_shift += circuit.kerr * n;
    return units::linear_power_to_db(center_gain(circuit, loaded));
}

CompressionResult compression_point(const DerivedCircuit& circuit, const PumpState& pump, double min_power,
                                    double max_power) {
    if (!(min_power > 0.0) || !(max_power > min_power)) {
        throw ValidationError("compression: invalid power search range");
    }
    CompressionResult out;
    out.small_signal_gain_db = units::linear_power_to_db(center_gain(circuit, pump));
    const double target = out.small_signal_gain_db - 1.0;

    double lo_dbm = units::watt_to_dbm(min_power);
    const double max_dbm = units::watt_to_dbm(max_power);
    double hi_dbm = lo_dbm;
    bool bracketed = false;
    while (hi_dbm <= max_dbm) {
        if (saturated_gain_db(circuit, pump, units::dbm_to_watt(hi_dbm)) <= target) {
            bracketed = true;
            break;
        }
        lo_dbm = hi_dbm;
        hi_dbm += 1.0;
    }
    if (!bracketed) {
        throw SolverError(fmt::format("compression: gain does not drop 1 dB between {:.1f} and {:.1f} dBm",
                                      units::watt_to_dbm(min_power), max_dbm));
    }
    while (hi_dbm - lo_dbm > 0.01) {
        const double mid = 0.5 * (lo_dbm + hi_dbm);
        (saturated_gain_db(circuit, pump, units::dbm_to_watt(mid)) > target ? lo_dbm : hi_dbm) = mid;
    }
    const double p1db_dbm = 0.5 * (lo_dbm + hi_dbm);
    out.input_power_1db = units::dbm_to_watt(p1db_dbm);
    out.gain_at_p1db = saturated_gain_db(circuit, pump, out.input_power_1db);
    return out;
}

RetuneResult retune_for_field_shift(const DerivedCircuit& circuit, const DriveConfig& drive,
                                    double shifted_resonance, double target_gain_db) {
    validate(drive);
    RetuneResult out;
    if (shifted_resonance == circuit.resonant_frequency) {
        out.drive = drive;
        out.circuit = circuit;
        out.achieved_gain_db = units::linear_power_to_db(center_gain(circuit, pump_steady_state(circuit, drive)));
        return out;
    }
    const double shift = shifted_resonance - circuit.resonant_frequency;
    const double half_sep = 0.5 * (drive.pump2_frequency - drive.pump1_frequency);
    if (std::abs(shift) >= std::abs(half_sep)) {
        throw ValidationError("retune: resonance shift is not small compared with the pump detunings");
    }
    out.circuit = shift_resonance(circuit, shifted_resonance);
    // tune_drive_for_gain() puts pump 1 below the centre; map the lower/upper
    // tones of the input drive onto that layout and back.
    const bool swapped = half_sep < 0.0;
    const double p_low = swapped ? drive.pump2_power : drive.pump1_power;
    const double p_high = swapped ? drive.pump1_power : drive.pump2_power;
    TuneOptions o;
    o.power_ratio = p_low > 0.0 ? p_high / p_low : 1.0;
    o.pump1_phase = swapped ? drive.pump2_phase : drive.pump1_phase;
    o.pump2_phase = swapped ? drive.pump1_phase : drive.pump2_phase;
    out.drive = tune_drive_for_gain(out.circuit, std::abs(half_sep), target_gain_db, o);
    if (swapped) {
        std::swap(out.drive.pump1_frequency, out.drive.pump2_frequency);
        std::swap(out.drive.pump1_power, out.drive.pump2_power);
        std::swap(out.drive.pump1_phase, out.drive.pump2_phase);
    }
    out.power_adjustment_db = 10.0 * std::log10(out.drive.total_power() / drive.total_power());
    out.achieved_gain_db =
        units::linear_power_to_db(center_gain(out.circuit, pump_steady_state(out.circuit, out.drive)));
    return out;
}

}  // namespace nkpa
