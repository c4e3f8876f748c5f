#include "nkpa/circuit_model.hpp"

#include <cmath>
#include <fmt/format.h>

#include "nkpa/constants.hpp"

namespace nkpa {
namespace {

void require_positive(double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ValidationError(fmt::format("{} must be strictly positive and finite (got {:g})", field, value));
    }
}

void require_non_negative(double value, const char* field) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ValidationError(fmt::format("{} must be non-negative and finite (got {:g})", field, value));
    }
}

// Relative agreement required between the two Kerr routes.
constexpr double kerr_route_tolerance = 1e-12;

DerivedCircuit assemble(double l_k0, double parasitic, double capacitance, double i_star, double kappa_ext,
                        double kappa_int) {
    DerivedCircuit c;
    c.bridge_inductance = l_k0;
    c.total_inductance = l_k0 + parasitic;
    c.participation_ratio = l_k0 / c.total_inductance;
    c.impedance = std::sqrt(c.total_inductance / capacitance);
    c.resonant_frequency = 1.0 / std::sqrt(c.total_inductance * capacitance);
    c.characteristic_current = i_star;
    c.external_coupling_rate = kappa_ext;
    c.intrinsic_loss_rate = kappa_int;

    if (!(c.participation_ratio > 0.0 && c.participation_ratio <= 1.0)) {
        throw ValidationError(
            fmt::format("inconsistent spec: participation ratio {:g} outside (0, 1]", c.participation_ratio));
    }
    c.zero_point_current = zero_point_current(c.participation_ratio, c.resonant_frequency, l_k0);
    if (!(c.zero_point_current < i_star)) {
        throw ValidationError(fmt::format("inconsistent spec: zero-point current {:g} A is not below I* = {:g} A",
                                          c.zero_point_current, i_star));
    }
    c.kerr = kerr_coefficient(c.resonant_frequency, c.participation_ratio, c.impedance, i_star);
    return c;
}

double kerr_zero_point_route(const DerivedCircuit& c) {
    // Substitute L_k0 = alpha Z_r / omega so this route shares no intermediate with kerr_coefficient().
    const double l_k0 = c.participation_ratio * c.impedance / c.resonant_frequency;
    const double i_zpf = zero_point_current(c.participation_ratio, c.resonant_frequency, l_k0);
    return kerr_from_zero_point(l_k0, c.characteristic_current, i_zpf);
}

}  // namespace

void validate(const FilmProperties& film) {
    require_positive(film.sheet_inductance, "film.sheet_inductance");
    require_positive(film.thickness, "film.thickness");
    require_non_negative(film.dead_width_per_side, "film.dead_width_per_side");
    require_positive(film.critical_current_density, "film.critical_current_density");
}

void validate(const NanobridgeGeometry& geometry, const FilmProperties& film) {
    require_positive(geometry.width, "geometry.width");
    require_positive(geometry.length, "geometry.length");
    if (!(geometry.width > 2.0 * film.dead_width_per_side)) {
        throw ValidationError(fmt::format("degenerate geometry: width {:g} m does not exceed twice the dead width {:g} m",
                                          geometry.width, film.dead_width_per_side));
    }
}

void validate(const LumpedCircuit& circuit) {
    require_positive(circuit.shunt_capacitance, "circuit.shunt_capacitance");
    require_non_negative(circuit.parasitic_inductance, "circuit.parasitic_inductance");
    require_non_negative(circuit.external_coupling_rate, "circuit.external_coupling_rate");
    require_non_negative(circuit.intrinsic_loss_rate, "circuit.intrinsic_loss_rate");
    if (!(circuit.external_coupling_rate + circuit.intrinsic_loss_rate > 0.0)) {
        throw ValidationError("circuit: total decay rate must be positive");
    }
}

void validate(const DeviceSpec& spec) {
    validate(spec.film);
    validate(spec.geometry, spec.film);
    validate(spec.circuit);
}

double effective_width(const NanobridgeGeometry& geometry, const FilmProperties& film) {
    const double w = geometry.width - 2.0 * film.dead_width_per_side;
    if (!(w > 0.0)) {
        throw ValidationError(fmt::format("degenerate geometry: effective width {:g} m is not positive", w));
    }
    return w;
}

double bridge_inductance(const NanobridgeGeometry& geometry, const FilmProperties& film) {
    return film.sheet_inductance * geometry.length / effective_width(geometry, film);
}

double characteristic_current(const NanobridgeGeometry& geometry, const FilmProperties& film) {
    return film.critical_current_density * effective_width(geometry, film) * film.thickness;
}

double calibrate_current_density(double i_star, double effective_width, double thickness) {
    require_positive(i_star, "characteristic_current");
    require_positive(effective_width, "effective_width");
    require_positive(thickness, "thickness");
    return i_star / (effective_width * thickness);
}

double kerr_coefficient(double omega, double alpha, double impedance, double i_star) {
    return 1.5 * constants::hbar * omega * omega * omega * alpha / (impedance * i_star * i_star);
}

double zero_point_current(double alpha, double omega, double bridge_inductance) {
    return std::sqrt(alpha * constants::hbar * omega / (2.0 * bridge_inductance));
}

double kerr_from_zero_point(double bridge_inductance, double i_star, double i_zpf) {
    const double i2 = i_zpf * i_zpf;
    return 6.0 * bridge_inductance / (i_star * i_star) * i2 * i2 / constants::hbar;
}

DerivedCircuit derive_circuit(const DeviceSpec& spec, AlphaSource source) {
    validate(spec.film);
    validate(spec.circuit);
    validate(spec.geometry, spec.film);

    const auto& lc = spec.circuit;
    const double i_star = characteristic_current(spec.geometry, spec.film);
    double l_k0 = 0.0;
    if (source == AlphaSource::Geometry) {
        l_k0 = bridge_inductance(spec.geometry, spec.film);
    } else {
        if (!spec.reported.participation_ratio) {
            throw ValidationError("reported.participation_ratio is required when alpha comes from the file");
        }
        const double alpha = *spec.reported.participation_ratio;
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw ValidationError(fmt::format("reported.participation_ratio {:g} must lie in (0, 1)", alpha));
        }
        if (!(lc.parasitic_inductance > 0.0)) {
            throw ValidationError("circuit.parasitic_inductance must be positive when alpha comes from the file");
        }
        l_k0 = alpha / (1.0 - alpha) * lc.parasitic_inductance;
    }

    DerivedCircuit c = assemble(l_k0, lc.parasitic_inductance, lc.shunt_capacitance, i_star,
                                lc.external_coupling_rate, lc.intrinsic_loss_rate);
    const double k_zp = kerr_zero_point_route(c);
    if (std::abs(k_zp - c.kerr) > kerr_route_tolerance * c.kerr) {
        throw ValidationError(fmt::format("internal inconsistency: Kerr routes disagree ({:.17g} vs {:.17g} rad/s)",
                                          c.kerr, k_zp));
    }
    return c;
}

CircuitReport describe_circuit(const DeviceSpec& spec, AlphaSource source) {
    CircuitReport r;
    r.alpha_source = source;
    r.circuit = derive_circuit(spec, source);
    r.kerr_zero_point_route = kerr_zero_point_route(r.circuit);
    r.kerr_route_relative_error = std::abs(r.kerr_zero_point_route - r.circuit.kerr) / r.circuit.kerr;

    const double l_geom = bridge_inductance(spec.geometry, spec.film);
    r.geometry_participation_ratio = l_geom / (l_geom + spec.circuit.parasitic_inductance);
    r.specified_participation_ratio = spec.reported.participation_ratio;
    if (r.specified_participation_ratio) {
        const double a = *r.specified_participation_ratio;
        r.participation_ratios_disagree = std::abs(a - r.geometry_participation_ratio) > 1e-6 * a;
        if (r.participation_ratios_disagree) {
            const double l_implied = a / (1.0 - a) * spec.circuit.parasitic_inductance;
            r.notes.push_back(fmt::format(
                "participation ratio from geometry {:.4f} (L_k0 = {:.4g} nH) differs from the specified {:.4f} "
                "(implies L_k0 = {:.4g} nH with the given parasitic inductance)",
                r.geometry_participation_ratio, l_geom * 1e9, a, l_implied * 1e9));
        }
    }

    const auto& rep = spec.reported;
    if (rep.impedance && rep.participation_ratio && rep.characteristic_current && rep.resonant_frequency) {
        r.kerr_at_reported_values =
            kerr_coefficient(*rep.resonant_frequency, *rep.participation_ratio, *rep.impedance, *rep.characteristic_current);
    }
    r.reported_kerr = rep.kerr;
    if (r.reported_kerr && r.kerr_at_reported_values) {
        const double ratio = *r.kerr_at_reported_values / *r.reported_kerr;
        if (std::abs(ratio - 1.0) > 0.05) {
            r.notes.push_back(fmt::format(
                "INCONSISTENCY: K evaluated at the reported (Z, alpha, I*, f) is 2pi x {:.6g} Hz but the reported K "
                "is 2pi x {:.6g} Hz (ratio {:.4g}); both values are kept, neither is corrected",
                *r.kerr_at_reported_values / constants::two_pi, *r.reported_kerr / constants::two_pi, ratio));
        }
    }
    if (r.reported_kerr) {
        const double ratio = r.circuit.kerr / *r.reported_kerr;
        if (std::abs(ratio - 1.0) > 0.05) {
            r.notes.push_back(fmt::format("derived K = 2pi x {:.6g} Hz vs reported 2pi x {:.6g} Hz (ratio {:.4g})",
                                          r.circuit.kerr / constants::two_pi,
                                          *r.reported_kerr / constants::two_pi, ratio));
        }
    }
    return r;
}

DerivedCircuit shift_resonance(const DerivedCircuit& circuit, double resonant_frequency) {
    require_positive(resonant_frequency, "resonant_frequency");
    const double capacitance = circuit.shunt_capacitance();
    const double parasitic = circuit.parasitic_inductance();
    const double total = 1.0 / (resonant_frequency * resonant_frequency * capacitance);
    const double l_k0 = total - parasitic;
    if (!(l_k0 > 0.0)) {
        throw ValidationError(fmt::format(
            "resonance at {:g} rad/s would need a non-positive bridge inductance", resonant_frequency));
    }
    return assemble(l_k0, parasitic, capacitance, circuit.characteristic_current, circuit.external_coupling_rate,
                    circuit.intrinsic_loss_rate);
}

namespace {

struct DesignTargets {
    double bridge_inductance;
    double capacitance;
};

DesignTargets design_targets(const DesignConstraints& dc) {
    validate(dc.film);
    require_positive(dc.parasitic_inductance, "design.parasitic_inductance");
    require_positive(dc.resonant_frequency, "design.resonant_frequency");
    if (!(dc.participation_ratio > 0.0 && dc.participation_ratio < 1.0)) {
        throw ValidationError("design.participation_ratio must lie in (0, 1)");
    }
    require_positive(dc.min_characteristic_current, "design.min_characteristic_current");
    if (!(dc.max_characteristic_current > dc.min_characteristic_current)) {
        throw ValidationError("design: max_characteristic_current must exceed min_characteristic_current");
    }
    const double total = dc.parasitic_inductance / (1.0 - dc.participation_ratio);
    return {total - dc.parasitic_inductance,
            1.0 / (dc.resonant_frequency * dc.resonant_frequency * total)};
}

double width_for_current(const DesignConstraints& dc, double i_star) {
    return i_star / (dc.film.critical_current_density * dc.film.thickness) + 2.0 * dc.film.dead_width_per_side;
}

DerivedCircuit trial_circuit(const DesignConstraints& dc, const DesignTargets& t, double width,
                             NanobridgeGeometry& geometry) {
    const double w_eff = width - 2.0 * dc.film.dead_width_per_side;
    geometry.width = width;
    geometry.length = t.bridge_inductance * w_eff / dc.film.sheet_inductance;
    DeviceSpec spec;
    spec.film = dc.film;
    spec.geometry = geometry;
    spec.circuit = {t.capacitance, dc.parasitic_inductance, dc.external_coupling_rate, dc.intrinsic_loss_rate};
    if (!(spec.circuit.external_coupling_rate + spec.circuit.intrinsic_loss_rate > 0.0)) {
        // Decay rates do not enter K; any positive placeholder keeps validation happy.
        spec.circuit.external_coupling_rate = 1.0;
    }
    return derive_circuit(spec);
}

}  // namespace

std::pair<double, double> achievable_kerr_range(const DesignConstraints& dc) {
    const auto t = design_targets(dc);
    NanobridgeGeometry g;
    const double k_high = trial_circuit(dc, t, width_for_current(dc, dc.min_characteristic_current), g).kerr;
    const double k_low = trial_circuit(dc, t, width_for_current(dc, dc.max_characteristic_current), g).kerr;
    return {k_low, k_high};
}

BridgeDesign design_bridge_for_kerr(double target_kerr, const DesignConstraints& dc) {
    require_positive(target_kerr, "target_kerr");
    const auto t = design_targets(dc);
    const auto [k_low, k_high] = achievable_kerr_range(dc);
    if (target_kerr > k_high * (1.0 + 1e-12) || target_kerr < k_low * (1.0 - 1e-12)) {
        throw NoSolutionError(fmt::format("target K = 2pi x {:g} Hz outside achievable range [2pi x {:g}, 2pi x {:g}] Hz",
                                          target_kerr / constants::two_pi, k_low / constants::two_pi,
                                          k_high / constants::two_pi),
                              k_low, k_high);
    }

    // K decreases monotonically with width; bisect in log(width).
    double lo = std::log(width_for_current(dc, dc.min_characteristic_current));
    double hi = std::log(width_for_current(dc, dc.max_characteristic_current));
    BridgeDesign out;
    out.shunt_capacitance = t.capacitance;
    int it = 0;
    for (; it < 400 && (hi - lo) > dc.relative_tolerance; ++it) {
        const double mid = 0.5 * (lo + hi);
        NanobridgeGeometry g;
        const double k = trial_circuit(dc, t, std::exp(mid), g).kerr;
        if (k > target_kerr) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.circuit = trial_circuit(dc, t, std::exp(0.5 * (lo + hi)), out.geometry);
    out.iterations = it;
    return out;
}

}  // namespace nkpa
