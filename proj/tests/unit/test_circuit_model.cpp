#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "nkpa/circuit_model.hpp"

using namespace nkpa;
using fixtures::two_pi;

TEST_CASE("effective width removes the dead edges") {
    FilmProperties film{179e-12, 4e-9, 5e-9, 1e10};
    CHECK(effective_width({23e-9, 140e-9}, film) == doctest::Approx(13e-9).epsilon(1e-14));
    CHECK(effective_width({100e-9, 140e-9}, film) == doctest::Approx(90e-9).epsilon(1e-14));
    film.dead_width_per_side = 0.0;
    CHECK(effective_width({23e-9, 140e-9}, film) == 23e-9);
    film.dead_width_per_side = 12e-9;
    CHECK_THROWS_AS(validate(NanobridgeGeometry{23e-9, 140e-9}, film), ValidationError);
}

TEST_CASE("bridge inductance counts squares of the effective strip") {
    const auto spec = fixtures::reference_device();
    CHECK(bridge_inductance(spec.geometry, spec.film) == doctest::Approx(1.9276923076923077e-9).epsilon(1e-14));
    auto nominal = spec.film;
    nominal.dead_width_per_side = 0.0;
    CHECK(bridge_inductance(spec.geometry, nominal) == doctest::Approx(1.0895652173913043e-9).epsilon(1e-14));
    // one square
    const NanobridgeGeometry square{23e-9, 13e-9};
    CHECK(bridge_inductance(square, spec.film) == doctest::Approx(spec.film.sheet_inductance).epsilon(1e-14));
}

TEST_CASE("characteristic current follows the effective cross-section") {
    const auto spec = fixtures::reference_device();
    CHECK(calibrate_current_density(2e-6, 13e-9, 4e-9) == doctest::Approx(3.8461538461538e10).epsilon(1e-12));
    CHECK(characteristic_current(spec.geometry, spec.film) == doctest::Approx(2e-6).epsilon(1e-13));
    NanobridgeGeometry wide{2 * 13e-9 + 10e-9, 140e-9};
    CHECK(characteristic_current(wide, spec.film) == doctest::Approx(4e-6).epsilon(1e-13));
    // area x5000 reaches the top of the engineering range
    FilmProperties thick = spec.film;
    thick.thickness *= 50.0;
    NanobridgeGeometry big{100 * 13e-9 + 10e-9, 140e-9};
    CHECK(characteristic_current(big, thick) == doctest::Approx(10e-3).epsilon(1e-12));
}

TEST_CASE("Kerr coefficient at the reported device numbers") {
    const double k = kerr_coefficient(two_pi * 7.45e9, 0.584, 88.7, 2e-6);
    CHECK(k == doctest::Approx(26705768.447865848).epsilon(1e-12));
    CHECK(k / two_pi == doctest::Approx(4.25e6).epsilon(0.01e6 / 4.25e6));
    // K scales as 1/I*^2 across the engineering range
    CHECK(kerr_coefficient(two_pi * 7.45e9, 0.584, 88.7, 10e-3) / k == doctest::Approx(4e-8).epsilon(1e-12));
}

TEST_CASE("both Kerr routes agree on randomised specs") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        DeviceSpec s;
        s.film = {50e-12 + 400e-12 * u(rng), 2e-9 + 20e-9 * u(rng), 5e-9 * u(rng), 1e10 + 1e11 * u(rng)};
        s.geometry = {2 * s.film.dead_width_per_side + 5e-9 + 200e-9 * u(rng), 20e-9 + 2e-6 * u(rng)};
        s.circuit = {20e-15 + 500e-15 * u(rng), 5e-9 * u(rng), two_pi * 50e6, two_pi * 1e6};
        const auto c = derive_circuit(s);
        const double k2 = kerr_from_zero_point(c.bridge_inductance, c.characteristic_current, c.zero_point_current);
        CHECK(std::abs(k2 - c.kerr) / c.kerr < 1e-12);
        CHECK(c.participation_ratio > 0.0);
        CHECK(c.participation_ratio <= 1.0);
    }
}

TEST_CASE("zero parasitic inductance gives full participation") {
    auto s = fixtures::reference_device();
    s.circuit.parasitic_inductance = 0.0;
    CHECK(derive_circuit(s).participation_ratio == 1.0);
}

TEST_CASE("derived reference circuit") {
    const auto c = fixtures::reference_circuit();
    CHECK(c.resonant_frequency / two_pi == doctest::Approx(7.45e9).epsilon(1e-12));
    CHECK(c.participation_ratio == doctest::Approx(1.9276923076923077 / 3.3976923076923078).epsilon(1e-12));
    CHECK(c.total_decay_rate() / two_pi == doctest::Approx(58.9e6).epsilon(1e-12));
    CHECK(c.zero_point_current < c.characteristic_current);
}

TEST_CASE("specified participation ratio and inconsistency report") {
    auto s = fixtures::reference_device();
    s.reported = {88.7, 0.584, 2e-6, two_pi * 7.45e9, two_pi * 110e3};
    const auto geo = describe_circuit(s, AlphaSource::Geometry);
    const auto file = describe_circuit(s, AlphaSource::Specified);
    CHECK(file.circuit.participation_ratio == doctest::Approx(0.584).epsilon(1e-12));
    CHECK(geo.participation_ratios_disagree);
    REQUIRE(geo.kerr_at_reported_values);
    CHECK(*geo.kerr_at_reported_values == doctest::Approx(26705768.447865848).epsilon(1e-12));
    bool flagged = false;
    for (const auto& n : geo.notes) flagged = flagged || n.find("INCONSISTENCY") != std::string::npos;
    CHECK(flagged);
    s.reported.participation_ratio.reset();
    CHECK_THROWS_AS((void)derive_circuit(s, AlphaSource::Specified), ValidationError);
}

TEST_CASE("invalid specs are rejected") {
    auto s = fixtures::reference_device();
    s.film.thickness = -1e-9;
    CHECK_THROWS_AS((void)derive_circuit(s), ValidationError);
    s = fixtures::reference_device();
    s.circuit.shunt_capacitance = 0.0;
    CHECK_THROWS_AS((void)derive_circuit(s), ValidationError);
    s = fixtures::reference_device();
    s.circuit.external_coupling_rate = -1.0;
    CHECK_THROWS_AS((void)derive_circuit(s), ValidationError);
}

TEST_CASE("shift_resonance keeps capacitance and parasitic inductance") {
    const auto c = fixtures::reference_circuit();
    const auto s = shift_resonance(c, c.resonant_frequency - two_pi * 26e6);
    CHECK(s.resonant_frequency == doctest::Approx(c.resonant_frequency - two_pi * 26e6).epsilon(1e-14));
    CHECK(s.shunt_capacitance() == doctest::Approx(c.shunt_capacitance()).epsilon(1e-12));
    CHECK(s.parasitic_inductance() == doctest::Approx(c.parasitic_inductance()).epsilon(1e-12));
    CHECK(s.bridge_inductance > c.bridge_inductance);
    const auto same = shift_resonance(c, c.resonant_frequency);
    CHECK(same.kerr == doctest::Approx(c.kerr).epsilon(1e-13));
}

TEST_CASE("design inversion reproduces the geometry") {
    const auto spec = fixtures::reference_device();
    const auto c = derive_circuit(spec);
    DesignConstraints dc;
    dc.film = spec.film;
    dc.parasitic_inductance = spec.circuit.parasitic_inductance;
    dc.resonant_frequency = c.resonant_frequency;
    dc.participation_ratio = c.participation_ratio;
    dc.external_coupling_rate = c.external_coupling_rate;
    dc.intrinsic_loss_rate = c.intrinsic_loss_rate;
    const auto d = design_bridge_for_kerr(c.kerr, dc);
    CHECK(d.geometry.width == doctest::Approx(spec.geometry.width).epsilon(1e-10));
    CHECK(d.geometry.length == doctest::Approx(spec.geometry.length).epsilon(1e-10));
    CHECK(d.circuit.kerr == doctest::Approx(c.kerr).epsilon(1e-10));

    const auto [lo, hi] = achievable_kerr_range(dc);
    CHECK(hi == doctest::Approx(c.kerr).epsilon(1e-9));
    CHECK(std::log10(hi / lo) >= 6.5);
    CHECK_THROWS_AS((void)design_bridge_for_kerr(2.0 * hi, dc), NoSolutionError);
    try {
        (void)design_bridge_for_kerr(0.5 * lo, dc);
    } catch (const NoSolutionError& e) {
        CHECK(e.bracket_low() == doctest::Approx(lo));
        CHECK(e.bracket_high() == doctest::Approx(hi));
    }
}
