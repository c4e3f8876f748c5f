#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "nkpa/amplifier.hpp"
#include "nkpa/synth.hpp"

using namespace nkpa;
using fixtures::two_pi;

namespace {

const DerivedCircuit& reference() {
    static const auto c = fixtures::reference_circuit();
    return c;
}

const DerivedCircuit& ideal() {
    static const auto c = fixtures::lossless(fixtures::reference_circuit());
    return c;
}

DriveConfig tuned(const DerivedCircuit& c, double gain_db) {
    return tune_drive_for_gain(c, two_pi * 133.5e6, gain_db);
}

}  // namespace

TEST_CASE("undriven cavity") {
    const auto& c = reference();
    DriveConfig d{c.resonant_frequency - two_pi * 133.5e6, c.resonant_frequency + two_pi * 140e6, 0, 0, 0, 0};
    const auto p = pump_steady_state(c, d);
    CHECK(p.parametric_strength == complex{});
    CHECK(p.effective_detuning == doctest::Approx(c.resonant_frequency - d.center_frequency()));
}

TEST_CASE("zero Kerr reproduces the linear cavity response") {
    auto c = reference();
    c.kerr = 0.0;
    DriveConfig d{c.resonant_frequency - two_pi * 30e6, c.resonant_frequency + two_pi * 45e6, 1e-12, 2e-12, 0, 0};
    const auto p = pump_steady_state(c, d);
    const auto linear = [&](double w, double power) {
        const double flux = c.external_coupling_rate * power / (constants::hbar * w);
        const double det = c.resonant_frequency - w;
        return flux / (0.25 * std::pow(c.total_decay_rate(), 2) + det * det);
    };
    CHECK(std::norm(p.amplitude_b) == doctest::Approx(linear(d.pump1_frequency, d.pump1_power)).epsilon(1e-12));
    CHECK(std::norm(p.amplitude_c) == doctest::Approx(linear(d.pump2_frequency, d.pump2_power)).epsilon(1e-12));
    CHECK(std::abs(p.parametric_strength) == 0.0);
}

TEST_CASE("unpumped reflection") {
    const double w0 = two_pi * 7.45e9;
    const auto r = reflection_response(w0, w0, two_pi * 58.9e6, 0.0);
    CHECK(r.real() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(r.imag()) < 1e-15);
    CHECK(std::abs(reflection_response(w0 + 1e6 * two_pi * 58.9e6, w0, two_pi * 58.9e6, 0.0) - 1.0) < 1e-5);
    // dip depth at Q_in = 4000
    const double ki = w0 / 4000.0;
    const double depth = -20.0 * std::log10(std::abs(reflection_response(w0, w0, two_pi * 58.9e6 - ki, ki)));
    CHECK(depth == doctest::Approx(0.56745905906818).epsilon(1e-11));
}

TEST_CASE("zero pump gives passive reflection") {
    const auto& c = reference();
    DriveConfig d{c.resonant_frequency - two_pi * 133.5e6, c.resonant_frequency + two_pi * 133.5e6, 0, 0, 0, 0};
    const auto p = pump_steady_state(c, d);
    const auto grid = default_grid(c, p, 401);
    const auto s = gain_spectrum(c, p, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(std::norm(s.signal[k]) == doctest::Approx(std::norm(reflection_coefficient(c, grid[k]))).epsilon(1e-12));
        CHECK(std::norm(s.signal[k]) <= 1.0);
        CHECK(std::abs(s.idler[k]) == 0.0);
    }
}

TEST_CASE("tuning hits the target gain just below threshold") {
    const auto& c = reference();
    const auto d = tuned(c, 26.0);
    const auto p = pump_steady_state(c, d);
    CHECK(10.0 * std::log10(center_gain(c, p)) == doctest::Approx(26.0).epsilon(1e-4 / 26.0));
    CHECK(std::abs(p.effective_detuning) < 1e-9 * c.total_decay_rate());
    const double ratio = std::abs(p.parametric_strength) / p.threshold(c.total_decay_rate());
    CHECK(ratio < 1.0);
    CHECK(ratio > 0.9);
}

TEST_CASE("above-threshold drive is rejected") {
    const auto& c = reference();
    auto d = tuned(c, 26.0);
    d.pump1_power *= std::pow(10.0, 0.1);
    d.pump2_power *= std::pow(10.0, 0.1);
    CHECK_THROWS_AS((void)pump_steady_state(c, d), PumpUnstableError);

    auto p = pump_steady_state(c, tuned(c, 20.0));
    p.parametric_strength *= 10.0;
    const double grid[] = {p.center_frequency};
    CHECK_THROWS_AS((void)gain_spectrum(c, p, grid), DivergentGainError);
}

TEST_CASE("lossless two-mode squeezing is unitary") {
    const auto& c = ideal();
    for (double g : {10.0, 26.0, 35.0}) {
        const auto p = pump_steady_state(c, tuned(c, g));
        const auto grid = default_grid(c, p, 2001);
        const auto s = gain_spectrum(c, p, grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            worst = std::max(worst, std::abs(std::norm(s.signal[k]) - std::norm(s.idler[k]) - 1.0));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("gain-bandwidth product approaches the linewidth") {
    const auto& c = reference();
    const double kappa_hz = c.total_decay_rate() / two_pi;
    for (double g : {24.0, 30.0, 36.0, 40.0}) {
        const auto p = pump_steady_state(c, tuned(c, g));
        const auto bw = three_db_bandwidth(c, p);
        const double gbw = std::sqrt(bw.peak_gain) * bw.width() / two_pi;
        CHECK(std::abs(gbw / kappa_hz - 1.0) < (g < 30.0 ? 0.15 : 0.05));
    }
}

TEST_CASE("added noise") {
    SUBCASE("lossless quantum limit") {
        const auto& c = ideal();
        const auto p = pump_steady_state(c, tuned(c, 26.0));
        const double g = center_gain(c, p);
        CHECK(ideal_added_noise(c, p, p.center_frequency) == doctest::Approx(0.5 * (1.0 - 1.0 / g)).epsilon(1e-9));
        CHECK(ideal_added_noise(c, p, p.center_frequency) == doctest::Approx(0.49874405678425).epsilon(1e-6));
    }
    SUBCASE("internal loss adds noise") {
        const auto& c = reference();
        const auto p = pump_steady_state(c, tuned(c, 26.0));
        CHECK(ideal_added_noise(c, p, p.center_frequency) > 0.5 * (1.0 - 1.0 / center_gain(c, p)));
    }
    SUBCASE("unit gain adds nothing") {
        const auto& c = ideal();
        const auto p = pump_steady_state(c, tuned(c, 1e-3));
        CHECK(ideal_added_noise(c, p, p.center_frequency) < 1e-3);
    }
}

TEST_CASE("phase-sensitive gain") {
    const auto& c = ideal();
    auto d = tuned(c, 20.0);
    d.pump1_phase = 0.3;
    d.pump2_phase = -1.1;
    const auto p = pump_steady_state(c, d);
    const auto phases = synth::linspace(-M_PI, M_PI, 181);
    const auto sweep = phase_sensitive_gain(c, p, phases);
    const auto shifted = [&] {
        std::vector<double> v(phases);
        for (auto& x : v) x += M_PI;
        return phase_sensitive_gain(c, p, v);
    }();
    double worst = 0.0;
    for (std::size_t k = 0; k < phases.size(); ++k) {
        worst = std::max(worst, std::abs(std::norm(sweep.response[k]) - std::norm(shifted.response[k])));
    }
    CHECK(worst < 1e-9);

    const auto [mn, mx] = std::minmax_element(sweep.gain_db.begin(), sweep.gain_db.end());
    const double gmax = std::pow(10.0, *mx / 10.0);
    double gmin = std::pow(10.0, *mn / 10.0);
    // analytic extremes of g_s + g_i e^{-2i phi}: (|g_s| +/- |g_i|)^2
    const auto s = scattering(c, p, p.center_frequency);
    const double hi = std::pow(std::abs(s.signal) + std::abs(s.idler), 2);
    const double lo = std::pow(std::abs(s.signal) - std::abs(s.idler), 2);
    CHECK(hi * lo == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(gmax <= hi * (1 + 1e-12));
    CHECK(gmin >= lo * (1 - 1e-12));

    // period 2 pi in the phase of pump 1 alone, holding the absolute probe phase
    const double probe = 0.7;
    const auto response_at = [&](double phi1) {
        auto dd = d;
        dd.pump1_phase = phi1;
        return std::norm(quadrature_response(c, pump_steady_state(c, dd), probe));
    };
    CHECK(std::abs(response_at(0.3) - response_at(0.3 + two_pi)) < 1e-9);
    CHECK(std::abs(response_at(0.3) - response_at(0.3 + M_PI)) > 1e-3);
}

TEST_CASE("no pump means no phase dependence") {
    const auto& c = reference();
    DriveConfig d{c.resonant_frequency - two_pi * 133.5e6, c.resonant_frequency + two_pi * 133.5e6, 0, 0, 0, 0};
    const auto p = pump_steady_state(c, d);
    const auto sweep = phase_sensitive_gain(c, p, synth::linspace(-M_PI, M_PI, 73));
    const auto [mn, mx] = std::minmax_element(sweep.gain_db.begin(), sweep.gain_db.end());
    CHECK(*mx - *mn < 1e-12);
}

TEST_CASE("compression") {
    const auto& c = reference();
    const auto p26 = pump_steady_state(c, tuned(c, 26.0));
    double previous = INFINITY;
    for (double dbm = -170.0; dbm <= -120.0; dbm += 2.0) {
        const double g = saturated_gain_db(c, p26, 1e-3 * std::pow(10.0, dbm / 10.0));
        CHECK(g <= previous + 1e-12);
        previous = g;
    }
    const auto c26 = compression_point(c, p26);
    const auto c20 = compression_point(c, pump_steady_state(c, tuned(c, 20.0)));
    CHECK(c26.gain_at_p1db == doctest::Approx(c26.small_signal_gain_db - 1.0).epsilon(0.02 / 25.0));
    CHECK(c26.input_power_1db < c20.input_power_1db);
}

TEST_CASE("retune after a resonance shift") {
    const auto& c = reference();
    const auto d = tuned(c, 26.0);
    const auto same = retune_for_field_shift(c, d, c.resonant_frequency, 26.0);
    CHECK(same.drive.pump1_frequency == d.pump1_frequency);
    CHECK(same.drive.pump2_power == d.pump2_power);
    CHECK(same.power_adjustment_db == 0.0);

    const auto r = retune_for_field_shift(c, d, c.resonant_frequency - two_pi * 26e6, 26.0);
    CHECK(std::abs(r.achieved_gain_db - 26.0) < 0.1);
    CHECK(std::abs(r.power_adjustment_db) < 1.0);
    CHECK(r.drive.center_frequency() < d.center_frequency());

    // pump 1 as the upper tone
    DriveConfig flipped = d;
    std::swap(flipped.pump1_frequency, flipped.pump2_frequency);
    const auto rf = retune_for_field_shift(c, flipped, c.resonant_frequency - two_pi * 26e6, 26.0);
    CHECK(rf.drive.pump1_frequency > rf.drive.pump2_frequency);
    CHECK(rf.drive.pump1_frequency == doctest::Approx(r.drive.pump2_frequency).epsilon(1e-14));
}
