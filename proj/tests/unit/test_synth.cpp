#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "nkpa/synth.hpp"

using namespace nkpa;
using fixtures::two_pi;

TEST_CASE("normal source") {
    synth::NormalSource a(42), b(42), c(43);
    bool differs = false;
    for (int k = 0; k < 100; ++k) {
        const double x = a();
        CHECK(x == b());
        differs = differs || x != c();
    }
    CHECK(differs);

    synth::NormalSource s(1);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = s();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(n));
    CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("linspace") {
    const auto v = synth::linspace(0.058, 0.608, 12);
    REQUIRE(v.size() == 12);
    CHECK(v.front() == 0.058);
    CHECK(v.back() == 0.608);
    CHECK(v[1] == doctest::Approx(0.108).epsilon(1e-14));
    CHECK(synth::linspace(1.0, 2.0, 1) == std::vector<double>{1.0});
}

TEST_CASE("synthetic traces") {
    const synth::ReflectionTruth truth{two_pi * 7.45e9, two_pi * 57e6, two_pi * 2e6};
    const auto f = synth::linspace(7.3e9, 7.6e9, 4001);
    SUBCASE("zero noise is the forward model") {
        const auto t = synth::reflection_trace(truth, f, 0.0, 9);
        for (std::size_t k = 0; k < f.size(); k += 400) {
            const std::complex<double> d(0.0, two_pi * f[k] - truth.resonant_frequency);
            const auto s = 1.0 - truth.external_coupling_rate /
                                     (d + 0.5 * (truth.external_coupling_rate + truth.intrinsic_loss_rate));
            CHECK(std::abs(t.s11[k] - s) < 1e-15);
        }
        CHECK(t.sigma.empty());
    }
    SUBCASE("noise has the requested rms and is reproducible") {
        const auto clean = synth::reflection_trace(truth, f, 0.0, 9);
        const auto a = synth::reflection_trace(truth, f, 0.01, 9);
        const auto b = synth::reflection_trace(truth, f, 0.01, 9);
        CHECK(a.s11 == b.s11);
        double ms = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) ms += std::norm(a.s11[k] - clean.s11[k]);
        const double rms = std::sqrt(ms / static_cast<double>(f.size()));
        CHECK(std::abs(rms / 0.01 - 1.0) < 3.0 / std::sqrt(2.0 * 2.0 * static_cast<double>(f.size())));
        CHECK(a.sigma.front() == doctest::Approx(0.01 / std::sqrt(2.0)));
    }
    SUBCASE("noise trace follows the thermometry model") {
        const NoiseBand band{1e6, two_pi * 7.45e9, two_pi * 7.45e9};
        const auto temps = synth::linspace(0.058, 0.608, 12);
        const auto t = synth::noise_trace(temps, 1e3, 0.59, band, 0.0, 2);
        for (std::size_t k = 0; k < temps.size(); ++k) {
            CHECK(t.psd[k] == doctest::Approx(noise_psd_quanta(temps[k], 1e3, 0.59, band)).epsilon(1e-15));
        }
    }
}
