#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <numbers>

#include "fixtures.hpp"
#include "nkpa/checksum.hpp"
#include "nkpa/io.hpp"
#include "nkpa/synth.hpp"

using namespace nkpa;
using fixtures::two_pi;

namespace {

std::string data_file(const char* name) { return std::string(NKPA_DATA_DIR) + "/" + name; }

std::filesystem::path scratch(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / "nkpa_io_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("Touchstone parsing") {
    SUBCASE("real/imaginary rows are taken exactly") {
        const auto t = io::parse_touchstone_1port("! comment\n# GHz S RI R 50\n7.40 0.25 -0.5\n7.45 -0.125 0.75 ! x\n");
        REQUIRE(t.frequency.size() == 2);
        CHECK(t.frequency[0] == 7.40e9);
        CHECK(t.s11[0] == std::complex<double>(0.25, -0.5));
        CHECK(t.s11[1] == std::complex<double>(-0.125, 0.75));
    }
    SUBCASE("dB/angle row") {
        const auto t = io::parse_touchstone_1port("# GHz S DB R 50\n7.45 -0.5 170\n");
        CHECK(t.s11[0].real() == doctest::Approx(-0.92971847028188).epsilon(1e-12));
        CHECK(t.s11[0].imag() == doctest::Approx(0.16393445077370).epsilon(1e-12));
    }
    SUBCASE("magnitude/angle with default option line") {
        const auto t = io::parse_touchstone_1port("# \n7.45 1 90\n");
        CHECK(t.frequency[0] == 7.45e9);
        CHECK(std::abs(t.s11[0] - std::complex<double>(0.0, 1.0)) < 1e-15);
    }
    SUBCASE("errors carry the line number") {
        try {
            (void)io::parse_touchstone_1port("# GHz S RI R 50\n7.45 0 0\n7.44 0 0\n", "trace.s1p");
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("trace.s1p:3:") != std::string::npos);
        }
        CHECK_THROWS_AS((void)io::parse_touchstone_1port("# GHz S RI R 50\n7.45 0\n"), ValidationError);
        CHECK_THROWS_AS((void)io::parse_touchstone_1port("# GHz Y RI R 50\n7.45 0 0\n"), ValidationError);
    }
    SUBCASE("format and parse round trip") {
        const auto f = synth::linspace(7.3e9, 7.6e9, 31);
        const auto t = synth::reflection_trace({two_pi * 7.45e9, two_pi * 57e6, two_pi * 2e6}, f, 0.0, 1);
        const auto back = io::parse_touchstone_1port(io::format_touchstone_1port(t));
        CHECK(back.frequency == t.frequency);
        CHECK(back.s11 == t.s11);
        const auto csv = io::parse_reflection_csv(io::format_reflection_csv(t));
        CHECK(csv.s11 == t.s11);
    }
}

TEST_CASE("device specification files") {
    SUBCASE("human and SI units give the same device") {
        const auto a = io::read_device_spec(data_file("reference_device.json"));
        const auto b = io::read_device_spec(data_file("reference_device_si.json"));
        CHECK(a.film.sheet_inductance == doctest::Approx(b.film.sheet_inductance).epsilon(1e-14));
        CHECK(a.film.thickness == doctest::Approx(b.film.thickness).epsilon(1e-14));
        CHECK(a.geometry.width == doctest::Approx(b.geometry.width).epsilon(1e-14));
        CHECK(a.circuit.shunt_capacitance == doctest::Approx(b.circuit.shunt_capacitance).epsilon(1e-13));
        CHECK(a.circuit.external_coupling_rate == doctest::Approx(b.circuit.external_coupling_rate).epsilon(1e-14));
        CHECK(a.circuit.shunt_capacitance == doctest::Approx(134.3209240504274e-15).epsilon(1e-12));
        const auto da = derive_circuit(a);
        CHECK(da.resonant_frequency == doctest::Approx(two_pi * 7.45e9).epsilon(1e-13));
        CHECK(a.reported.kerr.has_value());
        CHECK(*a.reported.kerr == doctest::Approx(two_pi * 110e3).epsilon(1e-14));
    }
    SUBCASE("missing field is named") {
        auto doc = io::json::parse(io::read_text_file(data_file("reference_device_si.json")));
        doc["film"].erase("thickness");
        try {
            (void)io::parse_device_spec(doc);
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("film.thickness") != std::string::npos);
        }
    }
    SUBCASE("unknown fields and bad units are rejected") {
        auto doc = io::json::parse(io::read_text_file(data_file("reference_device_si.json")));
        auto extra = doc;
        extra["geometry"]["height"] = 1.0;
        CHECK_THROWS_AS((void)io::parse_device_spec(extra), ValidationError);
        auto bad = doc;
        bad["geometry"]["width"] = {{"value", 23}, {"unit", "GHz"}};
        CHECK_THROWS_AS((void)io::parse_device_spec(bad), ValidationError);
        auto both = doc;
        both["circuit"]["shunt_capacitance"] = 1e-13;
        CHECK_THROWS_AS((void)io::parse_device_spec(both), ValidationError);
    }
    SUBCASE("serialised spec parses back") {
        const auto a = io::read_device_spec(data_file("reference_device.json"));
        const auto b = io::parse_device_spec(io::device_spec_to_json(a));
        CHECK(b.circuit.shunt_capacitance == a.circuit.shunt_capacitance);
        CHECK(b.film.critical_current_density == a.film.critical_current_density);
        CHECK(b.reported.impedance == a.reported.impedance);
    }
    CHECK_THROWS_AS((void)io::read_device_spec("/nonexistent/device.json"), IoError);
}

TEST_CASE("drive configuration") {
    const auto d = io::parse_drive(io::json::parse(R"({
        "pump1": {"frequency": {"value": 7.3165, "unit": "GHz"}, "power": {"value": -99, "unit": "dBm"},
                  "phase": {"value": 90, "unit": "deg"}},
        "pump2": {"frequency": {"value": 7.5835, "unit": "GHz"}, "power": 1e-13}})"));
    CHECK(d.pump1_frequency == doctest::Approx(two_pi * 7.3165e9).epsilon(1e-15));
    CHECK(d.pump1_power == doctest::Approx(1e-3 * std::pow(10.0, -9.9)).epsilon(1e-13));
    CHECK(d.pump1_phase == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(d.pump2_phase == 0.0);
    const auto back = io::parse_drive(io::to_json(d));
    CHECK(back.pump1_frequency == d.pump1_frequency);
    CHECK(back.pump2_power == d.pump2_power);
    CHECK(back.pump1_phase == d.pump1_phase);
    CHECK_THROWS_AS((void)io::parse_drive(io::json::parse(R"({"pump1": {"frequency": 1e10}})")), ValidationError);
}

TEST_CASE("noise and field-sweep CSV") {
    const NoiseBand band{1e6, two_pi * 7.45e9, two_pi * 7.45e9};
    const auto tr = synth::noise_trace(synth::linspace(0.058, 0.608, 6), 1e3, 0.59, band, 0.01, 3);
    const auto back = io::parse_noise_csv(io::format_noise_csv(tr));
    CHECK(back.temperature == tr.temperature);
    CHECK(back.psd == tr.psd);
    CHECK(back.sigma == tr.sigma);
    CHECK(back.band.signal_frequency == band.signal_frequency);
    CHECK(back.band.bandwidth == band.bandwidth);
    CHECK_THROWS_AS((void)io::parse_noise_csv("temperature_k,psd_quanta\n0.1,100\n"), ValidationError);

    const auto sweep = synth::field_sweep({0.0, 0.1, 0.2}, {0.59, 0.6, 0.62}, 1e3, band, 0.058, 0.01, 5);
    const auto s2 = io::parse_field_sweep_csv(io::format_field_sweep_csv(sweep));
    REQUIRE(s2.size() == 3);
    CHECK(s2[2].field == sweep[2].field);
    CHECK(s2[2].psd == sweep[2].psd);
    CHECK(s2[2].sigma == sweep[2].sigma);
}

TEST_CASE("calibration record") {
    const auto trace_path = scratch("trace.csv");
    const auto f = synth::linspace(7.3e9, 7.6e9, 401);
    io::write_reflection_trace(synth::reflection_trace({two_pi * 7.45e9, two_pi * 57e6, two_pi * 2e6}, f, 0.0, 1),
                               trace_path.string());

    CalibrationRecord r;
    r.reflection = fit_reflection(io::read_reflection_trace(trace_path.string()));
    io::record_input(r, trace_path.string());
    r.chain = ChainNoiseResult{{{0.59, 0.01}, {398.1, 0.0}, {23.0, 1.0}, {0.95, 0.01}},
                               nkpa_added_noise({{0.59, 0.01}, {398.1, 0.0}, {23.0, 1.0}, {0.95, 0.01}}),
                               NoiseBandRange{0.44, 0.52}};
    r.field_sweep = {{0.0, {0.6, 0.01}}, {0.1, {0.61, 0.01}}};

    SUBCASE("write, read and write again is byte-identical") {
        const auto text = io::format_results(r);
        const auto back = io::record_from_json(io::json::parse(text));
        CHECK(io::format_results(back) == text);
        CHECK(back.reflection->resonant_frequency.value == r.reflection->resonant_frequency.value);
        CHECK(back.chain->band->high == 0.52);
    }
    SUBCASE("checksums track the inputs") {
        CHECK(io::verify_checksums(r).empty());
        CHECK(r.input_checksums.begin()->second == sha256_file(trace_path.string()));
        io::write_text_file(trace_path.string(), "frequency_hz,s11_re,s11_im\n1,0,0\n");
        const auto bad = io::verify_checksums(r);
        REQUIRE(bad.size() == 1);
        CHECK(bad[0] == trace_path.string());
    }
    CHECK_THROWS_AS((void)io::record_from_json(io::json{{"schema", "other"}}), ValidationError);
}

TEST_CASE("SHA-256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
