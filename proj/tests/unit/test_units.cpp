#include <doctest.h>

#include "nkpa/error.hpp"
#include "nkpa/units.hpp"

using namespace nkpa::units;

TEST_CASE("prefixed units convert to SI") {
    CHECK(to_si(7.45, "GHz", Dimension::Frequency, "f") == doctest::Approx(7.45e9).epsilon(1e-15));
    CHECK(to_si(179, "pH/sq", Dimension::SheetInductance, "s") == doctest::Approx(179e-12).epsilon(1e-15));
    CHECK(to_si(23, "nm", Dimension::Length, "w") == doctest::Approx(23e-9).epsilon(1e-15));
    CHECK(to_si(2, "µA", Dimension::Current, "i") == doctest::Approx(2e-6).epsilon(1e-15));
    CHECK(to_si(2, "uA", Dimension::Current, "i") == to_si(2, "µA", Dimension::Current, "i"));
    CHECK(to_si(58, "mK", Dimension::Temperature, "t") == doctest::Approx(0.058).epsilon(1e-15));
    CHECK(to_si(427, "mT", Dimension::MagneticField, "b") == doctest::Approx(0.427).epsilon(1e-15));
}

TEST_CASE("dBm conversion") {
    CHECK(to_si(0.0, "dBm", Dimension::Power, "p") == doctest::Approx(1e-3));
    CHECK(to_si(-30.0, "dBm", Dimension::Power, "p") == doctest::Approx(1e-6));
    CHECK(watt_to_dbm(dbm_to_watt(-87.25)) == doctest::Approx(-87.25).epsilon(1e-14));
    CHECK(linear_power_to_db(db_to_linear_power(26.0)) == doctest::Approx(26.0).epsilon(1e-14));
}

TEST_CASE("unit errors name the field") {
    try {
        (void)to_si(1.0, "nH", Dimension::Length, "film.thickness");
        FAIL("expected a validation error");
    } catch (const nkpa::ValidationError& e) {
        CHECK(std::string(e.what()).find("film.thickness") != std::string::npos);
        CHECK(std::string(e.what()).find("inductance") != std::string::npos);
    }
    CHECK_THROWS_AS((void)to_si(1.0, "furlong", Dimension::Length, "x"), nkpa::ValidationError);
}
