#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "nkpa/nkpa.h"

static int failures = 0;

#define EXPECT(cond)                                                          \
    do {                                                                      \
        if (!(cond)) {                                                        \
            fprintf(stderr, "%s:%d: check failed: %s (%s)\n", __FILE__, __LINE__, #cond, nkpa_last_error()); \
            ++failures;                                                       \
        }                                                                     \
    } while (0)

#define EXPECT_OK(call) EXPECT((call) == NKPA_OK)

static const double two_pi = 6.283185307179586;

static void test_general(void) {
    double v = 0.0;
    EXPECT(strcmp(nkpa_version(), "0.1.0") == 0);
    EXPECT(strcmp(nkpa_status_name(NKPA_ERR_PUMP_UNSTABLE), "pump-unstable") == 0);
    EXPECT_OK(nkpa_parse_quantity("133.5 MHz", "frequency", &v));
    EXPECT(fabs(v - 133.5e6) < 1e-6);
    EXPECT_OK(nkpa_parse_quantity("58 mK", "temperature", &v));
    EXPECT(fabs(v - 0.058) < 1e-15);
    EXPECT(nkpa_parse_quantity("3 furlongs", "length", &v) == NKPA_ERR_VALIDATION);
    EXPECT(strlen(nkpa_last_error()) > 0);
    EXPECT(nkpa_parse_quantity(NULL, "length", &v) == NKPA_ERR_INVALID_ARGUMENT);
    EXPECT_OK(nkpa_bose_einstein(0.058, two_pi * 7.45e9, &v));
    EXPECT(fabs(v - 0.0021071054672658) < 1e-15);
}

static void test_amplifier(void) {
    nkpa_device* dev = NULL;
    nkpa_circuit* circ = NULL;
    nkpa_pump* pump = NULL;
    nkpa_spectrum* spec = NULL;
    nkpa_circuit_params p;
    nkpa_drive drive;
    nkpa_bandwidth_info bw;
    nkpa_retune_info rt;
    nkpa_pump_info info;
    double gain = 0.0, noise = 0.0, lo = 0.0, hi = 0.0;
    char* json = NULL;

    EXPECT(nkpa_device_read("/nonexistent.json", &dev) == NKPA_ERR_IO);
    EXPECT(nkpa_device_parse("{\"film\": {}}", &dev) == NKPA_ERR_VALIDATION);
    EXPECT_OK(nkpa_device_read(NKPA_DATA_DIR "/reference_device.json", &dev));
    EXPECT_OK(nkpa_circuit_derive(dev, NKPA_ALPHA_GEOMETRY, &circ));
    EXPECT_OK(nkpa_circuit_get(circ, &p));
    EXPECT(fabs(p.kerr / (two_pi * 2.30287e6) - 1.0) < 1e-5);
    EXPECT(fabs(p.resonant_frequency / (two_pi * 7.45e9) - 1.0) < 1e-12);

    EXPECT_OK(nkpa_circuit_report_json(dev, NKPA_ALPHA_FILE, &json));
    EXPECT(json != NULL && strstr(json, "INCONSISTENCY") != NULL);
    nkpa_string_free(json);

    EXPECT_OK(nkpa_design_kerr_range(dev, 0.567, two_pi * 7.45e9, &lo, &hi));
    EXPECT(log10(hi / lo) >= 6.5);

    EXPECT_OK(nkpa_tune_drive(circ, two_pi * 133.5e6, 26.0, 1.0, &drive));
    EXPECT_OK(nkpa_pump_solve(circ, &drive, &pump));
    EXPECT_OK(nkpa_center_gain_db(circ, pump, &gain));
    EXPECT(fabs(gain - 26.0) < 0.01);
    EXPECT_OK(nkpa_pump_get(pump, circ, &info));
    EXPECT(fabs(info.effective_detuning) < 1e-3 * p.external_coupling_rate);
    EXPECT_OK(nkpa_bandwidth(circ, pump, &bw));
    EXPECT(bw.upper > bw.lower);
    EXPECT_OK(nkpa_ideal_added_noise(circ, pump, info.center_frequency + two_pi * 0.1e6, &noise));
    EXPECT(noise >= 0.5 - 0.01);

    EXPECT_OK(nkpa_spectrum_compute(circ, pump, NULL, 101, &spec));
    EXPECT(nkpa_spectrum_size(spec) == 101);
    {
        nkpa_gain_point pt;
        EXPECT_OK(nkpa_spectrum_point(spec, 50, &pt));
        EXPECT(fabs(pt.gain_db - 26.0) < 0.05);
        EXPECT(nkpa_spectrum_point(spec, 101, &pt) == NKPA_ERR_INVALID_ARGUMENT);
    }
    nkpa_spectrum_free(spec);

    EXPECT_OK(nkpa_retune(circ, &drive, p.resonant_frequency - two_pi * 26e6, 26.0, &rt, NULL));
    EXPECT(fabs(rt.achieved_gain_db - 26.0) < 0.05);
    nkpa_pump_free(pump);

    drive.pump1_power *= 1.3;
    drive.pump2_power *= 1.3;
    {
        nkpa_status s = nkpa_pump_solve(circ, &drive, &pump);
        EXPECT(s == NKPA_ERR_PUMP_UNSTABLE || s == NKPA_ERR_DIVERGENT_GAIN);
    }

    nkpa_circuit_free(circ);
    nkpa_device_free(dev);
}

static void test_calibration(void) {
    nkpa_record* rec = NULL;
    nkpa_chain_inputs in;
    nkpa_chain_result out;
    char* json = NULL;
    int ok = 0;

    EXPECT_OK(nkpa_record_new(&rec));
    memset(&in, 0, sizeof in);
    in.measured_added_noise.value = 0.59;
    in.amplifier_gain.value = 398.10717055349725;
    in.chain_noise.value = 23.0;
    in.transmission.value = 0.95;
    EXPECT_OK(nkpa_chain_noise(&in, rec, &out));
    EXPECT(fabs(out.amplifier_added_noise.value - 0.47772661207528) < 1e-12);
    {
        const double field[3] = {0.0, 0.1, 0.2};
        const double added[3] = {0.59, 0.60, 0.62};
        const char* path = NKPA_SCRATCH_DIR "/capi_field_sweep.csv";
        size_t n = 0;
        EXPECT_OK(nkpa_synth_field_sweep(field, added, 3, 1e3, 1e6, two_pi * 7.45e9, two_pi * 7.45e9, 0.058, 0.0, 1,
                                         path));
        EXPECT(nkpa_field_sweep_file(path, 0.058, rec, &n) == NKPA_ERR_DEPENDENCY);
        EXPECT(nkpa_field_sweep_file("/nonexistent.csv", 0.058, rec, &n) == NKPA_ERR_IO);
    }
    EXPECT_OK(nkpa_record_to_json(rec, &json));
    EXPECT(json != NULL && strstr(json, "nkpa-calibration") != NULL);
    nkpa_string_free(json);
    EXPECT_OK(nkpa_record_verify(rec, &ok));
    EXPECT(ok == 1);
    nkpa_record_free(rec);
    EXPECT(nkpa_chain_noise(NULL, NULL, &out) == NKPA_ERR_INVALID_ARGUMENT);
}

int main(void) {
    test_general();
    test_amplifier();
    test_calibration();
    if (failures) fprintf(stderr, "%d check(s) failed\n", failures);
    return failures ? 1 : 0;
}
