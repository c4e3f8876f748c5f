#pragma once

/* C interface to the NKPA modelling library. All handles are opaque and
 * owned by the caller; release them with the matching *_free function.
 * Functions return NKPA_OK or an error status; the message for the most
 * recent failure on the calling thread is available from nkpa_last_error().
 *
 * Units: frequencies and rates in rad/s, powers in W, phases in rad,
 * temperatures in K, fields in T. */

#include <stddef.h>
#include <stdint.h>

#if defined(NKPA_BUILDING_LIBRARY)
#define NKPA_API __attribute__((visibility("default")))
#else
#define NKPA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nkpa_status {
    NKPA_OK = 0,
    NKPA_ERR_INVALID_ARGUMENT = 1, /* null pointer or out-of-range argument */
    NKPA_ERR_VALIDATION = 2,
    NKPA_ERR_SOLVER = 3,
    NKPA_ERR_PUMP_UNSTABLE = 4,
    NKPA_ERR_DIVERGENT_GAIN = 5,
    NKPA_ERR_NO_SOLUTION = 6,
    NKPA_ERR_IO = 7,
    NKPA_ERR_DEPENDENCY = 8,
    NKPA_ERR_INTERNAL = 9
} nkpa_status;

typedef enum nkpa_alpha_source { NKPA_ALPHA_GEOMETRY = 0, NKPA_ALPHA_FILE = 1 } nkpa_alpha_source;

typedef struct nkpa_device nkpa_device;
typedef struct nkpa_circuit nkpa_circuit;
typedef struct nkpa_pump nkpa_pump;
typedef struct nkpa_spectrum nkpa_spectrum;
typedef struct nkpa_record nkpa_record;

typedef struct nkpa_drive {
    double pump1_frequency;
    double pump2_frequency;
    double pump1_power;
    double pump2_power;
    double pump1_phase;
    double pump2_phase;
} nkpa_drive;

typedef struct nkpa_circuit_params {
    double bridge_inductance;
    double total_inductance;
    double participation_ratio;
    double impedance;
    double resonant_frequency;
    double zero_point_current;
    double characteristic_current;
    double kerr;
    double external_coupling_rate;
    double intrinsic_loss_rate;
} nkpa_circuit_params;

typedef struct nkpa_pump_info {
    double photons_pump1;
    double photons_pump2;
    double cross_kerr_shift;
    double parametric_strength_re;
    double parametric_strength_im;
    double effective_detuning;
    double center_frequency;
    double threshold; /* |epsilon| at the parametric instability */
} nkpa_pump_info;

typedef struct nkpa_gain_point {
    double frequency;
    double signal_re;
    double signal_im;
    double idler_re;
    double idler_im;
    double gain_db;
} nkpa_gain_point;

typedef struct nkpa_bandwidth_info {
    double peak_gain; /* linear */
    double lower;
    double upper;
} nkpa_bandwidth_info;

typedef struct nkpa_compression_info {
    double input_power_1db;
    double small_signal_gain_db;
    double gain_at_p1db;
} nkpa_compression_info;

typedef struct nkpa_retune_info {
    nkpa_drive drive;
    double power_adjustment_db;
    double achieved_gain_db;
} nkpa_retune_info;

typedef struct nkpa_estimate {
    double value;
    double sigma;
} nkpa_estimate;

typedef struct nkpa_reflection_guess {
    double resonant_frequency;
    double external_coupling_rate;
    double intrinsic_loss_rate;
} nkpa_reflection_guess;

typedef struct nkpa_reflection_result {
    nkpa_estimate resonant_frequency;
    nkpa_estimate external_coupling_rate;
    nkpa_estimate intrinsic_loss_rate;
    double relative_residual;
    int iterations;
    int warnings;
} nkpa_reflection_result;

typedef struct nkpa_noise_result {
    nkpa_estimate system_gain;
    nkpa_estimate added_noise;
    nkpa_estimate output_noise_at_zero;
    double reduced_chi_square;
} nkpa_noise_result;

typedef struct nkpa_chain_inputs {
    nkpa_estimate measured_added_noise;
    nkpa_estimate amplifier_gain; /* linear */
    nkpa_estimate chain_noise;
    nkpa_estimate transmission;
    int with_band; /* nonzero: also evaluate the grid below */
    double transmission_low;
    double transmission_high;
    double chain_noise_low;
    double chain_noise_high;
} nkpa_chain_inputs;

typedef struct nkpa_chain_result {
    nkpa_estimate amplifier_added_noise;
    double band_low;
    double band_high;
} nkpa_chain_result;

/* --- general --------------------------------------------------------------- */

NKPA_API const char* nkpa_version(void);
NKPA_API const char* nkpa_status_name(nkpa_status status);
/* Message of the last failure on this thread; empty string if none. */
NKPA_API const char* nkpa_last_error(void);
NKPA_API void nkpa_string_free(char* s);
/* "133.5 MHz", "-95dBm", "58 mK" -> SI (frequencies in Hz). `dimension` is one of
 * frequency, power, temperature, field, length, inductance, current, dimensionless.
 * A bare number is taken as SI. */
NKPA_API nkpa_status nkpa_parse_quantity(const char* text, const char* dimension, double* out);

/* --- circuit model ----------------------------------------------------------- */

NKPA_API nkpa_status nkpa_device_read(const char* path, nkpa_device** out);
NKPA_API nkpa_status nkpa_device_parse(const char* json_text, nkpa_device** out);
NKPA_API void nkpa_device_free(nkpa_device* device);

NKPA_API nkpa_status nkpa_circuit_derive(const nkpa_device* device, nkpa_alpha_source source, nkpa_circuit** out);
NKPA_API nkpa_status nkpa_circuit_get(const nkpa_circuit* circuit, nkpa_circuit_params* out);
NKPA_API void nkpa_circuit_free(nkpa_circuit* circuit);
/* Derivation report with both Kerr routes and consistency notes, as JSON. */
NKPA_API nkpa_status nkpa_circuit_report_json(const nkpa_device* device, nkpa_alpha_source source, char** out_json);

NKPA_API nkpa_status nkpa_kerr_coefficient(double omega, double alpha, double impedance, double i_star, double* out);
/* Achievable K range for the device film and parasitic inductance at the given alpha and omega_0. */
NKPA_API nkpa_status nkpa_design_kerr_range(const nkpa_device* device, double participation_ratio,
                                            double resonant_frequency, double* low, double* high);
/* Bridge geometry reaching `target_kerr`; result as JSON. */
NKPA_API nkpa_status nkpa_design_bridge(const nkpa_device* device, double participation_ratio,
                                        double resonant_frequency, double target_kerr, char** out_json);

/* --- amplifier dynamics -------------------------------------------------------- */

NKPA_API nkpa_status nkpa_drive_read(const char* path, nkpa_drive* out);
NKPA_API nkpa_status nkpa_drive_write(const nkpa_drive* drive, const char* path);
NKPA_API nkpa_status nkpa_tune_drive(const nkpa_circuit* circuit, double pump_half_separation, double target_gain_db,
                                     double power_ratio, nkpa_drive* out);

NKPA_API nkpa_status nkpa_pump_solve(const nkpa_circuit* circuit, const nkpa_drive* drive, nkpa_pump** out);
NKPA_API nkpa_status nkpa_pump_get(const nkpa_pump* pump, const nkpa_circuit* circuit, nkpa_pump_info* out);
NKPA_API void nkpa_pump_free(nkpa_pump* pump);

/* grid == NULL: `n` points over +/- kappa_tot around the gain centre. */
NKPA_API nkpa_status nkpa_spectrum_compute(const nkpa_circuit* circuit, const nkpa_pump* pump, const double* grid,
                                           size_t n, nkpa_spectrum** out);
NKPA_API size_t nkpa_spectrum_size(const nkpa_spectrum* spectrum);
NKPA_API nkpa_status nkpa_spectrum_point(const nkpa_spectrum* spectrum, size_t index, nkpa_gain_point* out);
NKPA_API nkpa_status nkpa_spectrum_write_csv(const nkpa_spectrum* spectrum, const char* path);
NKPA_API void nkpa_spectrum_free(nkpa_spectrum* spectrum);

NKPA_API nkpa_status nkpa_center_gain_db(const nkpa_circuit* circuit, const nkpa_pump* pump, double* out);
NKPA_API nkpa_status nkpa_bandwidth(const nkpa_circuit* circuit, const nkpa_pump* pump, nkpa_bandwidth_info* out);
NKPA_API nkpa_status nkpa_ideal_added_noise(const nkpa_circuit* circuit, const nkpa_pump* pump,
                                            double probe_frequency, double* out);
NKPA_API nkpa_status nkpa_compression(const nkpa_circuit* circuit, const nkpa_pump* pump, nkpa_compression_info* out);

/* Degenerate response at `n` relative probe phases; gain_db[n], CSV written when path != NULL. */
NKPA_API nkpa_status nkpa_phase_sweep(const nkpa_circuit* circuit, const nkpa_pump* pump, const double* phases,
                                      size_t n, double* gain_db, const char* csv_path);

/* Re-centres and re-powers the drive after the resonance moved to `shifted_resonance`.
 * `shifted` (optional) receives the shifted circuit. */
NKPA_API nkpa_status nkpa_retune(const nkpa_circuit* circuit, const nkpa_drive* drive, double shifted_resonance,
                                 double target_gain_db, nkpa_retune_info* out, nkpa_circuit** shifted);

/* --- calibration ------------------------------------------------------------------ */

NKPA_API nkpa_status nkpa_record_new(nkpa_record** out);
NKPA_API nkpa_status nkpa_record_read(const char* path, nkpa_record** out);
NKPA_API nkpa_status nkpa_record_write(const nkpa_record* record, const char* path);
NKPA_API nkpa_status nkpa_record_to_json(const nkpa_record* record, char** out_json);
/* Writes 1 to *ok when every recorded input checksum still matches. */
NKPA_API nkpa_status nkpa_record_verify(const nkpa_record* record, int* ok);
NKPA_API void nkpa_record_free(nkpa_record* record);

/* Reads a Touchstone (.s1p/.ts) or CSV trace, fits it and stores the fit
 * and the input checksum in `record` (may be NULL). `guess` may be NULL. */
NKPA_API nkpa_status nkpa_fit_reflection_file(const char* path, const nkpa_reflection_guess* guess,
                                              nkpa_record* record, nkpa_reflection_result* out);
NKPA_API nkpa_status nkpa_fit_noise_file(const char* path, nkpa_record* record, nkpa_noise_result* out);
NKPA_API nkpa_status nkpa_chain_noise(const nkpa_chain_inputs* inputs, nkpa_record* record, nkpa_chain_result* out);
/* Reduces a field-sweep CSV with the noise calibration held in `record`;
 * writes the number of points to *points. */
NKPA_API nkpa_status nkpa_field_sweep_file(const char* path, double base_temperature, nkpa_record* record,
                                           size_t* points);

NKPA_API nkpa_status nkpa_bose_einstein(double temperature, double omega, double* out);

/* --- synthetic data ------------------------------------------------------------------ */

NKPA_API nkpa_status nkpa_synth_reflection(double resonant_frequency, double external_coupling_rate,
                                           double intrinsic_loss_rate, double span, size_t points,
                                           double noise_level, uint64_t seed, const char* path);
NKPA_API nkpa_status nkpa_synth_noise(const double* temperature, size_t points, double system_gain,
                                      double added_noise, double bandwidth_hz, double signal_frequency,
                                      double idler_frequency, double relative_noise, uint64_t seed, const char* path);
NKPA_API nkpa_status nkpa_synth_field_sweep(const double* field, const double* added_noise, size_t points,
                                            double system_gain, double bandwidth_hz, double signal_frequency,
                                            double idler_frequency, double base_temperature, double relative_noise,
                                            uint64_t seed, const char* path);

#ifdef __cplusplus
}
#endif
