#ifndef SOCKETLAB_SOCKETLAB_H
#define SOCKETLAB_SOCKETLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SOCKETLAB_BUILDING)
#    define SL_API __declspec(dllexport)
#  else
#    define SL_API __declspec(dllimport)
#  endif
#else
#  define SL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* All functions return sl_status. On failure, sl_last_error() holds a
 * message for the calling thread until its next failing call. Output
 * arguments are left untouched on failure. Frequencies in Hz, times in s,
 * lengths in m, impedances in ohm. Complex arrays are interleaved re, im. */

typedef enum sl_status {
    SL_OK = 0,
    SL_ERR_INVALID_ARGUMENT = 1,
    SL_ERR_PARSE = 2,
    SL_ERR_COMPUTATION = 3,
    SL_ERR_IO = 4,
    SL_ERR_BUFFER_TOO_SMALL = 5,
    SL_ERR_INTERNAL = 6
} sl_status;

SL_API const char* sl_status_string(sl_status status);
SL_API const char* sl_last_error(void);
/* 1-based line of the last SL_ERR_PARSE, 0 otherwise. */
SL_API size_t sl_last_error_line(void);
SL_API const char* sl_version(void);

/* Strings returned through char** are owned by the caller. */
SL_API void sl_string_free(char* s);

/* Arrays returned through double** are owned by the caller. */
SL_API void sl_array_free(double* p);

/* Numeric CSV with `columns` fields per row; a single non-numeric header row
 * and '#' or '!' comment lines are skipped. *out is row-major. */
SL_API sl_status sl_csv_parse(const char* text, size_t len, size_t columns, double** out, size_t* rows);

/* Bundled reference constants as JSON; static storage. */
SL_API const char* sl_constants_json(void);

/* ------------------------------------------------------------------------ */
/* Network data */

typedef struct sl_network sl_network;

typedef enum sl_data_format { SL_FORMAT_RI = 0, SL_FORMAT_MA = 1, SL_FORMAT_DB = 2 } sl_data_format;

/* ports_hint: 0 to infer from the record layout, else 2 or 4. */
SL_API sl_status sl_network_parse(const char* text, size_t len, int ports_hint, sl_network** out);
/* Port count taken from a .sNp extension when present. */
SL_API sl_status sl_network_load(const char* path, sl_network** out);
/* s: n_freqs matrices, each ports x ports row-major, interleaved complex. */
SL_API sl_status sl_network_create(int ports, size_t n_freqs, const double* freqs, const double* s, double z_ref,
                                   sl_network** out);
SL_API void sl_network_free(sl_network* net);
SL_API int sl_network_ports(const sl_network* net);
SL_API size_t sl_network_size(const sl_network* net);
SL_API double sl_network_z_ref(const sl_network* net);
SL_API sl_status sl_network_freqs(const sl_network* net, double* out);
/* S_{out,in} trace (1-based ports), interleaved complex of length 2 * size. */
SL_API sl_status sl_network_trace(const sl_network* net, int out_port, int in_port, double* out);
SL_API sl_status sl_network_write(const sl_network* net, sl_data_format fmt, char** out);
SL_API sl_status sl_network_resample(const sl_network* net, size_t points, sl_network** out);

/* ------------------------------------------------------------------------ */
/* Network analysis */

typedef enum sl_load_sign { SL_LOAD_CONVENTIONAL = 0, SL_LOAD_AS_PRINTED = 1 } sl_load_sign;

/* Matrix conversions on one ports x ports row-major complex matrix. */
SL_API sl_status sl_z_from_s(int ports, const double* s, double z_ref, double* z_out);
SL_API sl_status sl_s_from_z(int ports, const double* z, double z_ref, double* s_out);
/* z: 2x2 row-major complex. */
SL_API sl_status sl_input_impedance(const double* z, double zl_re, double zl_im, sl_load_sign sign, double* out_re,
                                    double* out_im);
SL_API sl_status sl_vswr(double s11_re, double s11_im, double* out);
SL_API sl_status sl_derivative_6th_order(const double* y, size_t n, double h, double* out);
SL_API sl_status sl_unwrap_phase(const double* angles, size_t n, double* out);

/* Each output array has sl_network_size entries; z_in is interleaved complex.
 * Any output pointer may be NULL. */
SL_API sl_status sl_microwave_params(const sl_network* net, double zl_re, double zl_im, sl_load_sign sign,
                                     double* z_in, double* vswr_in, double* tau_phi, double* tau_g);
SL_API sl_status sl_phase_delay(const sl_network* net, int out_port, int in_port, double* out);
SL_API sl_status sl_group_delay(const sl_network* net, int out_port, int in_port, int smooth, double* out);

typedef struct sl_isolation {
    double isolation_db;
    double worst_freq;
    char worst_entry[8];
} sl_isolation;

SL_API sl_status sl_band_isolation(const sl_network* net, double f_lo, double f_hi, sl_isolation* out);

typedef struct sl_dip_report {
    double center_freq;
    double depth_db;
    double bandwidth_3db;
    double phase_excursion;
    int is_resonance;
} sl_dip_report;

SL_API sl_status sl_classify_dip(const sl_network* net, int out_port, int in_port, double f_lo, double f_hi,
                                 sl_dip_report* out);

/* ------------------------------------------------------------------------ */
/* Time-domain reflectometry */

typedef struct sl_tdr_trace sl_tdr_trace;
typedef struct sl_profile sl_profile;

typedef struct sl_segment {
    double one_way_delay;
    double z;
    double r_series;
} sl_segment;

typedef enum sl_synthesis_order { SL_SYNTH_FIRST_ORDER = 0, SL_SYNTH_MULTI = 1 } sl_synthesis_order;

SL_API sl_status sl_tdr_parse_csv(const char* text, size_t len, double v_plus, sl_tdr_trace** out);
SL_API sl_status sl_tdr_create(const double* times, const double* volts, size_t n, double v_plus,
                               sl_tdr_trace** out);
SL_API void sl_tdr_free(sl_tdr_trace* trace);
SL_API size_t sl_tdr_size(const sl_tdr_trace* trace);
SL_API double sl_tdr_v_plus(const sl_tdr_trace* trace);
/* Either pointer may be NULL. */
SL_API sl_status sl_tdr_samples(const sl_tdr_trace* trace, double* times, double* volts);

SL_API sl_status sl_reflection_ratio(double v_meas, double v_plus, double* out);
/* Open circuits give +inf, shorts 0. */
SL_API sl_status sl_instantaneous_impedance(double xi, double z_c, double* out);
SL_API sl_status sl_tdr_impedance(const sl_tdr_trace* trace, double z_c, double* out);

SL_API sl_status sl_profile_create(double z_source, sl_profile** out);
SL_API void sl_profile_free(sl_profile* profile);
SL_API sl_status sl_profile_add_segment(sl_profile* profile, const sl_segment* seg);
SL_API size_t sl_profile_segment_count(const sl_profile* profile);
SL_API double sl_profile_z_source(const sl_profile* profile);
SL_API sl_status sl_profile_segment(const sl_profile* profile, size_t index, sl_segment* out);
SL_API sl_status sl_segment_lengths(const sl_profile* profile, double velocity_factor, double* out);

SL_API sl_status sl_tdr_synthesize(const sl_profile* profile, double v_plus, double sample_dt, double total_time,
                                   sl_synthesis_order order, sl_tdr_trace** out);
/* min_step <= 0 and median_window == 0 select the defaults. */
SL_API sl_status sl_tdr_extract(const sl_tdr_trace* trace, double z_c, double min_step, size_t median_window,
                                sl_profile** out);

/* ------------------------------------------------------------------------ */
/* Resonator fitting */

typedef struct sl_resonator {
    double f0;
    double q_i;
    double q_c_star;
    double phi;
} sl_resonator;

typedef struct sl_baseline {
    double log_mag0;
    double log_mag_slope;
    double phase0;
    double phase_slope;
} sl_baseline;

typedef struct sl_fit_result {
    sl_resonator model;
    sl_resonator std_errors;
    double loaded_q;
    double residual_rms;
    double initial_residual_rms;
    int n_iter;
} sl_fit_result;

/* s21_out: interleaved complex, 2 * n doubles. */
SL_API sl_status sl_resonator_synthesize(const sl_resonator* model, const double* freqs, size_t n, double* s21_out);
/* warnings: newline-joined, NULL when there are none; may itself be NULL. */
SL_API sl_status sl_resonator_normalize(const double* freqs, const double* s21, size_t n, double wing_fraction,
                                        double* s21_out, sl_baseline* baseline, char** warnings);
SL_API sl_status sl_resonator_initial_guess(const double* freqs, const double* s21_norm, size_t n,
                                            sl_resonator* out);
/* initial may be NULL; max_iter <= 0 selects the default. */
SL_API sl_status sl_resonator_fit(const double* freqs, const double* s21_norm, size_t n, const sl_resonator* initial,
                                  int max_iter, sl_fit_result* out);
/* Raw sweep: fits resonator and linear baseline together. s21_norm_out
 * (2 * n doubles), baseline and warnings may be NULL. */
SL_API sl_status sl_resonator_fit_baseline(const double* freqs, const double* s21, size_t n, double wing_fraction,
                                           int max_iter, sl_fit_result* out, double* s21_norm_out,
                                           sl_baseline* baseline, char** warnings);

/* ------------------------------------------------------------------------ */
/* Physical estimators */

SL_API sl_status sl_te_mode_frequency(double a, double b, double d, int m, int n, int l, double eps_r, double* out);
SL_API sl_status sl_perturbed_mode(double f0, double eps_r, double d_s, double b, double* out);

typedef struct sl_dc_line {
    double rho;
    double length_pp;
    double width_w;
    double thickness_d;
    double r_wire_chain;
    double measured_r_io; /* negative when not measured */
} sl_dc_line;

SL_API sl_status sl_trace_resistance(const sl_dc_line* line, double* out);
SL_API sl_status sl_contact_resistance_bound(const sl_dc_line* line, double* out);

typedef struct sl_conductor {
    double d_i;
    double d_o;
    double k_t;
    double length;
} sl_conductor;

SL_API sl_status sl_cross_section_area(const sl_conductor* c, double* out);
SL_API sl_status sl_heat_transfer_rate(const sl_conductor* conductors, size_t n, double* out);

typedef struct sl_magnetic {
    double b_measured;
    double r0;
    double r_target;
    double loop_area;
} sl_magnetic;

typedef struct sl_flux {
    double b_target;
    double flux;
    double flux_ratio;
} sl_flux;

SL_API sl_status sl_dipole_field_and_flux(const sl_magnetic* spec, sl_flux* out);

/* ------------------------------------------------------------------------ */
/* Layout */

typedef struct sl_compression_plan {
    double l_c;
    double stroke;
    double base;
    double pitch;
    int preferred_k;
} sl_compression_plan;

typedef struct sl_compression_setting {
    int k;
    double protrusion;
    int preferred;
} sl_compression_setting;

SL_API void sl_compression_plan_default(sl_compression_plan* out);
/* Writes up to cap settings; *count receives the full number. */
SL_API sl_status sl_compression_settings(const sl_compression_plan* plan, sl_compression_setting* out, size_t cap,
                                         size_t* count);
SL_API sl_status sl_contraction(double coeff, double length, double* out);
SL_API sl_status sl_implied_coefficient(double delta, double length, double* out);

typedef struct sl_lattice_spec {
    int n;
    double dist_a;
    double dist_b;
    double dist_c;
    double wire_pitch;
    double max_chip_side;
    double al_coeff;
    double si_coeff;
} sl_lattice_spec;

typedef struct sl_lattice_summary {
    int n;
    double cell;
    double chip_side;
    double max_chip_side;
    int wires_per_qubit;
    int total_pads;
    int readout_lines;
    size_t n_qubits;
    size_t n_settings;
    double al_contraction;
    double si_contraction;
    double contraction_bias;
} sl_lattice_summary;

typedef enum sl_pad_kind { SL_PAD_XY = 0, SL_PAD_Z = 1, SL_PAD_READOUT = 2 } sl_pad_kind;

typedef struct sl_pad {
    sl_pad_kind kind;
    double x;
    double y;
    int qubit; /* -1 for shared readout pads */
} sl_pad;

typedef struct sl_lattice_plan sl_lattice_plan;

SL_API void sl_lattice_spec_default(sl_lattice_spec* out);
/* compression may be NULL for defaults. */
SL_API sl_status sl_plan_lattice(const sl_lattice_spec* spec, const sl_compression_plan* compression,
                                 sl_lattice_plan** out);
SL_API void sl_lattice_plan_free(sl_lattice_plan* plan);
SL_API sl_status sl_lattice_plan_summary(const sl_lattice_plan* plan, sl_lattice_summary* out);
SL_API sl_status sl_lattice_plan_qubit(const sl_lattice_plan* plan, size_t index, double* x, double* y);
SL_API sl_status sl_lattice_plan_pad(const sl_lattice_plan* plan, size_t index, sl_pad* out);
SL_API sl_status sl_lattice_plan_setting(const sl_lattice_plan* plan, size_t index, sl_compression_setting* out);

typedef struct sl_wiring {
    long long wirebond_count;
    long long socket_count;
    int socket_exceeds;
} sl_wiring;

SL_API sl_status sl_wiring_scaling(int n, sl_wiring* out);

typedef struct sl_tolerance_spec {
    double lateral_tol;
    double rot_tol;
    double machining_sigma;
    double dicing_sigma;
    double contraction_al_coeff;
    double contraction_si_coeff;
    double chip_side;
    long long trials;
    uint64_t seed;
} sl_tolerance_spec;

typedef struct sl_percentiles {
    double p50;
    double p90;
    double p99;
    double max;
} sl_percentiles;

typedef struct sl_yield_report {
    double yield;
    long long trials;
    long long passed;
    double contraction_bias;
    sl_percentiles lateral;
    sl_percentiles rotation;
} sl_yield_report;

SL_API void sl_tolerance_spec_default(sl_tolerance_spec* out);
SL_API sl_status sl_mating_yield(const sl_tolerance_spec* spec, sl_yield_report* out);

typedef struct sl_spring {
    char id[32];
    double coil_diameter;
    double wire_diameter;
    double free_length;
    double coils;
    double force_full;
    double travel;
} sl_spring;

typedef struct sl_spring_force {
    double force;
    double travel;
    int has_operating_range;
    double inner_range[2];
    double outer_range[2];
} sl_spring_force;

SL_API size_t sl_spring_count(void);
SL_API sl_status sl_spring_info(size_t index, sl_spring* out);
SL_API sl_status sl_spring_force_lookup(const char* id, double compression, sl_spring_force* out);

/* ------------------------------------------------------------------------ */
/* Pulses */

typedef struct sl_pulse_spec {
    double carrier;
    double sideband;
    double fwhm;
    double sample_rate;
    double duration;
} sl_pulse_spec;

typedef struct sl_distortion {
    double envelope_correlation;
    double fwhm_change_fraction;
    double delay;
    double fwhm_in;
    double fwhm_out;
} sl_distortion;

SL_API void sl_pulse_spec_default(sl_pulse_spec* out);
SL_API sl_status sl_pulse_sample_count(const sl_pulse_spec* spec, size_t* out);
/* out must hold sl_pulse_sample_count samples. */
SL_API sl_status sl_pulse_synthesize(const sl_pulse_spec* spec, double* out);
SL_API sl_status sl_pulse_transmit(const double* in, size_t n, double sample_rate, const sl_network* net,
                                   int out_port, int in_port, double* out);
SL_API sl_status sl_pulse_envelope(const double* in, size_t n, double sample_rate, double* out);
SL_API sl_status sl_distortion_metrics(const double* in, size_t n_in, const double* out, size_t n_out,
                                       double sample_rate, sl_distortion* metrics);

#ifdef __cplusplus
}
#endif

#endif /* SOCKETLAB_SOCKETLAB_H */
