#ifndef LVBARRIER_H
#define LVBARRIER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define LVB_API __declspec(dllexport)
#else
#  define LVB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lvb_model_s* lvb_model;
typedef struct lvb_contract_s* lvb_contract;
typedef struct lvb_profile_s* lvb_profile;

typedef enum {
    LVB_OK = 0,
    LVB_ERR_DOMAIN,
    LVB_ERR_OVERFLOW,
    LVB_ERR_BARRIER_CROSSING,
    LVB_ERR_NONPOSITIVE_BARRIER,
    LVB_ERR_NONPOSITIVE_MATURITY,
    LVB_ERR_INVALID_CONTRACT,
    LVB_ERR_SPOT_OUTSIDE_CORRIDOR,
    LVB_ERR_PROFILE_MISMATCH,
    LVB_ERR_UNSUPPORTED_CONFIGURATION,
    LVB_ERR_QUADRATURE_FAILURE,
    LVB_ERR_ASSEMBLY_FAILURE,
    LVB_ERR_SINGULAR_DIAGONAL,
    LVB_ERR_DETERMINANT_VANISHING,
    LVB_ERR_INVERSION_UNSTABLE,
    LVB_ERR_NULL_ARGUMENT,
    LVB_ERR_INTERNAL
} lvb_status;

typedef enum { LVB_SIDE_LOWER = 0, LVB_SIDE_UPPER = 1 } lvb_side;
typedef enum { LVB_BARRIER_CONSTANT = 0, LVB_BARRIER_EXPONENTIAL = 1 } lvb_barrier_kind;

typedef enum {
    LVB_PAYOFF_CALL = 0,        /* a = strike */
    LVB_PAYOFF_PUT = 1,         /* a = strike */
    LVB_PAYOFF_DOUBLE_NO_TOUCH, /* unit payoff inside the corridor */
    LVB_PAYOFF_SMOOTH_BUMP      /* a = left, b = right, c = height */
} lvb_payoff_kind;

typedef enum { LVB_METHOD_AUTO = 0, LVB_METHOD_VOLTERRA = 1, LVB_METHOD_LAPLACE = 2 } lvb_method;
typedef enum { LVB_REGIME_SMOOTH = 0, LVB_REGIME_L1 = 1 } lvb_regime;

typedef struct {
    double european;
    double premium_lower;
    double premium_upper;
    double price; /* undiscounted */
    double discount_factor;
    double discounted_price;
    int near_expiry_unreliable;
} lvb_price_result;

typedef struct {
    uint64_t paths;
    int steps;
    uint64_t seed;
    int bridge_correction;
} lvb_mc_config;

/* Errors. The message of the last failing call on this thread stays valid until the next call. */
LVB_API const char* lvb_status_name(lvb_status status);
LVB_API int lvb_status_is_validation(lvb_status status);
LVB_API const char* lvb_last_error(void);
LVB_API const char* lvb_version(void);

/* Models. Drift is rate - dividend. */
LVB_API lvb_status lvb_model_gbm(double rate, double dividend, double sigma, lvb_model* out);
LVB_API lvb_status lvb_model_cev(double rate, double dividend, double sigma0, double rho, lvb_model* out);
LVB_API void lvb_model_free(lvb_model model);

/* Contracts start with no barriers and a double no-touch payoff. */
LVB_API lvb_status lvb_contract_create(double maturity, double rate, double dividend, lvb_contract* out);
LVB_API lvb_status lvb_contract_set_barrier(lvb_contract contract, lvb_side side, lvb_barrier_kind kind, double level,
                                            double growth);
LVB_API lvb_status lvb_contract_set_payoff(lvb_contract contract, lvb_payoff_kind kind, double a, double b, double c);
/* Replaces the payoff with its C^2 approximant of the given level. */
LVB_API lvb_status lvb_contract_smooth_payoff(lvb_contract contract, int level);
LVB_API lvb_status lvb_contract_payoff_at(lvb_contract contract, double x, double* out);
LVB_API lvb_status lvb_contract_validate(lvb_contract contract, lvb_regime* regime, size_t* warning_count);
/* Warning i from the most recent lvb_contract_validate on this contract. */
LVB_API const char* lvb_contract_warning(lvb_contract contract, size_t i);
LVB_API void lvb_contract_free(lvb_contract contract);

/* Delta profiles. AUTO picks Laplace for GBM with constant barriers and Volterra otherwise. */
LVB_API lvb_status lvb_solve(lvb_model model, lvb_contract contract, int n, lvb_method method, lvb_profile* out);
LVB_API lvb_status lvb_profile_method(lvb_profile profile, lvb_method* out);
LVB_API lvb_status lvb_profile_size(lvb_profile profile, size_t* nodes);
LVB_API lvb_status lvb_profile_times(lvb_profile profile, double* out);
LVB_API lvb_status lvb_profile_has(lvb_profile profile, lvb_side side, int* out);
/* Node values of Delta+ (upper) or Delta- (lower); the t = T entry is the cell average. */
LVB_API lvb_status lvb_profile_deltas(lvb_profile profile, lvb_side side, double* out);
/* 0 for nodes in the last 5% before expiry when the profile is flagged near-expiry unreliable, 1 otherwise. */
LVB_API lvb_status lvb_profile_reliable(lvb_profile profile, int* out);
LVB_API lvb_status lvb_profile_diagnostics(lvb_profile profile, int* sign_violations, int* near_expiry_unreliable,
                                           double* psi_scale);
LVB_API lvb_status lvb_profile_residual(lvb_model model, lvb_contract contract, lvb_profile profile, double* out);
/* Missing sides are reported as NaN. */
LVB_API lvb_status lvb_delta_at_barrier(lvb_profile profile, double t, double* plus, double* minus,
                                        int* near_expiry_unreliable);
LVB_API void lvb_profile_free(lvb_profile profile);

/* Pricing against one solved profile. */
LVB_API lvb_status lvb_price(lvb_model model, lvb_contract contract, lvb_profile profile, double spot,
                             lvb_price_result* out);
LVB_API lvb_status lvb_ladder(lvb_model model, lvb_contract contract, lvb_profile profile, const double* spots,
                              size_t count, double* prices, double* deltas, double* gammas);

/* Oracles; all prices discounted. */
LVB_API lvb_status lvb_closed_form_single(lvb_model model, lvb_contract contract, double spot, double* out);
LVB_API lvb_status lvb_closed_form_double(lvb_model model, lvb_contract contract, double spot, int max_terms,
                                          double tolerance, double* value, double* last_term, int* terms);
LVB_API void lvb_mc_config_default(lvb_mc_config* cfg);
LVB_API lvb_status lvb_mc_price(lvb_model model, lvb_contract contract, double spot, const lvb_mc_config* cfg,
                                double* estimate, double* standard_error);
LVB_API lvb_status lvb_mc_local_time(lvb_model model, lvb_barrier_kind kind, double level, double growth, double spot,
                                     double maturity, double epsilon, const lvb_mc_config* cfg, double* estimate,
                                     double* standard_error);
LVB_API lvb_status lvb_expected_local_time(lvb_model model, lvb_barrier_kind kind, double level, double growth,
                                           double spot, double maturity, double* out);

#ifdef __cplusplus
}
#endif

#endif
