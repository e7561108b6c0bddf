#ifndef CANAL_FILTERS_HPP
#define CANAL_FILTERS_HPP

#include <array>
#include <string>

#include "canal/pool_model.hpp"

namespace canal {

/**
 * Third-order discrete low-pass filter, unit DC gain. One shared design is
 * used for every gate input and every planned disturbance.
 */
struct IIRFilterCoeffs {
    std::array<double, 4> b{};  // numerator
    std::array<double, 4> a{};  // denominator, a[0] == 1
    double cutoff_rad_s = 0.0;
    double sample_period_s = 0.0;
};

/**
 * Discrete Butterworth low-pass. The analog prototype is discretized by
 * impulse invariance and renormalized so the DC gain is exactly one; the
 * resulting magnitude is within 0.001 dB of -3.01 dB at the cutoff and keeps
 * close to the prototype's -60 dB/decade rolloff on the unit circle.
 * Rejects cutoffs at or above the Nyquist rate. Order is fixed at 3.
 */
IIRFilterCoeffs design_butterworth(int order, double cutoff_rad_s, double sample_period_s);

inline IIRFilterCoeffs design_butterworth(double cutoff_rad_s, double sample_period_s) {
    return design_butterworth(3, cutoff_rad_s, sample_period_s);
}

/// Direct-form II transposed state.
struct IIRFilterState {
    std::array<double, 3> s{};
};

double filter_step(IIRFilterState& state, const IIRFilterCoeffs& coeffs, double x);

/// Magnitude of the frequency response at omega (rad/s), in dB.
double magnitude_db(const IIRFilterCoeffs& coeffs, double omega_rad_s);

/// Plain-text round trip at 17 significant digits so traces reproduce
/// bit-for-bit across runs.
std::string export_filter_coeffs(const IIRFilterCoeffs& coeffs);
IIRFilterCoeffs import_filter_coeffs(const std::string& text);

/// Coefficients plus state, for per-signal instances.
class LowPassFilter {
public:
    explicit LowPassFilter(const IIRFilterCoeffs& coeffs) : coeffs_(coeffs) {}
    double step(double x) { return filter_step(state_, coeffs_, x); }
    const IIRFilterCoeffs& coeffs() const { return coeffs_; }

private:
    IIRFilterCoeffs coeffs_;
    IIRFilterState state_{};
};

/// Stationary variance of the scalar prediction problem:
/// P = (R1 + sqrt(R1^2 + 4*R1*R2)) / 2, the positive root of P^2 = R1*P + R1*R2.
double kalman_stationary_variance(double r1, double r2);

/// Stationary gain P / (P + R2), in [0, 1]. Rejects r1 == r2 == 0.
double kalman_gain(double r1, double r2);

struct KalmanParams {
    double r1 = 1.0;            // state-noise variance
    double r2 = 100.0;          // measurement-noise variance
    FirstOrderPoolParams model; // prediction model (b, c, tau, tau_bar)
};

struct KalmanUpdate {
    double posterior;   // estimate of the level at t given y[t]
    double prior_next;  // one-step prediction, consumed by the controller at t+1
};

/**
 * Scalar level estimator per gate. The controller reads the a-priori
 * estimate at each tick; the measurement correction plus model prediction
 * run afterwards, leaving one sample for information to propagate.
 */
class LevelEstimator {
public:
    LevelEstimator(const KalmanParams& params, double initial_level);

    double prior() const { return prior_; }

    /// Correct with y_meas, then predict one step ahead using the lagged
    /// flows (u_in at t-tau-tau_bar, u_out and d at t-tau_bar).
    KalmanUpdate update(double y_meas, double u_in_lagged, double u_out_lagged, double d_lagged);

private:
    KalmanParams params_;
    double gain_;
    double prior_;
};

}  // namespace canal

#endif
