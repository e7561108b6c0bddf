#ifndef CANAL_BASELINE_P_HPP
#define CANAL_BASELINE_P_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "canal/pool_model.hpp"

namespace canal {

/// Nominal proportional gain k = factor * pi / (8 (tau + tau_bar) b).
/// At factor 1 the loop has a gain margin of exactly 4 and a phase margin
/// of 3 pi / 8. Rejects zero total delay.
double p_gain(int tau, int tau_bar, double b, double factor = 1.0);

/// pi / (2 (tau + tau_bar) b k)
double p_gain_margin(int tau, int tau_bar, double b, double k);

/// pi/2 - (tau + tau_bar) b k, radians
double p_phase_margin(int tau, int tau_bar, double b, double k);

struct PGains {
    std::vector<double> k;  // per gate
    double k_ff = 1.0;
};

/// Distant-downstream law at one gate:
///   u_i[t] = -k_i y_i[t] + k_ff (c_i/b_i) (u_{i-1}[t-1] - d_i[t+tau_i])
/// The downstream feed-forward is delayed one sample so u_i[t] does not
/// depend on the other flows computed this tick; the off-take feed-forward
/// reads the planned schedule tau_i ahead.
double p_step(const PGains& gains, const FirstOrderPoolParams& model, int gate, double y,
              double u_downstream_prev, double d_future);

/// Per-gate proportional controllers for a pool string; gate state is just
/// the previous tick's commands.
class PController {
public:
    PController(std::vector<FirstOrderPoolParams> pools, double factor = 1.0, double k_ff = 1.0);

    /// d_future[j] must hold the planned off-take of pool j at t + tau_j.
    std::vector<double> step(std::span<const double> y, std::span<const double> d_future);

    const PGains& gains() const { return gains_; }
    const std::vector<FirstOrderPoolParams>& pools() const { return pools_; }

private:
    std::vector<FirstOrderPoolParams> pools_;
    PGains gains_;
    std::vector<double> prev_cmd_;
};

}  // namespace canal

#endif
