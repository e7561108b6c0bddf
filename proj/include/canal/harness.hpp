#ifndef CANAL_HARNESS_HPP
#define CANAL_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "canal/network.hpp"

namespace canal {

enum class ControllerKind { structured, lq3, p };

std::string to_string(ControllerKind kind);
ControllerKind controller_from_string(const std::string& name);

/// Planned off-take: a constant discharge over [t_on, t_off) at `rate`
/// level-units per minute on the target pool (realized as |d| = rate / c
/// with c from the pool's first-order model).
struct DisturbanceWindow {
    int pool = 1;  // 1-based, 1 = most downstream
    std::int64_t t_on = 0;
    std::int64_t t_off = 0;
    double rate = 1.0;
};

struct Scenario {
    int n = 5;
    NetworkKind kind = NetworkKind::alternating;
    ControllerKind controller = ControllerKind::structured;
    double q = 1.0;             // level weight, per pool
    double r_reservoir = 0.3;   // input weight on the reservoir release
    double r_internal = 0.0;    // input weight on internal gates (lq3 only)
    double rho = 0.0;           // input-increment weight (lq3 only)
    std::vector<double> initial_levels;  // empty = all zero
    std::vector<DisturbanceWindow> disturbances;
    std::int64_t horizon = 3000;
    double p_gain_factor = 1.0;
    double k_ff = 1.0;
    // Conventions and switches.
    bool offtake_lowers_level = true;   // sign convention for the off-take flow
    bool flip_initial_sign = false;     // negate the initial condition
    double first_order_b_factor = 1.0;  // optional correction on synthesis b
    bool filter_p_feedforward = true;   // P feed-forward reads the filtered schedule
    bool apply_input_filter = true;     // low-pass on structured/P commands
    bool use_kalman = true;             // structured only
    double kalman_r1 = 1.0;
    double kalman_r2 = 100.0;
    std::string pool_table_path;        // override the bundled plant coefficients
    std::string message_log_path;       // structured only: per-tick message CSV
};

Scenario load_scenario(const std::string& path);

struct SimTrace {
    std::vector<std::vector<double>> y;  // horizon x n, levels entering each step
    std::vector<std::vector<double>> u;  // applied flows (post-filter where filtered)
    std::vector<std::vector<double>> d;  // applied disturbances (post-filter)
    std::vector<double> cum_level, cum_input, cum_deltau;  // running cost terms
    std::vector<double> weight_q, weight_r, weight_rho;    // per pool/input
    std::int64_t decay_time = 0;  // first sample after which everything stays below
                                  // 1e-9 of its peak; horizon when never reached
};

struct CostBreakdown {
    double total = 0, level = 0, input = 0, delta_u = 0;
};

/// Exact quadratic accumulation over the trace. Weight vectors must match
/// the pool count.
CostBreakdown evaluate_cost(const SimTrace& trace, std::span<const double> q,
                            std::span<const double> r, std::span<const double> rho);

/// Cost under the weights the scenario was run with.
CostBreakdown evaluate_cost(const SimTrace& trace);

/// Closed loop on the third-order plant: estimation (structured), control,
/// shared low-pass on commands and planned off-takes, plant step.
/// Deterministic given the scenario. Rejects weight combinations the
/// structured controller cannot represent.
SimTrace run_scenario(const Scenario& scenario);

/// t, y_1..y_N, u_1..u_N, d_1..d_N, cost_cum_level, cost_cum_input, cost_cum_deltau
void write_csv(const SimTrace& trace, std::ostream& out);

struct SweepRow {
    int n = 0;
    int disturbance_pool = 0;
    ControllerKind controller{};
    double best_gain_factor = 1.0;  // meaningful for the P controller
    CostBreakdown cost;
};

/// Homogeneous networks, off-take at pool N-1 over [t_on, t_off), one row
/// per (N, controller). The P controller takes the best of the gain-factor
/// sweep.
std::vector<SweepRow> sweep_network_size(const std::vector<int>& sizes,
                                         const Scenario& base = {});

/// N fixed, off-take location varied.
std::vector<SweepRow> sweep_disturbance_location(int n, const std::vector<int>& pools,
                                                 const Scenario& base = {});

inline const std::vector<double> kPGainFactors{0.25, 0.5, 1.0, 1.5, 2.0};

struct TradeoffRow {
    ControllerKind controller{};
    std::string parameter;  // which knob was varied
    double value = 0.0;
    double sum_y2 = 0.0;
    double sum_u2 = 0.0;
    double sum_du2 = 0.0;
    double sum_uN2 = 0.0;  // reservoir flow alone
};

/// Pareto data for the level/input and level/increment trade-offs:
/// the structured controller sweeps the reservoir weight, the centralized
/// controller sweeps a uniform input weight and a uniform increment weight.
std::vector<TradeoffRow> sweep_tradeoff(const std::vector<double>& r_grid,
                                        const std::vector<double>& rho_grid,
                                        const Scenario& base = {});

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_tradeoff_csv(const std::vector<TradeoffRow>& rows, std::ostream& out);

}  // namespace canal

#endif
