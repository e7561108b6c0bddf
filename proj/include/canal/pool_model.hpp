#ifndef CANAL_POOL_MODEL_HPP
#define CANAL_POOL_MODEL_HPP

#include <string>
#include <vector>

namespace canal {

/**
 * Third-order pool dynamics at a one-minute sample period:
 *
 *   y[t+1] = b1*u_in[t-tau] - b2*u_in[t-tau-1] + b3*u_in[t-tau-2]
 *          - c1*(u_out[t] - d[t]) + c2*(u_out[t-1] - d[t-1]) - c3*(u_out[t-2] - d[t-2])
 *          + y[t] + alpha1*(y[t] - 2*y[t-1] + y[t-2]) + alpha2*(y[t] - y[t-1])
 *
 * Levels and flows are relative to nominal values.
 */
struct ThirdOrderPoolParams {
    double b1 = 0, b2 = 0, b3 = 0;  // inflow coefficients
    double c1 = 0, c2 = 0, c3 = 0;  // outflow coefficients
    double alpha1 = 0, alpha2 = 0;  // wave-dynamic coefficients
    int tau = 0;                    // transport delay, samples

    void validate() const;
};

/**
 * First-order pool dynamics used for controller synthesis:
 *
 *   y[t+1] = y[t] + b*u_in[t-tau-tau_bar] - c*(u_out[t-tau_bar] - d[t-tau_bar])
 *
 * tau_bar is the extra delay standing in for the shared input low-pass
 * filter; it is common to every pool in a network.
 */
struct FirstOrderPoolParams {
    double b = 0;     // inflow coefficient, level units per unit flow per sample
    double c = 0;     // outflow coefficient
    int tau = 0;      // transport delay, samples
    int tau_bar = 0;  // shared low-pass delay, samples

    void validate() const;
};

/**
 * Simulation state of one pool. Histories are explicit ring buffers keyed
 * by lag: u_in[k] holds the inflow at t-1-k, and likewise for u_out and d.
 * y[0..2] hold the level at t, t-1, t-2.
 */
struct PoolSimState {
    std::vector<double> y;
    std::vector<double> u_in;
    std::vector<double> u_out;
    std::vector<double> d;
};

/// Rest state at the given level: level history filled with the same value,
/// all flow histories zero, buffers sized for the model's delay needs.
PoolSimState make_third_order_state(const ThirdOrderPoolParams& params, double initial_level = 0.0);
PoolSimState make_first_order_state(const FirstOrderPoolParams& params, double initial_level = 0.0);

/// Advance one sample. u_in/u_out/d are the flows applied at the current
/// instant; histories shift afterwards. Throws config_error when the state's
/// buffers are too shallow for the model's delays.
void advance_third_order(PoolSimState& state, const ThirdOrderPoolParams& params,
                         double u_in, double u_out, double d);
void advance_first_order(PoolSimState& state, const FirstOrderPoolParams& params,
                         double u_in, double u_out, double d);

PoolSimState step_third_order(PoolSimState state, const ThirdOrderPoolParams& params,
                              double u_in, double u_out, double d);
PoolSimState step_first_order(PoolSimState state, const FirstOrderPoolParams& params,
                              double u_in, double u_out, double d);

inline double level(const PoolSimState& state) { return state.y[0]; }

enum class FlowChannel { inflow, outflow };

/// Steady level slope per unit of constant flow on the given channel.
/// Third order: (b1-b2+b3)/(1-alpha2) or (c1-c2+c3)/(1-alpha2).
/// First order: b or c. Throws config_error when alpha2 == 1.
double dc_slope(const ThirdOrderPoolParams& params, FlowChannel channel);
double dc_slope(const FirstOrderPoolParams& params, FlowChannel channel);

/**
 * Catalog of pool parameter rows keyed by (pool id, model order), matching
 * the bundled coefficient table. Loadable from a JSON file with a "pools"
 * array whose entries carry: pool, order, b1..b3, c1..c3, alpha1, alpha2, tau.
 */
class PoolParameterTable {
public:
    void add(int pool, const ThirdOrderPoolParams& params);
    void add(int pool, const FirstOrderPoolParams& params);

    const ThirdOrderPoolParams& third_order(int pool) const;
    const FirstOrderPoolParams& first_order(int pool) const;
    bool has_third_order(int pool) const;
    bool has_first_order(int pool) const;

private:
    std::vector<std::pair<int, ThirdOrderPoolParams>> third_;
    std::vector<std::pair<int, FirstOrderPoolParams>> first_;
};

/// The two identified pools, both model orders. These are the bundled
/// defaults used everywhere a table is not supplied explicitly.
const PoolParameterTable& default_pool_table();

PoolParameterTable load_pool_table(const std::string& path);

/// First-order synthesis parameters: coefficients from the bundled table with
/// the delays produced by the two-stage fit (tau = 2 for pool 1, 15 for
/// pool 2, shared tau_bar = 10). b is scaled by b_factor.
FirstOrderPoolParams synthesis_pool_params(int pool, double b_factor = 1.0);

/// Shared low-pass delay that accompanies synthesis_pool_params.
inline constexpr int kSynthesisTauBar = 10;

}  // namespace canal

#endif
