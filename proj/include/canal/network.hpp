#ifndef CANAL_NETWORK_HPP
#define CANAL_NETWORK_HPP

#include <span>
#include <vector>

#include "canal/pool_model.hpp"

namespace canal {

enum class NetworkKind { homogeneous, alternating };

/**
 * Ordered string of pools. Index 0 is the most downstream pool; pool n-1
 * is fed by the reservoir. Flow u[j] is the inflow of pool j (and the
 * outflow of pool j+1); pool 0 has no controllable outflow, the flow over
 * the last gate is fixed at zero in relative units.
 */
struct NetworkModel {
    int n = 0;
    NetworkKind kind = NetworkKind::homogeneous;
    int order = 3;
    std::vector<ThirdOrderPoolParams> third;  // per pool, when order == 3
    std::vector<FirstOrderPoolParams> first;  // per pool, when order == 1
};

/// Alternating networks assign pool model 1 to odd pool positions (1, 3, ...)
/// and pool model 2 to even positions, counting from the downstream end;
/// homogeneous networks use pool model 1 everywhere. tau_bar applies to
/// first-order pools only.
NetworkModel build_network(int n, NetworkKind kind, int order,
                           const PoolParameterTable& table = default_pool_table(),
                           int tau_bar = 0);

/// First-order synthesis models for the same pool assignment (fitted delays,
/// shared tau_bar), used by the structured and P controllers.
std::vector<FirstOrderPoolParams> synthesis_models(int n, NetworkKind kind,
                                                   double b_factor = 1.0);

/**
 * Closed-loop plant: steps every pool of a network in lockstep on one
 * global clock. Strictly sequential; distinct simulators share nothing.
 */
class NetworkSimulator {
public:
    NetworkSimulator(NetworkModel model, std::span<const double> initial_levels);

    /// u[j] is the flow applied at the gate feeding pool j; d[j] the
    /// disturbance applied at pool j. Both in relative flow units.
    void step(std::span<const double> u, std::span<const double> d);

    std::vector<double> levels() const;
    int size() const { return model_.n; }
    const NetworkModel& model() const { return model_; }

private:
    NetworkModel model_;
    std::vector<PoolSimState> states_;
};

}  // namespace canal

#endif
