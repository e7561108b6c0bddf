#include "canal/network.hpp"

#include "canal/errors.hpp"

namespace canal {

namespace {

int model_id(NetworkKind kind, int position) {
    // position is 1-based from the downstream end
    if (kind == NetworkKind::alternating && position % 2 == 0) return 2;
    return 1;
}

}  // namespace

NetworkModel build_network(int n, NetworkKind kind, int order,
                           const PoolParameterTable& table, int tau_bar) {
    if (n < 1) throw config_error("a network needs at least one pool");
    if (order != 1 && order != 3) throw config_error("pool model order must be 1 or 3");
    NetworkModel net;
    net.n = n;
    net.kind = kind;
    net.order = order;
    for (int i = 1; i <= n; ++i) {
        const int id = model_id(kind, i);
        if (order == 3) {
            net.third.push_back(table.third_order(id));
        } else {
            FirstOrderPoolParams p = table.first_order(id);
            p.tau_bar = tau_bar;
            net.first.push_back(p);
        }
    }
    return net;
}

std::vector<FirstOrderPoolParams> synthesis_models(int n, NetworkKind kind, double b_factor) {
    if (n < 1) throw config_error("a network needs at least one pool");
    std::vector<FirstOrderPoolParams> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        out.push_back(synthesis_pool_params(model_id(kind, i), b_factor));
    }
    return out;
}

NetworkSimulator::NetworkSimulator(NetworkModel model, std::span<const double> initial_levels)
    : model_(std::move(model)) {
    if (initial_levels.size() != static_cast<std::size_t>(model_.n)) {
        throw config_error("initial level count does not match pool count");
    }
    for (int p = 0; p < model_.n; ++p) {
        if (model_.order == 3) {
            states_.push_back(make_third_order_state(model_.third[p], initial_levels[p]));
        } else {
            states_.push_back(make_first_order_state(model_.first[p], initial_levels[p]));
        }
    }
}

void NetworkSimulator::step(std::span<const double> u, std::span<const double> d) {
    if (u.size() != static_cast<std::size_t>(model_.n) ||
        d.size() != static_cast<std::size_t>(model_.n)) {
        throw config_error("flow/disturbance vectors do not match pool count");
    }
    for (int p = 0; p < model_.n; ++p) {
        const double u_in = u[p];
        const double u_out = p >= 1 ? u[p - 1] : 0.0;  // last gate fixed: u_0 = 0
        if (model_.order == 3) {
            advance_third_order(states_[p], model_.third[p], u_in, u_out, d[p]);
        } else {
            advance_first_order(states_[p], model_.first[p], u_in, u_out, d[p]);
        }
    }
}

std::vector<double> NetworkSimulator::levels() const {
    std::vector<double> out;
    out.reserve(states_.size());
    for (const auto& s : states_) out.push_back(level(s));
    return out;
}

}  // namespace canal
