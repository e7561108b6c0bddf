#include "canal/baseline_p.hpp"

#include <numbers>

#include "canal/errors.hpp"

namespace canal {

double p_gain(int tau, int tau_bar, double b, double factor) {
    if (tau + tau_bar <= 0) throw config_error("p_gain: total delay must be positive");
    if (b <= 0.0) throw config_error("p_gain: inflow coefficient must be positive");
    return factor * std::numbers::pi / (8.0 * (tau + tau_bar) * b);
}

double p_gain_margin(int tau, int tau_bar, double b, double k) {
    return std::numbers::pi / (2.0 * (tau + tau_bar) * b * k);
}

double p_phase_margin(int tau, int tau_bar, double b, double k) {
    return std::numbers::pi / 2.0 - (tau + tau_bar) * b * k;
}

double p_step(const PGains& gains, const FirstOrderPoolParams& model, int gate, double y,
              double u_downstream_prev, double d_future) {
    const double k = gains.k[static_cast<std::size_t>(gate)];
    return -k * y + gains.k_ff * (model.c / model.b) * (u_downstream_prev - d_future);
}

PController::PController(std::vector<FirstOrderPoolParams> pools, double factor, double k_ff)
    : pools_(std::move(pools)) {
    if (pools_.empty()) throw config_error("P controller needs at least one pool");
    gains_.k_ff = k_ff;
    for (const auto& p : pools_) {
        gains_.k.push_back(p_gain(p.tau, p.tau_bar, p.b, factor));
    }
    prev_cmd_.assign(pools_.size(), 0.0);
}

std::vector<double> PController::step(std::span<const double> y,
                                      std::span<const double> d_future) {
    const std::size_t n = pools_.size();
    if (y.size() != n || d_future.size() != n) {
        throw config_error("P controller: input lengths do not match pool count");
    }
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double downstream = j >= 1 ? prev_cmd_[j - 1] : 0.0;  // u_0 fixed at zero
        u[j] = p_step(gains_, pools_[j], static_cast<int>(j), y[j], downstream, d_future[j]);
    }
    prev_cmd_ = u;
    return u;
}

}  // namespace canal
