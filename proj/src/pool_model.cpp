#include "canal/pool_model.hpp"

#include <cmath>
#include <fstream>

#include "canal/errors.hpp"
#include "json.hpp"

namespace canal {

namespace {

bool all_finite(std::initializer_list<double> xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

// hist[k] = value at t-1-k; lag 0 means the value applied right now.
double tap(const std::vector<double>& hist, double now, int lag) {
    if (lag == 0) return now;
    return hist[static_cast<std::size_t>(lag - 1)];
}

void push(std::vector<double>& hist, double now) {
    if (hist.empty()) return;
    for (std::size_t k = hist.size() - 1; k > 0; --k) hist[k] = hist[k - 1];
    hist[0] = now;
}

}  // namespace

void ThirdOrderPoolParams::validate() const {
    if (!all_finite({b1, b2, b3, c1, c2, c3, alpha1, alpha2})) {
        throw config_error("third-order pool parameters must be finite");
    }
    if (tau < 0) throw config_error("third-order pool delay must be >= 0");
}

void FirstOrderPoolParams::validate() const {
    if (!all_finite({b, c}) || b <= 0.0 || c <= 0.0) {
        throw config_error("first-order pool coefficients must be positive and finite");
    }
    if (tau < 0 || tau_bar < 0) throw config_error("first-order pool delays must be >= 0");
}

PoolSimState make_third_order_state(const ThirdOrderPoolParams& params, double initial_level) {
    params.validate();
    PoolSimState s;
    s.y.assign(3, initial_level);
    s.u_in.assign(static_cast<std::size_t>(params.tau + 2), 0.0);
    s.u_out.assign(2, 0.0);
    s.d.assign(2, 0.0);
    return s;
}

PoolSimState make_first_order_state(const FirstOrderPoolParams& params, double initial_level) {
    params.validate();
    PoolSimState s;
    s.y.assign(3, initial_level);
    s.u_in.assign(static_cast<std::size_t>(params.tau + params.tau_bar), 0.0);
    s.u_out.assign(static_cast<std::size_t>(params.tau_bar), 0.0);
    s.d.assign(static_cast<std::size_t>(params.tau_bar), 0.0);
    return s;
}

void advance_third_order(PoolSimState& state, const ThirdOrderPoolParams& params,
                         double u_in, double u_out, double d) {
    const int tau = params.tau;
    if (state.y.size() < 3 || state.u_in.size() < static_cast<std::size_t>(tau + 2) ||
        state.u_out.size() < 2 || state.d.size() < 2) {
        throw config_error("pool state history too shallow for third-order stepping");
    }
    const double yt = state.y[0], ym1 = state.y[1], ym2 = state.y[2];
    const double next =
        params.b1 * tap(state.u_in, u_in, tau) - params.b2 * tap(state.u_in, u_in, tau + 1) +
        params.b3 * tap(state.u_in, u_in, tau + 2) -
        params.c1 * (tap(state.u_out, u_out, 0) - tap(state.d, d, 0)) +
        params.c2 * (tap(state.u_out, u_out, 1) - tap(state.d, d, 1)) -
        params.c3 * (tap(state.u_out, u_out, 2) - tap(state.d, d, 2)) +
        yt + params.alpha1 * (yt - 2.0 * ym1 + ym2) + params.alpha2 * (yt - ym1);
    push(state.u_in, u_in);
    push(state.u_out, u_out);
    push(state.d, d);
    state.y[2] = ym1;
    state.y[1] = yt;
    state.y[0] = next;
}

void advance_first_order(PoolSimState& state, const FirstOrderPoolParams& params,
                         double u_in, double u_out, double d) {
    const int lag_in = params.tau + params.tau_bar;
    const int lag_out = params.tau_bar;
    if (state.u_in.size() < static_cast<std::size_t>(lag_in) ||
        state.u_out.size() < static_cast<std::size_t>(lag_out) ||
        state.d.size() < static_cast<std::size_t>(lag_out)) {
        throw config_error("pool state history too shallow for first-order stepping");
    }
    const double next = state.y[0] + params.b * tap(state.u_in, u_in, lag_in) -
                        params.c * (tap(state.u_out, u_out, lag_out) - tap(state.d, d, lag_out));
    push(state.u_in, u_in);
    push(state.u_out, u_out);
    push(state.d, d);
    state.y[2] = state.y[1];
    state.y[1] = state.y[0];
    state.y[0] = next;
}

PoolSimState step_third_order(PoolSimState state, const ThirdOrderPoolParams& params,
                              double u_in, double u_out, double d) {
    advance_third_order(state, params, u_in, u_out, d);
    return state;
}

PoolSimState step_first_order(PoolSimState state, const FirstOrderPoolParams& params,
                              double u_in, double u_out, double d) {
    advance_first_order(state, params, u_in, u_out, d);
    return state;
}

double dc_slope(const ThirdOrderPoolParams& params, FlowChannel channel) {
    const double denom = 1.0 - params.alpha2;
    if (std::abs(denom) < 1e-12) {
        throw config_error("dc_slope singular: alpha2 == 1");
    }
    const double num = channel == FlowChannel::inflow ? params.b1 - params.b2 + params.b3
                                                      : params.c1 - params.c2 + params.c3;
    return num / denom;
}

double dc_slope(const FirstOrderPoolParams& params, FlowChannel channel) {
    return channel == FlowChannel::inflow ? params.b : params.c;
}

void PoolParameterTable::add(int pool, const ThirdOrderPoolParams& params) {
    params.validate();
    third_.emplace_back(pool, params);
}

void PoolParameterTable::add(int pool, const FirstOrderPoolParams& params) {
    params.validate();
    first_.emplace_back(pool, params);
}

const ThirdOrderPoolParams& PoolParameterTable::third_order(int pool) const {
    for (const auto& [id, p] : third_) {
        if (id == pool) return p;
    }
    throw config_error("no third-order parameters for pool " + std::to_string(pool));
}

const FirstOrderPoolParams& PoolParameterTable::first_order(int pool) const {
    for (const auto& [id, p] : first_) {
        if (id == pool) return p;
    }
    throw config_error("no first-order parameters for pool " + std::to_string(pool));
}

bool PoolParameterTable::has_third_order(int pool) const {
    for (const auto& [id, _] : third_) {
        if (id == pool) return true;
    }
    return false;
}

bool PoolParameterTable::has_first_order(int pool) const {
    for (const auto& [id, _] : first_) {
        if (id == pool) return true;
    }
    return false;
}

const PoolParameterTable& default_pool_table() {
    static const PoolParameterTable table = [] {
        PoolParameterTable t;
        t.add(1, FirstOrderPoolParams{0.069, 0.063, 3, 0});
        t.add(1, ThirdOrderPoolParams{0.137, 0.155, 0.053, 0.190, 0.333, 0.175, 0.978, 0.468, 3});
        t.add(2, FirstOrderPoolParams{0.0213, 0.0156, 14, 0});
        t.add(2, ThirdOrderPoolParams{0.134, 0.244, 0.114, 0.101, 0.185, 0.087, 0.314, 0.814, 16});
        return t;
    }();
    return table;
}

PoolParameterTable load_pool_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open pool parameter file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("malformed pool parameter file: " + std::string(e.what()));
    }
    if (!j.contains("pools") || !j["pools"].is_array()) {
        throw config_error("pool parameter file needs a top-level \"pools\" array");
    }
    PoolParameterTable table;
    for (const auto& row : j["pools"]) {
        const int pool = row.at("pool").get<int>();
        const int order = row.at("order").get<int>();
        if (order == 1) {
            FirstOrderPoolParams p;
            p.b = row.at("b1").get<double>();
            p.c = row.at("c1").get<double>();
            p.tau = row.at("tau").get<int>();
            p.tau_bar = row.value("tau_bar", 0);
            table.add(pool, p);
        } else if (order == 3) {
            ThirdOrderPoolParams p;
            p.b1 = row.at("b1").get<double>();
            p.b2 = row.at("b2").get<double>();
            p.b3 = row.at("b3").get<double>();
            p.c1 = row.at("c1").get<double>();
            p.c2 = row.at("c2").get<double>();
            p.c3 = row.at("c3").get<double>();
            p.alpha1 = row.at("alpha1").get<double>();
            p.alpha2 = row.at("alpha2").get<double>();
            p.tau = row.at("tau").get<int>();
            table.add(pool, p);
        } else {
            throw config_error("pool model order must be 1 or 3");
        }
    }
    return table;
}

FirstOrderPoolParams synthesis_pool_params(int pool, double b_factor) {
    FirstOrderPoolParams p = default_pool_table().first_order(pool);
    p.b *= b_factor;
    p.tau = pool == 1 ? 2 : 15;  // delays from the two-stage fit, not the table rows
    p.tau_bar = kSynthesisTauBar;
    return p;
}

}  // namespace canal
