#include "canal/ident.hpp"

#include <cmath>

#include "canal/errors.hpp"

namespace canal {

namespace {

std::vector<double> filtered(const std::vector<double>& x, const IIRFilterCoeffs& coeffs) {
    IIRFilterState state;
    std::vector<double> out(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) out[t] = filter_step(state, coeffs, x[t]);
    return out;
}

enum class Channel { inflow, outflow };

std::vector<double> third_order_response(const ThirdOrderPoolParams& params,
                                         const std::vector<double>& u, Channel channel) {
    PoolSimState state = make_third_order_state(params);
    std::vector<double> y(u.size());
    for (std::size_t t = 0; t < u.size(); ++t) {
        y[t] = level(state);
        const double flow = u[t];
        advance_third_order(state, params, channel == Channel::inflow ? flow : 0.0,
                            channel == Channel::outflow ? flow : 0.0, 0.0);
    }
    return y;
}

std::vector<double> first_order_response(FirstOrderPoolParams params, int tau, int tau_bar,
                                         const std::vector<double>& u, Channel channel) {
    params.tau = tau;
    params.tau_bar = tau_bar;
    PoolSimState state = make_first_order_state(params);
    std::vector<double> y(u.size());
    for (std::size_t t = 0; t < u.size(); ++t) {
        y[t] = level(state);
        const double flow = u[t];
        advance_first_order(state, params, channel == Channel::inflow ? flow : 0.0,
                            channel == Channel::outflow ? flow : 0.0, 0.0);
    }
    return y;
}

double normalized_sse(const std::vector<double>& candidate, const std::vector<double>& reference) {
    double err = 0.0, energy = 0.0;
    for (std::size_t t = 0; t < reference.size(); ++t) {
        const double e = candidate[t] - reference[t];
        err += e * e;
        energy += reference[t] * reference[t];
    }
    if (energy == 0.0) throw config_error("delay fit: reference response has zero energy");
    return err / energy;
}

void check_candidates(const DelayFitConfig& c) {
    if (c.candidate_lo > c.candidate_hi || c.candidate_lo < 0) {
        throw config_error("delay fit: empty or negative candidate range");
    }
}

}  // namespace

std::vector<double> make_test_signal(int t1, int t2, int t3, int length) {
    if (!(0 < t1 && t1 < t2 && t2 < t3 && t3 <= length)) {
        throw config_error("test signal needs 0 < t1 < t2 < t3 <= length");
    }
    std::vector<double> u(static_cast<std::size_t>(length), 0.0);
    for (int t = 0; t < t1; ++t) u[static_cast<std::size_t>(t)] = 1.0;
    for (int t = t2; t < t3; ++t) u[static_cast<std::size_t>(t)] = -1.0;
    return u;
}

DelayFitConfig default_delay_fit_config() {
    DelayFitConfig c;
    c.filter = design_butterworth(3e-3, 60.0);
    return c;
}

DelayFitResult fit_common_delay(const std::vector<ThirdOrderPoolParams>& references,
                                const std::vector<FirstOrderPoolParams>& candidates,
                                const DelayFitConfig& config) {
    check_candidates(config);
    if (references.empty() || references.size() != candidates.size()) {
        throw config_error("delay fit: need one candidate per reference pool");
    }
    const std::vector<double> u = make_test_signal(config.t1, config.t2, config.t3, config.length);
    const std::vector<double> uf = filtered(u, config.filter);
    std::vector<std::vector<double>> refs;
    for (const auto& p : references) refs.push_back(third_order_response(p, uf, Channel::outflow));

    DelayFitResult result;
    double best = 0.0;
    for (int tb = config.candidate_lo; tb <= config.candidate_hi; ++tb) {
        double total = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const std::vector<double> cand =
                first_order_response(candidates[i], 0, tb, u, Channel::outflow);
            total += normalized_sse(cand, refs[i]);
        }
        result.objective.push_back(total);
        if (tb == config.candidate_lo || total < best) {
            best = total;
            result.delay = tb;
        }
    }
    return result;
}

DelayFitResult fit_pool_delay(const ThirdOrderPoolParams& reference,
                              const FirstOrderPoolParams& candidate, int tau_bar,
                              const DelayFitConfig& config) {
    check_candidates(config);
    const std::vector<double> u = make_test_signal(config.t1, config.t2, config.t3, config.length);
    const std::vector<double> uf = filtered(u, config.filter);
    const std::vector<double> ref = third_order_response(reference, uf, Channel::inflow);

    DelayFitResult result;
    double best = 0.0;
    for (int tau = config.candidate_lo; tau <= config.candidate_hi; ++tau) {
        const std::vector<double> cand =
            first_order_response(candidate, tau, tau_bar, u, Channel::inflow);
        const double total = normalized_sse(cand, ref);
        result.objective.push_back(total);
        if (tau == config.candidate_lo || total < best) {
            best = total;
            result.delay = tau;
        }
    }
    return result;
}

}  // namespace canal
