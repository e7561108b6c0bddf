#include "canal/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "canal/baseline_p.hpp"
#include "canal/central_lq.hpp"
#include "canal/errors.hpp"
#include "canal/filters.hpp"
#include "canal/structured.hpp"
#include "json.hpp"

namespace canal {

namespace {

constexpr double kCutoffRadS = 3e-3;
constexpr double kSamplePeriodS = 60.0;

struct ScheduleSet {
    // raw[t][j]: planned off-take of pool j at time t, announceable units
    std::vector<std::vector<double>> raw;
    // applied[t][j]: the same schedule through the shared low-pass
    std::vector<std::vector<double>> applied;
};

ScheduleSet build_schedules(const Scenario& sc, const std::vector<FirstOrderPoolParams>& synth,
                            std::int64_t length) {
    ScheduleSet out;
    out.raw.assign(static_cast<std::size_t>(length),
                   std::vector<double>(static_cast<std::size_t>(sc.n), 0.0));
    for (const DisturbanceWindow& w : sc.disturbances) {
        if (w.pool < 1 || w.pool > sc.n) throw config_error("disturbance pool out of range");
        if (w.t_on < 0 || w.t_off < w.t_on) throw config_error("disturbance window malformed");
        const double magnitude = w.rate / synth[static_cast<std::size_t>(w.pool - 1)].c;
        const double value = sc.offtake_lowers_level ? -magnitude : magnitude;
        for (std::int64_t t = w.t_on; t < std::min<std::int64_t>(w.t_off, length); ++t) {
            out.raw[static_cast<std::size_t>(t)][static_cast<std::size_t>(w.pool - 1)] += value;
        }
    }
    const IIRFilterCoeffs coeffs = design_butterworth(kCutoffRadS, kSamplePeriodS);
    out.applied.assign(out.raw.size(), std::vector<double>(static_cast<std::size_t>(sc.n), 0.0));
    for (int j = 0; j < sc.n; ++j) {
        IIRFilterState state;
        for (std::size_t t = 0; t < out.raw.size(); ++t) {
            out.applied[t][static_cast<std::size_t>(j)] =
                filter_step(state, coeffs, out.raw[t][static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

NetworkModel plant_network(const Scenario& sc) {
    if (sc.pool_table_path.empty()) return build_network(sc.n, sc.kind, 3);
    const PoolParameterTable table = load_pool_table(sc.pool_table_path);
    return build_network(sc.n, sc.kind, 3, table);
}

std::vector<double> initial_levels_of(const Scenario& sc) {
    std::vector<double> y0 = sc.initial_levels;
    if (y0.empty()) y0.assign(static_cast<std::size_t>(sc.n), 0.0);
    if (y0.size() != static_cast<std::size_t>(sc.n)) {
        throw config_error("initial level count does not match pool count");
    }
    if (sc.flip_initial_sign) {
        for (double& v : y0) v = -v;
    }
    return y0;
}

void accumulate_costs(SimTrace& trace) {
    const std::size_t horizon = trace.y.size();
    const std::size_t n = horizon == 0 ? 0 : trace.y[0].size();
    trace.cum_level.resize(horizon);
    trace.cum_input.resize(horizon);
    trace.cum_deltau.resize(horizon);
    double lv = 0.0, in = 0.0, du = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        for (std::size_t j = 0; j < n; ++j) {
            lv += trace.weight_q[j] * trace.y[t][j] * trace.y[t][j];
            in += trace.weight_r[j] * trace.u[t][j] * trace.u[t][j];
            if (t + 1 < horizon) {
                const double step = trace.u[t + 1][j] - trace.u[t][j];
                du += trace.weight_rho[j] * step * step;
            }
        }
        trace.cum_level[t] = lv;
        trace.cum_input[t] = in;
        trace.cum_deltau[t] = du;
    }
}

void find_decay_time(SimTrace& trace) {
    const std::size_t horizon = trace.y.size();
    double peak = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        for (double v : trace.y[t]) peak = std::max(peak, std::abs(v));
        for (double v : trace.u[t]) peak = std::max(peak, std::abs(v));
    }
    const double floor = 1e-9 * peak;
    std::size_t last_active = 0;
    for (std::size_t t = 0; t < horizon; ++t) {
        double mag = 0.0;
        for (double v : trace.y[t]) mag = std::max(mag, std::abs(v));
        for (double v : trace.u[t]) mag = std::max(mag, std::abs(v));
        if (mag > floor) last_active = t;
    }
    trace.decay_time = static_cast<std::int64_t>(std::min(last_active + 1, horizon));
}

SimTrace run_structured(const Scenario& sc) {
    const std::vector<FirstOrderPoolParams> synth =
        synthesis_models(sc.n, sc.kind, sc.first_order_b_factor);
    const ScheduleSet sched = build_schedules(sc, synth, sc.horizon);
    const std::vector<double> y0 = initial_levels_of(sc);

    NetworkModel plant_model = plant_network(sc);
    NetworkSimulator plant(plant_model, y0);

    std::vector<double> q(static_cast<std::size_t>(sc.n), sc.q);
    GateNetwork gates(synth, q, sc.r_reservoir);
    for (std::int64_t t = 0; t < sc.horizon; ++t) {
        for (int j = 0; j < sc.n; ++j) {
            const double v = sched.raw[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
            if (v != 0.0) gates.announce_disturbance(j, t, v);
        }
    }

    std::vector<SweepMessage> message_log;
    if (!sc.message_log_path.empty()) gates.set_message_log(&message_log);

    const IIRFilterCoeffs coeffs = design_butterworth(kCutoffRadS, kSamplePeriodS);
    std::vector<LowPassFilter> u_filters(static_cast<std::size_t>(sc.n), LowPassFilter(coeffs));

    std::vector<LevelEstimator> estimators;
    for (int j = 0; j < sc.n; ++j) {
        KalmanParams kp;
        kp.r1 = sc.kalman_r1;
        kp.r2 = sc.kalman_r2;
        kp.model = synth[static_cast<std::size_t>(j)];
        estimators.emplace_back(kp, y0[static_cast<std::size_t>(j)]);
    }
    // Command history for the estimators' prediction step (raw units).
    std::vector<std::vector<double>> cmd_hist;

    SimTrace trace;
    trace.weight_q = q;
    trace.weight_r.assign(static_cast<std::size_t>(sc.n), sc.r_internal);
    trace.weight_r[static_cast<std::size_t>(sc.n - 1)] = sc.r_reservoir;
    trace.weight_rho.assign(static_cast<std::size_t>(sc.n), sc.rho);

    for (std::int64_t t = 0; t < sc.horizon; ++t) {
        std::vector<double> estimate(static_cast<std::size_t>(sc.n));
        if (sc.use_kalman) {
            for (int j = 0; j < sc.n; ++j) {
                estimate[static_cast<std::size_t>(j)] =
                    estimators[static_cast<std::size_t>(j)].prior();
            }
        } else {
            estimate = plant.levels();
        }
        const std::vector<double> cmd = gates.tick(t, estimate);
        cmd_hist.push_back(cmd);

        std::vector<double> applied(static_cast<std::size_t>(sc.n));
        for (int j = 0; j < sc.n; ++j) {
            applied[static_cast<std::size_t>(j)] =
                sc.apply_input_filter
                    ? u_filters[static_cast<std::size_t>(j)].step(cmd[static_cast<std::size_t>(j)])
                    : cmd[static_cast<std::size_t>(j)];
        }
        const std::vector<double>& d_applied = sc.apply_input_filter
                                                   ? sched.applied[static_cast<std::size_t>(t)]
                                                   : sched.raw[static_cast<std::size_t>(t)];

        const std::vector<double> y_meas = plant.levels();
        for (int j = 0; j < sc.n; ++j) {
            const auto& model = synth[static_cast<std::size_t>(j)];
            auto cmd_at = [&](int gate, std::int64_t when) {
                if (gate < 0 || when < 0) return 0.0;
                return cmd_hist[static_cast<std::size_t>(when)][static_cast<std::size_t>(gate)];
            };
            const std::int64_t t_in = t - model.tau - model.tau_bar;
            const std::int64_t t_out = t - model.tau_bar;
            const double d_lagged =
                t_out >= 0
                    ? sched.raw[static_cast<std::size_t>(t_out)][static_cast<std::size_t>(j)]
                    : 0.0;
            estimators[static_cast<std::size_t>(j)].update(
                y_meas[static_cast<std::size_t>(j)], cmd_at(j, t_in), cmd_at(j - 1, t_out),
                d_lagged);
        }

        trace.y.push_back(y_meas);
        trace.u.push_back(applied);
        trace.d.push_back(d_applied);
        plant.step(applied, d_applied);
    }
    if (!sc.message_log_path.empty()) {
        std::ofstream out(sc.message_log_path);
        if (!out) throw config_error("cannot open message log file: " + sc.message_log_path);
        write_message_log_csv(message_log, out);
    }
    accumulate_costs(trace);
    find_decay_time(trace);
    return trace;
}

SimTrace run_lq3(const Scenario& sc) {
    const std::vector<FirstOrderPoolParams> synth =
        synthesis_models(sc.n, sc.kind, sc.first_order_b_factor);
    const ScheduleSet sched = build_schedules(sc, synth, sc.horizon);
    const std::vector<double> y0 = initial_levels_of(sc);

    NetworkModel plant_model = plant_network(sc);
    NetworkSimulator plant(plant_model, y0);

    std::vector<double> q(static_cast<std::size_t>(sc.n), sc.q);
    std::vector<double> r(static_cast<std::size_t>(sc.n), sc.r_internal);
    r[static_cast<std::size_t>(sc.n - 1)] = sc.r_reservoir;
    std::vector<double> rho(static_cast<std::size_t>(sc.n), sc.rho);
    const bool with_delta = sc.rho != 0.0;
    const StateSpaceModel model = assemble_state_space(plant_model, with_delta, q, r, rho);
    const LqGains gains = lq_gains(model.A, model.B, model.Q, model.R, model.cross);

    // Known filtered off-takes drive the adjoint recursion.
    std::int64_t v_end = -1;
    for (std::int64_t t = 0; t < sc.horizon; ++t) {
        for (int j = 0; j < sc.n; ++j) {
            if (sched.applied[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] != 0.0) {
                v_end = t;
            }
        }
    }
    std::vector<Eigen::VectorXd> v;
    for (std::int64_t t = 0; t <= v_end; ++t) {
        v.push_back(disturbance_injection(model, sched.applied[static_cast<std::size_t>(t)]));
    }
    const std::vector<Eigen::VectorXd> pi = feedforward_pi(model.A, model.B, gains, v);

    SimTrace trace;
    trace.weight_q = q;
    trace.weight_r = r;
    trace.weight_rho = rho;

    Eigen::VectorXd x = initial_state(model, y0);
    for (std::int64_t t = 0; t < sc.horizon; ++t) {
        Eigen::VectorXd u = gains.K * x;
        if (t < static_cast<std::int64_t>(pi.size())) {
            u += gains.K_d * pi[static_cast<std::size_t>(t)];
        }
        std::vector<double> u_applied(u.data(), u.data() + u.size());
        const std::vector<double>& d_applied = sched.applied[static_cast<std::size_t>(t)];

        trace.y.push_back(plant.levels());
        trace.u.push_back(u_applied);
        trace.d.push_back(d_applied);

        plant.step(u_applied, d_applied);
        Eigen::VectorXd vt = Eigen::VectorXd::Zero(model.A.rows());
        if (t <= v_end) vt = v[static_cast<std::size_t>(t)];
        x = model.A * x + model.B * u + vt;
    }
    accumulate_costs(trace);
    find_decay_time(trace);
    return trace;
}

SimTrace run_p(const Scenario& sc) {
    const std::vector<FirstOrderPoolParams> synth =
        synthesis_models(sc.n, sc.kind, sc.first_order_b_factor);
    // The feed-forward reads tau_i ahead of the horizon end.
    std::int64_t max_tau = 0;
    for (const auto& p : synth) max_tau = std::max<std::int64_t>(max_tau, p.tau);
    const ScheduleSet sched = build_schedules(sc, synth, sc.horizon + max_tau + 1);
    const std::vector<double> y0 = initial_levels_of(sc);

    NetworkModel plant_model = plant_network(sc);
    NetworkSimulator plant(plant_model, y0);

    PController ctl(synth, sc.p_gain_factor, sc.k_ff);
    const IIRFilterCoeffs coeffs = design_butterworth(kCutoffRadS, kSamplePeriodS);
    std::vector<LowPassFilter> u_filters(static_cast<std::size_t>(sc.n), LowPassFilter(coeffs));

    SimTrace trace;
    trace.weight_q.assign(static_cast<std::size_t>(sc.n), sc.q);
    trace.weight_r.assign(static_cast<std::size_t>(sc.n), sc.r_internal);
    trace.weight_r[static_cast<std::size_t>(sc.n - 1)] = sc.r_reservoir;
    trace.weight_rho.assign(static_cast<std::size_t>(sc.n), sc.rho);

    const auto& ff_source = sc.filter_p_feedforward ? sched.applied : sched.raw;
    for (std::int64_t t = 0; t < sc.horizon; ++t) {
        const std::vector<double> y = plant.levels();
        std::vector<double> d_future(static_cast<std::size_t>(sc.n), 0.0);
        for (int j = 0; j < sc.n; ++j) {
            const std::int64_t when = t + synth[static_cast<std::size_t>(j)].tau;
            if (when < static_cast<std::int64_t>(ff_source.size())) {
                d_future[static_cast<std::size_t>(j)] =
                    ff_source[static_cast<std::size_t>(when)][static_cast<std::size_t>(j)];
            }
        }
        const std::vector<double> cmd = ctl.step(y, d_future);
        std::vector<double> applied(static_cast<std::size_t>(sc.n));
        for (int j = 0; j < sc.n; ++j) {
            applied[static_cast<std::size_t>(j)] =
                sc.apply_input_filter
                    ? u_filters[static_cast<std::size_t>(j)].step(cmd[static_cast<std::size_t>(j)])
                    : cmd[static_cast<std::size_t>(j)];
        }
        trace.y.push_back(y);
        trace.u.push_back(applied);
        trace.d.push_back(sched.applied[static_cast<std::size_t>(t)]);
        plant.step(applied, sched.applied[static_cast<std::size_t>(t)]);
    }
    accumulate_costs(trace);
    find_decay_time(trace);
    return trace;
}

}  // namespace

std::string to_string(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::structured: return "structured";
        case ControllerKind::lq3: return "lq3";
        case ControllerKind::p: return "p";
    }
    return "?";
}

ControllerKind controller_from_string(const std::string& name) {
    if (name == "structured") return ControllerKind::structured;
    if (name == "lq3") return ControllerKind::lq3;
    if (name == "p") return ControllerKind::p;
    throw config_error("unknown controller: " + name);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("malformed scenario file: " + std::string(e.what()));
    }
    Scenario sc;
    try {
        if (j.contains("network")) {
            const auto& net = j["network"];
            sc.n = net.value("n", sc.n);
            const std::string kind = net.value("kind", std::string("alternating"));
            if (kind == "alternating") {
                sc.kind = NetworkKind::alternating;
            } else if (kind == "homogeneous") {
                sc.kind = NetworkKind::homogeneous;
            } else {
                throw config_error("network kind must be homogeneous or alternating");
            }
        }
        if (j.contains("controller")) {
            sc.controller = controller_from_string(j["controller"].get<std::string>());
        }
        if (j.contains("weights")) {
            const auto& w = j["weights"];
            sc.q = w.value("q", sc.q);
            sc.r_reservoir = w.value("r_reservoir", sc.r_reservoir);
            sc.r_internal = w.value("r_internal", sc.r_internal);
            sc.rho = w.value("rho", sc.rho);
        }
        if (j.contains("initial_levels")) {
            sc.initial_levels = j["initial_levels"].get<std::vector<double>>();
        }
        if (j.contains("disturbances")) {
            for (const auto& row : j["disturbances"]) {
                DisturbanceWindow w;
                w.pool = row.at("pool").get<int>();
                w.t_on = row.at("t_on").get<std::int64_t>();
                w.t_off = row.at("t_off").get<std::int64_t>();
                w.rate = row.value("rate", 1.0);
                sc.disturbances.push_back(w);
            }
        }
        sc.horizon = j.value("horizon", sc.horizon);
        sc.p_gain_factor = j.value("p_gain_factor", sc.p_gain_factor);
        sc.k_ff = j.value("k_ff", sc.k_ff);
        sc.offtake_lowers_level = j.value("offtake_lowers_level", sc.offtake_lowers_level);
        sc.flip_initial_sign = j.value("flip_initial_sign", sc.flip_initial_sign);
        sc.first_order_b_factor = j.value("first_order_b_factor", sc.first_order_b_factor);
        sc.filter_p_feedforward = j.value("filter_p_feedforward", sc.filter_p_feedforward);
        sc.use_kalman = j.value("use_kalman", sc.use_kalman);
        sc.pool_table_path = j.value("pool_table", sc.pool_table_path);
    } catch (const nlohmann::json::exception& e) {
        throw config_error("scenario file: " + std::string(e.what()));
    }
    return sc;
}

CostBreakdown evaluate_cost(const SimTrace& trace, std::span<const double> q,
                            std::span<const double> r, std::span<const double> rho) {
    const std::size_t horizon = trace.y.size();
    const std::size_t n = horizon == 0 ? 0 : trace.y[0].size();
    if (q.size() != n || r.size() != n || rho.size() != n) {
        throw config_error("evaluate_cost: weight count does not match pool count");
    }
    CostBreakdown out;
    for (std::size_t t = 0; t < horizon; ++t) {
        for (std::size_t j = 0; j < n; ++j) {
            out.level += q[j] * trace.y[t][j] * trace.y[t][j];
            out.input += r[j] * trace.u[t][j] * trace.u[t][j];
            if (t + 1 < horizon) {
                const double step = trace.u[t + 1][j] - trace.u[t][j];
                out.delta_u += rho[j] * step * step;
            }
        }
    }
    out.total = out.level + out.input + out.delta_u;
    return out;
}

CostBreakdown evaluate_cost(const SimTrace& trace) {
    return evaluate_cost(trace, trace.weight_q, trace.weight_r, trace.weight_rho);
}

SimTrace run_scenario(const Scenario& sc) {
    if (sc.n < 1) throw config_error("scenario needs at least one pool");
    if (sc.horizon < 1) throw config_error("scenario horizon must be positive");
    if (sc.controller == ControllerKind::structured) {
        if (sc.r_internal != 0.0 || sc.rho != 0.0) {
            throw config_error(
                "the structured controller requires zero internal input weights and zero "
                "increment weights");
        }
        return run_structured(sc);
    }
    if (sc.controller == ControllerKind::lq3) return run_lq3(sc);
    return run_p(sc);
}

void write_csv(const SimTrace& trace, std::ostream& out) {
    const std::size_t n = trace.y.empty() ? 0 : trace.y[0].size();
    out << "t";
    for (std::size_t j = 1; j <= n; ++j) out << ",y_" << j;
    for (std::size_t j = 1; j <= n; ++j) out << ",u_" << j;
    for (std::size_t j = 1; j <= n; ++j) out << ",d_" << j;
    out << ",cost_cum_level,cost_cum_input,cost_cum_deltau\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out << buf;
    };
    for (std::size_t t = 0; t < trace.y.size(); ++t) {
        out << t;
        for (std::size_t j = 0; j < n; ++j) emit(trace.y[t][j]);
        for (std::size_t j = 0; j < n; ++j) emit(trace.u[t][j]);
        for (std::size_t j = 0; j < n; ++j) emit(trace.d[t][j]);
        emit(trace.cum_level[t]);
        emit(trace.cum_input[t]);
        emit(trace.cum_deltau[t]);
        out << "\n";
    }
}

namespace {

SweepRow best_p_row(Scenario sc) {
    SweepRow row;
    row.controller = ControllerKind::p;
    bool first = true;
    for (double f : kPGainFactors) {
        sc.p_gain_factor = f;
        const CostBreakdown c = evaluate_cost(run_scenario(sc));
        if (first || c.total < row.cost.total) {
            row.cost = c;
            row.best_gain_factor = f;
            first = false;
        }
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep_network_size(const std::vector<int>& sizes, const Scenario& base) {
    std::vector<SweepRow> rows;
    for (int n : sizes) {
        if (n < 2) throw config_error("size sweep needs n >= 2");
        Scenario sc = base;
        sc.n = n;
        sc.kind = NetworkKind::homogeneous;
        sc.initial_levels.clear();
        sc.disturbances = {DisturbanceWindow{n - 1, 200, 400, 1.0}};
        for (ControllerKind ctl :
             {ControllerKind::lq3, ControllerKind::structured, ControllerKind::p}) {
            sc.controller = ctl;
            SweepRow row;
            if (ctl == ControllerKind::p) {
                row = best_p_row(sc);
            } else {
                row.controller = ctl;
                row.cost = evaluate_cost(run_scenario(sc));
            }
            row.n = n;
            row.disturbance_pool = n - 1;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<SweepRow> sweep_disturbance_location(int n, const std::vector<int>& pools,
                                                 const Scenario& base) {
    std::vector<SweepRow> rows;
    for (int pool : pools) {
        if (pool < 1 || pool > n) throw config_error("location sweep: pool out of range");
        Scenario sc = base;
        sc.n = n;
        sc.kind = NetworkKind::homogeneous;
        sc.initial_levels.clear();
        sc.disturbances = {DisturbanceWindow{pool, 200, 400, 1.0}};
        for (ControllerKind ctl :
             {ControllerKind::lq3, ControllerKind::structured, ControllerKind::p}) {
            sc.controller = ctl;
            SweepRow row;
            if (ctl == ControllerKind::p) {
                row = best_p_row(sc);
            } else {
                row.controller = ctl;
                row.cost = evaluate_cost(run_scenario(sc));
            }
            row.n = n;
            row.disturbance_pool = pool;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<TradeoffRow> sweep_tradeoff(const std::vector<double>& r_grid,
                                        const std::vector<double>& rho_grid,
                                        const Scenario& base) {
    std::vector<TradeoffRow> rows;
    Scenario sc = base;
    sc.n = 10;
    sc.kind = NetworkKind::homogeneous;
    sc.initial_levels.clear();
    sc.disturbances = {DisturbanceWindow{5, 200, 400, 1.0}};

    const std::vector<double> ones(static_cast<std::size_t>(sc.n), 1.0);
    const std::vector<double> zeros(static_cast<std::size_t>(sc.n), 0.0);
    auto raw_sums = [&](const SimTrace& trace, TradeoffRow& row) {
        row.sum_y2 = evaluate_cost(trace, ones, zeros, zeros).level;
        row.sum_u2 = evaluate_cost(trace, zeros, ones, zeros).input;
        row.sum_du2 = evaluate_cost(trace, zeros, zeros, ones).delta_u;
        std::vector<double> only_top(static_cast<std::size_t>(sc.n), 0.0);
        only_top.back() = 1.0;
        row.sum_uN2 = evaluate_cost(trace, zeros, only_top, zeros).input;
    };

    for (double r : r_grid) {
        sc.controller = ControllerKind::structured;
        sc.r_reservoir = r;
        sc.r_internal = 0.0;
        sc.rho = 0.0;
        TradeoffRow row{ControllerKind::structured, "r_reservoir", r, 0, 0, 0, 0};
        raw_sums(run_scenario(sc), row);
        rows.push_back(row);
    }
    for (double r : r_grid) {
        sc.controller = ControllerKind::lq3;
        sc.r_reservoir = r;
        sc.r_internal = r;
        sc.rho = 0.0;
        TradeoffRow row{ControllerKind::lq3, "r_all", r, 0, 0, 0, 0};
        raw_sums(run_scenario(sc), row);
        rows.push_back(row);
    }
    for (double rho : rho_grid) {
        sc.controller = ControllerKind::lq3;
        sc.r_reservoir = base.r_reservoir;
        sc.r_internal = 0.0;
        sc.rho = rho;
        TradeoffRow row{ControllerKind::lq3, "rho_all", rho, 0, 0, 0, 0};
        raw_sums(run_scenario(sc), row);
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "n,disturbance_pool,controller,best_gain_factor,cost_total,cost_level,cost_input,"
           "cost_deltau\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out << buf;
    };
    for (const SweepRow& r : rows) {
        out << r.n << "," << r.disturbance_pool << "," << to_string(r.controller) << ","
            << r.best_gain_factor;
        emit(r.cost.total);
        emit(r.cost.level);
        emit(r.cost.input);
        emit(r.cost.delta_u);
        out << "\n";
    }
}

void write_tradeoff_csv(const std::vector<TradeoffRow>& rows, std::ostream& out) {
    out << "controller,parameter,value,sum_y2,sum_u2,sum_du2,sum_uN2\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out << buf;
    };
    for (const TradeoffRow& r : rows) {
        out << to_string(r.controller) << "," << r.parameter;
        emit(r.value);
        emit(r.sum_y2);
        emit(r.sum_u2);
        emit(r.sum_du2);
        emit(r.sum_uN2);
        out << "\n";
    }
}

}  // namespace canal
