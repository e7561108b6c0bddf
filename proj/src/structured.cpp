#include "canal/structured.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "canal/errors.hpp"

namespace canal {

ControlParams compute_params(std::span<const double> q, double r, std::span<const double> b,
                             std::span<const double> c) {
    const std::size_t n = q.size();
    if (n == 0 || b.size() != n || c.size() != n) {
        throw config_error("compute_params: q, b, c must have equal nonzero length");
    }
    if (r <= 0.0) throw config_error("compute_params: reservoir weight must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        if (q[i] <= 0.0 || b[i] <= 0.0 || c[i] <= 0.0) {
            throw config_error("compute_params: weights and coefficients must be positive");
        }
    }
    ControlParams out;
    out.gamma.resize(n);
    out.b_hat.resize(n);
    out.q_scaled.resize(n);
    out.b_hat[0] = b[0];
    out.q_scaled[0] = q[0];
    out.gamma[0] = q[0];
    for (std::size_t i = 1; i < n; ++i) {
        out.b_hat[i] = b[i] / c[i] * out.b_hat[i - 1];
        out.q_scaled[i] = c[i] * c[i] / (out.b_hat[i - 1] * out.b_hat[i - 1]) * q[i];
        out.gamma[i] =
            out.gamma[i - 1] * out.q_scaled[i] / (out.gamma[i - 1] + out.q_scaled[i]);
    }
    const double gn = out.gamma[n - 1];
    out.r_scaled = r / (out.b_hat[n - 1] * out.b_hat[n - 1]);
    out.x = -gn / 2.0 + std::sqrt(gn * out.r_scaled + gn * gn / 4.0);
    out.g = out.x / (out.x + gn);
    return out;
}

const char* to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::upstream_m: return "upstream_m";
        case MessageKind::upstream_d: return "upstream_d";
        case MessageKind::downstream_d: return "downstream_d";
        case MessageKind::downstream_u: return "downstream_u";
    }
    return "?";
}

void write_message_log_csv(const std::vector<SweepMessage>& log, std::ostream& out) {
    out << "tick,from,to,kind,value\n";
    char buf[64];
    for (const SweepMessage& msg : log) {
        std::snprintf(buf, sizeof buf, "%.17g", msg.value);
        out << msg.tick << "," << msg.from << "," << msg.to << "," << to_string(msg.kind)
            << "," << buf << "\n";
    }
}

std::string to_text(const ControlParams& p) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "gate gamma b_hat q_scaled\n";
    for (std::size_t i = 0; i < p.gamma.size(); ++i) {
        out << (i + 1) << " " << num(p.gamma[i]) << " " << num(p.b_hat[i]) << " "
            << num(p.q_scaled[i]) << "\n";
    }
    out << "r_scaled " << num(p.r_scaled) << "\n";
    out << "x " << num(p.x) << "\n";
    out << "g " << num(p.g) << "\n";
    return out.str();
}

GateNetwork::GateNetwork(std::vector<FirstOrderPoolParams> pools, std::span<const double> q,
                         double r, std::int64_t horizon)
    : n_(static_cast<int>(pools.size())), horizon_(horizon) {
    if (pools.empty()) throw config_error("gate network needs at least one pool");
    if (horizon < 0) throw config_error("horizon must be >= 0");
    std::vector<double> b, c;
    const int tau_bar = pools[0].tau_bar;
    for (const auto& p : pools) {
        p.validate();
        if (p.tau < 1) {
            throw config_error("structured control needs tau >= 1 per pool");
        }
        if (p.tau_bar != tau_bar) {
            throw config_error("tau_bar must be shared across the network");
        }
        b.push_back(p.b);
        c.push_back(p.c);
    }
    params_ = compute_params(q, r, b, c);
    std::int64_t sigma = 0;
    for (int j = 0; j < n_; ++j) {
        Gate g;
        g.model = pools[static_cast<std::size_t>(j)];
        g.sigma = sigma;
        g.u_in.assign(static_cast<std::size_t>(g.model.tau + tau_bar), 0.0);
        g.u_out.assign(static_cast<std::size_t>(tau_bar), 0.0);
        g.d_hist.assign(static_cast<std::size_t>(tau_bar + 1), 0.0);
        gates_.push_back(std::move(g));
        sigma += pools[static_cast<std::size_t>(j)].tau;
    }
    sigma_top_ = sigma;
    audit_.upstream_m.assign(static_cast<std::size_t>(n_), 0);
    audit_.upstream_d.assign(static_cast<std::size_t>(n_), 0);
    audit_.downstream_d.assign(static_cast<std::size_t>(n_ + 2), 0);
    audit_.downstream_u.assign(static_cast<std::size_t>(n_), 0);
}

double GateNetwork::dhat_scale(int pool) const {
    return pool == 0 ? gates_[0].model.c : params_.b_hat[static_cast<std::size_t>(pool - 1)];
}

double GateNetwork::dhat_at(int pool, std::int64_t time) const {
    if (time < 0) return 0.0;
    const auto& sched = gates_[static_cast<std::size_t>(pool)].sched;
    const auto it = sched.find(time);
    if (it == sched.end()) return 0.0;
    return dhat_scale(pool) * it->second;
}

void GateNetwork::announce_disturbance(int pool, std::int64_t time, double value) {
    if (pool < 0 || pool >= n_) throw config_error("announce: pool index out of range");
    if (time < now_) throw protocol_error("announce: cannot rewrite a past off-take");
    if (time > horizon_) throw protocol_error("announce: time exceeds the planning horizon");
    Gate& g = gates_[static_cast<std::size_t>(pool)];
    g.sched[time] = value;
    g.dirty.push_back(time + g.sigma);
}

double GateNetwork::stored_aggregate(int pool, std::int64_t s) const {
    const auto& agg = gates_[static_cast<std::size_t>(pool)].agg;
    const auto it = agg.find(s);
    return it == agg.end() ? 0.0 : it->second;
}

double GateNetwork::aggregate_from_definition(int pool, std::int64_t s) const {
    double sum = 0.0;
    for (int j = 0; j <= pool; ++j) {
        sum += dhat_at(j, s - gates_[static_cast<std::size_t>(j)].sigma);
    }
    return sum;
}

std::pair<std::int64_t, std::int64_t> GateNetwork::aggregate_window(int pool) const {
    const auto& agg = gates_[static_cast<std::size_t>(pool)].agg;
    if (agg.empty()) return {0, -1};
    return {agg.begin()->first, agg.rbegin()->first};
}

void GateNetwork::send(const SweepMessage& msg) {
    if (log_ != nullptr) log_->push_back(msg);
    switch (msg.kind) {
        case MessageKind::upstream_m:
            audit_.upstream_m[static_cast<std::size_t>(msg.from - 1)]++;
            break;
        case MessageKind::upstream_d:
            audit_.upstream_d[static_cast<std::size_t>(msg.from - 1)]++;
            break;
        case MessageKind::downstream_d:
            audit_.downstream_d[static_cast<std::size_t>(msg.from)]++;
            break;
        case MessageKind::downstream_u:
            audit_.downstream_u[static_cast<std::size_t>(msg.to - 1)]++;
            break;
    }
}

std::vector<double> GateNetwork::tick(std::int64_t t, std::span<const double> measurements) {
    if (t != now_) throw protocol_error("tick: expected sample " + std::to_string(now_));
    if (measurements.size() != static_cast<std::size_t>(n_)) {
        throw protocol_error("tick: measurement count does not match pool count");
    }
    const int tau_bar = gates_[0].model.tau_bar;
    std::fill(audit_.upstream_m.begin(), audit_.upstream_m.end(), 0);
    std::fill(audit_.upstream_d.begin(), audit_.upstream_d.end(), 0);
    std::fill(audit_.downstream_d.begin(), audit_.downstream_d.end(), 0);
    std::fill(audit_.downstream_u.begin(), audit_.downstream_u.end(), 0);

    // Variable scaling: levels and the newly arriving off-take values.
    std::vector<double> z(static_cast<std::size_t>(n_));
    z[0] = measurements[0];
    for (int j = 1; j < n_; ++j) {
        z[static_cast<std::size_t>(j)] = params_.b_hat[static_cast<std::size_t>(j - 1)] /
                                         gates_[static_cast<std::size_t>(j)].model.c *
                                         measurements[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < n_; ++j) {
        Gate& g = gates_[static_cast<std::size_t>(j)];
        for (std::size_t k = g.d_hist.size(); k-- > 1;) g.d_hist[k] = g.d_hist[k - 1];
        g.d_hist[0] = dhat_at(j, t);
    }

    // Parallel downstream shift of the window-edge aggregate entries. Values
    // are derived from pre-sweep state; under full-range storage the receiver
    // already holds the entry, so the message is checked rather than stored.
    // Entries touched by announcements since the last sweep are the sweep's
    // job and are excluded from the check.
    {
        std::vector<std::int64_t> pending;
        for (const Gate& g : gates_) {
            pending.insert(pending.end(), g.dirty.begin(), g.dirty.end());
        }
        std::sort(pending.begin(), pending.end());
        std::vector<SweepMessage> edge;
        for (int i = n_ + 1; i >= 2; --i) {  // node i sends D_{i-1}[t+sigma_i] to node i-1
            const std::int64_t s_edge =
                t + (i == n_ + 1 ? sigma_top_ : gates_[static_cast<std::size_t>(i - 1)].sigma);
            double value;
            if (i == n_ + 1) {
                const auto it = reservoir_agg_.find(s_edge);
                value = it == reservoir_agg_.end() ? 0.0 : it->second;
            } else {
                value = stored_aggregate(i - 1, s_edge) -
                        gates_[static_cast<std::size_t>(i - 1)].d_hist[0];
            }
            edge.push_back({MessageKind::downstream_d, i, i - 1, t, s_edge, value});
        }
        for (const SweepMessage& msg : edge) {
            send(msg);
            if (std::binary_search(pending.begin(), pending.end(), msg.time_index)) continue;
            const double expect = stored_aggregate(msg.to - 1, msg.time_index);
            if (std::abs(msg.value - expect) > 1e-9 * (1.0 + std::abs(expect))) {
                throw protocol_error("aggregate-disturbance shift disagrees with stored entry");
            }
        }
    }

    // Serial upstream sweep: refresh dirty aggregate entries, accumulate m.
    std::vector<double> m(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) {
        Gate& g = gates_[static_cast<std::size_t>(j)];
        const int tau = g.model.tau;
        std::sort(g.dirty.begin(), g.dirty.end());
        g.dirty.erase(std::unique(g.dirty.begin(), g.dirty.end()), g.dirty.end());
        for (const std::int64_t s : g.dirty) {
            const auto below = g.below.find(s);
            const double base = below == g.below.end() ? 0.0 : below->second;
            const double value = base + dhat_at(j, s - g.sigma);
            g.agg[s] = value;
            const SweepMessage msg{MessageKind::upstream_d, j + 1, j + 2, t, s, value};
            send(msg);
            if (j + 1 < n_) {
                Gate& up = gates_[static_cast<std::size_t>(j + 1)];
                up.below[s] = value;
                up.dirty.push_back(s);
            } else {
                reservoir_agg_[s] = value;
            }
        }
        g.dirty.clear();

        double mi;
        if (j == 0) {
            double sum_u = 0.0;
            for (int s = 1; s <= tau + tau_bar; ++s) sum_u += g.u_in[static_cast<std::size_t>(s - 1)];
            double sum_d = 0.0;
            for (int s = 1; s <= tau_bar; ++s) sum_d += g.d_hist[static_cast<std::size_t>(s)];
            double sum_agg = 0.0;
            for (int s = 0; s <= tau; ++s) sum_agg += stored_aggregate(0, t + s);
            mi = z[0] + sum_u + sum_d + sum_agg;
        } else {
            double sum_uin = 0.0;
            for (int s = tau; s <= tau + tau_bar; ++s) sum_uin += g.u_in[static_cast<std::size_t>(s - 1)];
            double sum_uout = 0.0;
            for (int s = 1; s <= tau_bar; ++s) sum_uout += g.u_out[static_cast<std::size_t>(s - 1)];
            double sum_d = 0.0;
            for (int s = 0; s <= tau_bar; ++s) sum_d += g.d_hist[static_cast<std::size_t>(s)];
            g.p = z[static_cast<std::size_t>(j)] + sum_uin - sum_uout + sum_d;
            g.m_below = m[static_cast<std::size_t>(j - 1)];
            double sum_rec = 0.0;
            for (int s = 1; s <= tau - 1; ++s) sum_rec += g.u_in[static_cast<std::size_t>(s - 1)];
            double sum_agg = 0.0;
            for (int s = 1; s <= tau; ++s) sum_agg += stored_aggregate(j, t + g.sigma + s);
            mi = g.m_below + g.p + sum_rec + sum_agg;
        }
        m[static_cast<std::size_t>(j)] = mi;
        send({MessageKind::upstream_m, j + 1, j + 2, t, 0, mi});
    }

    // Flow computation. Gate i decides the flow through its own structure
    // from p_i and the m below it; the reservoir gate adds the geometric
    // tail over the future aggregate schedule.
    std::vector<double> u_hat(static_cast<std::size_t>(n_), 0.0);  // u_hat[j] feeds pool j
    for (int j = 1; j < n_; ++j) {
        const Gate& g = gates_[static_cast<std::size_t>(j)];
        const double ratio =
            params_.gamma[static_cast<std::size_t>(j)] / params_.q_scaled[static_cast<std::size_t>(j)];
        u_hat[static_cast<std::size_t>(j - 1)] = (1.0 - ratio) * g.p - ratio * g.m_below;
    }
    {
        double tail = 0.0;
        const std::int64_t base = t + sigma_top_;  // index of the s = tau_N term, covered by m_N
        for (auto it = reservoir_agg_.upper_bound(base); it != reservoir_agg_.end(); ++it) {
            tail += it->second * std::pow(params_.g, static_cast<double>(it->first - base));
        }
        u_hat[static_cast<std::size_t>(n_ - 1)] =
            -(params_.x / params_.r_scaled) * (m[static_cast<std::size_t>(n_ - 1)] + tail);
    }

    // Downstream dispatch, history pushes, and unscaling.
    std::vector<double> u(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
        send({MessageKind::downstream_u, j + 2, j + 1, t, 0,
              u_hat[static_cast<std::size_t>(j)]});
        Gate& g = gates_[static_cast<std::size_t>(j)];
        auto push = [](std::vector<double>& hist, double v) {
            if (hist.empty()) return;
            for (std::size_t k = hist.size(); k-- > 1;) hist[k] = hist[k - 1];
            hist[0] = v;
        };
        push(g.u_in, u_hat[static_cast<std::size_t>(j)]);
        push(g.u_out, j >= 1 ? u_hat[static_cast<std::size_t>(j - 1)] : 0.0);
        u[static_cast<std::size_t>(j)] =
            u_hat[static_cast<std::size_t>(j)] / params_.b_hat[static_cast<std::size_t>(j)];
    }

    // Expire aggregate entries that fell out of every window.
    for (int j = 0; j < n_; ++j) {
        Gate& g = gates_[static_cast<std::size_t>(j)];
        const std::int64_t lo = t + 1 + g.sigma;
        g.agg.erase(g.agg.begin(), g.agg.lower_bound(lo));
        g.below.erase(g.below.begin(), g.below.lower_bound(lo));
        g.sched.erase(g.sched.begin(), g.sched.lower_bound(t + 1 - tau_bar - 1));
    }
    reservoir_agg_.erase(reservoir_agg_.begin(), reservoir_agg_.lower_bound(t + 1 + sigma_top_));

    now_ = t + 1;
    return u;
}

}  // namespace canal
