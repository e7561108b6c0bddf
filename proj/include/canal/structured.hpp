#ifndef CANAL_STRUCTURED_HPP
#define CANAL_STRUCTURED_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "canal/pool_model.hpp"

namespace canal {

/**
 * Output of the offline parameter sweep: per-gate recursion weights and the
 * reservoir-gate constants. All gate computations online use the rescaled
 * quantities; flows are rescaled back on dispatch.
 */
struct ControlParams {
    std::vector<double> gamma;     // gamma_i, strictly positive, non-increasing against q_scaled
    std::vector<double> b_hat;     // cumulative b/c products, b_hat_1 = b_1
    std::vector<double> q_scaled;  // rescaled level weights
    double r_scaled = 0.0;         // rescaled reservoir weight
    double x = 0.0;                // reservoir Riccati root, >= 0
    double g = 0.0;                // geometric tail ratio, in [0, 1)
};

/// One upstream sweep with O(1) state per gate:
///   b_hat_i = (b_i/c_i) b_hat_{i-1},  q~_i = (c_i^2/b_hat_{i-1}^2) q_i,
///   gamma_i = gamma_{i-1} q~_i / (gamma_{i-1} + q~_i),
/// then r~ = r/b_hat_N^2, X = -gamma_N/2 + sqrt(gamma_N r~ + gamma_N^2/4),
/// g = X/(X + gamma_N). Rejects nonpositive weights or coefficients.
ControlParams compute_params(std::span<const double> q, double r, std::span<const double> b,
                             std::span<const double> c);

/// Human-readable dump for inspection (17 significant digits).
std::string to_text(const ControlParams& params);

enum class MessageKind { upstream_m, upstream_d, downstream_d, downstream_u };

/// Typed message between adjacent nodes. Gates are numbered 1..N from the
/// downstream end; node N+1 is the reservoir gate. time_index is used by
/// the aggregate-disturbance messages and is 0 otherwise.
struct SweepMessage {
    MessageKind kind;
    int from = 0;
    int to = 0;
    std::int64_t tick = 0;
    std::int64_t time_index = 0;
    double value = 0.0;
};

/// Columns: tick, from, to, kind, value.
void write_message_log_csv(const std::vector<SweepMessage>& log, std::ostream& out);

const char* to_string(MessageKind kind);

/// Message counts of one tick, for auditing against the expected pattern.
struct TickAudit {
    std::vector<int> upstream_m;    // per gate 1..N
    std::vector<int> upstream_d;    // per gate 1..N (dirty-entry forwards)
    std::vector<int> downstream_d;  // per node 2..N+1, indexed by sender
    std::vector<int> downstream_u;  // per gate 1..N, messages received
};

/**
 * Gate agents for one pool string plus the reservoir gate, exchanging typed
 * messages with deterministic delivery order. Each tick runs the per-sample
 * protocol: variable scaling, the parallel downstream shift of unchanged
 * aggregate-disturbance entries, the serial upstream sweep (dirty entries
 * and the m recursion), flow computation, and downstream dispatch.
 *
 * Gate i keeps its own outgoing flow and its inflow history (received from
 * the gate above), its local off-take schedule, and the aggregate schedule
 * D_i. All stored flows and disturbances are in rescaled units; tick()
 * accepts and returns original units.
 */
class GateNetwork {
public:
    /// pools are ordered downstream-first. Requires tau >= 1 per pool (the
    /// sweep reads the inflow at lag tau; a zero-delay inflow would depend
    /// on the flow being computed in the same tick).
    GateNetwork(std::vector<FirstOrderPoolParams> pools, std::span<const double> q, double r,
                std::int64_t horizon = kNoHorizon);

    static constexpr std::int64_t kNoHorizon = INT64_MAX / 4;

    /// Register a planned off-take value d (original units) at gate `pool`
    /// (0-based) for absolute sample `time`. Affected aggregate entries are
    /// marked dirty; the next tick's sweep propagates them upstream.
    /// Announcements in the past or beyond the horizon are rejected.
    void announce_disturbance(int pool, std::int64_t time, double value);

    /// Advance one sample; measurements are the per-pool levels the control
    /// law should act on. Returns flows u[0..N-1] where u[j] feeds pool j.
    std::vector<double> tick(std::int64_t t, std::span<const double> measurements);

    const ControlParams& params() const { return params_; }
    int size() const { return n_; }
    std::int64_t now() const { return now_; }

    /// Stored aggregate entry D_i[s] (rescaled units); gate 0-based, absent
    /// entries are zero.
    double stored_aggregate(int pool, std::int64_t s) const;
    /// Recomputes D_i[s] from the raw schedules, for consistency checks.
    double aggregate_from_definition(int pool, std::int64_t s) const;
    /// Earliest/latest stored aggregate index across all nodes.
    std::pair<std::int64_t, std::int64_t> aggregate_window(int pool) const;

    const TickAudit& last_audit() const { return audit_; }
    /// When set, every message of subsequent ticks is appended to *sink.
    void set_message_log(std::vector<SweepMessage>* sink) { log_ = sink; }

private:
    struct Gate {
        FirstOrderPoolParams model;
        std::int64_t sigma = 0;               // cumulative delay below this gate
        std::vector<double> u_in;             // rescaled inflow, lags 1..tau+tau_bar
        std::vector<double> u_out;            // rescaled outgoing flow, lags 1..tau_bar
        std::vector<double> d_hist;           // rescaled off-take, lags 0..tau_bar
        std::map<std::int64_t, double> sched; // raw off-take schedule by absolute time
        std::map<std::int64_t, double> below; // D_{i-1} entries learned from the gate below
        std::map<std::int64_t, double> agg;   // D_i by absolute time, rescaled
        std::vector<std::int64_t> dirty;      // indices to re-derive in the next sweep
        double p = 0.0;                       // predicted own-pool total, last sweep
        double m_below = 0.0;                 // m received from the gate below, last sweep
    };

    double dhat_scale(int pool) const;  // rescale factor for gate pool's off-takes
    double dhat_at(int pool, std::int64_t time) const;
    void send(const SweepMessage& msg);

    int n_;
    ControlParams params_;
    std::vector<Gate> gates_;
    std::map<std::int64_t, double> reservoir_agg_;  // D_N beyond gate N's window
    std::int64_t sigma_top_ = 0;                    // sigma_{N+1}
    std::int64_t horizon_;
    std::int64_t now_ = 0;
    TickAudit audit_;
    std::vector<SweepMessage>* log_ = nullptr;
};

}  // namespace canal

#endif
