#ifndef CANAL_CENTRAL_LQ_HPP
#define CANAL_CENTRAL_LQ_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "canal/network.hpp"

namespace canal {

/**
 * Block state-space realization of a pool string. A is block diagonal with
 * one companion block per pool (levels at t, t-1, t-2, an inflow shift
 * register, and a two-deep register of the combined outflow-minus-off-take
 * signal); B is lower block bidiagonal: input j feeds pool j's inflow
 * register and pool j+1's outflow channel. y = C x reproduces the direct
 * third-order recursion sample for sample.
 */
struct StateSpaceModel {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    /// Column i injects one unit of off-take at pool i (plant sign: a
    /// positive d raises the level through the +c taps).
    Eigen::MatrixXd D_in;
    Eigen::MatrixXd Q;
    Eigen::MatrixXd R;
    Eigen::MatrixXd cross;  // state-input cost coupling, nonzero only with delta-u states
    std::vector<int> block_offset;
    std::vector<int> block_size;
    int n_pools = 0;
    bool delta_u = false;
};

/// Realize a third-order network with cost weights q (levels), r (inputs)
/// and rho (input increments). When include_delta_u is set, the state is
/// augmented with the previous inputs so rho*(u[t]-u[t-1])^2 becomes a
/// quadratic form in (x, u).
StateSpaceModel assemble_state_space(const NetworkModel& net, bool include_delta_u,
                                     std::span<const double> q, std::span<const double> r,
                                     std::span<const double> rho);

/// v[t] for the given applied off-takes.
Eigen::VectorXd disturbance_injection(const StateSpaceModel& model, std::span<const double> d);

/// Initial state for declared rest levels (level history constant, flows zero).
Eigen::VectorXd initial_state(const StateSpaceModel& model, std::span<const double> levels);

struct DareOptions {
    double tolerance = 1e-12;
    std::int64_t max_iterations = 1'000'000;
    double residual_bound = 1e-10;
};

/// Stationary solution of
///   S = A'SA - (A'SB + N)(B'SB + R)^{-1}(B'SA + N') + Q
/// by iterating the recursion from S = Q, with policy-evaluation
/// acceleration once the greedy feedback is stabilizing. Semidefinite
/// input Hessians along the way are handled by an eigenvalue-thresholded
/// pseudoinverse. Throws solver_error with the residual when the iteration
/// cap is reached or the residual bound fails.
Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                           const Eigen::MatrixXd& N_cross = Eigen::MatrixXd(),
                           const DareOptions& opts = {});

struct LqGains {
    Eigen::MatrixXd S;    // value matrix, symmetric PSD
    Eigen::MatrixXd K;    // feedback gain: u = K x + ...
    Eigen::MatrixXd K_d;  // feed-forward gain: ... + K_d Pi[t]
};

LqGains lq_gains(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                 const Eigen::MatrixXd& R, const Eigen::MatrixXd& N_cross = Eigen::MatrixXd(),
                 const DareOptions& opts = {});

/// Rows of space-separated values at 17 significant digits, for regression
/// baselines.
std::string export_matrix_text(const Eigen::MatrixXd& m);
std::string to_text(const LqGains& gains);

/// Backward adjoint recursion for a known disturbance-injection sequence:
///   Pi[t] = (A + B K)' Pi[t+1] + S v[t],  Pi[H+1] = 0.
/// v must vanish beyond index H = v.size()-1. Returns Pi[0..H+1].
std::vector<Eigen::VectorXd> feedforward_pi(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                            const LqGains& gains,
                                            const std::vector<Eigen::VectorXd>& v);

/**
 * Dense verification controller for a first-order pool string: lifts every
 * delay into state, solves the stationary problem for weights (q, r on the
 * reservoir flow only), and rolls the feed-forward law forward. Used as the
 * independent reference the serial-sweep controller is checked against.
 */
struct LiftedProblem {
    std::vector<FirstOrderPoolParams> pools;  // downstream first; shared tau_bar
    std::vector<double> q;
    double r = 1.0;
    std::vector<double> initial_levels;
    std::map<std::pair<int, std::int64_t>, double> off_takes;  // (pool 0-based, time) -> value
    int steps = 50;
    int max_states = 600;
};

struct LiftedSolution {
    Eigen::MatrixXd u;  // steps x n, original units
    Eigen::MatrixXd y;  // steps x n, levels entering each step
};

LiftedSolution lifted_first_order_oracle(const LiftedProblem& problem);

}  // namespace canal

#endif
