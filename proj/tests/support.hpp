// Shared test-only oracles and generators. Everything here is independent
// of the implementation paths it checks: the QP oracle solves the stacked
// normal equations directly, and the sweep-controller runner drives the
// gate network against the plain first-order plant.
#ifndef CANAL_TESTS_SUPPORT_HPP
#define CANAL_TESTS_SUPPORT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "canal/central_lq.hpp"
#include "canal/network.hpp"
#include "canal/structured.hpp"

namespace canal::testing {

struct QpSolution {
    Eigen::MatrixXd u;  // T x m
    double cost = 0.0;
};

// minimize sum_{t<T} (x'Qx + u'Ru) + x_T' S_term x_T over the stacked inputs.
inline QpSolution qp_oracle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                            const Eigen::MatrixXd& S_term, const Eigen::VectorXd& x0,
                            const std::vector<Eigen::VectorXd>& v, int T) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    std::vector<Eigen::VectorXd> xf(static_cast<std::size_t>(T + 1));
    xf[0] = x0;
    for (int t = 0; t < T; ++t) {
        Eigen::VectorXd vt = t < static_cast<int>(v.size())
                                 ? v[static_cast<std::size_t>(t)]
                                 : Eigen::VectorXd::Zero(n).eval();
        xf[static_cast<std::size_t>(t + 1)] = A * xf[static_cast<std::size_t>(t)] + vt;
    }
    std::vector<Eigen::MatrixXd> G(static_cast<std::size_t>(T + 1),
                                   Eigen::MatrixXd::Zero(n, m * T));
    for (int t = 0; t < T; ++t) {
        G[static_cast<std::size_t>(t + 1)] = A * G[static_cast<std::size_t>(t)];
        G[static_cast<std::size_t>(t + 1)].middleCols(t * m, m) += B;
    }
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m * T, m * T);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m * T);
    double c0 = xf[0].dot(Q * xf[0]);
    for (int t = 1; t <= T; ++t) {
        const Eigen::MatrixXd& W = t == T ? S_term : Q;
        H += G[static_cast<std::size_t>(t)].transpose() * W * G[static_cast<std::size_t>(t)];
        g += G[static_cast<std::size_t>(t)].transpose() * W * xf[static_cast<std::size_t>(t)];
        c0 += xf[static_cast<std::size_t>(t)].dot(W * xf[static_cast<std::size_t>(t)]);
    }
    for (int t = 0; t < T; ++t) H.block(t * m, t * m, m, m) += R;
    const Eigen::VectorXd u_stack = -H.ldlt().solve(g);
    QpSolution out;
    out.cost = c0 + u_stack.dot(H * u_stack) + 2.0 * g.dot(u_stack);
    out.u.resize(T, m);
    for (int t = 0; t < T; ++t) out.u.row(t) = u_stack.segment(t * m, m).transpose();
    return out;
}

inline double closed_loop_cost(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                               const Eigen::MatrixXd& S_term, const Eigen::VectorXd& x0,
                               const std::vector<Eigen::VectorXd>& v,
                               const Eigen::MatrixXd& u_seq) {
    Eigen::VectorXd x = x0;
    double cost = 0.0;
    const int T = static_cast<int>(u_seq.rows());
    for (int t = 0; t < T; ++t) {
        const Eigen::VectorXd u = u_seq.row(t).transpose();
        cost += x.dot(Q * x) + u.dot(R * u);
        Eigen::VectorXd vt = t < static_cast<int>(v.size())
                                 ? v[static_cast<std::size_t>(t)]
                                 : Eigen::VectorXd::Zero(x.size()).eval();
        x = A * x + B * u + vt;
    }
    return cost + x.dot(S_term * x);
}

struct SweepCase {
    std::vector<FirstOrderPoolParams> pools;
    std::vector<double> q;
    double r = 0.3;
    std::vector<double> y0;
    std::map<std::pair<int, std::int64_t>, double> off_takes;
    int steps = 45;
};

inline std::vector<std::vector<double>> run_sweep_controller(const SweepCase& c,
                                                             GateNetwork* net_out = nullptr) {
    GateNetwork gates(c.pools, c.q, c.r);
    for (const auto& [key, value] : c.off_takes) {
        gates.announce_disturbance(key.first, key.second, value);
    }
    NetworkModel model;
    model.n = static_cast<int>(c.pools.size());
    model.order = 1;
    model.first = c.pools;
    NetworkSimulator plant(model, c.y0);
    std::vector<std::vector<double>> u_log;
    for (int t = 0; t < c.steps; ++t) {
        std::vector<double> d(c.pools.size(), 0.0);
        for (std::size_t j = 0; j < c.pools.size(); ++j) {
            const auto it = c.off_takes.find({static_cast<int>(j), t});
            if (it != c.off_takes.end()) d[j] = it->second;
        }
        const std::vector<double> u = gates.tick(t, plant.levels());
        u_log.push_back(u);
        plant.step(u, d);
    }
    if (net_out != nullptr) *net_out = std::move(gates);
    return u_log;
}

inline LiftedSolution run_oracle(const SweepCase& c) {
    LiftedProblem prob;
    prob.pools = c.pools;
    prob.q = c.q;
    prob.r = c.r;
    prob.initial_levels = c.y0;
    prob.off_takes = c.off_takes;
    prob.steps = c.steps;
    return lifted_first_order_oracle(prob);
}

inline double max_rel_error(const std::vector<std::vector<double>>& u,
                            const LiftedSolution& oracle) {
    double scale = 1.0, err = 0.0;
    for (int t = 0; t < oracle.u.rows(); ++t) {
        for (int j = 0; j < oracle.u.cols(); ++j) {
            scale = std::max(scale, std::abs(oracle.u(t, j)));
        }
    }
    for (std::size_t t = 0; t < u.size(); ++t) {
        for (std::size_t j = 0; j < u[t].size(); ++j) {
            err = std::max(err, std::abs(u[t][j] - oracle.u(static_cast<int>(t),
                                                            static_cast<int>(j))));
        }
    }
    return err / scale;
}

inline FirstOrderPoolParams pool(double b, double c, int tau, int tau_bar) {
    FirstOrderPoolParams p;
    p.b = b;
    p.c = c;
    p.tau = tau;
    p.tau_bar = tau_bar;
    return p;
}

// Randomized instance of the equivalence family: N <= 4, tau in [1,3],
// tau_bar <= 2, announcements within [0,20].
inline SweepCase random_case(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> n_dist(1, 4), tau_dist(1, 3), tb_dist(0, 2);
    std::uniform_int_distribution<int> nd_dist(0, 3), time_dist(0, 20);
    std::uniform_real_distribution<double> coef(0.3, 2.0), weight(0.2, 3.0);
    std::uniform_real_distribution<double> level(-2.0, 2.0), dval(-1.0, 1.0);
    std::uniform_real_distribution<double> rw(0.05, 5.0);
    SweepCase c;
    const int n = n_dist(rng);
    const int tau_bar = tb_dist(rng);
    for (int i = 0; i < n; ++i) {
        c.pools.push_back(pool(coef(rng), coef(rng), tau_dist(rng), tau_bar));
        c.q.push_back(weight(rng));
        c.y0.push_back(level(rng));
    }
    c.r = rw(rng);
    const int nd = nd_dist(rng);
    for (int k = 0; k < nd; ++k) {
        c.off_takes[{std::uniform_int_distribution<int>(0, n - 1)(rng), time_dist(rng)}] =
            dval(rng);
    }
    return c;
}

}  // namespace canal::testing

#endif
