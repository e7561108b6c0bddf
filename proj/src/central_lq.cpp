#include "canal/central_lq.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "canal/errors.hpp"

namespace canal {

namespace {

// Solve H x = b for symmetric PSD H, dropping near-null directions. The
// input Hessian B'SB + R is singular on the early iterates whenever delayed
// inputs carry no immediate cost; the limit is invertible.
class PsdSolver {
public:
    explicit PsdSolver(const Eigen::MatrixXd& H) : es_(H) {
        const Eigen::VectorXd& ev = es_.eigenvalues();
        const double cap = ev.cwiseAbs().maxCoeff();
        const double floor = std::max(cap * 1e-13, 1e-300);
        inv_ = ev.unaryExpr([floor](double x) { return x > floor ? 1.0 / x : 0.0; });
    }
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const {
        return es_.eigenvectors() * inv_.asDiagonal() * es_.eigenvectors().transpose() * rhs;
    }

private:
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_;
    Eigen::VectorXd inv_;
};

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return (m + m.transpose()) / 2.0; }

// S = Acl' S Acl + M by doubling. Returns false when the iteration shows no
// sign of contraction (Acl not Schur stable).
bool solve_dlyap(const Eigen::MatrixXd& acl, const Eigen::MatrixXd& m, Eigen::MatrixXd* out) {
    Eigen::MatrixXd s = m;
    Eigen::MatrixXd z = acl;
    const double scale = std::max(1.0, m.norm());
    for (int k = 0; k < 200; ++k) {
        const double zn = z.norm();
        if (zn < 1e-150) {
            *out = symmetrize(s);
            return true;
        }
        if (!std::isfinite(zn) || s.norm() > 1e12 * scale) return false;
        s = s + z.transpose() * s * z;
        z = z * z;
    }
    return false;
}

Eigen::MatrixXd greedy_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::MatrixXd& R, const Eigen::MatrixXd& N,
                            const Eigen::MatrixXd& S) {
    const PsdSolver h(symmetrize(B.transpose() * S * B + R));
    return -h.solve(B.transpose() * S * A + N.transpose());
}

double dare_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& N, const Eigen::MatrixXd& S) {
    const Eigen::MatrixXd K = greedy_gain(A, B, R, N, S);
    const Eigen::MatrixXd next =
        symmetrize(Q + A.transpose() * S * A + (A.transpose() * S * B + N) * K);
    return (next - S).norm();
}

}  // namespace

Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                           const Eigen::MatrixXd& N_cross, const DareOptions& opts) {
    const Eigen::Index n = A.rows();
    const Eigen::Index m = B.cols();
    if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != m ||
        R.cols() != m) {
        throw config_error("solve_dare: dimension mismatch");
    }
    const Eigen::MatrixXd N =
        N_cross.size() == 0 ? Eigen::MatrixXd::Zero(n, m) : N_cross;
    if (N.rows() != n || N.cols() != m) throw config_error("solve_dare: cross-term mismatch");

    Eigen::MatrixXd S = symmetrize(Q);
    double change = 0.0;
    for (std::int64_t it = 0; it < opts.max_iterations; ++it) {
        const Eigen::MatrixXd K = greedy_gain(A, B, R, N, S);
        const Eigen::MatrixXd next =
            symmetrize(Q + A.transpose() * S * A + (A.transpose() * S * B + N) * K);
        change = (next - S).norm();
        S = next;
        const double scale = std::max(1.0, S.norm());
        if (change <= opts.tolerance * scale) break;
        // Policy evaluation closes the gap in one shot once the greedy
        // feedback is stabilizing; value recursion alone crawls when the
        // closed loop is slow.
        if (it % 25 == 24) {
            const Eigen::MatrixXd acl = A + B * K;
            const Eigen::MatrixXd cost = symmetrize(Q + K.transpose() * R * K + N * K +
                                                    K.transpose() * N.transpose());
            Eigen::MatrixXd evaluated;
            if (solve_dlyap(acl, cost, &evaluated)) {
                S = evaluated;
            }
        }
        if (it + 1 == opts.max_iterations) {
            std::ostringstream msg;
            msg << "solve_dare: no convergence after " << opts.max_iterations
                << " iterations, last step " << change;
            throw solver_error(msg.str());
        }
    }
    const double res = dare_residual(A, B, Q, R, N, S);
    if (!(res <= opts.residual_bound * std::max(1.0, S.norm()))) {
        std::ostringstream msg;
        msg << "solve_dare: residual " << res << " exceeds bound "
            << opts.residual_bound * std::max(1.0, S.norm());
        throw solver_error(msg.str());
    }
    return S;
}

LqGains lq_gains(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                 const Eigen::MatrixXd& R, const Eigen::MatrixXd& N_cross,
                 const DareOptions& opts) {
    LqGains out;
    out.S = solve_dare(A, B, Q, R, N_cross, opts);
    const Eigen::MatrixXd N = N_cross.size() == 0
                                  ? Eigen::MatrixXd::Zero(A.rows(), B.cols())
                                  : N_cross;
    const PsdSolver h(symmetrize(B.transpose() * out.S * B + R));
    out.K = -h.solve(B.transpose() * out.S * A + N.transpose());
    out.K_d = -h.solve(B.transpose());
    return out;
}

std::string export_matrix_text(const Eigen::MatrixXd& m) {
    std::ostringstream out;
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, j == 0 ? "%.17g" : " %.17g", m(i, j));
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

std::string to_text(const LqGains& gains) {
    std::ostringstream out;
    out << "S " << gains.S.rows() << " " << gains.S.cols() << "\n" << export_matrix_text(gains.S);
    out << "K " << gains.K.rows() << " " << gains.K.cols() << "\n" << export_matrix_text(gains.K);
    out << "K_d " << gains.K_d.rows() << " " << gains.K_d.cols() << "\n"
        << export_matrix_text(gains.K_d);
    return out.str();
}

std::vector<Eigen::VectorXd> feedforward_pi(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                            const LqGains& gains,
                                            const std::vector<Eigen::VectorXd>& v) {
    const Eigen::MatrixXd acl_t = (A + B * gains.K).transpose();
    const std::size_t h = v.size();
    std::vector<Eigen::VectorXd> pi(h + 1, Eigen::VectorXd::Zero(A.rows()));
    for (std::size_t t = h; t-- > 0;) {
        pi[t] = acl_t * pi[t + 1] + gains.S * v[t];
    }
    return pi;
}

StateSpaceModel assemble_state_space(const NetworkModel& net, bool include_delta_u,
                                     std::span<const double> q, std::span<const double> r,
                                     std::span<const double> rho) {
    if (net.order != 3) throw config_error("assemble_state_space expects a third-order network");
    const int n = net.n;
    if (q.size() != static_cast<std::size_t>(n) || r.size() != static_cast<std::size_t>(n) ||
        rho.size() != static_cast<std::size_t>(n)) {
        throw config_error("assemble_state_space: weight vectors must match pool count");
    }
    StateSpaceModel m;
    m.n_pools = n;
    m.delta_u = include_delta_u;
    int nx = 0;
    for (int p = 0; p < n; ++p) {
        m.block_offset.push_back(nx);
        const int sz = 3 + (net.third[static_cast<std::size_t>(p)].tau + 2) + 2;
        m.block_size.push_back(sz);
        nx += sz;
    }
    const int n_plant = nx;
    if (include_delta_u) nx += n;  // one previous-input state per gate

    m.A = Eigen::MatrixXd::Zero(nx, nx);
    m.B = Eigen::MatrixXd::Zero(nx, n);
    m.C = Eigen::MatrixXd::Zero(n, nx);
    m.D_in = Eigen::MatrixXd::Zero(nx, n);
    for (int p = 0; p < n; ++p) {
        const ThirdOrderPoolParams& pp = net.third[static_cast<std::size_t>(p)];
        const int tau = pp.tau;
        const int o = m.block_offset[static_cast<std::size_t>(p)];
        const int iy = o, iu = o + 3, iw = o + 3 + tau + 2;
        m.A(iy, iy) = 1.0 + pp.alpha1 + pp.alpha2;
        m.A(iy, iy + 1) = -2.0 * pp.alpha1 - pp.alpha2;
        m.A(iy, iy + 2) = pp.alpha1;
        m.A(iy + 1, iy) = 1.0;
        m.A(iy + 2, iy + 1) = 1.0;
        const double bcoef[3] = {pp.b1, -pp.b2, pp.b3};
        for (int k = 0; k < 3; ++k) {
            const int lag = tau + k;
            if (lag == 0) {
                m.B(iy, p) += bcoef[k];
            } else {
                m.A(iy, iu + lag - 1) += bcoef[k];
            }
        }
        // Combined w = u_out - d: head via B (outflow input) and D_in (off-take).
        m.A(iy, iw) = pp.c2;
        m.A(iy, iw + 1) = -pp.c3;
        m.A(iw + 1, iw) = 1.0;
        m.B(iu, p) = 1.0;
        for (int k = 1; k < tau + 2; ++k) m.A(iu + k, iu + k - 1) = 1.0;
        if (p >= 1) {
            m.B(iy, p - 1) += -pp.c1;
            m.B(iw, p - 1) = 1.0;
        }
        m.D_in(iy, p) = pp.c1;
        m.D_in(iw, p) = -1.0;
        m.C(p, iy) = 1.0;
    }

    m.Q = Eigen::MatrixXd::Zero(nx, nx);
    for (int p = 0; p < n; ++p) {
        m.Q(m.block_offset[static_cast<std::size_t>(p)], m.block_offset[static_cast<std::size_t>(p)]) =
            q[static_cast<std::size_t>(p)];
    }
    m.R = Eigen::MatrixXd::Zero(n, n);
    for (int p = 0; p < n; ++p) m.R(p, p) = r[static_cast<std::size_t>(p)];
    m.cross = Eigen::MatrixXd::Zero(nx, n);
    if (include_delta_u) {
        for (int p = 0; p < n; ++p) {
            const int iprev = n_plant + p;
            m.A(iprev, iprev) = 0.0;
            m.B(iprev, p) = 1.0;  // u_prev[t+1] = u[t]
            // rho*(u - u_prev)^2 = rho u^2 - 2 rho u u_prev + rho u_prev^2
            m.R(p, p) += rho[static_cast<std::size_t>(p)];
            m.Q(iprev, iprev) += rho[static_cast<std::size_t>(p)];
            m.cross(iprev, p) += -rho[static_cast<std::size_t>(p)];
        }
    } else {
        for (int p = 0; p < n; ++p) {
            if (rho[static_cast<std::size_t>(p)] != 0.0) {
                throw config_error("nonzero rho needs include_delta_u");
            }
        }
    }
    return m;
}

Eigen::VectorXd disturbance_injection(const StateSpaceModel& model, std::span<const double> d) {
    if (d.size() != static_cast<std::size_t>(model.n_pools)) {
        throw config_error("disturbance_injection: length mismatch");
    }
    Eigen::VectorXd dv(model.n_pools);
    for (int p = 0; p < model.n_pools; ++p) dv(p) = d[static_cast<std::size_t>(p)];
    return model.D_in * dv;
}

Eigen::VectorXd initial_state(const StateSpaceModel& model, std::span<const double> levels) {
    if (levels.size() != static_cast<std::size_t>(model.n_pools)) {
        throw config_error("initial_state: length mismatch");
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(model.A.rows());
    for (int p = 0; p < model.n_pools; ++p) {
        const int o = model.block_offset[static_cast<std::size_t>(p)];
        x(o) = x(o + 1) = x(o + 2) = levels[static_cast<std::size_t>(p)];
    }
    return x;
}

LiftedSolution lifted_first_order_oracle(const LiftedProblem& problem) {
    const int n = static_cast<int>(problem.pools.size());
    if (n == 0) throw config_error("oracle: empty pool list");
    if (problem.q.size() != static_cast<std::size_t>(n) ||
        problem.initial_levels.size() != static_cast<std::size_t>(n)) {
        throw config_error("oracle: weight/initial-level length mismatch");
    }
    const int tau_bar = problem.pools[0].tau_bar;
    std::vector<int> reg_len, reg_base;
    int nx = n;
    for (const auto& p : problem.pools) {
        p.validate();
        if (p.tau_bar != tau_bar) throw config_error("oracle: tau_bar must be shared");
        reg_base.push_back(nx);
        reg_len.push_back(p.tau + tau_bar);
        nx += p.tau + tau_bar;
    }
    if (nx > problem.max_states) {
        throw config_error("oracle: lifted model has " + std::to_string(nx) +
                           " states, above the dense-solve limit of " +
                           std::to_string(problem.max_states));
    }

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nx, nx);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nx, n);
    auto add_tap = [&](int row, int input, int lag, double coef) {
        if (lag == 0) {
            B(row, input) += coef;
        } else {
            A(row, reg_base[static_cast<std::size_t>(input)] + lag - 1) += coef;
        }
    };
    for (int i = 0; i < n; ++i) {
        const auto& p = problem.pools[static_cast<std::size_t>(i)];
        A(i, i) = 1.0;
        add_tap(i, i, p.tau + tau_bar, p.b);
        if (i >= 1) add_tap(i, i - 1, tau_bar, -problem.pools[static_cast<std::size_t>(i)].c);
        if (reg_len[static_cast<std::size_t>(i)] >= 1) {
            B(reg_base[static_cast<std::size_t>(i)], i) = 1.0;
            for (int k = 1; k < reg_len[static_cast<std::size_t>(i)]; ++k) {
                A(reg_base[static_cast<std::size_t>(i)] + k,
                  reg_base[static_cast<std::size_t>(i)] + k - 1) = 1.0;
            }
        }
    }
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(nx, nx);
    for (int i = 0; i < n; ++i) Q(i, i) = problem.q[static_cast<std::size_t>(i)];
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    R(n - 1, n - 1) = problem.r;

    const LqGains gains = lq_gains(A, B, Q, R);

    std::int64_t last = -1;
    for (const auto& [key, value] : problem.off_takes) {
        if (key.first < 0 || key.first >= n) throw config_error("oracle: off-take pool out of range");
        if (key.second < 0) throw config_error("oracle: off-take before time zero");
        if (value != 0.0) last = std::max(last, key.second);
    }
    auto off_take = [&](int pool, std::int64_t t) {
        const auto it = problem.off_takes.find({pool, t});
        return it == problem.off_takes.end() ? 0.0 : it->second;
    };
    // The off-take at pool i acts on the level with lag tau_bar and plant
    // sign +c (the printed equation raises the level for positive d).
    const std::int64_t v_end = last + tau_bar;
    std::vector<Eigen::VectorXd> v;
    for (std::int64_t t = 0; t <= v_end; ++t) {
        Eigen::VectorXd vt = Eigen::VectorXd::Zero(nx);
        for (int i = 0; i < n; ++i) {
            vt(i) = problem.pools[static_cast<std::size_t>(i)].c * off_take(i, t - tau_bar);
        }
        v.push_back(std::move(vt));
    }
    const std::vector<Eigen::VectorXd> pi = feedforward_pi(A, B, gains, v);

    LiftedSolution sol;
    sol.u.resize(problem.steps, n);
    sol.y.resize(problem.steps, n);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nx);
    for (int i = 0; i < n; ++i) x(i) = problem.initial_levels[static_cast<std::size_t>(i)];
    for (int t = 0; t < problem.steps; ++t) {
        Eigen::VectorXd u = gains.K * x;
        if (t < static_cast<std::int64_t>(pi.size())) u += gains.K_d * pi[static_cast<std::size_t>(t)];
        sol.y.row(t) = x.head(n).transpose();
        sol.u.row(t) = u.transpose();
        Eigen::VectorXd vt = Eigen::VectorXd::Zero(nx);
        if (t <= v_end) vt = v[static_cast<std::size_t>(t)];
        x = A * x + B * u + vt;
    }
    return sol;
}

}  // namespace canal
