// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit status is nonzero when any
// hard criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "canal/baseline_p.hpp"
#include "canal/central_lq.hpp"
#include "canal/filters.hpp"
#include "canal/harness.hpp"
#include "canal/ident.hpp"
#include "canal/network.hpp"
#include "canal/structured.hpp"
#include "support.hpp"

using namespace canal;
using namespace canal::testing;

namespace {

int failures = 0;

void report(int index, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", index, name,
                detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. Serial-sweep controller matches the dense lifted solution.
void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    const int trials = 200;
    for (int seed = 0; seed < trials; ++seed) {
        const SweepCase c = random_case(static_cast<unsigned>(seed));
        const auto u = run_sweep_controller(c);
        worst = std::max(worst, max_rel_error(u, run_oracle(c)));
    }
    const double elapsed = seconds_since(start);
    const bool ok = worst <= 1e-8 && elapsed < 60.0;
    report(1, "sweep controller vs dense reference", ok,
           fmt("%d randomized instances, worst relative error %.2e (bound 1e-8), %.1f s",
               trials, worst, elapsed));
}

// 2. Feed-forward law attains the brute-force optimum.
void criterion_2() {
    std::mt19937 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> n_dist(2, 8), m_dist(1, 3), t_dist(10, 15);
    double worst_gap = 0.0, worst_perturbation = 0.0;
    const int trials = 50;
    for (int trial = 0; trial < trials; ++trial) {
        const int n = n_dist(rng), m = m_dist(rng);
        Eigen::MatrixXd A(n, n), B(n, m), Mq(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) B(i, j) = gauss(rng);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Mq(i, j) = gauss(rng);
        A *= 0.9 / A.eigenvalues().cwiseAbs().maxCoeff();
        const Eigen::MatrixXd Q =
            Mq.transpose() * Mq / n + 0.02 * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd R =
            (0.2 + 0.8 * std::abs(gauss(rng))) * Eigen::MatrixXd::Identity(m, m);
        const int T = t_dist(rng);
        std::vector<Eigen::VectorXd> v;
        for (int t = 0; t < std::min(T, 10); ++t) {
            Eigen::VectorXd vt(n);
            for (int i = 0; i < n; ++i) vt(i) = gauss(rng);
            v.push_back(vt);
        }
        Eigen::VectorXd x0(n);
        for (int i = 0; i < n; ++i) x0(i) = gauss(rng);

        const LqGains g = lq_gains(A, B, Q, R);
        const auto pi = feedforward_pi(A, B, g, v);
        Eigen::MatrixXd u_closed(T, m);
        Eigen::VectorXd x = x0;
        for (int t = 0; t < T; ++t) {
            Eigen::VectorXd u = g.K * x;
            if (t < static_cast<int>(pi.size())) u += g.K_d * pi[static_cast<std::size_t>(t)];
            u_closed.row(t) = u.transpose();
            Eigen::VectorXd vt = t < static_cast<int>(v.size())
                                     ? v[static_cast<std::size_t>(t)]
                                     : Eigen::VectorXd::Zero(n).eval();
            x = A * x + B * u + vt;
        }
        const double cost_closed = closed_loop_cost(A, B, Q, R, g.S, x0, v, u_closed);
        const QpSolution qp = qp_oracle(A, B, Q, R, g.S, x0, v, T);
        const double cost_qp = closed_loop_cost(A, B, Q, R, g.S, x0, v, qp.u);
        worst_gap = std::max(worst_gap, std::abs(cost_closed - cost_qp) / std::abs(cost_qp));
        for (int k = 0; k < 100; ++k) {
            Eigen::MatrixXd u_pert = u_closed;
            for (int t = 0; t < T; ++t)
                for (int j = 0; j < m; ++j) u_pert(t, j) += 0.05 * gauss(rng);
            const double pert = closed_loop_cost(A, B, Q, R, g.S, x0, v, u_pert);
            worst_perturbation = std::max(worst_perturbation, cost_closed - pert);
        }
    }
    const bool ok = worst_gap <= 1e-8 && worst_perturbation <= 1e-12;
    report(2, "feed-forward optimality vs brute-force program", ok,
           fmt("%d systems, worst cost gap %.2e (bound 1e-8), best perturbation gain %.2e "
               "(slack 1e-12)",
               trials, worst_gap, worst_perturbation));
}

// 3. Delay identification reproduces the reported values.
void criterion_3() {
    const std::vector<ThirdOrderPoolParams> refs{default_pool_table().third_order(1),
                                                 default_pool_table().third_order(2)};
    const std::vector<FirstOrderPoolParams> firsts{default_pool_table().first_order(1),
                                                   default_pool_table().first_order(2)};
    const int tau_bar = fit_common_delay(refs, firsts).delay;
    const int tau1 = fit_pool_delay(refs[0], firsts[0], tau_bar).delay;
    const DelayFitResult fit2 = fit_pool_delay(refs[1], firsts[1], tau_bar);
    const int tau2 = fit2.delay;
    const bool exact = tau_bar == 10 && tau1 == 2 && tau2 == 15;
    const bool within =
        std::abs(tau_bar - 10) <= 2 && std::abs(tau1 - 2) <= 2 && std::abs(tau2 - 15) <= 2;
    std::string note;
    if (!exact) {
        note = fmt("; within the +/-2 fallback: objective %.3e at 15 vs %.3e at the optimum",
                   fit2.objective[15], fit2.objective[static_cast<std::size_t>(tau2)]);
    }
    report(3, "delay identification", within,
           fmt("tau_bar=%d (target 10), tau1=%d (target 2), tau2=%d (target 15)%s", tau_bar,
               tau1, tau2, note.c_str()));
}

// 4. Filter design numbers.
void criterion_4() {
    const IIRFilterCoeffs c = design_butterworth(3e-3, 60.0);
    double bsum = 0.0, asum = 0.0;
    for (double v : c.b) bsum += v;
    for (double v : c.a) asum += v;
    const double dc = bsum / asum;
    const double at_cutoff = magnitude_db(c, 3e-3);
    const double at_decade = magnitude_db(c, 3e-2);
    const bool ok = std::abs(dc - 1.0) <= 1e-9 && std::abs(at_cutoff + 3.01) <= 0.1 &&
                    std::abs(at_decade + 60.0) <= 3.0;
    report(4, "low-pass design", ok,
           fmt("DC %.12f (1 +/- 1e-9), %.3f dB at cutoff (-3.01 +/- 0.1), %.2f dB a decade up "
               "(-60 +/- 3)",
               dc, at_cutoff, at_decade));
}

// 5. Stationary estimator gain.
void criterion_5() {
    const double p = kalman_stationary_variance(1.0, 100.0);
    const double p_ref = (1.0 + std::sqrt(401.0)) / 2.0;
    double l = 1.0;
    for (int it = 0; it < 200000; ++it) l = l - l * l / (l + 100.0) + 1.0;
    const double gain = kalman_gain(1.0, 100.0);
    const bool ok = std::abs(p - p_ref) <= 1e-12 * p_ref &&
                    std::abs(l - p) <= 1e-12 * p &&
                    std::abs(gain - p_ref / (p_ref + 100.0)) <= 1e-12;
    report(5, "stationary estimator gain", ok,
           fmt("P=%.12f vs (1+sqrt(401))/2=%.12f, fixed-point iterate %.12f, gain %.6f", p,
               p_ref, l, gain));
}

// 6. Proportional-loop margins.
void criterion_6() {
    double worst_gm = 0.0, worst_pm = 0.0;
    for (int pool_id : {1, 2}) {
        const FirstOrderPoolParams p = synthesis_pool_params(pool_id);
        const double k = p_gain(p.tau, p.tau_bar, p.b);
        worst_gm = std::max(worst_gm, std::abs(p_gain_margin(p.tau, p.tau_bar, p.b, k) - 4.0));
        worst_pm = std::max(worst_pm, std::abs(p_phase_margin(p.tau, p.tau_bar, p.b, k) -
                                               3.0 * std::numbers::pi / 8.0));
    }
    const bool ok = worst_gm <= 1e-12 && worst_pm <= 1e-12;
    report(6, "proportional-loop margins", ok,
           fmt("gain margin error %.2e, phase margin error %.2e (bounds 1e-12)", worst_gm,
               worst_pm));
}

// 7. Controller ordering across the size and location studies.
void criterion_7() {
    const auto start = std::chrono::steady_clock::now();
    std::vector<SweepRow> rows = sweep_network_size({3, 5, 10, 15});
    std::vector<int> locations;
    for (int p = 1; p <= 9; ++p) locations.push_back(p);
    const std::vector<SweepRow> loc = sweep_disturbance_location(10, locations);
    rows.insert(rows.end(), loc.begin(), loc.end());

    bool ordering = true;
    double worst_soft_gap = 0.0;
    std::ostringstream soft_note;
    for (std::size_t k = 0; k + 2 < rows.size(); k += 3) {
        const double lq = rows[k].cost.total;
        const double st = rows[k + 1].cost.total;
        const double bp = rows[k + 2].cost.total;
        if (!(lq <= st * 1.001 && st <= bp)) ordering = false;
        worst_soft_gap = std::max(worst_soft_gap, st / lq - 1.0);
    }
    const double elapsed = seconds_since(start);
    const bool ok = ordering && elapsed < 300.0;
    report(7, "disturbance-rejection ordering", ok,
           fmt("lq3 <= structured <= best-P on all %zu studies, structured within %.2f%% of "
               "lq3%s, %.1f s",
               rows.size() / 3, 100.0 * worst_soft_gap,
               worst_soft_gap > 0.05 ? " (soft 5% bound exceeded; reported, not failing)"
                                     : " (soft 5% bound met)",
               elapsed));
}

// 8. Set-point change keeps the sweep controller strictly between the
//    centralized law and the proportional baseline.
void criterion_8() {
    Scenario sc;
    sc.n = 10;
    sc.kind = NetworkKind::homogeneous;
    sc.initial_levels.assign(10, 0.0);
    sc.initial_levels.front() = -1.0;
    sc.initial_levels.back() = 1.0;
    sc.horizon = 3000;

    sc.controller = ControllerKind::lq3;
    const double lq = evaluate_cost(run_scenario(sc)).total;
    sc.controller = ControllerKind::structured;
    const double st = evaluate_cost(run_scenario(sc)).total;
    double bp = 0.0;
    bool first = true;
    for (double f : kPGainFactors) {
        sc.controller = ControllerKind::p;
        sc.p_gain_factor = f;
        const double c = evaluate_cost(run_scenario(sc)).total;
        if (first || c < bp) bp = c;
        first = false;
    }
    const bool ok = lq < st && st < bp;
    report(8, "set-point ordering with strict separation", ok,
           fmt("lq3 %.4f < structured %.4f < best-P %.4f", lq, st, bp));
}

// 9. Assembled model vs direct recursion, and the ramp slopes.
void criterion_9() {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (auto kind : {NetworkKind::homogeneous, NetworkKind::alternating}) {
        const int n = 2;
        const NetworkModel net = build_network(n, kind, 3);
        const std::vector<double> ones(n, 1.0), zeros(n, 0.0);
        const StateSpaceModel model = assemble_state_space(net, false, ones, zeros, zeros);
        std::vector<double> y0{dist(rng), dist(rng)};
        NetworkSimulator plant(net, y0);
        Eigen::VectorXd x = initial_state(model, y0);
        for (int t = 0; t < 500; ++t) {
            std::vector<double> u{dist(rng), dist(rng)}, d{dist(rng), dist(rng)};
            plant.step(u, d);
            Eigen::VectorXd ue(2);
            ue << u[0], u[1];
            x = model.A * x + model.B * ue + disturbance_injection(model, d);
            const auto y = plant.levels();
            const Eigen::VectorXd ym = model.C * x;
            for (int i = 0; i < n; ++i) {
                worst = std::max(worst, std::abs(y[static_cast<std::size_t>(i)] - ym(i)));
            }
        }
    }
    const double slope1 = dc_slope(default_pool_table().third_order(1), FlowChannel::inflow);
    const double slope2 = dc_slope(default_pool_table().third_order(2), FlowChannel::inflow);
    const bool ok = worst <= 1e-12 && std::abs(slope1 - 0.0658) <= 1e-4 &&
                    std::abs(slope2 - 0.0215) <= 1e-4;
    report(9, "plant cross-validation", ok,
           fmt("state-space vs recursion worst gap %.2e (bound 1e-12), ramp slopes %.6f "
               "(0.0658 +/- 1e-4) and %.6f (0.0215 +/- 1e-4)",
               worst, slope1, slope2));
}

// 10. Determinism and sign symmetry.
void criterion_10() {
    Scenario sc;
    sc.n = 5;
    sc.kind = NetworkKind::alternating;
    sc.initial_levels = {5, 0, 0, 0, -5};
    sc.disturbances = {DisturbanceWindow{1, 250, 450, 1.0}};
    sc.horizon = 1500;
    sc.controller = ControllerKind::structured;

    std::ostringstream a, b;
    write_csv(run_scenario(sc), a);
    write_csv(run_scenario(sc), b);
    const bool deterministic = a.str() == b.str();

    // Sign symmetry on the set-point scenario (no off-take breaks the parity).
    bool symmetric = true;
    Scenario sp;
    sp.n = 5;
    sp.kind = NetworkKind::homogeneous;
    sp.initial_levels = {-1, 0, 0, 0, 1};
    sp.horizon = 1200;
    for (ControllerKind ctl :
         {ControllerKind::structured, ControllerKind::lq3, ControllerKind::p}) {
        sp.controller = ctl;
        sp.flip_initial_sign = false;
        const SimTrace plus = run_scenario(sp);
        sp.flip_initial_sign = true;
        const SimTrace minus = run_scenario(sp);
        for (std::size_t t = 0; t < plus.y.size() && symmetric; ++t) {
            for (std::size_t j = 0; j < plus.y[t].size(); ++j) {
                if (plus.y[t][j] != -minus.y[t][j] || plus.u[t][j] != -minus.u[t][j]) {
                    symmetric = false;
                    break;
                }
            }
        }
    }
    report(10, "determinism and sign symmetry", deterministic && symmetric,
           fmt("repeated runs bit-identical: %s; negated initial conditions negate traces "
               "exactly: %s",
               deterministic ? "yes" : "no", symmetric ? "yes" : "no"));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criterion(s) failed\n", failures);
    }
    return failures == 0 ? 0 : 1;
}
