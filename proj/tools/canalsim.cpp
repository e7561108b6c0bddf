// Command-line front end: parameter sweeps, delay identification, scenario
// simulation, and the comparison studies, all emitting CSV.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "canal/baseline_p.hpp"
#include "canal/central_lq.hpp"
#include "canal/errors.hpp"
#include "canal/filters.hpp"
#include "canal/harness.hpp"
#include "canal/ident.hpp"
#include "canal/network.hpp"
#include "canal/structured.hpp"

namespace {

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw canal::config_error("cannot open output file: " + path);
    return file;
}

int run_params(int n, const std::string& kind, double q, double r) {
    using namespace canal;
    const NetworkKind k = kind == "homogeneous" ? NetworkKind::homogeneous
                                                : NetworkKind::alternating;
    const std::vector<FirstOrderPoolParams> pools = synthesis_models(n, k);
    std::vector<double> qv(static_cast<std::size_t>(n), q), b, c;
    for (const auto& p : pools) {
        b.push_back(p.b);
        c.push_back(p.c);
    }
    std::cout << to_text(compute_params(qv, r, b, c));
    return 0;
}

int run_ident(const std::string& out_path) {
    using namespace canal;
    const std::vector<ThirdOrderPoolParams> refs{default_pool_table().third_order(1),
                                                 default_pool_table().third_order(2)};
    const std::vector<FirstOrderPoolParams> firsts{default_pool_table().first_order(1),
                                                   default_pool_table().first_order(2)};
    const DelayFitResult common = fit_common_delay(refs, firsts);
    const DelayFitResult tau1 = fit_pool_delay(refs[0], firsts[0], common.delay);
    const DelayFitResult tau2 = fit_pool_delay(refs[1], firsts[1], common.delay);
    std::cout << "tau_bar " << common.delay << "\n";
    std::cout << "tau_pool1 " << tau1.delay << "\n";
    std::cout << "tau_pool2 " << tau2.delay << "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw config_error("cannot open output file: " + out_path);
        out << "candidate,common_error,pool1_error,pool2_error\n";
        for (std::size_t k = 0; k < common.objective.size(); ++k) {
            out << k << "," << common.objective[k] << "," << tau1.objective[k] << ","
                << tau2.objective[k] << "\n";
        }
        std::cout << "objective table written to " << out_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Irrigation pool-string control simulator"};
    app.require_subcommand(1);

    // params
    auto* params_cmd =
        app.add_subcommand("params", "Run the offline parameter sweep and print the result");
    int params_n = 5;
    std::string params_kind = "alternating";
    double params_q = 1.0, params_r = 0.3;
    params_cmd->add_option("-n,--pools", params_n, "Pool count");
    params_cmd->add_option("--kind", params_kind, "homogeneous | alternating")
        ->check(CLI::IsMember({"homogeneous", "alternating"}));
    params_cmd->add_option("-q", params_q, "Level weight");
    params_cmd->add_option("-r", params_r, "Reservoir flow weight");

    // ident
    auto* ident_cmd =
        app.add_subcommand("ident", "Two-stage integer delay fit against the bundled pools");
    std::string ident_out;
    ident_cmd->add_option("--out", ident_out, "CSV of fit error per candidate delay");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Run one scenario and write the trace CSV");
    std::string sim_scenario, sim_out, sim_controller, sim_msglog, sim_pools;
    sim_cmd->add_option("--scenario", sim_scenario, "Scenario JSON file")->required();
    sim_cmd->add_option("--controller", sim_controller,
                        "Override the scenario's controller (structured|lq3|p)")
        ->check(CLI::IsMember({"structured", "lq3", "p"}));
    sim_cmd->add_option("--out", sim_out, "Output CSV path (default: stdout)");
    sim_cmd->add_option("--message-log", sim_msglog,
                        "Per-tick gate message CSV (structured controller only)");
    sim_cmd->add_option("--pool-params", sim_pools,
                        "JSON pool parameter table replacing the bundled plant coefficients");

    // sweep-size
    auto* size_cmd = app.add_subcommand(
        "sweep-size", "Cost vs pool count, off-take next to the reservoir");
    std::vector<int> sizes{3, 5, 10, 15};
    std::string size_out;
    size_cmd->add_option("--sizes", sizes, "Pool counts to sweep");
    size_cmd->add_option("--out", size_out, "Output CSV path (default: stdout)");

    // sweep-location
    auto* loc_cmd =
        app.add_subcommand("sweep-location", "Cost vs off-take location on a fixed string");
    int loc_n = 10;
    std::vector<int> loc_pools;
    std::string loc_out;
    loc_cmd->add_option("-n,--pools", loc_n, "Pool count");
    loc_cmd->add_option("--locations", loc_pools, "Off-take pools (default 1..n-1)");
    loc_cmd->add_option("--out", loc_out, "Output CSV path (default: stdout)");

    // tradeoff
    auto* trade_cmd = app.add_subcommand(
        "tradeoff", "Level/input and level/increment trade-off curves");
    std::vector<double> r_grid{0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
    std::vector<double> rho_grid{0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
    std::string trade_out;
    trade_cmd->add_option("--r-grid", r_grid, "Input-weight grid");
    trade_cmd->add_option("--rho-grid", rho_grid, "Increment-weight grid");
    trade_cmd->add_option("--out", trade_out, "Output CSV path (default: stdout)");

    // gains
    auto* gains_cmd = app.add_subcommand(
        "gains", "Print the centralized controller's value matrix and gains");
    int gains_n = 5;
    std::string gains_kind = "alternating";
    double gains_q = 1.0, gains_r = 0.3, gains_ri = 0.0, gains_rho = 0.0;
    gains_cmd->add_option("-n,--pools", gains_n, "Pool count");
    gains_cmd->add_option("--kind", gains_kind, "homogeneous | alternating")
        ->check(CLI::IsMember({"homogeneous", "alternating"}));
    gains_cmd->add_option("-q", gains_q, "Level weight");
    gains_cmd->add_option("-r", gains_r, "Reservoir flow weight");
    gains_cmd->add_option("--r-internal", gains_ri, "Internal flow weight");
    gains_cmd->add_option("--rho", gains_rho, "Input-increment weight");

    // filter
    auto* filter_cmd =
        app.add_subcommand("filter", "Print the shared low-pass coefficients");
    double filter_cutoff = 3e-3, filter_period = 60.0;
    filter_cmd->add_option("--cutoff", filter_cutoff, "Cutoff, rad/s");
    filter_cmd->add_option("--period", filter_period, "Sample period, s");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*params_cmd) return run_params(params_n, params_kind, params_q, params_r);
        if (*ident_cmd) return run_ident(ident_out);
        if (*sim_cmd) {
            canal::Scenario sc = canal::load_scenario(sim_scenario);
            if (!sim_controller.empty()) {
                sc.controller = canal::controller_from_string(sim_controller);
            }
            if (!sim_msglog.empty()) sc.message_log_path = sim_msglog;
            if (!sim_pools.empty()) sc.pool_table_path = sim_pools;
            const canal::SimTrace trace = canal::run_scenario(sc);
            std::ofstream file;
            canal::write_csv(trace, open_out(file, sim_out));
            const canal::CostBreakdown cost = canal::evaluate_cost(trace);
            std::cerr << "controller " << canal::to_string(sc.controller) << ": cost "
                      << cost.total << " (level " << cost.level << ", input " << cost.input
                      << ", increment " << cost.delta_u << "), signals decayed by sample "
                      << trace.decay_time << "\n";
            return 0;
        }
        if (*size_cmd) {
            std::ofstream file;
            canal::write_sweep_csv(canal::sweep_network_size(sizes), open_out(file, size_out));
            return 0;
        }
        if (*loc_cmd) {
            std::vector<int> pools = loc_pools;
            if (pools.empty()) {
                for (int p = 1; p < loc_n; ++p) pools.push_back(p);
            }
            std::ofstream file;
            canal::write_sweep_csv(canal::sweep_disturbance_location(loc_n, pools),
                                   open_out(file, loc_out));
            return 0;
        }
        if (*trade_cmd) {
            std::ofstream file;
            canal::write_tradeoff_csv(canal::sweep_tradeoff(r_grid, rho_grid),
                                      open_out(file, trade_out));
            return 0;
        }
        if (*gains_cmd) {
            using namespace canal;
            const NetworkKind k = gains_kind == "homogeneous" ? NetworkKind::homogeneous
                                                              : NetworkKind::alternating;
            const NetworkModel net = build_network(gains_n, k, 3);
            std::vector<double> q(static_cast<std::size_t>(gains_n), gains_q);
            std::vector<double> r(static_cast<std::size_t>(gains_n), gains_ri);
            r.back() = gains_r;
            std::vector<double> rho(static_cast<std::size_t>(gains_n), gains_rho);
            const StateSpaceModel model =
                assemble_state_space(net, gains_rho != 0.0, q, r, rho);
            std::cout << to_text(lq_gains(model.A, model.B, model.Q, model.R, model.cross));
            return 0;
        }
        if (*filter_cmd) {
            std::cout << canal::export_filter_coeffs(
                canal::design_butterworth(filter_cutoff, filter_period));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
