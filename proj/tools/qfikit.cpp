#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qfi/analytic.hpp"
#include "qfi/bilinear.hpp"
#include "qfi/engine.hpp"
#include "qfi/json_io.hpp"
#include "qfi/optimizer.hpp"
#include "qfi/oracle.hpp"
#include "qfi/parallel.hpp"
#include "qfi/sweep.hpp"

using nlohmann::json;
using namespace qfi;

namespace {

struct CommonOpts {
    std::string pulse = "rect";
    double T = 1.0;
    double t0 = -1.0;
    double omega = 0.0;
    double alpha_sq = 1.0;
    double gamma = 1.0;
    double delta = 0.0;
    double carrier = 0.0;
    double tol_rel = 1e-9;
    double tol_abs = 1e-12;
    double horizon_factor = 60.0;
    int jobs = 0;
    std::string out;
    std::string pulse_file;
    std::string coeffs_file;
    std::string basis = "harmonic";
    int n_min = 0;
    int n_max = 8;
};

PhysicsParams make_params(const CommonOpts& o) {
    PhysicsParams p;
    p.gamma = o.gamma;
    p.delta = o.delta;
    p.horizon_factor = o.horizon_factor;
    p.rel_tol = o.tol_rel;
    p.abs_tol = o.tol_abs;
    return p;
}

BasisSpec make_basis(const CommonOpts& o) {
    if (o.basis == "harmonic") return BasisSpec::harmonic(o.T, o.n_max);
    if (o.basis == "plane_wave" || o.basis == "planewave")
        return BasisSpec::plane_wave(o.T, o.n_min, o.n_max);
    if (o.basis == "hermite_gaussian" || o.basis == "hg")
        return BasisSpec::hermite_gaussian(o.T, o.t0, o.n_max);
    throw UsageError("unknown basis: " + o.basis);
}

PulseSpec make_pulse(const CommonOpts& o) {
    if (!o.pulse_file.empty()) {
        std::ifstream in(o.pulse_file);
        if (!in) throw UsageError("cannot open pulse file: " + o.pulse_file);
        return pulse_from_json(json::parse(in));
    }
    if (!o.coeffs_file.empty()) {
        std::ifstream in(o.coeffs_file);
        if (!in) throw UsageError("cannot open coeffs file: " + o.coeffs_file);
        json j = json::parse(in);
        std::vector<cplx> coeffs;
        for (const auto& c : j) {
            if (c.is_array())
                coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
            else
                coeffs.emplace_back(c.get<double>(), 0.0);
        }
        return synthesize(make_basis(o), coeffs, o.alpha_sq, o.carrier);
    }
    Family fam = family_from_name(o.pulse);
    switch (fam) {
        case Family::Rectangular: return PulseSpec::rectangular(o.T, o.alpha_sq, o.carrier);
        case Family::Gaussian: return PulseSpec::gaussian(o.T, o.alpha_sq, o.t0, o.carrier);
        case Family::DecreasingExp: return PulseSpec::decreasing_exp(o.T, o.alpha_sq, o.carrier);
        case Family::RisingExp: return PulseSpec::rising_exp(o.T, o.alpha_sq, o.t0, o.carrier);
        case Family::SymmetricExp:
            return PulseSpec::symmetric_exp(o.T, o.alpha_sq, o.t0, o.carrier);
        case Family::Sine: return PulseSpec::sine(o.T, o.omega, o.alpha_sq, o.carrier);
        default: throw UsageError("pulse family needs --coeffs-file: " + o.pulse);
    }
}

void emit(const json& doc, const std::string& out) {
    if (out.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream os(out);
        if (!os) throw Error("cannot open output file: " + out);
        os << doc.dump(2) << "\n";
    }
}

void write_trajectory_csv(const QfiBreakdown& bd, bool complex_case, const std::string& path) {
    if (!bd.trajectory) return;
    std::ofstream os(path);
    if (!os) throw Error("cannot open trajectory file: " + path);
    os.precision(12);
    if (complex_case)
        os << "t,x1,y1,z1,w1,x2,y2,z2,w2,F\n";
    else
        os << "t,x,z,xi,F\n";
    for (const auto& s : *bd.trajectory) {
        os << s.t;
        if (complex_case) {
            for (int i = 0; i < 8; ++i) os << ',' << s.y[i];
            os << ',' << s.y[8] + 4.0 * (2.0 * s.y[7] - s.y[3] * s.y[3]);
        } else {
            os << ',' << s.y[0] << ',' << s.y[1] << ',' << s.y[2] << ',' << s.y[3];
        }
        os << "\n";
    }
}

// Applies config-file values to options the command line left untouched.
// Unknown keys are rejected.
void apply_config(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw UsageError("config file is not a JSON object");
    for (auto& [key, value] : j.items()) {
        CLI::Option* opt = nullptr;
        try {
            opt = cmd->get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw UsageError("config: unknown key \"" + key + "\"");
        }
        if (opt->count() > 0) continue;  // flags override file values
        std::string text =
            value.is_string() ? value.get<std::string>() : value.dump();
        std::stringstream ss(text);
        std::string item;
        std::vector<std::string> items;
        if (value.is_array()) {
            for (const auto& v : value)
                items.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        } else {
            items.push_back(text);
        }
        (void)item;
        (void)ss;
        opt->add_result(items);
        opt->run_callback();
    }
}

void add_common(CLI::App* cmd, CommonOpts& o, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file mirroring the flag names");
    cmd->add_option("--pulse", o.pulse, "pulse family: rect|gaussian|decexp|risexp|symexp|sine");
    cmd->add_option("--T", o.T, "pulse width / basis support");
    cmd->add_option("--t0", o.t0, "pulse shift (default: family convention)");
    cmd->add_option("--omega", o.omega, "sine frequency");
    cmd->add_option("--alpha-sq", o.alpha_sq, "mean photon number");
    cmd->add_option("--gamma", o.gamma, "decay rate (default 1)");
    cmd->add_option("--delta", o.delta, "detuning");
    cmd->add_option("--carrier-detuning", o.carrier, "carrier phase exp(-i d t)");
    cmd->add_option("--tol-rel", o.tol_rel, "solver relative tolerance");
    cmd->add_option("--tol-abs", o.tol_abs, "solver absolute tolerance");
    cmd->add_option("--horizon-factor", o.horizon_factor, "decay tail length in 1/gamma");
    cmd->add_option("--jobs", o.jobs, "worker pool size (0 = all cores)");
    cmd->add_option("--out", o.out, "write the output document here instead of stdout");
    cmd->add_option("--pulse-file", o.pulse_file, "read the pulse from a PulseSpec JSON file");
    cmd->add_option("--coeffs-file", o.coeffs_file, "expansion coefficients JSON array");
    cmd->add_option("--basis", o.basis, "basis kind: harmonic|plane_wave|hermite_gaussian");
    cmd->add_option("--n-min", o.n_min, "lowest plane-wave mode");
    cmd->add_option("--n-max", o.n_max, "highest basis mode");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"QFI of light scattered by a driven two-level atom"};
    app.require_subcommand(1);

    CommonOpts qfi_o, oracle_o, table_o, sweep_o, eig_o, opt_o;
    std::string qfi_cfg, oracle_cfg, table_cfg, sweep_cfg, eig_cfg, opt_cfg;

    auto* cmd_qfi = app.add_subcommand("qfi", "engine QFI of one pulse");
    add_common(cmd_qfi, qfi_o, qfi_cfg);
    std::string traj_path;
    int traj_samples = 400;
    cmd_qfi->add_option("--traj", traj_path, "write a trajectory CSV here");
    cmd_qfi->add_option("--traj-samples", traj_samples, "trajectory sample count");

    auto* cmd_oracle = app.add_subcommand("oracle-check", "engine vs finite-difference oracle");
    add_common(cmd_oracle, oracle_o, oracle_cfg);
    double fd_h = 1e-3;
    cmd_oracle->add_option("--h", fd_h, "finite-difference step (units of gamma)");

    auto* cmd_table = app.add_subcommand("table", "closed-form standard-pulse values (CSV)");
    add_common(cmd_table, table_o, table_cfg);
    std::vector<double> gamma_T_grid;
    std::string table_family = "decexp";
    cmd_table->add_option("--gamma-T", gamma_T_grid, "gamma*T grid points")->expected(-1);
    cmd_table->add_option("--family", table_family, "pulse family");

    auto* cmd_sweep = app.add_subcommand("sweep", "grid over families, photon numbers, widths");
    add_common(cmd_sweep, sweep_o, sweep_cfg);
    std::vector<std::string> sweep_families{"rect", "gaussian", "decexp", "risexp", "symexp"};
    std::vector<double> sweep_alpha{1.0};
    std::vector<double> sweep_widths;
    double width_min = 0.05, width_max = 50.0;
    int width_points = 0;
    std::string store_path;
    cmd_sweep->add_option("--families", sweep_families, "families to sweep")->expected(-1);
    cmd_sweep->add_option("--alpha-sq-grid", sweep_alpha, "photon-number grid")->expected(-1);
    cmd_sweep->add_option("--widths", sweep_widths, "gamma T_sigma grid")->expected(-1);
    cmd_sweep->add_option("--width-min", width_min, "log grid lower edge");
    cmd_sweep->add_option("--width-max", width_max, "log grid upper edge");
    cmd_sweep->add_option("--width-points", width_points, "log grid size (when --widths absent)");
    cmd_sweep->add_option("--store", store_path, "JSON-lines store for crash-safe resume");

    auto* cmd_eig = app.add_subcommand("eig", "bilinear-form eigen-analysis");
    add_common(cmd_eig, eig_o, eig_cfg);
    std::string k_kind = "closed";
    std::string eigvals_path;
    cmd_eig->add_option("--kind", k_kind, "kernel source: closed|numeric");
    cmd_eig->add_option("--eigvals", eigvals_path, "write the full spectrum CSV here");

    auto* cmd_opt = app.add_subcommand("optimize", "multi-seed QFI maximization");
    add_common(cmd_opt, opt_o, opt_cfg);
    int n_seeds = 10;
    std::uint64_t rng_seed = 0;
    int max_iters = 200;
    std::string grad_mode = "fd";
    double fd_step = 1e-5;
    double conv_tol = 1e-9;
    bool complex_coeffs = false;
    std::string populations_path;
    cmd_opt->add_option("--seeds", n_seeds, "number of seeds");
    cmd_opt->add_option("--rng-seed", rng_seed, "random seed");
    cmd_opt->add_option("--max-iters", max_iters, "iteration cap");
    cmd_opt->add_option("--grad-mode", grad_mode, "fd|adjoint");
    cmd_opt->add_option("--fd-step", fd_step, "finite-difference step");
    cmd_opt->add_option("--convergence-tol", conv_tol, "relative objective tolerance");
    cmd_opt->add_flag("--complex", complex_coeffs, "complex coefficients");
    cmd_opt->add_option("--populations", populations_path, "write mode populations CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*cmd_qfi) {
            if (!qfi_cfg.empty()) apply_config(cmd_qfi, qfi_cfg);
            PulseSpec pulse = make_pulse(qfi_o);
            PhysicsParams params = make_params(qfi_o);
            SolveOptions so;
            if (!traj_path.empty()) so.trajectory_samples = traj_samples;
            bool real_case = pulse.is_real() && params.delta == 0.0;
            QfiBreakdown bd =
                real_case ? solve_real(pulse, params, so) : solve_complex(pulse, params, so);
            if (!traj_path.empty()) write_trajectory_csv(bd, !real_case, traj_path);
            json doc = breakdown_to_json(bd, params.gamma);
            doc["pulse"] = pulse_to_json(pulse);
            doc["gamma"] = params.gamma;
            emit(doc, qfi_o.out);
        } else if (*cmd_oracle) {
            if (!oracle_cfg.empty()) apply_config(cmd_oracle, oracle_cfg);
            PulseSpec pulse = make_pulse(oracle_o);
            PhysicsParams params = make_params(oracle_o);
            bool real_case = pulse.is_real() && params.delta == 0.0;
            QfiBreakdown bd = real_case ? solve_real(pulse, params) : solve_complex(pulse, params);
            OracleOptions oo;
            oo.jobs = oracle_o.jobs;
            FdEstimate est = qfi_fd_global(pulse, params, fd_h * params.gamma, oo);
            json doc{{"engine", breakdown_to_json(bd, params.gamma)},
                     {"oracle", fd_estimate_to_json(est)},
                     {"discrepancy", std::abs(bd.total - est.qfi)},
                     {"discrepancy_rel",
                      std::abs(bd.total - est.qfi) / std::max(std::abs(bd.total), 1e-300)}};
            doc["pulse"] = pulse_to_json(pulse);
            emit(doc, oracle_o.out);
        } else if (*cmd_table) {
            if (!table_cfg.empty()) apply_config(cmd_table, table_cfg);
            if (gamma_T_grid.empty()) gamma_T_grid = {1.0};
            Family fam = family_from_name(table_family);
            std::ostringstream csv;
            csv.precision(12);
            csv << "family,gamma_T,qfi_long_per_photon,qfi_short_per_photon\n";
            for (double u : gamma_T_grid)
                csv << family_name(fam) << ',' << u << ',' << qfi_long_table(fam, u) << ','
                    << qfi_short_table(fam, u, table_o.alpha_sq) << "\n";
            if (table_o.out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream os(table_o.out);
                os << csv.str();
            }
        } else if (*cmd_sweep) {
            if (!sweep_cfg.empty()) apply_config(cmd_sweep, sweep_cfg);
            SweepPlan plan;
            for (const auto& f : sweep_families) plan.families.push_back(family_from_name(f));
            plan.alpha_sq_grid = sweep_alpha;
            if (!sweep_widths.empty()) {
                plan.width_grid = sweep_widths;
            } else {
                int n = width_points > 0 ? width_points : 16;
                for (int i = 0; i < n; ++i)
                    plan.width_grid.push_back(width_min *
                                              std::pow(width_max / width_min, i / (n - 1.0)));
            }
            plan.params = make_params(sweep_o);
            auto rows = run_sweep(plan, store_path, sweep_o.jobs);
            std::ostringstream csv;
            write_csv(rows, csv);
            if (sweep_o.out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream os(sweep_o.out);
                os << csv.str();
            }
        } else if (*cmd_eig) {
            if (!eig_cfg.empty()) apply_config(cmd_eig, eig_cfg);
            PhysicsParams params = make_params(eig_o);
            BasisSpec basis = make_basis(eig_o);
            double r = params.gamma * basis.T / 3.14159265358979323846;
            Eigen::MatrixXcd K;
            if (k_kind == "numeric") {
                K = k_numeric(basis, params, eig_o.jobs).entries;
            } else if (basis.kind == BasisKind::Harmonic) {
                auto triple = k_harmonic_closed(r, basis.n_max);
                Eigen::MatrixXd sum =
                    symmetric_part(triple.k1) + triple.k2 + triple.k3_sym;
                K = sum.cast<cplx>();
            } else if (basis.kind == BasisKind::PlaneWave) {
                auto triple = k_planewave_closed(r, basis.n_min, basis.n_max,
                                                 params.delta / params.gamma);
                K = triple.k1 + triple.k2 + triple.k3;
            } else {
                throw UsageError("eig: closed form needs harmonic or plane_wave basis");
            }
            std::vector<double> hint(basis.mode_count());
            for (int i = 0; i < basis.mode_count(); ++i)
                hint[i] = basis.omega(basis.mode_index(i));
            EigenResult res = max_eig(hermitian_part(K), hint);
            if (!eigvals_path.empty()) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(K),
                                                                   Eigen::EigenvaluesOnly);
                std::ofstream os(eigvals_path);
                os.precision(12);
                os << "index,lambda\n";
                for (int i = 0; i < es.eigenvalues().size(); ++i)
                    os << i << ',' << es.eigenvalues()(i) << "\n";
            }
            std::vector<cplx> coeffs(res.vector.data(), res.vector.data() + res.vector.size());
            PulseSpec pulse = synthesize(basis, coeffs, eig_o.alpha_sq);
            json doc{{"lambda_max", res.lambda_max},
                     {"r", r},
                     {"populations", res.mode_populations},
                     {"pulse", pulse_to_json(pulse)}};
            emit(doc, eig_o.out);
        } else if (*cmd_opt) {
            if (!opt_cfg.empty()) apply_config(cmd_opt, opt_cfg);
            OptConfig cfg;
            cfg.basis = make_basis(opt_o);
            cfg.alpha_sq = opt_o.alpha_sq;
            cfg.params = make_params(opt_o);
            cfg.n_seeds = n_seeds;
            cfg.rng_seed = rng_seed;
            cfg.max_iters = max_iters;
            cfg.grad_mode = grad_mode == "adjoint" ? GradMode::Adjoint : GradMode::FiniteDifference;
            cfg.fd_step = fd_step;
            cfg.convergence_tol = conv_tol;
            cfg.complex_coeffs = complex_coeffs;
            cfg.jobs = opt_o.jobs;
            OptResult res = optimize(cfg);
            if (!populations_path.empty()) {
                std::ofstream os(populations_path);
                os.precision(12);
                os << "n,omega_n,population\n";
                for (int i = 0; i < cfg.basis.mode_count(); ++i) {
                    int n = cfg.basis.mode_index(i);
                    os << n << ',' << cfg.basis.omega(n) << ',' << res.populations[i] << "\n";
                }
            }
            json doc = opt_result_to_json(res);
            doc["pulse"] = pulse_to_json(synthesize(cfg.basis, res.best_coeffs, cfg.alpha_sq));
            emit(doc, opt_o.out);
        }
    } catch (const UsageError& e) {
        std::cerr << json{{"error", {{"type", "usage"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"type", "computation"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 1;
    }
    return 0;
}
