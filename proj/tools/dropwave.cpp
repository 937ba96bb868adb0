#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "drop/dno.hpp"
#include "drop/dynamics.hpp"
#include "drop/geometry.hpp"
#include "drop/hamiltonian.hpp"
#include "drop/io.hpp"
#include "drop/shapederiv.hpp"
#include "drop/spectrum.hpp"
#include "drop/travelling.hpp"

namespace {

using namespace drop;

// Field grammar: zero | const:VALUE | ylm:L,M[,AMP] | file:PATH
SphCoeffs parse_field(const std::string& spec, int lmax) {
    SphCoeffs c(lmax);
    if (spec == "zero") return c;
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "const") {
        double v = std::stod(rest);
        c.at(0, 0) = v * std::sqrt(4.0 * M_PI);
        return c;
    }
    if (kind == "ylm") {
        int l = 0, m = 0;
        double amp = 1.0;
        auto c1 = rest.find(',');
        if (c1 == std::string::npos) throw std::invalid_argument("ylm spec needs L,M");
        l = std::stoi(rest.substr(0, c1));
        auto c2 = rest.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            m = std::stoi(rest.substr(c1 + 1));
        } else {
            m = std::stoi(rest.substr(c1 + 1, c2 - c1 - 1));
            amp = std::stod(rest.substr(c2 + 1));
        }
        if (l < 0 || l > lmax || std::abs(m) > l)
            throw std::invalid_argument("ylm spec outside the coefficient triangle");
        c.at(l, m) = amp;
        return c;
    }
    if (kind == "file") {
        return read_coeffs(rest).truncated(lmax);
    }
    throw std::invalid_argument("unknown field spec: " + spec);
}

void print_kv(const std::string& key, double v) {
    std::cout << key << " = " << format_g17(v) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral solver for the capillary liquid-drop water-wave system on the sphere"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help and exit");

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flag names with underscores)");
    int threads = 0;
    app.add_option("--threads", threads, "cap internal parallelism (this build runs serially)");
    long long seed = 0;
    app.add_option("--seed", seed, "seed for randomized checks");

    // resonances
    auto* cmd_res = app.add_subcommand("resonances", "Diophantine resonance set for (l0, m0)");
    cmd_res->set_help_flag("--help");
    int r_l0 = 0, r_m0 = 0;
    std::string r_json;
    cmd_res->add_option("--l0", r_l0, "mode degree l0")->required();
    cmd_res->add_option("--m0", r_m0, "mode order m0")->required();
    cmd_res->add_option("--json", r_json, "write the report as JSON");

    // dispersion
    auto* cmd_disp = app.add_subcommand("dispersion", "table of det L_{l,m}");
    cmd_disp->set_help_flag("--help");
    double d_sigma = 1.0, d_omega = 0.0;
    int d_lmax = 8;
    std::string d_csv;
    cmd_disp->add_option("--sigma", d_sigma, "capillarity sigma0");
    cmd_disp->add_option("--lmax", d_lmax, "max degree");
    cmd_disp->add_option("--omega", d_omega, "angular velocity")->required();
    cmd_disp->add_option("--csv", d_csv, "write CSV (columns l,m,det)");

    // dno-check
    auto* cmd_dno = app.add_subcommand("dno-check", "Dirichlet-Neumann sanity checks");
    cmd_dno->set_help_flag("--help");
    int n_lmax = 16;
    std::string n_h = "zero", n_psi = "ylm:3,2";
    double n_tol = 1e-10;
    cmd_dno->add_option("--lmax", n_lmax, "truncation degree");
    cmd_dno->add_option("--h", n_h, "elevation field spec");
    cmd_dno->add_option("--psi", n_psi, "Dirichlet datum spec");
    cmd_dno->add_option("--dno-tol", n_tol, "fixed point tolerance");

    // deriv-check
    auto* cmd_der = app.add_subcommand("deriv-check", "shape derivative vs finite differences");
    cmd_der->set_help_flag("--help");
    int e_lmax = 12;
    double e_eps = 1e-3;
    std::string e_h = "zero", e_eta = "ylm:2,0", e_psi = "ylm:2,0";
    cmd_der->add_option("--eps", e_eps, "FD step")->required();
    cmd_der->add_option("--lmax", e_lmax, "truncation degree");
    cmd_der->add_option("--h", e_h, "base elevation spec");
    cmd_der->add_option("--eta", e_eta, "direction spec");
    cmd_der->add_option("--psi", e_psi, "Dirichlet datum spec");

    // energy
    auto* cmd_en = app.add_subcommand("energy", "energy breakdown of a state file");
    cmd_en->set_help_flag("--help");
    std::string en_state;
    cmd_en->add_option("--state", en_state, "state JSON path")->required();

    // evolve
    auto* cmd_ev = app.add_subcommand("evolve", "explicit RK4 evolution with diagnostics");
    cmd_ev->set_help_flag("--help");
    std::string ev_init, ev_out = "trajectory.csv";
    double ev_dt = 1e-3, ev_T = 1.0;
    int ev_every = 10, ev_ckpt = 0, ev_lmax = 0;
    bool ev_filter = false;
    double ev_tol = 1e-10;
    cmd_ev->add_option("--init", ev_init, "initial state JSON")->required();
    cmd_ev->add_option("--dt", ev_dt, "time step")->required();
    cmd_ev->add_option("--t-final", ev_T, "final time")->required();
    cmd_ev->add_option("--out", ev_out, "trajectory CSV path");
    cmd_ev->add_option("--record-every", ev_every, "record cadence in steps");
    cmd_ev->add_option("--checkpoint-every", ev_ckpt, "write state JSON every N records");
    cmd_ev->add_option("--lmax", ev_lmax, "truncation (default: state lmax)");
    cmd_ev->add_flag("--filter", ev_filter, "exponential filter on the top third of modes");
    cmd_ev->add_option("--dno-tol", ev_tol, "fixed point tolerance");

    // branch
    auto* cmd_br = app.add_subcommand("branch", "traveling-wave branch continuation");
    cmd_br->set_help_flag("--help");
    int b_l0 = 2, b_m0 = 2, b_steps = 20, b_lmax = 0;
    double b_sigma = 1.0, b_amax = 0.05, b_tol = 1e-9;
    std::string b_out = "branch.json";
    cmd_br->add_option("--l0", b_l0, "mode degree l0")->required();
    cmd_br->add_option("--m0", b_m0, "mode order m0")->required();
    cmd_br->add_option("--sigma", b_sigma, "capillarity sigma0");
    cmd_br->add_option("--a-max", b_amax, "final amplitude");
    cmd_br->add_option("--steps", b_steps, "number of amplitude steps");
    cmd_br->add_option("--out", b_out, "branch JSON path");
    cmd_br->add_option("--tol", b_tol, "Newton residual tolerance");
    cmd_br->add_option("--lmax", b_lmax, "truncation (default: max(16, 4 l0))");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << std::endl;
        return 2;
    }

    nlohmann::json cfg;
    try {
        if (!config_path.empty()) cfg = nlohmann::json::parse(read_text(config_path));
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    }
    // Config supplies defaults; explicit flags win.
    auto merge = [&cfg](const CLI::App* sub, const std::string& flag, const std::string& key,
                        auto& var) {
        if (sub->count(flag) == 0 && cfg.contains(key))
            var = cfg.at(key).get<std::decay_t<decltype(var)>>();
    };
    merge(cmd_disp, "--sigma", "sigma", d_sigma);
    merge(cmd_disp, "--lmax", "lmax", d_lmax);
    merge(cmd_dno, "--lmax", "lmax", n_lmax);
    merge(cmd_dno, "--dno-tol", "dno_tol", n_tol);
    merge(cmd_der, "--lmax", "lmax", e_lmax);
    merge(cmd_ev, "--lmax", "lmax", ev_lmax);
    merge(cmd_ev, "--record-every", "record_every", ev_every);
    merge(cmd_ev, "--dno-tol", "dno_tol", ev_tol);
    merge(cmd_br, "--sigma", "sigma", b_sigma);
    merge(cmd_br, "--a-max", "a_max", b_amax);
    merge(cmd_br, "--steps", "steps", b_steps);
    merge(cmd_br, "--tol", "tol", b_tol);
    merge(cmd_br, "--lmax", "lmax", b_lmax);

    try {
        if (*cmd_res) {
            ResonanceReport rep = resonance_set(r_l0, r_m0);
            std::cout << "l0 = " << rep.l0 << ", m0 = " << rep.m0 << "\n";
            std::cout << "c0 = " << rep.c0_num << "/" << rep.c0_den << "\n";
            std::cout << "omega_star(sigma0=1) = " << format_g17(rep.omega_star) << "\n";
            std::cout << "S =";
            for (auto [l, m] : rep.S) std::cout << " (" << l << "," << m << ")";
            std::cout << "\nS_res =";
            for (auto [l, m] : rep.S_res) std::cout << " (" << l << "," << m << ")";
            std::cout << "\nsimple = " << (rep.simple ? "true" : "false") << "\n";
            if (!r_json.empty()) write_text(r_json, resonance_to_json(rep) + "\n");
            return 0;
        }
        if (*cmd_disp) {
            std::ostringstream csv;
            csv << "l,m,det\n";
            for (int l = 0; l <= d_lmax; ++l)
                for (int m = 0; m <= l; ++m)
                    csv << l << ',' << m << ','
                        << format_g17(dispersion_det(l, m, d_omega, d_sigma)) << '\n';
            if (!d_csv.empty())
                write_text(d_csv, csv.str());
            else
                std::cout << csv.str();
            return 0;
        }
        if (*cmd_dno) {
            BasisTable tab = build_basis(n_lmax, 1.5);
            DnoSolver solver(tab);
            DnoOptions opts;
            opts.tol = n_tol;
            SphCoeffs h = parse_field(n_h, n_lmax);
            SphCoeffs psi = parse_field(n_psi, n_lmax);
            DnoResult res = solver.dirichlet_neumann(h, psi, opts);
            print_kv("iterations", res.iterations);
            print_kv("final_increment", res.final_increment);
            print_kv("observed_contraction", res.contraction);
            // analytic eigenvalue check for zero / constant h
            bool is_const = true;
            for (int l = 1; l <= n_lmax && is_const; ++l)
                for (int m = -l; m <= l; ++m)
                    if (h.at(l, m) != 0.0) {
                        is_const = false;
                        break;
                    }
            if (is_const) {
                double c = h.at(0, 0) / std::sqrt(4.0 * M_PI);
                double err = 0.0;
                for (int l = 0; l <= n_lmax; ++l)
                    for (int m = -l; m <= l; ++m) {
                        double expect = l / (1.0 + c) * psi.at(l, m);
                        err = std::max(err, std::abs(res.Gpsi.at(l, m) - expect));
                    }
                print_kv("max_eigenvalue_error", err);
            }
            SphCoeffs gP = solver.extract_via_P(h, psi, opts);
            print_kv("extraction_agreement", sobolev_norm(res.Gpsi - gP, 0.0));
            return 0;
        }
        if (*cmd_der) {
            BasisTable tab = build_basis(e_lmax, 1.5);
            DnoSolver solver(tab);
            SphCoeffs h = parse_field(e_h, e_lmax);
            SphCoeffs eta = parse_field(e_eta, e_lmax);
            SphCoeffs psi = parse_field(e_psi, e_lmax);
            double d1 = fd_defect(solver, h, eta, psi, e_eps);
            double d2 = fd_defect(solver, h, eta, psi, e_eps / 2.0);
            print_kv("fd_defect(eps)", d1);
            print_kv("fd_defect(eps/2)", d2);
            print_kv("ratio", d1 / std::max(d2, 1e-300));
            return 0;
        }
        if (*cmd_en) {
            SurfaceState s = read_state(en_state);
            int lmax = std::max(s.h.lmax(), s.psi.lmax());
            s.h = s.h.truncated(lmax);
            s.psi = s.psi.truncated(lmax);
            BasisTable tab = build_basis(lmax, 1.5);
            DnoSolver solver(tab);
            EnergyBreakdown e = energy(solver, s);
            print_kv("kinetic", e.kinetic);
            print_kv("potential", e.potential);
            print_kv("sigma0", e.sigma0);
            print_kv("total", e.total);
            return 0;
        }
        if (*cmd_ev) {
            SurfaceState s = read_state(ev_init);
            int lmax = ev_lmax > 0 ? ev_lmax : std::max(s.h.lmax(), s.psi.lmax());
            s.h = s.h.truncated(lmax);
            s.psi = s.psi.truncated(lmax);
            BasisTable tab = build_basis(lmax, 1.5);
            DnoSolver solver(tab);
            EvolveOptions opts;
            opts.filter = ev_filter;
            opts.dno.tol = ev_tol;
            Trajectory traj = evolve(solver, s, ev_T, ev_dt, ev_every, opts);
            write_trajectory(ev_out, traj);
            if (ev_ckpt > 0) {
                std::string stem = ev_out;
                auto dotpos = stem.rfind('.');
                if (dotpos != std::string::npos) stem = stem.substr(0, dotpos);
                for (size_t i = 0; i < traj.states.size(); i += ev_ckpt) {
                    char suffix[48];
                    std::snprintf(suffix, sizeof(suffix), "_checkpoint_%06zu.json", i);
                    write_state(stem + suffix, traj.states[i]);
                }
            }
            if (traj.aborted) {
                std::cerr << "evolve aborted: " << traj.abort_reason << std::endl;
                return 4;
            }
            std::cout << "recorded " << traj.times.size() << " samples to " << ev_out << "\n";
            return 0;
        }
        if (*cmd_br) {
            int lmax = b_lmax > 0 ? b_lmax : std::max(16, 4 * b_l0);
            BasisTable tab = build_basis(lmax, 1.5);
            DnoSolver solver(tab);
            Branch br;
            try {
                br = continue_branch(solver, b_l0, b_m0, b_sigma, b_amax, b_steps, b_tol);
            } catch (const continuation_failure& e) {
                write_text(b_out, branch_to_json(e.partial) + "\n");
                std::cerr << "continuation failed: " << e.what() << " (partial branch written)"
                          << std::endl;
                return 3;
            }
            write_text(b_out, branch_to_json(br) + "\n");
            const BranchPoint& last = br.points.back();
            print_kv("omega_final", last.omega);
            print_kv("a_final", last.a);
            print_kv("lambda_final", last.lambda);
            print_kv("max_residual", [&] {
                double r = 0.0;
                for (const auto& p : br.points) r = std::max(r, p.residual);
                return r;
            }());
            return 0;
        }
    } catch (const not_simple& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 5;
    } catch (const range_violation& e) {
        std::cerr << "error: " << e.what() << " (defect " << format_g17(e.defect) << ")"
                  << std::endl;
        return 5;
    } catch (const domain_degenerate& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 4;
    } catch (const convergence_failure& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
