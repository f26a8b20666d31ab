/// @file main.cpp
/// @brief Command-line driver: run / sweep / fp-oracle / verify.
///
/// Exit codes: 0 success, 1 verify-suite failure, 2 config/validation
/// error, 3 solver failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "corofsi/coupled.hpp"
#include "corofsi/diagnostics.hpp"
#include "corofsi/fp_oracle.hpp"
#include "corofsi/io.hpp"

namespace fs = std::filesystem;
using namespace corofsi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<SnapshotField> snapshot_fields(const Snapshot& s, const Grid2& g) {
    std::vector<SnapshotField> out;
    out.push_back({"u", s.u.nux(), g.ny, "uface", s.u.u});
    out.push_back({"v", g.nx, g.ny + 1, "vface", s.u.v});
    out.push_back({"p", g.nx, g.ny, "cell", s.p.v});
    out.push_back({"rho", g.nx, g.ny, "cell", s.rho.v});
    out.push_back({"t11", g.nx, g.ny, "cell", s.T.t11});
    out.push_back({"t12", g.nx, g.ny, "cell", s.T.t12});
    out.push_back({"t22", g.nx, g.ny, "cell", s.T.t22});
    out.push_back({"eta", s.structure.size(), 1, "node1d", s.structure.eta});
    out.push_back({"eta_dot", s.structure.size(), 1, "node1d", s.structure.eta_dot});
    return out;
}

void write_run_output(const RunOutput& out, const std::string& dir,
                      bool with_snapshots, bool quiet) {
    write_timeseries(dir + "/timeseries.csv", out.columns, out.rows);
    write_text(dir + "/config_echo.txt", render_config(out.cfg));
    if (with_snapshots) {
        for (std::size_t k = 0; k < out.snapshots.size(); ++k) {
            char name[64];
            std::snprintf(name, sizeof name, "/snapshots/snap_%06zu.bin", k);
            write_snapshot(dir + name, snapshot_fields(out.snapshots[k], out.grid),
                           out.snapshots[k].time);
        }
    } else if (!out.snapshots.empty()) {
        write_snapshot(dir + "/final_state.bin",
                       snapshot_fields(out.snapshots.back(), out.grid),
                       out.snapshots.back().time);
    }
    if (out.truncated) {
        write_text(dir + "/TRUNCATED.txt", out.error + "\n");
        if (!quiet) std::cerr << "run truncated: " << out.error << "\n";
    }
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::uint64_t seed, bool have_seed, bool quiet) {
    SimConfig cfg = parse_run_config(slurp(config_path));
    if (have_seed) cfg.seed = seed;
    if (!quiet) std::cout << "running to T = " << cfg.T_final << "\n";
    const RunOutput out = run(cfg);
    write_run_output(out, out_dir, true, quiet);
    if (out.truncated) return 3;
    if (!quiet) std::cout << "wrote " << out_dir << "/timeseries.csv\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              std::uint64_t seed, bool have_seed, bool quiet) {
    SweepConfig cfg = parse_sweep_config(slurp(config_path));
    if (have_seed) cfg.base.seed = seed;
    const SweepOutput sw = sweep(cfg);

    write_run_output(sw.zero_run, out_dir + "/eps_0", false, quiet);

    std::vector<std::string> rate_cols{"eps[nd]", "D[nd]"};
    std::vector<std::vector<double>> rate_rows;
    std::vector<double> eps_ok, D_ok;
    bool any_failed = false;

    for (std::size_t k = 0; k < sw.runs.size(); ++k) {
        char sub[64];
        std::snprintf(sub, sizeof sub, "/eps_%.3e", sw.eps_values[k]);
        if (!sw.run_errors[k].empty()) {
            write_text(out_dir + sub + "/FAILED.txt", sw.run_errors[k] + "\n");
            any_failed = true;
            continue;
        }
        write_run_output(sw.runs[k], out_dir + sub, false, quiet);

        const RelEnergySeries series =
            relative_energy(sw.runs[k], sw.zero_run, cfg.base.gamma);
        std::vector<std::string> cols{
            "time[nd]",         "structure_vel[nd]", "structure_bend[nd]",
            "velocity[nd]",     "rho[nd]",           "stress[nd]",
            "grad_velocity[nd]", "gamma_rate[nd]"};
        std::vector<std::vector<double>> rows;
        for (const auto& p : series.pts) {
            rows.push_back({p.time, p.structure_vel, p.structure_bend, p.velocity,
                            p.rho, p.stress, p.grad_velocity, p.gamma_rate});
        }
        write_timeseries(out_dir + sub + "/relative_energy.csv", cols, rows);
        rate_rows.push_back({sw.eps_values[k], series.D});
        eps_ok.push_back(sw.eps_values[k]);
        D_ok.push_back(series.D);
        if (!quiet)
            std::cout << "eps = " << sw.eps_values[k] << "  D = " << series.D
                      << "\n";
    }
    write_timeseries(out_dir + "/rate.csv", rate_cols, rate_rows);

    if (eps_ok.size() >= 3) {
        // fit over the three smallest eps (eps_list is strictly decreasing)
        std::vector<double> e3(eps_ok.end() - 3, eps_ok.end());
        std::vector<double> d3(D_ok.end() - 3, D_ok.end());
        double slope, r2;
        fit_rate(e3, d3, slope, r2);
        std::vector<std::vector<double>> fit_rows{{slope, r2}};
        write_timeseries(out_dir + "/fit.csv", {"slope[nd]", "r2[nd]"}, fit_rows);
        if (!quiet) std::cout << "rate slope = " << slope << ", r2 = " << r2 << "\n";
    }
    return any_failed ? 3 : 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out_dir,
               bool quiet) {
    OracleConfig cfg = parse_oracle_config(slurp(config_path));
    const QGrid qg(cfg.nq, cfg.q_max);
    const Mat2 W{0.0, cfg.theta, -cfg.theta, 0.0};

    const double residual =
        closure_residual(W, cfg.rho0, cfg.T0(), cfg.t_end, cfg.dt, qg);
    const double lambda =
        relaxation_rate(qg, cfg.rho0, cfg.T0(), cfg.t_end, cfg.dt);

    write_text(out_dir + "/config_echo.txt", render_config(cfg));
    std::vector<std::vector<double>> rows{{residual, lambda}};
    write_timeseries(out_dir + "/oracle_report.csv",
                     {"closure_residual[rel]", "relaxation_rate[1/t]"}, rows);
    if (!quiet)
        std::cout << "closure residual = " << residual
                  << ", relaxation rate = " << lambda << "\n";
    return 0;
}

bool check(bool ok, const char* name, int& failures) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
    return ok;
}

int cmd_verify(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    int failures = 0;

    // corotational identity suite
    {
        bool ok = true;
        for (int trial = 0; trial < 10000 && ok; ++trial) {
            const Mat2 gw{unif(rng), unif(rng), unif(rng), unif(rng)};
            const Mat2 Z{unif(rng), unif(rng), unif(rng), unif(rng)};
            const int n = 1 + trial % 4;
            for (ContractionTarget tgt :
                 {ContractionTarget::Z, ContractionTarget::ZTranspose}) {
                for (ColonConvention conv :
                     {ColonConvention::ByTrace, ColonConvention::Elementwise}) {
                    const double val = corotational_contraction(gw, Z, n, tgt, conv);
                    const double scale = vorticity(gw).frobenius() *
                                         std::pow(Z.frobenius(), n + 1);
                    if (std::abs(val) > 1e-12 * scale) ok = false;
                }
            }
        }
        check(ok, "corotational contraction identity (10^4 random cases)", failures);
    }

    // geometry round-trip suite
    {
        bool ok = true;
        for (InstanceKind kind : {InstanceKind::PeriodicChannel, InstanceKind::Disk}) {
            const ReferenceGeometry geom{kind, 0.25};
            const CutoffProfile cutoff = CutoffProfile::standard(geom.L);
            StructureState s(64);
            for (int rep = 0; rep < 20 && ok; ++rep) {
                for (int k = 0; k < 64; ++k) s.eta[k] = 0.15 * unif(rng);
                s.project_mean_zero();
                const HanzawaMap map(geom, cutoff, s);
                for (int p = 0; p < 500; ++p) {
                    Vec2 x;
                    if (kind == InstanceKind::PeriodicChannel) {
                        x = {0.5 * (unif(rng) + 1.0), 0.5 * (unif(rng) + 1.0)};
                    } else {
                        const double r = 0.999 * std::sqrt(0.5 * (unif(rng) + 1.0));
                        const double th = 3.14159265358979 * unif(rng);
                        x = {r * std::cos(th), r * std::sin(th)};
                    }
                    const Vec2 z = map.forward(x);
                    const Vec2 back = map.inverse(z);
                    if ((back - x).norm() > 1e-10) ok = false;
                }
            }
        }
        check(ok, "Hanzawa round-trip (sampled x, random eta)", failures);
    }

    // reaction semigroup suite
    {
        bool ok = true;
        for (int trial = 0; trial < 200 && ok; ++trial) {
            const double a = 1.0 + 0.5 * unif(rng);
            const double c = 1.0 + 0.5 * unif(rng);
            const double b = 0.4 * unif(rng) * std::sqrt(a * c);
            const SymMat2 T0{a, b, c};
            const double rho = 0.5 * (unif(rng) + 1.5);
            const double th = unif(rng);
            const Mat2 W{0.0, th, -th, 0.0};
            const double dt1 = 0.05 * (unif(rng) + 1.5);
            const double dt2 = 0.05 * (unif(rng) + 1.5);
            const SymMat2 two = reaction_exact(reaction_exact(T0, rho, W, dt1),
                                               rho, W, dt2);
            const SymMat2 one = reaction_exact(T0, rho, W, dt1 + dt2);
            if ((two - one).frobenius() > 1e-12 * (one.frobenius() + 1.0)) ok = false;
            if (!two.spd()) ok = false;
        }
        check(ok, "reaction_exact semigroup and SPD preservation", failures);
    }

    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"corotational polymeric fluid-structure simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::uint64_t seed = 12345;
    bool quiet = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("config", config_path, "config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--quiet", quiet, "suppress progress output");
        return sub->add_option("--seed", seed, "override the RNG seed");
    };

    auto* c_run = app.add_subcommand("run", "run one simulation");
    auto* run_seed = add_common(c_run, true);
    auto* c_sweep = app.add_subcommand("sweep", "run an eps sweep");
    auto* sweep_seed = add_common(c_sweep, true);
    auto* c_oracle = app.add_subcommand("fp-oracle", "mesoscopic closure check");
    add_common(c_oracle, true);
    auto* c_verify = app.add_subcommand("verify", "built-in invariant suites");
    add_common(c_verify, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed())
            return cmd_run(config_path, out_dir, seed, !run_seed->empty(), quiet);
        if (c_sweep->parsed())
            return cmd_sweep(config_path, out_dir, seed, !sweep_seed->empty(), quiet);
        if (c_oracle->parsed()) return cmd_oracle(config_path, out_dir, quiet);
        if (c_verify->parsed()) return cmd_verify(seed);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const SimError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
