// bohmflow command-line runner: scenario-driven simulation, equilibrium
// sampling, equivariance and frame-independence statistics, limit scans, and
// an invariant verification battery.  All data outputs are CSV/JSON with
// deterministic content for fixed seeds.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bohmflow/bohmflow.hpp"

using namespace bohmflow;

namespace {

struct GlobalOptions {
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigurationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Scenario load_scenario(const std::string& path, const GlobalOptions& g, std::string& raw) {
    raw = read_file(path);
    json j = json::parse(raw);
    for (const auto& o : g.overrides) apply_override(j, o);
    Scenario s = Scenario::from_json(j);
    if (g.seed && s.sampler) s.sampler->seed = *g.seed;
    return s;
}

std::string join_path(const std::string& dir, const std::string& file) {
    if (dir.empty() || dir == ".") return file;
    return dir + "/" + file;
}

void write_manifest(const Scenario& s, const std::string& raw, const GlobalOptions& g,
                    double wall_seconds, const std::vector<std::string>& files) {
    json m;
    m["scenario"] = s.name;
    m["scenario_hash"] = hash_hex(fnv1a_hash(raw));
    m["seed"] = s.sampler ? json(s.sampler->seed) : json(nullptr);
    m["version"] = library_version;
    m["wall_time_s"] = wall_seconds;
    m["outputs"] = files;
    atomic_write(join_path(g.out_dir, s.name + "_manifest.json"), m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& path, const GlobalOptions& g) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string raw;
    const Scenario s = load_scenario(path, g, raw);
    if (s.initial.empty())
        throw ConfigurationError("simulate: scenario '" + s.name + "' has no initial block");
    const IntegratorConfig cfg = s.integrator_config();
    const std::string traj_path = join_path(g.out_dir, s.outputs.trajectory);

    int exit_code = 0;
    if (s.wavefunction.kind == "relativistic") {
        const auto psi = s.build_wavefunction();
        const auto field = s.build_field();
        TrajectoryRecord rec;
        try {
            rec = integrate(psi, field, s.initial, cfg);
        } catch (const NodeProximityError& e) {
            std::cerr << "simulate: " << e.what() << "\n";
            return 1;
        }
        atomic_write(traj_path, trajectory_csv(rec, s.spatial_dim, s.constants));
        if (!rec.completed) {
            std::cerr << "simulate: halted early: " << rec.halt_reason << "\n";
            exit_code = 1;
        }
        std::cout << "wrote " << traj_path << " (" << rec.points.size() << " steps x "
                  << s.particles.size() << " particles)\n";
    } else {
        const auto psi = s.build_nr_wavefunction();
        const ConditionalWaveFunction phi(psi, s.offsets);
        SpatialConfiguration start;
        for (const auto& v : s.initial) {
            SpatialVector sv(s.spatial_dim);
            for (int q = 0; q < s.spatial_dim; ++q) sv[q] = v.spatial(q);
            start.push_back(sv);
        }
        const auto rec = nr_integrate(phi, start, cfg);
        atomic_write(traj_path, nr_trajectory_csv(rec, s.spatial_dim));
        if (!rec.completed) {
            std::cerr << "simulate: halted early: " << rec.halt_reason << "\n";
            exit_code = 1;
        }
        std::cout << "wrote " << traj_path << "\n";
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(s, raw, g, wall, {s.outputs.trajectory});
    return exit_code;
}

int cmd_sample(const std::string& path, const GlobalOptions& g) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string raw;
    const Scenario s = load_scenario(path, g, raw);
    if (!s.sampler) throw ConfigurationError("sample: scenario has no sampler block");
    const auto psi = s.build_wavefunction();
    const auto ens = sample_equilibrium(psi, s.sampler->box, s.sampler->n, s.sampler->seed,
                                        s.sampler->method, s.sampler->metropolis);
    const std::string csv_path = join_path(g.out_dir, s.name + "_ensemble.csv");
    atomic_write(csv_path, ensemble_csv(ens, s.particles.size(), s.spatial_dim, s.constants));
    json rep;
    rep["test"] = "sample";
    rep["n"] = ens.samples.size();
    rep["seed"] = ens.seed;
    rep["method"] = ens.method == SampleMethod::rejection ? "rejection" : "metropolis";
    rep["passed"] = true;
    atomic_write(join_path(g.out_dir, s.outputs.report), rep.dump(2) + "\n");
    std::cout << "wrote " << csv_path << " (" << ens.samples.size() << " samples)\n";
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(s, raw, g, wall, {s.name + "_ensemble.csv", s.outputs.report});
    return 0;
}

int cmd_equivariance(const std::string& path, const GlobalOptions& g, double corrupt_factor) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string raw;
    const Scenario s = load_scenario(path, g, raw);
    if (!s.sampler) throw ConfigurationError("equivariance: scenario has no sampler block");
    const auto psi = s.build_wavefunction();
    const auto field = s.build_field();
    IntegratorConfig cfg = s.integrator ? s.integrator_config() : IntegratorConfig{};
    EquivarianceOptions opt;
    opt.spatial_velocity_factor = corrupt_factor;
    opt.throw_on_edge_loss = false;  // reported and reflected in the exit code
    const auto rep = equivariance_test(psi, field, s.sampler->box, s.sampler->n, s.sampler->seed,
                                       s.sampler->sigma_span, cfg, opt);
    json out;
    out["test"] = "equivariance";
    double max_stat = 0.0, crit = 0.0;
    json per_coord = json::array();
    for (const auto& k : rep.ks) {
        per_coord.push_back({{"statistic", k.statistic},
                             {"critical", k.critical},
                             {"pvalue", k.pvalue},
                             {"passed", k.passed}});
        if (k.statistic > max_stat) {
            max_stat = k.statistic;
            crit = k.critical;
        }
    }
    out["statistic"] = max_stat;
    out["critical"] = crit;
    out["passed"] = rep.passed();
    out["n"] = rep.n_used;
    out["seed"] = rep.seed;
    out["edge_loss"] = rep.edge_loss;
    out["per_coordinate_ks"] = per_coord;
    out["chi2"] = {{"statistic", rep.chi2.statistic},
                   {"dof", rep.chi2.dof},
                   {"pvalue", rep.chi2.pvalue},
                   {"passed", rep.chi2_passed}};
    out["drift"] = rep.drift;
    out["margin"] = rep.margin;
    out["node_halts"] = rep.node_halts;
    out["sigma_span"] = rep.sigma_span;
    out["corrupt_velocities"] = corrupt_factor;
    atomic_write(join_path(g.out_dir, s.outputs.report), out.dump(2) + "\n");
    std::cout << (rep.passed() ? "equivariance PASS" : "equivariance FAIL")
              << " (max KS " << max_stat << " vs " << crit << ", edge loss " << rep.edge_loss
              << ")\n";
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(s, raw, g, wall, {s.outputs.report});
    return rep.passed() ? 0 : 1;
}

int cmd_frames(const std::string& path, const GlobalOptions& g, double beta) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string raw;
    const Scenario s = load_scenario(path, g, raw);
    if (!s.sampler) throw ConfigurationError("frames: scenario has no sampler block");
    const auto psi = s.build_wavefunction();
    const auto rep = frame_independence_test(psi, s.sampler->box, beta, s.sampler->n,
                                             s.sampler->seed);
    json out;
    out["test"] = "frames";
    out["statistic"] = rep.diff_over_se;
    out["critical"] = 3.0;
    out["passed"] = rep.passed;
    out["n"] = rep.n;
    out["seed"] = rep.seed;
    out["edge_loss"] = 0.0;
    out["beta"] = rep.beta;
    out["p_original"] = rep.p_original;
    out["se_original"] = rep.se_original;
    out["p_boosted"] = rep.p_boosted;
    out["se_boosted"] = rep.se_boosted;
    atomic_write(join_path(g.out_dir, s.outputs.report), out.dump(2) + "\n");
    std::cout << (rep.passed ? "frames PASS" : "frames FAIL") << " (|dP|/SE = "
              << rep.diff_over_se << ")\n";
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(s, raw, g, wall, {s.outputs.report});
    return rep.passed ? 0 : 1;
}

int cmd_limits(const std::string& path, const GlobalOptions& g, const std::string& mode) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string raw;
    const Scenario s = load_scenario(path, g, raw);
    if (!s.limits) throw ConfigurationError("limits: scenario has no limits block");
    IntegratorConfig cfg = s.integrator ? s.integrator_config() : IntegratorConfig{};
    json out;
    bool passed = false;

    if (mode == "classical") {
        if (s.limits->hbar_values.empty())
            throw ConfigurationError("limits: empty hbar_values scan list");
        const auto rep = classical_limit_study(s.limits->packet, s.limits->hbar_values,
                                               s.particles.at(0), s.constants.c, cfg);
        json entries = json::array();
        bool monotone = true;
        for (std::size_t i = 0; i < rep.entries.size(); ++i) {
            const auto& e = rep.entries[i];
            entries.push_back({{"hbar", e.hbar},
                               {"max_position_deviation", e.max_position_deviation},
                               {"max_tau_deviation", e.max_tau_deviation},
                               {"max_q_rel", e.max_q_rel}});
            if (i > 0) {
                monotone = monotone && e.max_q_rel < rep.entries[i - 1].max_q_rel &&
                           e.max_tau_deviation < rep.entries[i - 1].max_tau_deviation &&
                           e.max_position_deviation < rep.entries[i - 1].max_position_deviation;
            }
        }
        passed = monotone && rep.q_scaling_exponent >= 1.7 && rep.q_scaling_exponent <= 2.3;
        out["mode"] = "classical";
        out["entries"] = entries;
        out["q_scaling_exponent"] = rep.q_scaling_exponent;
        out["monotone"] = monotone;
        out["passed"] = passed;
        std::cout << (passed ? "classical limit PASS" : "classical limit FAIL")
                  << " (Q exponent " << rep.q_scaling_exponent << ")\n";
    } else if (mode == "nonrelativistic") {
        if (s.limits->v_over_c.empty())
            throw ConfigurationError("limits: empty v_over_c scan list");
        const auto& particle = s.particles.at(0);
        json entries = json::array();
        std::vector<double> devs, dt_devs;
        for (const double v : s.limits->v_over_c) {
            const double k = v * particle.mass * s.constants.c / s.constants.hbar;
            ProductTerm t;
            t.modes.push_back(on_shell_mode({k}, particle, s.constants));
            const ModeSumWaveFunction rel({t}, {particle}, s.constants);
            NRTerm nt;
            nt.k.push_back(SpatialVector(k));
            const NRWaveFunction nr({nt}, {particle}, s.constants);
            const auto comp = limit_comparison(rel, nr, 0.0, cfg, v);
            const auto dec = temporal_decoupling_check(rel, EMPotential::zero(),
                                                       {{FourVector(0.0, 0.0)}}, v);
            devs.push_back(comp.max_deviation);
            dt_devs.push_back(dec.max_deviation);
            entries.push_back({{"v_over_c", v},
                               {"max_deviation", comp.max_deviation},
                               {"max_dT_deviation", dec.max_deviation},
                               {"K", dec.K}});
        }
        auto fit_exponent = [&](const std::vector<double>& y) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const double n = static_cast<double>(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double lx = std::log(s.limits->v_over_c[i]);
                const double ly = std::log(std::max(y[i], 1e-300));
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
            }
            return (n * sxy - sx * sy) / (n * sxx - sx * sx);
        };
        const double scaling = fit_exponent(devs);
        const double dt_scaling = fit_exponent(dt_devs);
        passed = scaling >= 1.7 && scaling <= 2.3 && dt_scaling >= 1.7 && dt_scaling <= 2.3;
        out["mode"] = "nonrelativistic";
        out["entries"] = entries;
        out["scaling_exponent"] = scaling;
        out["dT_scaling_exponent"] = dt_scaling;
        out["passed"] = passed;
        // summary triple per the report contract
        out["v_over_c"] = s.limits->v_over_c;
        out["max_deviation"] = devs;
        std::cout << (passed ? "NR limit PASS" : "NR limit FAIL") << " (exponents " << scaling
                  << ", " << dt_scaling << ")\n";
    } else {
        throw ConfigurationError("limits: mode must be classical or nonrelativistic");
    }
    atomic_write(join_path(g.out_dir, s.outputs.report), out.dump(2) + "\n");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(s, raw, g, wall, {s.outputs.report});
    return passed ? 0 : 1;
}

int cmd_verify(const std::string& path, const GlobalOptions& g) {
    std::string raw;
    const Scenario s = load_scenario(path, g, raw);
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, double value) {
        std::printf("%s  %-42s %.3e\n", ok ? "PASS" : "FAIL", name.c_str(), value);
        if (!ok) ++failures;
    };
    Rng rng(s.sampler ? s.sampler->seed : 12345);
    const int dims = static_cast<int>(s.particles.size()) * (s.spatial_dim + 1);

    auto random_configuration = [&]() {
        std::vector<double> p(static_cast<std::size_t>(dims));
        for (auto& v : p) v = rng.uniform(-5.0, 5.0);
        return coords_to_configuration(p, s.particles.size(), s.spatial_dim);
    };

    if (s.wavefunction.kind == "relativistic") {
        const auto psi = s.build_wavefunction();
        const auto field = s.build_field();
        const double c2 = s.constants.c * s.constants.c;

        double worst = 0.0;
        for (const auto& t : psi.terms())
            for (std::size_t i = 0; i < psi.num_particles(); ++i)
                worst = std::max(worst, std::abs(mass_shell_defect(t.modes[i], psi.particles()[i],
                                                                  psi.constants())) /
                                            (psi.particles()[i].mass * psi.particles()[i].mass * c2));
        report("mode mass-shell defect", worst < 1e-12, worst);

        worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const auto q = random_configuration();
            for (std::size_t i = 0; i < psi.num_particles(); ++i)
                worst = std::max(worst, psi.kg_residual(q, i));
        }
        report("Klein-Gordon residual (100 points)", worst < 1e-9, worst);

        if (field.family() == EMPotential::Family::Zero) {
            worst = 0.0;
            int used = 0;
            while (used < 100) {
                const auto q = random_configuration();
                if (psi.density(q) < 1e-3) continue;
                ++used;
                for (std::size_t i = 0; i < psi.num_particles(); ++i)
                    worst = std::max(worst, psi.continuity_residual(q, i));
            }
            report("continuity residual (100 points)", worst < 1e-6, worst);
        }

        worst = 0.0;
        int used = 0;
        while (used < 100) {
            const auto q = random_configuration();
            if (psi.density(q) < 1e-3) continue;
            ++used;
            for (const double r : mass_shell_residual(psi, field, q))
                worst = std::max(worst, std::abs(r) / c2);
        }
        report("guide-velocity mass-shell identity", worst < 1e-8, worst);

        worst = 0.0;
        used = 0;
        while (used < 10) {
            const auto q = random_configuration();
            if (psi.density(q) < 1e-2) continue;
            ++used;
            const auto pd = psi.polar_data(q);
            for (std::size_t i = 0; i < psi.num_particles(); ++i) {
                // central-difference cross-check of the phase gradient
                const double h = 1e-5;
                for (int coord = 0; coord <= s.spatial_dim; ++coord) {
                    auto shift = [&](double d) {
                        Configuration qq = q;
                        if (coord < s.spatial_dim)
                            qq[i].spatial(coord) += d;
                        else
                            qq[i].temporal() += d;
                        return qq;
                    };
                    const double dS = s.constants.hbar *
                                      std::arg(psi.evaluate(shift(h)) / psi.evaluate(shift(-h))) /
                                      (2.0 * h);
                    const double analytic = coord < s.spatial_dim
                                                ? pd.grad_S[i].spatial(coord)
                                                : -pd.grad_S[i].temporal();
                    worst = std::max(worst,
                                     std::abs(analytic - dS) / std::max(1.0, std::abs(dS)));
                }
            }
        }
        report("phase gradient vs finite differences", worst < 1e-4, worst);
    } else {
        const auto psi = s.build_nr_wavefunction();
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            SpatialConfiguration x;
            std::vector<double> times;
            for (std::size_t i = 0; i < psi.num_particles(); ++i) {
                SpatialVector sv(s.spatial_dim);
                for (int qd = 0; qd < s.spatial_dim; ++qd) sv[qd] = rng.uniform(-5.0, 5.0);
                x.push_back(sv);
                times.push_back(rng.uniform(-5.0, 5.0));
            }
            for (std::size_t i = 0; i < psi.num_particles(); ++i)
                worst = std::max(worst, psi.schroedinger_residual(x, times, i));
        }
        report("multi-time Schroedinger residual", worst < 1e-9, worst);

        const ConditionalWaveFunction phi(psi, s.offsets);
        worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            SpatialConfiguration x;
            for (std::size_t i = 0; i < psi.num_particles(); ++i) {
                SpatialVector sv(s.spatial_dim);
                for (int qd = 0; qd < s.spatial_dim; ++qd) sv[qd] = rng.uniform(-5.0, 5.0);
                x.push_back(sv);
            }
            worst = std::max(worst, phi.sigma_equation_residual(x, rng.uniform(-5.0, 5.0)));
        }
        report("conditional sigma-equation residual", worst < 1e-9, worst);
    }

    {  // boost invariance of the contraction, library-level sanity
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            FourVector a(s.spatial_dim), b(s.spatial_dim);
            for (int qd = 0; qd < s.spatial_dim; ++qd) {
                a.spatial(qd) = rng.uniform(-3, 3);
                b.spatial(qd) = rng.uniform(-3, 3);
            }
            a.temporal() = rng.uniform(-3, 3);
            b.temporal() = rng.uniform(-3, 3);
            const double beta = rng.uniform(-0.99, 0.99);
            const double before = minkowski_dot(a, b);
            const double after = minkowski_dot(lorentz_boost(a, beta), lorentz_boost(b, beta));
            worst = std::max(worst, std::abs(after - before) / std::max(1.0, std::abs(before)));
        }
        report("boost invariance of minkowski_dot", worst < 1e-10, worst);
    }

    std::printf("%s (%d failure%s)\n", failures == 0 ? "VERIFY PASS" : "VERIFY FAIL", failures,
                failures == 1 ? "" : "s");
    return failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bohmflow: sigma-parameterized relativistic pilot-wave trajectories from exact "
                 "Klein-Gordon mode sums"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--out-dir", g.out_dir, "directory for output files");
    app.add_option("--override", g.overrides,
                   "scenario override as dotted.path=value (repeatable)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override the scenario seed");

    std::string scenario_path;
    double corrupt = 1.0;
    double beta = 0.5;
    std::string limits_mode = "classical";

    auto* sim = app.add_subcommand("simulate", "integrate guide-equation trajectories");
    sim->add_option("scenario", scenario_path, "scenario JSON file")->required();

    auto* smp = app.add_subcommand("sample", "draw |psi|^2-distributed spacetime configurations");
    smp->add_option("scenario", scenario_path)->required();

    auto* eqv = app.add_subcommand("equivariance", "push samples through the flow and test them");
    eqv->add_option("scenario", scenario_path)->required();
    eqv->add_option("--corrupt-velocities", corrupt,
                    "scale spatial guide velocities (power check)");

    auto* frm = app.add_subcommand("frames", "compare probabilities across boosted frames");
    frm->add_option("scenario", scenario_path)->required();
    frm->add_option("--beta", beta, "boost velocity / c (default 0.5)");

    auto* lim = app.add_subcommand("limits", "classical / non-relativistic limit scans");
    lim->add_option("scenario", scenario_path)->required();
    lim->add_option("--mode", limits_mode, "classical | nonrelativistic");

    auto* ver = app.add_subcommand("verify", "run the invariant battery on a scenario");
    ver->add_option("scenario", scenario_path)->required();

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) g.seed = seed_value;

    try {
        if (sim->parsed()) return cmd_simulate(scenario_path, g);
        if (smp->parsed()) return cmd_sample(scenario_path, g);
        if (eqv->parsed()) return cmd_equivariance(scenario_path, g, corrupt);
        if (frm->parsed()) return cmd_frames(scenario_path, g, beta);
        if (lim->parsed()) return cmd_limits(scenario_path, g, limits_mode);
        if (ver->parsed()) return cmd_verify(scenario_path, g);
    } catch (const ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
