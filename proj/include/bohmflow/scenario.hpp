#ifndef BOHMFLOW_SCENARIO_HPP
#define BOHMFLOW_SCENARIO_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohmflow/dynamics.hpp"
#include "bohmflow/fields.hpp"
#include "bohmflow/nonrelativistic.hpp"
#include "bohmflow/stats.hpp"
#include "bohmflow/wavefunction.hpp"

namespace bohmflow {

using json = nlohmann::json;

namespace detail {

/// Strict schema: unknown keys are rejected so typos cannot silently change a
/// run (and mode frequencies can never be smuggled in from a file).
inline void check_keys(const json& j, const std::vector<std::string>& allowed,
                       const std::string& path) {
    if (!j.is_object()) throw ConfigurationError("scenario: " + path + " must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const auto& a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigurationError("scenario: unknown key '" + path + key + "'");
    }
}

inline const json& require(const json& j, const std::string& key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end())
        throw ConfigurationError("scenario: missing required field '" + path + key + "'");
    return *it;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    const auto it = j.find(key);
    return it == j.end() ? fallback : it->get<T>();
}

}  // namespace detail

struct GaugeSpec {
    std::string form;  // "linear" | "sinusoidal"
    std::vector<double> spatial;
    double ct = 0.0;
    double amplitude = 0.0;
    std::vector<double> kappa;
    double kappa_ct = 0.0;

    GaugeScalar build() const {
        if (form == "linear") return linear_gauge(spatial, ct);
        if (form == "sinusoidal") return sinusoidal_gauge(amplitude, kappa, kappa_ct);
        throw ConfigurationError("scenario: unknown gauge form '" + form + "'");
    }
};

struct FieldSpec {
    std::string family = "zero";
    double strength = 0.0;
    int axis = 0;
    int axis2 = 1;
    std::optional<GaugeSpec> chi;

    EMPotential build() const {
        if (family == "zero") return EMPotential::zero();
        if (family == "constant_electric") return EMPotential::constant_electric(strength, axis);
        if (family == "constant_magnetic")
            return EMPotential::constant_magnetic(strength, axis, axis2);
        if (family == "pure_gauge") {
            if (!chi) throw ConfigurationError("scenario: pure_gauge field needs a chi block");
            return EMPotential::pure_gauge(chi->build());
        }
        throw ConfigurationError("scenario: unknown field family '" + family + "'");
    }
};

struct RelTermSpec {
    cplx coefficient{1.0, 0.0};
    struct Mode {
        int particle = 0;
        std::vector<double> k;
        int branch = +1;
    };
    std::vector<Mode> modes;
};

struct NRTermSpec {
    cplx coefficient{1.0, 0.0};
    std::vector<std::vector<double>> k;  // per particle
};

struct WavefunctionSpec {
    std::string kind = "relativistic";  // or "nonrelativistic"
    std::vector<RelTermSpec> rel_terms;
    std::vector<NRTermSpec> nr_terms;
    std::vector<double> potential_phi;  // NR constant potentials, optional
};

struct SamplerSpec {
    SampleMethod method = SampleMethod::rejection;
    std::size_t n = 5000;
    std::uint64_t seed = 0;
    SamplingBox box;
    double sigma_span = 1.0;
    MetropolisParams metropolis;
};

struct LimitsSpec {
    std::vector<double> hbar_values;
    std::vector<double> v_over_c;
    PacketSpec packet;
};

struct OutputsSpec {
    std::string trajectory;  // defaults derived from the scenario name
    std::string report;
};

/// Parsed scenario file.  hbar and c are always explicit in the file; mode
/// frequencies are always re-derived from the mass shell on construction.
struct Scenario {
    std::string name;
    Constants constants;
    int spatial_dim = 1;
    std::vector<ParticleParams> particles;
    WavefunctionSpec wavefunction;
    FieldSpec field;
    TemporalOffsets offsets;
    std::optional<IntegratorConfig> integrator;  // n_steps derived from sigma_span
    double integrator_span = 0.0;
    std::optional<SamplerSpec> sampler;
    std::optional<LimitsSpec> limits;
    Configuration initial;
    OutputsSpec outputs;

    static Scenario from_json(const json& j);
    static Scenario load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigurationError("scenario: cannot open '" + path + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigurationError("scenario: parse error in '" + path + "': " + e.what());
        }
        return from_json(j);
    }

    json to_json() const;

    ModeSumWaveFunction build_wavefunction() const {
        if (wavefunction.kind != "relativistic")
            throw ConfigurationError("scenario: '" + name + "' has no relativistic wavefunction");
        std::vector<ProductTerm> terms;
        for (const auto& ts : wavefunction.rel_terms) {
            ProductTerm t;
            t.coefficient = ts.coefficient;
            t.modes.resize(particles.size());
            std::vector<bool> seen(particles.size(), false);
            for (const auto& ms : ts.modes) {
                if (ms.particle < 0 || ms.particle >= static_cast<int>(particles.size()))
                    throw ConfigurationError("scenario: mode references particle " +
                                             std::to_string(ms.particle) + " which does not exist");
                t.modes[static_cast<std::size_t>(ms.particle)] =
                    on_shell_mode(ms.k, particles[static_cast<std::size_t>(ms.particle)],
                                  constants, ms.branch);
                seen[static_cast<std::size_t>(ms.particle)] = true;
            }
            for (std::size_t i = 0; i < seen.size(); ++i)
                if (!seen[i])
                    throw ConfigurationError("scenario: term missing a mode for particle " +
                                             std::to_string(i));
            terms.push_back(std::move(t));
        }
        return ModeSumWaveFunction(std::move(terms), particles, constants);
    }

    NRWaveFunction build_nr_wavefunction() const {
        if (wavefunction.kind != "nonrelativistic")
            throw ConfigurationError("scenario: '" + name +
                                     "' has no nonrelativistic wavefunction");
        std::vector<NRTerm> terms;
        for (const auto& ts : wavefunction.nr_terms) {
            NRTerm t;
            t.coefficient = ts.coefficient;
            if (ts.k.size() != particles.size())
                throw ConfigurationError("scenario: NR term needs one k per particle");
            for (const auto& kv : ts.k) {
                SpatialVector s(static_cast<int>(kv.size()));
                for (std::size_t j = 0; j < kv.size(); ++j) s[static_cast<int>(j)] = kv[j];
                t.k.push_back(s);
            }
            terms.push_back(std::move(t));
        }
        return NRWaveFunction(std::move(terms), particles, constants, wavefunction.potential_phi);
    }

    EMPotential build_field() const { return field.build(); }

    IntegratorConfig integrator_config() const {
        if (!integrator)
            throw ConfigurationError("scenario: '" + name + "' has no integrator block");
        IntegratorConfig cfg = *integrator;
        cfg.n_steps = std::max(1, static_cast<int>(std::lround(integrator_span / cfg.d_sigma)));
        return cfg;
    }
};

inline Scenario Scenario::from_json(const json& j) {
    using detail::check_keys;
    using detail::get_or;
    using detail::require;
    Scenario s;
    check_keys(j,
               {"name", "constants", "spatial_dim", "particles", "wavefunction", "field",
                "offsets", "integrator", "sampler", "limits", "initial", "outputs"},
               "");
    s.name = require(j, "name", "").get<std::string>();

    {
        const json& c = require(j, "constants", "");
        check_keys(c, {"hbar", "c"}, "constants.");
        s.constants.hbar = require(c, "hbar", "constants.").get<double>();
        s.constants.c = require(c, "c", "constants.").get<double>();
        s.constants.validate();
    }
    s.spatial_dim = get_or(j, "spatial_dim", 1);
    if (s.spatial_dim < 1 || s.spatial_dim > 3)
        throw ConfigurationError("scenario: spatial_dim must be 1, 2 or 3");

    for (const auto& p : require(j, "particles", "")) {
        check_keys(p, {"mass", "charge"}, "particles[].");
        ParticleParams pp;
        pp.mass = require(p, "mass", "particles[].").get<double>();
        pp.charge = get_or(p, "charge", 0.0);
        pp.validate();
        s.particles.push_back(pp);
    }
    if (s.particles.empty()) throw ConfigurationError("scenario: needs at least one particle");

    {
        const json& w = require(j, "wavefunction", "");
        check_keys(w, {"kind", "terms", "potential_phi"}, "wavefunction.");
        s.wavefunction.kind = get_or<std::string>(w, "kind", "relativistic");
        const json& terms = require(w, "terms", "wavefunction.");
        if (s.wavefunction.kind == "relativistic") {
            for (const auto& t : terms) {
                check_keys(t, {"coefficient", "modes"}, "wavefunction.terms[].");
                RelTermSpec ts;
                const auto co = require(t, "coefficient", "wavefunction.terms[].");
                ts.coefficient = cplx(co.at(0).get<double>(), co.at(1).get<double>());
                for (const auto& m : require(t, "modes", "wavefunction.terms[].")) {
                    check_keys(m, {"particle", "k", "branch"}, "wavefunction.terms[].modes[].");
                    RelTermSpec::Mode ms;
                    ms.particle = require(m, "particle", "...modes[].").get<int>();
                    ms.k = require(m, "k", "...modes[].").get<std::vector<double>>();
                    const std::string branch = get_or<std::string>(m, "branch", "+");
                    if (branch == "+")
                        ms.branch = +1;
                    else if (branch == "-")
                        ms.branch = -1;
                    else
                        throw ConfigurationError("scenario: branch must be '+' or '-'");
                    ts.modes.push_back(std::move(ms));
                }
                s.wavefunction.rel_terms.push_back(std::move(ts));
            }
        } else if (s.wavefunction.kind == "nonrelativistic") {
            for (const auto& t : terms) {
                check_keys(t, {"coefficient", "k"}, "wavefunction.terms[].");
                NRTermSpec ts;
                const auto co = require(t, "coefficient", "wavefunction.terms[].");
                ts.coefficient = cplx(co.at(0).get<double>(), co.at(1).get<double>());
                ts.k = require(t, "k", "wavefunction.terms[].")
                           .get<std::vector<std::vector<double>>>();
                s.wavefunction.nr_terms.push_back(std::move(ts));
            }
            s.wavefunction.potential_phi =
                get_or(w, "potential_phi", std::vector<double>{});
        } else {
            throw ConfigurationError("scenario: wavefunction.kind must be relativistic or "
                                     "nonrelativistic");
        }
    }

    // axes accept either an index or the letters x/y/z
    auto parse_axis = [](const json& a) -> int {
        if (a.is_number_integer()) return a.get<int>();
        const std::string name = a.get<std::string>();
        if (name == "x") return 0;
        if (name == "y") return 1;
        if (name == "z") return 2;
        throw ConfigurationError("scenario: axis must be x, y, z or an index");
    };
    if (j.contains("field")) {
        const json& f = j.at("field");
        check_keys(f, {"family", "E", "B", "axis", "axes", "chi"}, "field.");
        s.field.family = require(f, "family", "field.").get<std::string>();
        if (s.field.family == "constant_electric") {
            s.field.strength = require(f, "E", "field.").get<double>();
            s.field.axis = f.contains("axis") ? parse_axis(f.at("axis")) : 0;
        } else if (s.field.family == "constant_magnetic") {
            s.field.strength = require(f, "B", "field.").get<double>();
            if (f.contains("axes")) {
                const json& axes = f.at("axes");
                if (axes.size() != 2)
                    throw ConfigurationError("scenario: field.axes needs 2 entries");
                s.field.axis = parse_axis(axes.at(0));
                s.field.axis2 = parse_axis(axes.at(1));
            }
        } else if (s.field.family == "pure_gauge") {
            const json& chi = require(f, "chi", "field.");
            check_keys(chi, {"form", "spatial", "ct", "amplitude", "kappa", "kappa_ct"},
                       "field.chi.");
            GaugeSpec g;
            g.form = require(chi, "form", "field.chi.").get<std::string>();
            g.spatial = get_or(chi, "spatial", std::vector<double>{});
            g.ct = get_or(chi, "ct", 0.0);
            g.amplitude = get_or(chi, "amplitude", 0.0);
            g.kappa = get_or(chi, "kappa", std::vector<double>{});
            g.kappa_ct = get_or(chi, "kappa_ct", 0.0);
            s.field.chi = std::move(g);
        } else if (s.field.family != "zero") {
            throw ConfigurationError("scenario: unknown field family '" + s.field.family + "'");
        }
    }

    if (j.contains("offsets")) {
        const json& o = j.at("offsets");
        check_keys(o, {"deltas", "epsilon_clock"}, "offsets.");
        s.offsets.deltas = require(o, "deltas", "offsets.").get<std::vector<double>>();
        s.offsets.epsilon_clock = get_or(o, "epsilon_clock", 0.0);
        if (s.offsets.deltas.size() != s.particles.size())
            throw ConfigurationError("scenario: offsets.deltas needs one entry per particle");
    } else {
        s.offsets.deltas.assign(s.particles.size(), 0.0);
    }

    if (j.contains("integrator")) {
        const json& i = j.at("integrator");
        check_keys(i, {"d_sigma", "sigma_span", "method", "node_policy"}, "integrator.");
        IntegratorConfig cfg;
        cfg.d_sigma = require(i, "d_sigma", "integrator.").get<double>();
        s.integrator_span = require(i, "sigma_span", "integrator.").get<double>();
        const std::string method = get_or<std::string>(i, "method", "rk4");
        if (method == "rk4")
            cfg.method = IntegratorConfig::Method::RK4;
        else if (method == "euler")
            cfg.method = IntegratorConfig::Method::Euler;
        else
            throw ConfigurationError("scenario: integrator.method must be rk4 or euler");
        const std::string policy = get_or<std::string>(i, "node_policy", "halt");
        if (policy == "halt")
            cfg.node_policy = IntegratorConfig::NodePolicy::halt;
        else if (policy == "substep")
            cfg.node_policy = IntegratorConfig::NodePolicy::substep;
        else
            throw ConfigurationError("scenario: integrator.node_policy must be halt or substep");
        if (!(cfg.d_sigma > 0.0) || !(s.integrator_span > 0.0))
            throw ConfigurationError("scenario: integrator.d_sigma and sigma_span must be > 0");
        s.integrator = cfg;
    }

    if (j.contains("sampler")) {
        const json& sp = j.at("sampler");
        check_keys(sp, {"method", "n", "seed", "box", "sigma_span", "metropolis"}, "sampler.");
        SamplerSpec spec;
        const std::string method = get_or<std::string>(sp, "method", "rejection");
        if (method == "rejection")
            spec.method = SampleMethod::rejection;
        else if (method == "metropolis")
            spec.method = SampleMethod::metropolis;
        else
            throw ConfigurationError("scenario: sampler.method must be rejection or metropolis");
        spec.n = require(sp, "n", "sampler.").get<std::size_t>();
        spec.seed = require(sp, "seed", "sampler.").get<std::uint64_t>();
        const json& box = require(sp, "box", "sampler.");
        check_keys(box, {"lower", "upper"}, "sampler.box.");
        spec.box.lower = require(box, "lower", "sampler.box.").get<std::vector<double>>();
        spec.box.upper = require(box, "upper", "sampler.box.").get<std::vector<double>>();
        spec.box.validate();
        spec.sigma_span = get_or(sp, "sigma_span", 1.0);
        if (sp.contains("metropolis")) {
            const json& mp = sp.at("metropolis");
            check_keys(mp, {"proposal_scale_divisor", "burn_in", "thinning"},
                       "sampler.metropolis.");
            spec.metropolis.proposal_scale_divisor =
                get_or(mp, "proposal_scale_divisor", 50.0);
            spec.metropolis.burn_in = get_or(mp, "burn_in", 1000);
            spec.metropolis.thinning = get_or(mp, "thinning", 10);
        }
        s.sampler = std::move(spec);
    }

    if (j.contains("limits")) {
        const json& l = j.at("limits");
        check_keys(l, {"hbar_values", "v_over_c", "packet"}, "limits.");
        LimitsSpec spec;
        spec.hbar_values = get_or(l, "hbar_values", std::vector<double>{});
        spec.v_over_c = get_or(l, "v_over_c", std::vector<double>{});
        if (l.contains("packet")) {
            const json& p = l.at("packet");
            check_keys(p, {"p_center", "width", "n_modes"}, "limits.packet.");
            spec.packet.p_center = get_or(p, "p_center", 0.2);
            spec.packet.width = get_or(p, "width", 3.0);
            spec.packet.n_modes = get_or(p, "n_modes", 41);
        }
        s.limits = std::move(spec);
    }

    if (j.contains("initial")) {
        for (const auto& e : j.at("initial")) {
            check_keys(e, {"x", "ct"}, "initial[].");
            const auto x = require(e, "x", "initial[].").get<std::vector<double>>();
            if (static_cast<int>(x.size()) != s.spatial_dim)
                throw ConfigurationError("scenario: initial[].x must have spatial_dim entries");
            FourVector v(s.spatial_dim);
            for (std::size_t q = 0; q < x.size(); ++q) v.spatial(static_cast<int>(q)) = x[q];
            v.temporal() = get_or(e, "ct", 0.0);
            s.initial.push_back(v);
        }
        if (s.initial.size() != s.particles.size())
            throw ConfigurationError("scenario: initial needs one entry per particle");
    }

    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        check_keys(o, {"trajectory", "report"}, "outputs.");
        s.outputs.trajectory = get_or<std::string>(o, "trajectory", "");
        s.outputs.report = get_or<std::string>(o, "report", "");
    }
    if (s.outputs.trajectory.empty()) s.outputs.trajectory = s.name + "_trajectory.csv";
    if (s.outputs.report.empty()) s.outputs.report = s.name + "_report.json";
    return s;
}

inline json Scenario::to_json() const {
    json j;
    j["name"] = name;
    j["constants"] = {{"hbar", constants.hbar}, {"c", constants.c}};
    j["spatial_dim"] = spatial_dim;
    j["particles"] = json::array();
    for (const auto& p : particles)
        j["particles"].push_back({{"mass", p.mass}, {"charge", p.charge}});
    json w;
    w["kind"] = wavefunction.kind;
    w["terms"] = json::array();
    if (wavefunction.kind == "relativistic") {
        for (const auto& t : wavefunction.rel_terms) {
            json tj;
            tj["coefficient"] = {t.coefficient.real(), t.coefficient.imag()};
            tj["modes"] = json::array();
            for (const auto& m : t.modes)
                tj["modes"].push_back({{"particle", m.particle},
                                       {"k", m.k},
                                       {"branch", m.branch > 0 ? "+" : "-"}});
            w["terms"].push_back(tj);
        }
    } else {
        for (const auto& t : wavefunction.nr_terms) {
            json tj;
            tj["coefficient"] = {t.coefficient.real(), t.coefficient.imag()};
            tj["k"] = t.k;
            w["terms"].push_back(tj);
        }
        if (!wavefunction.potential_phi.empty()) w["potential_phi"] = wavefunction.potential_phi;
    }
    j["wavefunction"] = w;
    json f;
    f["family"] = field.family;
    if (field.family == "constant_electric") {
        f["E"] = field.strength;
        f["axis"] = field.axis;
    } else if (field.family == "constant_magnetic") {
        f["B"] = field.strength;
        f["axes"] = {field.axis, field.axis2};
    } else if (field.family == "pure_gauge" && field.chi) {
        json c;
        c["form"] = field.chi->form;
        if (field.chi->form == "linear") {
            c["spatial"] = field.chi->spatial;
            c["ct"] = field.chi->ct;
        } else {
            c["amplitude"] = field.chi->amplitude;
            c["kappa"] = field.chi->kappa;
            c["kappa_ct"] = field.chi->kappa_ct;
        }
        f["chi"] = c;
    }
    j["field"] = f;
    j["offsets"] = {{"deltas", offsets.deltas}, {"epsilon_clock", offsets.epsilon_clock}};
    if (integrator) {
        const char* method = integrator->method == IntegratorConfig::Method::RK4 ? "rk4" : "euler";
        const char* policy =
            integrator->node_policy == IntegratorConfig::NodePolicy::halt ? "halt" : "substep";
        j["integrator"] = {{"d_sigma", integrator->d_sigma},
                           {"sigma_span", integrator_span},
                           {"method", method},
                           {"node_policy", policy}};
    }
    if (sampler) {
        j["sampler"] = {
            {"method", sampler->method == SampleMethod::rejection ? "rejection" : "metropolis"},
            {"n", sampler->n},
            {"seed", sampler->seed},
            {"box", {{"lower", sampler->box.lower}, {"upper", sampler->box.upper}}},
            {"sigma_span", sampler->sigma_span},
            {"metropolis",
             {{"proposal_scale_divisor", sampler->metropolis.proposal_scale_divisor},
              {"burn_in", sampler->metropolis.burn_in},
              {"thinning", sampler->metropolis.thinning}}}};
    }
    if (limits) {
        json l;
        if (!limits->hbar_values.empty()) l["hbar_values"] = limits->hbar_values;
        if (!limits->v_over_c.empty()) l["v_over_c"] = limits->v_over_c;
        l["packet"] = {{"p_center", limits->packet.p_center},
                       {"width", limits->packet.width},
                       {"n_modes", limits->packet.n_modes}};
        j["limits"] = l;
    }
    if (!initial.empty()) {
        j["initial"] = json::array();
        for (const auto& v : initial) {
            std::vector<double> x;
            for (int q = 0; q < v.dim(); ++q) x.push_back(v.spatial(q));
            j["initial"].push_back({{"x", x}, {"ct", v.temporal()}});
        }
    }
    j["outputs"] = {{"trajectory", outputs.trajectory}, {"report", outputs.report}};
    return j;
}

/// Apply one dotted-path override, e.g. "integrator.d_sigma=0.005" or
/// "particles.0.mass=2.0".  The value is parsed as JSON when possible and
/// falls back to a string.
inline void apply_override(json& j, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigurationError("override '" + spec + "' must look like key.path=value");
    std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    for (auto& ch : path)
        if (ch == '.') ch = '/';
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;
    }
    try {
        j[json::json_pointer("/" + path)] = parsed;
    } catch (const json::exception& e) {
        throw ConfigurationError("override '" + spec + "' failed: " + e.what());
    }
}

}  // namespace bohmflow

#endif  // BOHMFLOW_SCENARIO_HPP
