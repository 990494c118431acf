#ifndef BOHMFLOW_DYNAMICS_HPP
#define BOHMFLOW_DYNAMICS_HPP

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "bohmflow/errors.hpp"
#include "bohmflow/fields.hpp"
#include "bohmflow/minkowski.hpp"
#include "bohmflow/wavefunction.hpp"

namespace bohmflow {

template <typename W>
concept SpacetimeWaveFunction = requires(const W& w, const Configuration& q) {
    { w.num_particles() } -> std::convertible_to<std::size_t>;
    { w.evaluate(q) } -> std::convertible_to<cplx>;
    { w.polar_data(q) } -> std::convertible_to<PolarData>;
    { w.particles() } -> std::convertible_to<const std::vector<ParticleParams>&>;
    { w.constants() } -> std::convertible_to<const Constants&>;
    { w.dim() } -> std::convertible_to<int>;
};

enum class IntervalClass : std::uint8_t { timelike, spacelike, null_tolerance };

inline const char* to_string(IntervalClass c) {
    switch (c) {
        case IntervalClass::timelike: return "timelike";
        case IntervalClass::spacelike: return "spacelike";
        default: return "null-tolerance";
    }
}

/// Relative width of the band around (V.V) = -c^2 classified as null.
inline constexpr double interval_null_tolerance = 1e-9;

struct IntegratorConfig {
    double d_sigma = 0.01;
    int n_steps = 100;
    enum class Method { RK4, Euler } method = Method::RK4;
    enum class NodePolicy { halt, substep } node_policy = NodePolicy::halt;

    double sigma_span() const { return d_sigma * n_steps; }

    void validate() const {
        if (!(d_sigma > 0.0)) throw ConfigurationError("IntegratorConfig: d_sigma must be > 0");
        if (n_steps < 1) throw ConfigurationError("IntegratorConfig: n_steps must be >= 1");
    }
};

/// One sigma-slice of a trajectory.
struct TrajectoryPoint {
    double sigma = 0.0;
    Configuration positions;                  // X_mu per particle
    std::vector<FourVector> velocities;       // dX_mu/dsigma per particle
    std::vector<double> proper_times;         // tau_i, frozen once invalid
    std::vector<std::uint8_t> tau_valid;      // 1 while d tau^2 stays >= 0
    std::vector<double> q_over_m2c2;          // quantum term / (m_i^2 c^2)
    std::vector<IntervalClass> interval_class;
};

struct TrajectoryRecord {
    std::vector<TrajectoryPoint> points;
    bool completed = true;
    std::string halt_reason;

    const TrajectoryPoint& back() const { return points.back(); }
};

namespace detail {

inline Configuration add_scaled(const Configuration& q, const std::vector<FourVector>& v,
                                double s) {
    Configuration out = q;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * v[i];
    return out;
}

}  // namespace detail

/// Guide velocities V_mu = (1/m) dS/dX_mu - (e/(m c)) A_mu, one four-vector
/// per particle.  Spatial components are dX/dsigma, temporal is c dT/dsigma.
template <SpacetimeWaveFunction W>
std::vector<FourVector> guide_velocity(const W& psi, const EMPotential& field,
                                       const Configuration& q) {
    const PolarData pd = psi.polar_data(q);
    const auto& parts = psi.particles();
    const double c = psi.constants().c;
    std::vector<FourVector> v;
    v.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        FourVector vi = (1.0 / parts[i].mass) * pd.grad_S[i];
        if (field.family() != EMPotential::Family::Zero)
            vi -= (parts[i].charge / (parts[i].mass * c)) * field.potential_at(q[i]);
        v.push_back(vi);
    }
    return v;
}

/// Residual of the mass-shell identity, per particle:
///   V.V - (-c^2 + Q_i/m_i^2)  ~  0.
template <SpacetimeWaveFunction W>
std::vector<double> mass_shell_residual(const W& psi, const EMPotential& field,
                                        const Configuration& q) {
    const PolarData pd = psi.polar_data(q);
    const auto velocities = guide_velocity(psi, field, q);
    const auto& parts = psi.particles();
    const double c2 = psi.constants().c * psi.constants().c;
    std::vector<double> res;
    res.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const double vv = minkowski_dot(velocities[i], velocities[i]);
        const double rhs = -c2 + pd.quantum_term[i] / (parts[i].mass * parts[i].mass);
        res.push_back(vv - rhs);
    }
    return res;
}

namespace detail {

template <SpacetimeWaveFunction W>
std::vector<FourVector> flow_velocity(const W& psi, const EMPotential& field,
                                      const Configuration& q, double spatial_factor) {
    auto v = guide_velocity(psi, field, q);
    if (spatial_factor != 1.0)
        for (auto& vi : v)
            for (int j = 0; j < vi.dim(); ++j) vi.spatial(j) *= spatial_factor;
    return v;
}

template <SpacetimeWaveFunction W>
Configuration step_positions(const W& psi, const EMPotential& field, const Configuration& q,
                             double h, IntegratorConfig::Method method, double spatial_factor) {
    auto f = [&](const Configuration& x) { return flow_velocity(psi, field, x, spatial_factor); };
    if (method == IntegratorConfig::Method::Euler) return add_scaled(q, f(q), h);
    const auto k1 = f(q);
    const auto k2 = f(add_scaled(q, k1, 0.5 * h));
    const auto k3 = f(add_scaled(q, k2, 0.5 * h));
    const auto k4 = f(add_scaled(q, k3, h));
    Configuration out = q;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace detail

/// Advances all N particles in lockstep sigma.  Per accepted step the proper
/// times accumulate d tau_i = sqrt(1 - Q_i/(m_i^2 c^2)) d sigma evaluated at
/// the step's configuration; a negative radicand marks tau_i invalid from
/// there on and the point spacelike.  `spatial_velocity_factor` != 1 is the
/// deliberate flow corruption used by the equivariance power check; it scales
/// only the spatial velocity components.
template <SpacetimeWaveFunction W>
TrajectoryRecord integrate(const W& psi, const EMPotential& field, const Configuration& initial,
                           const IntegratorConfig& config, double spatial_velocity_factor = 1.0) {
    config.validate();
    const auto& parts = psi.particles();
    const std::size_t n = parts.size();
    if (initial.size() != n)
        throw ConfigurationError("integrate: initial configuration size mismatch");
    const double c2 = psi.constants().c * psi.constants().c;

    TrajectoryRecord rec;
    rec.points.reserve(static_cast<std::size_t>(config.n_steps) + 1);

    Configuration q = initial;
    std::vector<double> tau(n, 0.0);
    std::vector<std::uint8_t> tau_ok(n, 1);

    auto make_point = [&](double sigma) -> TrajectoryPoint {
        const PolarData pd = psi.polar_data(q);
        TrajectoryPoint p;
        p.sigma = sigma;
        p.positions = q;
        p.velocities =
            detail::flow_velocity(psi, field, q, spatial_velocity_factor);
        p.proper_times = tau;
        p.tau_valid = tau_ok;
        p.q_over_m2c2.reserve(n);
        p.interval_class.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double qrel = pd.quantum_term[i] / (parts[i].mass * parts[i].mass * c2);
            p.q_over_m2c2.push_back(qrel);
            // rhs of the rewritten Hamilton-Jacobi equation, -c^2 + Q/m^2
            const double rhs = c2 * (qrel - 1.0);
            if (rhs > interval_null_tolerance * c2)
                p.interval_class.push_back(IntervalClass::spacelike);
            else if (rhs < -interval_null_tolerance * c2)
                p.interval_class.push_back(IntervalClass::timelike);
            else
                p.interval_class.push_back(IntervalClass::null_tolerance);
        }
        return p;
    };

    auto advance_tau = [&](const TrajectoryPoint& at) {
        for (std::size_t i = 0; i < n; ++i) {
            const double radicand = 1.0 - at.q_over_m2c2[i];
            if (radicand < 0.0) {
                tau_ok[i] = 0;  // spacelike: d tau imaginary, bookkeeping stops
            } else if (tau_ok[i]) {
                tau[i] += std::sqrt(radicand) * config.d_sigma;
            }
        }
    };

    double sigma = 0.0;
    try {
        rec.points.push_back(make_point(sigma));
    } catch (const NodeProximityError& e) {
        throw NodeProximityError(std::string("integrate: initial configuration at node: ") +
                                     e.what(),
                                 e.rho, e.particle);
    }

    for (int step = 0; step < config.n_steps; ++step) {
        advance_tau(rec.points.back());
        Configuration next;
        try {
            next = detail::step_positions(psi, field, q, config.d_sigma, config.method,
                                          spatial_velocity_factor);
        } catch (const NodeProximityError& e) {
            bool recovered = false;
            if (config.node_policy == IntegratorConfig::NodePolicy::substep) {
                try {
                    const double h = 0.5 * config.d_sigma;
                    Configuration mid = detail::step_positions(psi, field, q, h, config.method,
                                                               spatial_velocity_factor);
                    next = detail::step_positions(psi, field, mid, h, config.method,
                                                  spatial_velocity_factor);
                    recovered = true;
                } catch (const NodeProximityError&) {
                    recovered = false;
                }
            }
            if (!recovered) {
                rec.completed = false;
                rec.halt_reason = "node proximity at sigma = " + std::to_string(sigma) +
                                  " (rho = " + std::to_string(e.rho) + ")";
                return rec;
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!next[i].finite())
                throw IntegrationError("integrate: non-finite state for particle " +
                                       std::to_string(i) + " at sigma = " +
                                       std::to_string(sigma + config.d_sigma));
        q = std::move(next);
        sigma = (step + 1) * config.d_sigma;
        try {
            rec.points.push_back(make_point(sigma));
        } catch (const NodeProximityError& e) {
            rec.completed = false;
            rec.halt_reason = "node proximity at sigma = " + std::to_string(sigma) +
                              " (rho = " + std::to_string(e.rho) + ")";
            return rec;
        }
    }
    return rec;
}

/// Final configurations only; the cheap path for ensemble pushes.
template <SpacetimeWaveFunction W>
Configuration flow_map(const W& psi, const EMPotential& field, Configuration q,
                       const IntegratorConfig& config, double spatial_velocity_factor = 1.0) {
    config.validate();
    for (int step = 0; step < config.n_steps; ++step) {
        q = detail::step_positions(psi, field, q, config.d_sigma, config.method,
                                   spatial_velocity_factor);
        for (const auto& x : q)
            if (!x.finite()) throw IntegrationError("flow_map: non-finite state");
    }
    return q;
}

// ---------------------------------------------------------------------------
// Classical (Lorentz-force) oracle
// ---------------------------------------------------------------------------

struct ClassicalPoint {
    double tau = 0.0;
    FourVector position;
    FourVector velocity;  // dX_mu/dtau
};

struct ClassicalRecord {
    std::vector<ClassicalPoint> points;
    double max_shell_drift = 0.0;  // max |V.V + c^2| / c^2, diagnostic only
};

namespace detail {

inline FourVector lorentz_force_rate(const FourVector& v, const FieldTensor& t,
                                     const ParticleParams& p, const Constants& constants) {
    // dV_b/dtau = (e / m c) * sum_a eta_a V_a F_ab
    const int d = v.dim();
    const double pref = p.charge / (p.mass * constants.c);
    FourVector dv(d);
    for (int b = 0; b <= d; ++b) {
        double s = 0.0;
        for (int a = 0; a <= d; ++a) {
            const double va = (a < d) ? v.spatial(a) : -v.temporal();  // eta_a V_a
            s += va * t(a, b);
        }
        if (b < d)
            dv.spatial(b) = pref * s;
        else
            dv.temporal() = pref * s;
    }
    return dv;
}

}  // namespace detail

/// RK4 integration of  m d^2X_nu/dtau^2 = (e/c) (dX_mu/dtau) F_mu_nu.
/// Normalization drift of V.V = -c^2 is reported, never corrected.
inline ClassicalRecord classical_integrate(const ParticleParams& particle,
                                           const EMPotential& field, const Constants& constants,
                                           const FourVector& initial_position,
                                           const FourVector& initial_velocity, double d_tau,
                                           int n_steps) {
    particle.validate();
    constants.validate();
    if (!(d_tau > 0.0) || n_steps < 1)
        throw ConfigurationError("classical_integrate: bad step configuration");
    const double c2 = constants.c * constants.c;
    const double shell0 = std::abs(minkowski_dot(initial_velocity, initial_velocity) + c2);
    if (shell0 > 1e-9 * c2)
        throw ConfigurationError("classical_integrate: initial four-velocity violates V.V = -c^2");

    auto rate = [&](const FourVector& x, const FourVector& v) {
        return detail::lorentz_force_rate(v, field.field_tensor_at(x), particle, constants);
    };

    ClassicalRecord rec;
    rec.points.reserve(static_cast<std::size_t>(n_steps) + 1);
    FourVector x = initial_position, v = initial_velocity;
    rec.points.push_back({0.0, x, v});
    for (int step = 0; step < n_steps; ++step) {
        const FourVector kx1 = v, kv1 = rate(x, v);
        const FourVector kx2 = v + 0.5 * d_tau * kv1,
                         kv2 = rate(x + 0.5 * d_tau * kx1, v + 0.5 * d_tau * kv1);
        const FourVector kx3 = v + 0.5 * d_tau * kv2,
                         kv3 = rate(x + 0.5 * d_tau * kx2, v + 0.5 * d_tau * kv2);
        const FourVector kx4 = v + d_tau * kv3, kv4 = rate(x + d_tau * kx3, v + d_tau * kv3);
        x += (d_tau / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
        v += (d_tau / 6.0) * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
        if (!x.finite() || !v.finite())
            throw IntegrationError("classical_integrate: non-finite state at tau = " +
                                   std::to_string((step + 1) * d_tau));
        rec.points.push_back({(step + 1) * d_tau, x, v});
        rec.max_shell_drift =
            std::max(rec.max_shell_drift, std::abs(minkowski_dot(v, v) + c2) / c2);
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Classical-limit scan
// ---------------------------------------------------------------------------

struct PacketSpec {
    double p_center = 0.2;  // physical central momentum, kept fixed across the scan
    double width = 3.0;     // coefficient width parameter, fixed physical geometry
    int n_modes = 41;
};

struct ClassicalLimitEntry {
    double hbar = 0.0;
    double max_position_deviation = 0.0;  // vs the straight path x = (p/m) sigma
    double max_tau_deviation = 0.0;       // max |tau - sigma|
    double max_q_rel = 0.0;               // max |Q| / (m^2 c^2)
};

struct ClassicalLimitReport {
    std::vector<ClassicalLimitEntry> entries;
    double q_scaling_exponent = 0.0;  // log-log slope of max_q_rel vs hbar
};

/// Runs the free Gaussian packet at each hbar with fixed physical momentum and
/// width; the trajectory launches from the packet center.  A = 0 only: no
/// closed-form bound states exist here for nonzero external fields.
inline ClassicalLimitReport classical_limit_study(const PacketSpec& packet,
                                                  const std::vector<double>& hbar_values,
                                                  const ParticleParams& particle, double c,
                                                  const IntegratorConfig& config) {
    if (hbar_values.empty())
        throw ConfigurationError("classical_limit_study: empty hbar scan list");
    for (std::size_t i = 1; i < hbar_values.size(); ++i)
        if (!(hbar_values[i] < hbar_values[i - 1]))
            throw ConfigurationError("classical_limit_study: hbar values must strictly decrease");

    ClassicalLimitReport report;
    const EMPotential field = EMPotential::zero();
    for (const double hbar : hbar_values) {
        const Constants constants{hbar, c};
        const auto psi =
            gaussian_packet(packet.p_center / hbar, packet.width, packet.n_modes, particle,
                            constants);
        const Configuration initial{FourVector(0.0, 0.0)};
        const TrajectoryRecord rec = integrate(psi, field, initial, config);
        ClassicalLimitEntry e;
        e.hbar = hbar;
        const double v_classical = packet.p_center / particle.mass;
        for (const auto& p : rec.points) {
            e.max_position_deviation = std::max(
                e.max_position_deviation, std::abs(p.positions[0].spatial(0) - v_classical * p.sigma));
            e.max_tau_deviation =
                std::max(e.max_tau_deviation, std::abs(p.proper_times[0] - p.sigma));
            e.max_q_rel = std::max(e.max_q_rel, std::abs(p.q_over_m2c2[0]));
        }
        report.entries.push_back(e);
    }

    // least-squares slope of ln(max_q_rel) against ln(hbar)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(report.entries.size());
    for (const auto& e : report.entries) {
        const double lx = std::log(e.hbar), ly = std::log(std::max(e.max_q_rel, 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    report.q_scaling_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return report;
}

}  // namespace bohmflow

#endif  // BOHMFLOW_DYNAMICS_HPP
