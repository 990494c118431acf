#ifndef BOHMFLOW_NONRELATIVISTIC_HPP
#define BOHMFLOW_NONRELATIVISTIC_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "bohmflow/dynamics.hpp"
#include "bohmflow/errors.hpp"
#include "bohmflow/minkowski.hpp"
#include "bohmflow/wavefunction.hpp"

namespace bohmflow {

/// Purely spatial D-dim vector for the non-relativistic configuration space.
struct SpatialVector {
    std::array<double, 3> c{};
    int dim = 1;

    SpatialVector() = default;
    explicit SpatialVector(int d) : dim(d) {}
    explicit SpatialVector(double x) : dim(1) { c[0] = x; }

    double operator[](int j) const { return c[static_cast<std::size_t>(j)]; }
    double& operator[](int j) { return c[static_cast<std::size_t>(j)]; }

    SpatialVector& operator+=(const SpatialVector& o) {
        for (int j = 0; j < dim; ++j) c[static_cast<std::size_t>(j)] += o[j];
        return *this;
    }
    SpatialVector& operator*=(double s) {
        for (int j = 0; j < dim; ++j) c[static_cast<std::size_t>(j)] *= s;
        return *this;
    }
    friend SpatialVector operator+(SpatialVector a, const SpatialVector& b) { return a += b; }
    friend SpatialVector operator*(double s, SpatialVector v) { return v *= s; }

    bool finite() const {
        for (int j = 0; j < dim; ++j)
            if (!std::isfinite(c[static_cast<std::size_t>(j)])) return false;
        return true;
    }
};

using SpatialConfiguration = std::vector<SpatialVector>;

/// Integration constants of the decoupled temporal dynamics T_i = sigma +
/// delta_i, together with the clock precision that decides whether the
/// single-time reduction is justified.
struct TemporalOffsets {
    std::vector<double> deltas;
    double epsilon_clock = 0.0;

    /// Lambda = max |delta_i - delta_j|, always recomputed.
    double lambda() const {
        if (deltas.empty()) return 0.0;
        const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
        return *hi - *lo;
    }
};

/// All deltas replaced by their mean; only allowed while the clocks cannot
/// resolve their spread (epsilon > Lambda).
inline TemporalOffsets single_time_reduction(const TemporalOffsets& offsets) {
    const double lambda = offsets.lambda();
    if (!(offsets.epsilon_clock > lambda))
        throw ReductionNotJustified("single_time_reduction: clock precision epsilon = " +
                                        std::to_string(offsets.epsilon_clock) +
                                        " cannot hide offset spread Lambda = " +
                                        std::to_string(lambda),
                                    lambda, offsets.epsilon_clock);
    TemporalOffsets out = offsets;
    double mean = 0.0;
    for (double d : offsets.deltas) mean += d;
    mean /= offsets.deltas.empty() ? 1.0 : static_cast<double>(offsets.deltas.size());
    std::fill(out.deltas.begin(), out.deltas.end(), mean);
    return out;
}

// ---------------------------------------------------------------------------
// Phase redefinition  S~ = S + c^2 sum_j m_j t_j
// ---------------------------------------------------------------------------

struct NRPhaseGradient {
    SpatialVector grad;   // unchanged spatial gradient of S (= of S~)
    double dS_dt = 0.0;   // dS~/dt for one particle
};

/// Gradient-level phase redefinition: spatial parts are untouched,
/// dS~/dt_i = dS/dt_i + m_i c^2.  The temporal real-metric component of a
/// phase-gradient four-vector is -(1/c) dS/dt.
inline std::vector<NRPhaseGradient> phase_redefine(const std::vector<FourVector>& grad_S,
                                                   const std::vector<ParticleParams>& particles,
                                                   const Constants& constants) {
    if (grad_S.size() != particles.size())
        throw ConfigurationError("phase_redefine: gradient/particle count mismatch");
    std::vector<NRPhaseGradient> out;
    out.reserve(grad_S.size());
    const double c = constants.c;
    for (std::size_t i = 0; i < grad_S.size(); ++i) {
        NRPhaseGradient g;
        g.grad.dim = grad_S[i].dim();
        for (int j = 0; j < grad_S[i].dim(); ++j) g.grad[j] = grad_S[i].spatial(j);
        const double dS_dt = -c * grad_S[i].temporal();
        g.dS_dt = dS_dt + particles[i].mass * c * c;
        out.push_back(g);
    }
    return out;
}

/// Real-metric form of the temporal-gradient identity used by the limit:
/// returns g_t - (m c - (1/c) dS~/dt), which must vanish.
inline double phase_identity_residual(const FourVector& grad_S_i, const NRPhaseGradient& nr_i,
                                      const ParticleParams& particle, const Constants& constants) {
    return grad_S_i.temporal() -
           (particle.mass * constants.c - nr_i.dS_dt / constants.c);
}

// ---------------------------------------------------------------------------
// dT/dsigma = 1 check
// ---------------------------------------------------------------------------

struct DecouplingReport {
    double v_over_c = 0.0;
    double max_deviation = 0.0;  // max |dT_i/dsigma - 1| over the sample
    double K = 0.0;              // max_deviation / (v/c)^2
};

template <SpacetimeWaveFunction W>
DecouplingReport temporal_decoupling_check(const W& psi, const EMPotential& field,
                                           const std::vector<Configuration>& sample_points,
                                           double v_over_c) {
    if (!(v_over_c > 0.0))
        throw ConfigurationError("temporal_decoupling_check: v_over_c must be > 0");
    DecouplingReport rep;
    rep.v_over_c = v_over_c;
    const double c = psi.constants().c;
    for (const auto& q : sample_points) {
        const auto v = guide_velocity(psi, field, q);
        for (const auto& vi : v)
            rep.max_deviation = std::max(rep.max_deviation, std::abs(vi.temporal() / c - 1.0));
    }
    rep.K = rep.max_deviation / (v_over_c * v_over_c);
    return rep;
}

// ---------------------------------------------------------------------------
// Non-relativistic multi-time wave function (exact NR dispersion mode sums)
// ---------------------------------------------------------------------------

struct NRTerm {
    cplx coefficient{1.0, 0.0};
    std::vector<SpatialVector> k;  // one wavevector per particle
};

/// Finite superposition of NR plane-wave products.  Each term carries phase
///   sum_i (k_i . x_i - Omega_i t_i),  Omega_i = hbar |k_i|^2 / (2 m_i) + e_i phi_i / hbar,
/// so the multi-time Schroedinger equations hold exactly (phi_i constant).
class NRWaveFunction {
  public:
    NRWaveFunction(std::vector<NRTerm> terms, std::vector<ParticleParams> particles,
                   Constants constants, std::vector<double> potential_phi = {})
        : terms_(std::move(terms)),
          particles_(std::move(particles)),
          constants_(constants),
          potential_phi_(std::move(potential_phi)) {
        constants_.validate();
        if (terms_.empty()) throw ConfigurationError("NRWaveFunction: needs >= 1 term");
        for (const auto& p : particles_) p.validate();
        if (potential_phi_.empty()) potential_phi_.assign(particles_.size(), 0.0);
        if (potential_phi_.size() != particles_.size())
            throw ConfigurationError("NRWaveFunction: potential_phi size mismatch");
        dim_ = terms_.front().k.empty() ? 1 : terms_.front().k.front().dim;
        double max_c2 = 0.0;
        for (const auto& t : terms_) {
            if (t.k.size() != particles_.size())
                throw ConfigurationError("NRWaveFunction: every term needs one k per particle");
            for (const auto& kv : t.k)
                if (kv.dim != dim_) throw ConfigurationError("NRWaveFunction: dim mismatch");
            max_c2 = std::max(max_c2, std::norm(t.coefficient));
        }
        node_epsilon_ = 1e-12 * max_c2;
    }

    std::size_t num_particles() const { return particles_.size(); }
    int dim() const { return dim_; }
    const std::vector<ParticleParams>& particles() const { return particles_; }
    const Constants& constants() const { return constants_; }
    const std::vector<NRTerm>& terms() const { return terms_; }
    const std::vector<double>& potential_phi() const { return potential_phi_; }
    double node_epsilon() const { return node_epsilon_; }

    double term_frequency(const NRTerm& t, std::size_t i) const {
        double k2 = 0.0;
        for (int j = 0; j < dim_; ++j) k2 += t.k[i][j] * t.k[i][j];
        return constants_.hbar * k2 / (2.0 * particles_[i].mass) +
               particles_[i].charge * potential_phi_[i] / constants_.hbar;
    }

    double term_phase(const NRTerm& t, const SpatialConfiguration& x,
                      const std::vector<double>& times) const {
        double phase = 0.0;
        for (std::size_t i = 0; i < particles_.size(); ++i) {
            for (int j = 0; j < dim_; ++j) phase += t.k[i][j] * x[i][j];
            phase -= term_frequency(t, i) * times[i];
        }
        return phase;
    }

    cplx evaluate(const SpatialConfiguration& x, const std::vector<double>& times) const {
        cplx psi{0.0, 0.0};
        for (const auto& t : terms_) psi += t.coefficient * std::polar(1.0, term_phase(t, x, times));
        return psi;
    }

    /// Residual of i hbar d psi/dt_i = -(hbar^2/2m_i) lap_i psi + e_i phi_i psi,
    /// relative to the magnitude of its largest side.
    double schroedinger_residual(const SpatialConfiguration& x, const std::vector<double>& times,
                                 std::size_t i) const {
        cplx lhs{0.0, 0.0}, kinetic{0.0, 0.0}, potential{0.0, 0.0};
        for (const auto& t : terms_) {
            const cplx v = t.coefficient * std::polar(1.0, term_phase(t, x, times));
            lhs += constants_.hbar * term_frequency(t, i) * v;  // i hbar (-i Omega) v
            double k2 = 0.0;
            for (int j = 0; j < dim_; ++j) k2 += t.k[i][j] * t.k[i][j];
            kinetic += constants_.hbar * constants_.hbar * k2 / (2.0 * particles_[i].mass) * v;
            potential += particles_[i].charge * potential_phi_[i] * v;
        }
        const cplx rhs = kinetic + potential;
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        return std::abs(lhs - rhs) / scale;
    }

  private:
    std::vector<NRTerm> terms_;
    std::vector<ParticleParams> particles_;
    Constants constants_;
    std::vector<double> potential_phi_;
    int dim_ = 1;
    double node_epsilon_ = 0.0;
};

/// Single-particle NR mode sum with the same Gaussian coefficient profile as
/// the relativistic packet builder; sum |c|^2 = 1.
inline NRWaveFunction nr_gaussian_packet(double center_k, double width, int n_modes,
                                         const ParticleParams& particle,
                                         const Constants& constants) {
    if (!(width > 0.0)) throw ConfigurationError("nr_gaussian_packet: width must be > 0");
    if (n_modes != 1 && n_modes < 3)
        throw ConfigurationError("nr_gaussian_packet: n_modes must be 1 or >= 3");
    std::vector<NRTerm> terms;
    terms.reserve(static_cast<std::size_t>(n_modes));
    const double half_span = 4.0 / width;
    double norm2 = 0.0;
    for (int j = 0; j < n_modes; ++j) {
        const double frac = (n_modes == 1) ? 0.0 : 2.0 * j / (n_modes - 1.0) - 1.0;
        const double dk = frac * half_span;
        const double w = std::exp(-0.5 * dk * dk * width * width);
        NRTerm t;
        t.coefficient = cplx(w, 0.0);
        t.k.push_back(SpatialVector(center_k + dk));
        terms.push_back(std::move(t));
        norm2 += w * w;
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& t : terms) t.coefficient *= scale;
    return NRWaveFunction(std::move(terms), {particle}, constants);
}

// ---------------------------------------------------------------------------
// Conditional wave function  phi(x, sigma) = psi(x, sigma + delta_1, ...)
// ---------------------------------------------------------------------------

struct NRPolarData {
    double rho = 0.0;
    std::vector<SpatialVector> grad_S;  // grad S~ per particle
};

class ConditionalWaveFunction {
  public:
    ConditionalWaveFunction(NRWaveFunction psi, TemporalOffsets offsets)
        : psi_(std::move(psi)), offsets_(std::move(offsets)) {
        if (offsets_.deltas.size() != psi_.num_particles())
            throw ConfigurationError("ConditionalWaveFunction: one delta per particle required");
    }

    const NRWaveFunction& base() const { return psi_; }
    const TemporalOffsets& offsets() const { return offsets_; }
    std::size_t num_particles() const { return psi_.num_particles(); }
    int dim() const { return psi_.dim(); }

    std::vector<double> times_at(double sigma) const {
        std::vector<double> t(offsets_.deltas.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = sigma + offsets_.deltas[i];
        return t;
    }

    cplx evaluate(const SpatialConfiguration& x, double sigma) const {
        return psi_.evaluate(x, times_at(sigma));
    }

    NRPolarData polar_data(const SpatialConfiguration& x, double sigma) const {
        const auto times = times_at(sigma);
        const std::size_t n = psi_.num_particles();
        std::vector<cplx> term_values(psi_.terms().size());
        cplx phi{0.0, 0.0};
        for (std::size_t t = 0; t < psi_.terms().size(); ++t) {
            term_values[t] = psi_.terms()[t].coefficient *
                             std::polar(1.0, psi_.term_phase(psi_.terms()[t], x, times));
            phi += term_values[t];
        }
        const double rho = std::norm(phi);
        if (!(rho > psi_.node_epsilon()))
            throw NodeProximityError("conditional wave function node: |phi|^2 = " +
                                         std::to_string(rho),
                                     rho);
        NRPolarData out;
        out.rho = rho;
        out.grad_S.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            SpatialVector g(psi_.dim());
            for (int j = 0; j < psi_.dim(); ++j) {
                cplx d{0.0, 0.0};
                for (std::size_t t = 0; t < term_values.size(); ++t)
                    d += cplx(0.0, 1.0) * psi_.terms()[t].k[i][j] * term_values[t];
                g[j] = psi_.constants().hbar * (d / phi).imag();
            }
            out.grad_S.push_back(g);
        }
        return out;
    }

    /// Residual of the sigma-parameterized Schroedinger-like equation
    /// i hbar d phi/dsigma = -sum_i (hbar^2/2m_i) lap_i phi + V phi.
    double sigma_equation_residual(const SpatialConfiguration& x, double sigma) const {
        const auto times = times_at(sigma);
        cplx lhs{0.0, 0.0}, rhs{0.0, 0.0};
        for (const auto& t : psi_.terms()) {
            const cplx v = t.coefficient * std::polar(1.0, psi_.term_phase(t, x, times));
            double omega_total = 0.0, kinetic = 0.0, potential = 0.0;
            for (std::size_t i = 0; i < psi_.num_particles(); ++i) {
                omega_total += psi_.term_frequency(t, i);
                double k2 = 0.0;
                for (int j = 0; j < psi_.dim(); ++j) k2 += t.k[i][j] * t.k[i][j];
                kinetic += psi_.constants().hbar * psi_.constants().hbar * k2 /
                           (2.0 * psi_.particles()[i].mass);
                potential += psi_.particles()[i].charge * psi_.potential_phi()[i];
            }
            lhs += psi_.constants().hbar * omega_total * v;
            rhs += (kinetic + potential) * v;
        }
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        return std::abs(lhs - rhs) / scale;
    }

  private:
    NRWaveFunction psi_;
    TemporalOffsets offsets_;
};

inline ConditionalWaveFunction conditional_wavefunction(NRWaveFunction psi,
                                                        TemporalOffsets offsets) {
    return ConditionalWaveFunction(std::move(psi), std::move(offsets));
}

// ---------------------------------------------------------------------------
// NR guide-equation integration  dX_i/dsigma = (1/m_i) grad_i S~
// ---------------------------------------------------------------------------

struct NRTrajectoryPoint {
    double sigma = 0.0;
    SpatialConfiguration positions;
    std::vector<SpatialVector> velocities;
};

struct NRTrajectoryRecord {
    std::vector<NRTrajectoryPoint> points;
    bool completed = true;
    std::string halt_reason;
};

inline std::vector<SpatialVector> nr_guide_velocity(const ConditionalWaveFunction& phi,
                                                    const SpatialConfiguration& x, double sigma) {
    const NRPolarData pd = phi.polar_data(x, sigma);
    std::vector<SpatialVector> v;
    v.reserve(phi.num_particles());
    for (std::size_t i = 0; i < phi.num_particles(); ++i)
        v.push_back((1.0 / phi.base().particles()[i].mass) * pd.grad_S[i]);
    return v;
}

inline NRTrajectoryRecord nr_integrate(const ConditionalWaveFunction& phi,
                                       const SpatialConfiguration& initial,
                                       const IntegratorConfig& config) {
    config.validate();
    if (initial.size() != phi.num_particles())
        throw ConfigurationError("nr_integrate: initial configuration size mismatch");

    auto add_scaled = [](const SpatialConfiguration& q, const std::vector<SpatialVector>& v,
                         double s) {
        SpatialConfiguration out = q;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * v[i];
        return out;
    };

    NRTrajectoryRecord rec;
    rec.points.reserve(static_cast<std::size_t>(config.n_steps) + 1);
    SpatialConfiguration q = initial;
    double sigma = 0.0;
    try {
        rec.points.push_back({sigma, q, nr_guide_velocity(phi, q, sigma)});
        for (int step = 0; step < config.n_steps; ++step) {
            const double h = config.d_sigma;
            if (config.method == IntegratorConfig::Method::Euler) {
                q = add_scaled(q, rec.points.back().velocities, h);
            } else {
                const auto k1 = nr_guide_velocity(phi, q, sigma);
                const auto k2 = nr_guide_velocity(phi, add_scaled(q, k1, 0.5 * h), sigma + 0.5 * h);
                const auto k3 = nr_guide_velocity(phi, add_scaled(q, k2, 0.5 * h), sigma + 0.5 * h);
                const auto k4 = nr_guide_velocity(phi, add_scaled(q, k3, h), sigma + h);
                for (std::size_t i = 0; i < q.size(); ++i)
                    q[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            sigma = (step + 1) * config.d_sigma;
            for (const auto& xi : q)
                if (!xi.finite())
                    throw IntegrationError("nr_integrate: non-finite state at sigma = " +
                                           std::to_string(sigma));
            rec.points.push_back({sigma, q, nr_guide_velocity(phi, q, sigma)});
        }
    } catch (const NodeProximityError& e) {
        rec.completed = false;
        rec.halt_reason = "node proximity at sigma = " + std::to_string(sigma) + " (rho = " +
                          std::to_string(e.rho) + ")";
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Relativistic vs non-relativistic comparison
// ---------------------------------------------------------------------------

struct LimitComparisonReport {
    double v_over_c = 0.0;
    double max_deviation = 0.0;      // relative to the displacement scale
    double displacement_scale = 0.0;
    int points_compared = 0;
};

/// Integrates the relativistic system in sigma and the NR system in its own
/// sigma, then compares spatial positions at equal frame times T, using the
/// recorded T(sigma) of the relativistic run (t = sigma + delta holds only in
/// the limit, so T is matched explicitly).  Single particle, A = 0.
inline LimitComparisonReport limit_comparison(const ModeSumWaveFunction& rel_psi,
                                              const NRWaveFunction& nr_psi, double x0,
                                              const IntegratorConfig& config, double v_over_c,
                                              double delta = 0.0) {
    if (rel_psi.num_particles() != 1 || nr_psi.num_particles() != 1)
        throw ConfigurationError("limit_comparison: single-particle scenarios only");
    const EMPotential field = EMPotential::zero();
    const Configuration rel_initial{FourVector(x0, 0.0)};
    const TrajectoryRecord rel = integrate(rel_psi, field, rel_initial, config);

    // NR span padded so that every relativistic frame time stays in range.
    IntegratorConfig nr_config = config;
    const double t_max = rel.points.back().positions[0].temporal() / rel_psi.constants().c;
    nr_config.n_steps = static_cast<int>(std::ceil((t_max - delta) / config.d_sigma)) + 2;
    const ConditionalWaveFunction phi(nr_psi, TemporalOffsets{{delta}, 0.0});
    const NRTrajectoryRecord nr = nr_integrate(phi, {SpatialVector(x0)}, nr_config);

    LimitComparisonReport rep;
    rep.v_over_c = v_over_c;
    for (const auto& p : nr.points)
        rep.displacement_scale =
            std::max(rep.displacement_scale, std::abs(p.positions[0][0] - x0));
    rep.displacement_scale = std::max(rep.displacement_scale, 1e-300);

    const double nr_sigma_max = nr.points.back().sigma;
    for (const auto& p : rel.points) {
        const double t = p.positions[0].temporal() / rel_psi.constants().c;
        const double s = t - delta;  // NR sigma matching this frame time
        if (s < 0.0 || s > nr_sigma_max) continue;
        const double idx = s / nr_config.d_sigma;
        const std::size_t j0 = std::min(static_cast<std::size_t>(idx), nr.points.size() - 2);
        const double w = idx - static_cast<double>(j0);
        const double x_nr = (1.0 - w) * nr.points[j0].positions[0][0] +
                            w * nr.points[j0 + 1].positions[0][0];
        const double dev = std::abs(p.positions[0].spatial(0) - x_nr);
        rep.max_deviation = std::max(rep.max_deviation, dev / rep.displacement_scale);
        ++rep.points_compared;
    }
    if (rep.points_compared == 0)
        throw ConfigurationError("limit_comparison: no overlapping frame times to compare");
    return rep;
}

}  // namespace bohmflow

#endif  // BOHMFLOW_NONRELATIVISTIC_HPP
