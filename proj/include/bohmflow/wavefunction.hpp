#ifndef BOHMFLOW_WAVEFUNCTION_HPP
#define BOHMFLOW_WAVEFUNCTION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "bohmflow/errors.hpp"
#include "bohmflow/gauge.hpp"
#include "bohmflow/minkowski.hpp"

namespace bohmflow {

using cplx = std::complex<double>;

/// One plane-wave factor exp(i(k.x - w t)) bound to one particle.  The
/// frequency always comes from the mass shell,
///   hbar^2 (w^2/c^2 - |k|^2) = m^2 c^2,
/// `branch` selecting the sign of the root.
struct PlaneWaveMode {
    std::array<double, 3> k{};  // 1/length
    double omega = 0.0;         // 1/time, derived
    int dim = 1;
    int branch = +1;

    double k_norm2() const {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += k[static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(j)];
        return s;
    }

    /// Wave four-vector (k, w/c) in the real-metric representation; the phase
    /// at an event x is minkowski_dot(wave_vector, x).
    FourVector wave_vector(const Constants& constants) const {
        FourVector p(dim);
        for (int j = 0; j < dim; ++j) p.spatial(j) = k[static_cast<std::size_t>(j)];
        p.temporal() = omega / constants.c;
        return p;
    }
};

inline PlaneWaveMode on_shell_mode(const std::vector<double>& k, const ParticleParams& particle,
                                   const Constants& constants, int branch = +1) {
    if (k.empty() || k.size() > 3)
        throw ConfigurationError("on_shell_mode: wavevector must have 1..3 components");
    if (branch != 1 && branch != -1)
        throw ConfigurationError("on_shell_mode: branch must be +1 or -1");
    PlaneWaveMode m;
    m.dim = static_cast<int>(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) m.k[j] = k[j];
    const double mc_over_hbar = particle.mass * constants.c / constants.hbar;
    m.omega = branch * constants.c * std::sqrt(m.k_norm2() + mc_over_hbar * mc_over_hbar);
    m.branch = branch;
    return m;
}

/// hbar^2 (w^2/c^2 - |k|^2) - m^2 c^2; zero when the mode sits on the shell.
inline double mass_shell_defect(const PlaneWaveMode& mode, const ParticleParams& particle,
                                const Constants& constants) {
    const double h2 = constants.hbar * constants.hbar;
    return h2 * (mode.omega * mode.omega / (constants.c * constants.c) - mode.k_norm2()) -
           particle.mass * particle.mass * constants.c * constants.c;
}

/// Product of one mode per particle with a complex coefficient.
struct ProductTerm {
    cplx coefficient{1.0, 0.0};
    std::vector<PlaneWaveMode> modes;  // length N
};

/// Polar decomposition data at one configuration: rho = |psi|^2, the phase
/// gradients dS/dx_mu per particle, and the quantum term hbar^2 box R / R.
struct PolarData {
    double rho = 0.0;
    std::vector<FourVector> grad_S;      // action/length units
    std::vector<double> quantum_term;    // momentum^2 units
};

namespace detail {

/// Complex-valued four-vector used for log-derivatives of psi.
struct CGradient {
    std::array<cplx, 3> spatial{};
    cplx temporal{};
    int dim = 1;
};

inline FourVector imag_part(const CGradient& g) {
    FourVector v(g.dim);
    for (int j = 0; j < g.dim; ++j) v.spatial(j) = g.spatial[static_cast<std::size_t>(j)].imag();
    v.temporal() = g.temporal.imag();
    return v;
}

}  // namespace detail

/// Finite superposition of product plane-wave terms over N particles.  The
/// sum solves the N free Klein-Gordon equations exactly, so psi, its first
/// derivatives and its d'Alembertians are all available in closed form.
class ModeSumWaveFunction {
  public:
    ModeSumWaveFunction(std::vector<ProductTerm> terms, std::vector<ParticleParams> particles,
                        Constants constants)
        : terms_(std::move(terms)), particles_(std::move(particles)), constants_(constants) {
        constants_.validate();
        if (terms_.empty()) throw ConfigurationError("ModeSumWaveFunction: needs >= 1 term");
        if (particles_.empty()) throw ConfigurationError("ModeSumWaveFunction: needs >= 1 particle");
        for (const auto& p : particles_) p.validate();
        dim_ = terms_.front().modes.empty() ? 1 : terms_.front().modes.front().dim;
        double max_c2 = 0.0;
        for (auto& t : terms_) {
            if (t.modes.size() != particles_.size())
                throw ConfigurationError("ModeSumWaveFunction: every term needs one mode per particle");
            for (std::size_t i = 0; i < t.modes.size(); ++i) {
                auto& m = t.modes[i];
                if (m.dim != dim_)
                    throw ConfigurationError("ModeSumWaveFunction: inconsistent spatial dimension");
                // re-derive omega; modes loaded from files may carry none
                std::vector<double> kv(m.k.begin(), m.k.begin() + m.dim);
                m = on_shell_mode(kv, particles_[i], constants_, m.branch);
            }
            max_c2 = std::max(max_c2, std::norm(t.coefficient));
        }
        node_epsilon_ = 1e-12 * max_c2;
    }

    std::size_t num_particles() const { return particles_.size(); }
    int dim() const { return dim_; }
    Metric metric() const { return Metric(dim_); }
    const std::vector<ParticleParams>& particles() const { return particles_; }
    const Constants& constants() const { return constants_; }
    const std::vector<ProductTerm>& terms() const { return terms_; }
    double node_epsilon() const { return node_epsilon_; }

    /// Phase of one term at a configuration: sum_i (k.x_i - (w/c) ct_i).
    double term_phase(const ProductTerm& t, const Configuration& q) const {
        double phase = 0.0;
        for (std::size_t i = 0; i < particles_.size(); ++i) {
            const auto& m = t.modes[i];
            const auto& x = q[i];
            for (int j = 0; j < dim_; ++j) phase += m.k[static_cast<std::size_t>(j)] * x.spatial(j);
            phase -= m.omega / constants_.c * x.temporal();
        }
        return phase;
    }

    cplx evaluate(const Configuration& q) const {
        check_configuration(q);
        cplx psi{0.0, 0.0};
        for (const auto& t : terms_) psi += t.coefficient * std::polar(1.0, term_phase(t, q));
        return psi;
    }

    double density(const Configuration& q) const { return std::norm(evaluate(q)); }

    /// rho, dS/dx_mu per particle, and hbar^2 box_i R / R per particle, all
    /// from analytic derivatives of the mode sum via
    ///   hbar^2 box R / R = hbar^2 Re(box psi/psi) + (Im grad psi/psi).(Im grad psi/psi) hbar^2.
    PolarData polar_data(const Configuration& q) const {
        check_configuration(q);
        const std::size_t n = particles_.size();
        std::vector<cplx> term_values(terms_.size());
        cplx psi{0.0, 0.0};
        for (std::size_t t = 0; t < terms_.size(); ++t) {
            term_values[t] = terms_[t].coefficient * std::polar(1.0, term_phase(terms_[t], q));
            psi += term_values[t];
        }
        const double rho = std::norm(psi);
        if (!(rho > node_epsilon_))
            throw NodeProximityError("polar_data: |psi|^2 = " + std::to_string(rho) +
                                         " at or below node threshold",
                                     rho);

        PolarData out;
        out.rho = rho;
        out.grad_S.reserve(n);
        out.quantum_term.reserve(n);
        const double hbar = constants_.hbar;
        const double c = constants_.c;
        for (std::size_t i = 0; i < n; ++i) {
            detail::CGradient grad;  // grad_i psi (real-metric components)
            grad.dim = dim_;
            cplx box{0.0, 0.0};  // box_i psi
            for (std::size_t t = 0; t < terms_.size(); ++t) {
                const auto& m = terms_[t].modes[i];
                const cplx iv = cplx(0.0, 1.0) * term_values[t];
                for (int j = 0; j < dim_; ++j)
                    grad.spatial[static_cast<std::size_t>(j)] += m.k[static_cast<std::size_t>(j)] * iv;
                grad.temporal += (m.omega / c) * iv;
                box += (m.omega * m.omega / (c * c) - m.k_norm2()) * term_values[t];
            }
            detail::CGradient log_grad = grad;
            for (int j = 0; j < dim_; ++j) log_grad.spatial[static_cast<std::size_t>(j)] /= psi;
            log_grad.temporal /= psi;
            const FourVector im = detail::imag_part(log_grad);
            out.grad_S.push_back(hbar * im);
            const double q_i = hbar * hbar * ((box / psi).real() + minkowski_dot(im, im));
            out.quantum_term.push_back(q_i);
        }
        return out;
    }

    /// |hbar^2 box_i psi - m_i^2 c^2 psi| / (m_i^2 c^2 |psi|); zero for exact
    /// solutions of the free equation.
    double kg_residual(const Configuration& q, std::size_t i) const {
        check_configuration(q);
        cplx psi{0.0, 0.0}, box{0.0, 0.0};
        for (const auto& t : terms_) {
            const cplx v = t.coefficient * std::polar(1.0, term_phase(t, q));
            psi += v;
            const auto& m = t.modes[i];
            box += (m.omega * m.omega / (constants_.c * constants_.c) - m.k_norm2()) * v;
        }
        const double m2c2 =
            particles_[i].mass * particles_[i].mass * constants_.c * constants_.c;
        const double h2 = constants_.hbar * constants_.hbar;
        return std::abs(h2 * box - m2c2 * psi) / (m2c2 * std::abs(psi));
    }

    /// Residual of the per-particle continuity equation for the free case,
    /// div_i (R^2 dS/dx_mu) = hbar Im( conj(grad psi).grad psi + conj(psi) box psi ),
    /// relative to the magnitude of its largest contribution.
    double continuity_residual(const Configuration& q, std::size_t i) const {
        check_configuration(q);
        cplx psi{0.0, 0.0}, box{0.0, 0.0};
        detail::CGradient grad;
        grad.dim = dim_;
        for (const auto& t : terms_) {
            const cplx v = t.coefficient * std::polar(1.0, term_phase(t, q));
            psi += v;
            const auto& m = t.modes[i];
            const cplx iv = cplx(0.0, 1.0) * v;
            for (int j = 0; j < dim_; ++j)
                grad.spatial[static_cast<std::size_t>(j)] += m.k[static_cast<std::size_t>(j)] * iv;
            grad.temporal += (m.omega / constants_.c) * iv;
            box += (m.omega * m.omega / (constants_.c * constants_.c) - m.k_norm2()) * v;
        }
        cplx contraction{0.0, 0.0};
        for (int j = 0; j < dim_; ++j) {
            const cplx g = grad.spatial[static_cast<std::size_t>(j)];
            contraction += std::conj(g) * g;
        }
        contraction -= std::conj(grad.temporal) * grad.temporal;
        const cplx psibox = std::conj(psi) * box;
        const double divergence = constants_.hbar * (contraction.imag() + psibox.imag());
        const double scale =
            constants_.hbar * std::max({std::abs(contraction), std::abs(psibox), 1e-300});
        return std::abs(divergence) / scale;
    }

  private:
    void check_configuration(const Configuration& q) const {
        if (q.size() != particles_.size())
            throw ConfigurationError("configuration has " + std::to_string(q.size()) +
                                     " entries, expected " + std::to_string(particles_.size()));
        for (const auto& x : q)
            if (x.dim() != dim_)
                throw ConfigurationError("configuration entry dimension mismatch");
    }

    std::vector<ProductTerm> terms_;
    std::vector<ParticleParams> particles_;
    Constants constants_;
    int dim_ = 1;
    double node_epsilon_ = 0.0;
};

/// psi multiplied by the local phase  prod_i exp(i e_i chi(x_i) / (hbar c)).
/// rho and the quantum term are untouched; the phase gradients shift by
/// (e_i/c) grad chi, which a compensating potential A + grad chi cancels in
/// the guide equations.
class GaugedWaveFunction {
  public:
    GaugedWaveFunction(ModeSumWaveFunction base, GaugeScalar chi)
        : base_(std::move(base)), chi_(std::move(chi)) {}

    std::size_t num_particles() const { return base_.num_particles(); }
    int dim() const { return base_.dim(); }
    Metric metric() const { return base_.metric(); }
    const std::vector<ParticleParams>& particles() const { return base_.particles(); }
    const Constants& constants() const { return base_.constants(); }
    double node_epsilon() const { return base_.node_epsilon(); }
    const ModeSumWaveFunction& base() const { return base_; }

    cplx evaluate(const Configuration& q) const {
        double phase = 0.0;
        const auto& parts = base_.particles();
        for (std::size_t i = 0; i < parts.size(); ++i)
            phase += parts[i].charge * chi_.value(q[i]) /
                     (base_.constants().hbar * base_.constants().c);
        return base_.evaluate(q) * std::polar(1.0, phase);
    }

    double density(const Configuration& q) const { return base_.density(q); }

    PolarData polar_data(const Configuration& q) const {
        PolarData d = base_.polar_data(q);
        const auto& parts = base_.particles();
        const double c = base_.constants().c;
        for (std::size_t i = 0; i < parts.size(); ++i)
            d.grad_S[i] += (parts[i].charge / c) * chi_.gradient(q[i]);
        return d;
    }

  private:
    ModeSumWaveFunction base_;
    GaugeScalar chi_;
};

inline GaugedWaveFunction gauge_transform(ModeSumWaveFunction psi, GaugeScalar chi) {
    return GaugedWaveFunction(std::move(psi), std::move(chi));
}

/// Single-particle mode sum with Gaussian-weighted coefficients
/// exp(-(k - center_k)^2 width^2 / 2) on a symmetric grid of n_modes points,
/// every mode on the positive shell, normalized to sum |c|^2 = 1.
/// n_modes = 1 collapses to a single plane wave at center_k.
inline ModeSumWaveFunction gaussian_packet(double center_k, double width, int n_modes,
                                           const ParticleParams& particle,
                                           const Constants& constants) {
    if (!(width > 0.0)) throw ConfigurationError("gaussian_packet: width must be > 0");
    if (n_modes != 1 && n_modes < 3)
        throw ConfigurationError("gaussian_packet: n_modes must be 1 or >= 3, got " +
                                 std::to_string(n_modes));
    std::vector<ProductTerm> terms;
    terms.reserve(static_cast<std::size_t>(n_modes));
    const double half_span = 4.0 / width;  // ~4 sigma of the coefficient weight
    double norm2 = 0.0;
    for (int j = 0; j < n_modes; ++j) {
        const double frac = (n_modes == 1) ? 0.0 : 2.0 * j / (n_modes - 1.0) - 1.0;
        const double k = center_k + frac * half_span;
        const double dk = k - center_k;
        const double w = std::exp(-0.5 * dk * dk * width * width);
        ProductTerm t;
        t.coefficient = cplx(w, 0.0);
        t.modes.push_back(on_shell_mode({k}, particle, constants, +1));
        terms.push_back(std::move(t));
        norm2 += w * w;
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& t : terms) t.coefficient *= scale;
    return ModeSumWaveFunction(std::move(terms), {particle}, constants);
}

/// Mode-wise boosted wave function: each wave four-vector (k, w/c) transforms
/// like an event, so psi'(boost x) = psi(x) and the mass shell is preserved.
inline ModeSumWaveFunction boosted_wavefunction(const ModeSumWaveFunction& psi, double beta,
                                                int axis = 0) {
    std::vector<ProductTerm> terms;
    terms.reserve(psi.terms().size());
    for (const auto& t : psi.terms()) {
        ProductTerm bt;
        bt.coefficient = t.coefficient;
        for (const auto& m : t.modes) {
            const FourVector kv = lorentz_boost(m.wave_vector(psi.constants()), beta, axis);
            PlaneWaveMode bm;
            bm.dim = m.dim;
            for (int j = 0; j < m.dim; ++j) bm.k[static_cast<std::size_t>(j)] = kv.spatial(j);
            bm.omega = kv.temporal() * psi.constants().c;  // re-derived on construction
            bm.branch = kv.temporal() >= 0.0 ? +1 : -1;
            bt.modes.push_back(bm);
        }
        terms.push_back(std::move(bt));
    }
    return ModeSumWaveFunction(std::move(terms), psi.particles(), psi.constants());
}

}  // namespace bohmflow

#endif  // BOHMFLOW_WAVEFUNCTION_HPP
