#ifndef BOHMFLOW_STATS_HPP
#define BOHMFLOW_STATS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "bohmflow/dynamics.hpp"
#include "bohmflow/errors.hpp"
#include "bohmflow/goodness_of_fit.hpp"
#include "bohmflow/minkowski.hpp"
#include "bohmflow/rng.hpp"
#include "bohmflow/wavefunction.hpp"

namespace bohmflow {

/// Axis-aligned bounds over the full N*(D+1)-dimensional configuration
/// spacetime.  Coordinate order: particle 0 (x_1..x_D, ct), particle 1, ...
struct SamplingBox {
    std::vector<double> lower, upper;

    int coords() const { return static_cast<int>(lower.size()); }

    void validate() const {
        if (lower.empty() || lower.size() != upper.size())
            throw ConfigurationError("SamplingBox: lower/upper must be non-empty and match");
        for (std::size_t q = 0; q < lower.size(); ++q)
            if (!(lower[q] < upper[q]))
                throw ConfigurationError("SamplingBox: bounds must be ordered, coordinate " +
                                         std::to_string(q));
    }

    double volume() const {
        double v = 1.0;
        for (std::size_t q = 0; q < lower.size(); ++q) v *= upper[q] - lower[q];
        return v;
    }

    bool contains(const std::vector<double>& p) const {
        for (std::size_t q = 0; q < lower.size(); ++q)
            if (p[q] < lower[q] || p[q] > upper[q]) return false;
        return true;
    }
};

inline Configuration coords_to_configuration(const std::vector<double>& coords, std::size_t n,
                                             int dim) {
    Configuration q;
    q.reserve(n);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        FourVector x(dim);
        for (int j = 0; j < dim; ++j) x.spatial(j) = coords[idx++];
        x.temporal() = coords[idx++];
        q.push_back(x);
    }
    return q;
}

inline std::vector<double> configuration_to_coords(const Configuration& q) {
    std::vector<double> c;
    for (const auto& x : q) {
        for (int j = 0; j < x.dim(); ++j) c.push_back(x.spatial(j));
        c.push_back(x.temporal());
    }
    return c;
}

namespace detail {

/// Phase coefficients of every term with respect to the flattened coordinates
/// (k for spatial slots, -w/c for temporal slots), so that the density
/// integrates over boxes in closed form pair by pair.
inline std::vector<std::vector<double>> phase_coefficients(const ModeSumWaveFunction& psi) {
    const int dim = psi.dim();
    const std::size_t n = psi.num_particles();
    std::vector<std::vector<double>> coeff;
    coeff.reserve(psi.terms().size());
    for (const auto& t : psi.terms()) {
        std::vector<double> row;
        row.reserve(n * static_cast<std::size_t>(dim + 1));
        for (std::size_t i = 0; i < n; ++i) {
            for (int j = 0; j < dim; ++j) row.push_back(t.modes[i].k[static_cast<std::size_t>(j)]);
            row.push_back(-t.modes[i].omega / psi.constants().c);
        }
        coeff.push_back(std::move(row));
    }
    return coeff;
}

/// int_a^b exp(i dk u) du, stable for small dk (b - a).
inline cplx interval_integral(double dk, double a, double b) {
    if (dk == 0.0) return {b - a, 0.0};
    const double z = dk * (b - a);
    if (std::abs(z) < 1e-6) {
        // (e^{iz} - 1)/(iz) expanded to fourth order
        const cplx series =
            cplx(1.0 - z * z / 6.0 + z * z * z * z / 120.0, z / 2.0 - z * z * z / 24.0);
        return std::polar(b - a, dk * a) * series;
    }
    const cplx num = std::polar(1.0, dk * b) - std::polar(1.0, dk * a);
    return num / cplx(0.0, dk);
}

}  // namespace detail

/// Exact integral of rho = |psi|^2 over an axis-aligned region.
inline double density_box_integral(const ModeSumWaveFunction& psi,
                                   const std::vector<double>& lower,
                                   const std::vector<double>& upper) {
    const auto coeff = detail::phase_coefficients(psi);
    const std::size_t n_coords = lower.size();
    cplx total{0.0, 0.0};
    for (std::size_t t = 0; t < coeff.size(); ++t)
        for (std::size_t s = 0; s < coeff.size(); ++s) {
            cplx prod = psi.terms()[t].coefficient * std::conj(psi.terms()[s].coefficient);
            for (std::size_t q = 0; q < n_coords; ++q)
                prod *= detail::interval_integral(coeff[t][q] - coeff[s][q], lower[q], upper[q]);
            total += prod;
        }
    return total.real();
}

/// Exact marginal CDF of rho restricted to `box` along one coordinate.
inline double marginal_cdf(const ModeSumWaveFunction& psi, const SamplingBox& box, int coord,
                           double value) {
    const double v = std::clamp(value, box.lower[static_cast<std::size_t>(coord)],
                                box.upper[static_cast<std::size_t>(coord)]);
    std::vector<double> upper = box.upper;
    upper[static_cast<std::size_t>(coord)] = v;
    const double part = density_box_integral(psi, box.lower, upper);
    const double whole = density_box_integral(psi, box.lower, box.upper);
    return std::clamp(part / whole, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Quantum-equilibrium sampling
// ---------------------------------------------------------------------------

enum class SampleMethod { rejection, metropolis };

struct MetropolisParams {
    double proposal_scale_divisor = 50.0;  // per-coordinate scale = extent / divisor
    int burn_in = 1000;
    int thinning = 10;
};

struct Ensemble {
    std::vector<std::vector<double>> samples;  // flattened coordinates
    std::uint64_t seed = 0;
    SampleMethod method = SampleMethod::rejection;
};

namespace detail {

inline std::vector<double> grid_scan_pass(const ModeSumWaveFunction& psi,
                                          const std::vector<double>& lower,
                                          const std::vector<double>& upper, int per_dim,
                                          double& max_density) {
    const int dims = static_cast<int>(lower.size());
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    std::vector<double> point(static_cast<std::size_t>(dims), 0.0), best = point;
    max_density = -1.0;
    const std::size_t n = psi.num_particles();
    const int dim = psi.dim();
    bool done = false;
    while (!done) {
        for (int q = 0; q < dims; ++q) {
            const std::size_t uq = static_cast<std::size_t>(q);
            const double frac = (idx[uq] + 0.5) / per_dim;
            point[uq] = lower[uq] + frac * (upper[uq] - lower[uq]);
        }
        const double rho = psi.density(coords_to_configuration(point, n, dim));
        if (rho > max_density) {
            max_density = rho;
            best = point;
        }
        int q = 0;
        for (; q < dims; ++q) {
            if (++idx[static_cast<std::size_t>(q)] < per_dim) break;
            idx[static_cast<std::size_t>(q)] = 0;
        }
        done = (q == dims);
    }
    return best;
}

/// Coarse scan plus one refinement pass around the best cell.
inline std::vector<double> grid_scan_max(const ModeSumWaveFunction& psi, const SamplingBox& box,
                                         double& max_density) {
    const int dims = box.coords();
    const int per_dim =
        std::clamp(static_cast<int>(std::ceil(std::pow(2e5, 1.0 / dims))), 4, 64);
    double coarse_max = 0.0;
    const auto coarse = grid_scan_pass(psi, box.lower, box.upper, per_dim, coarse_max);
    std::vector<double> lo(coarse.size()), hi(coarse.size());
    for (std::size_t q = 0; q < coarse.size(); ++q) {
        const double cell = (box.upper[q] - box.lower[q]) / per_dim;
        lo[q] = std::max(box.lower[q], coarse[q] - cell);
        hi[q] = std::min(box.upper[q], coarse[q] + cell);
    }
    double refined_max = 0.0;
    const auto refined = grid_scan_pass(psi, lo, hi, per_dim, refined_max);
    if (refined_max > coarse_max) {
        max_density = refined_max;
        return refined;
    }
    max_density = coarse_max;
    return coarse;
}

/// sup rho <= (sum |c_T|)^2 by the triangle inequality.
inline double density_upper_bound(const ModeSumWaveFunction& psi) {
    double s = 0.0;
    for (const auto& t : psi.terms()) s += std::abs(t.coefficient);
    return s * s;
}

}  // namespace detail

/// n configurations distributed proportionally to rho restricted to the box.
/// Rejection uses an envelope 1.5 * (grid-scan maximum); a candidate above the
/// envelope restarts the draw once with the exact coefficient bound so the
/// output distribution stays correct.  Metropolis runs a seeded random-walk
/// chain.  Identical (seed, method, box, n) give identical samples byte for
/// byte.  `rate_check_budget` is the proposal count after which the rejection
/// acceptance rate is required to exceed 1e-4.
inline Ensemble sample_equilibrium(const ModeSumWaveFunction& psi, const SamplingBox& box,
                                   std::size_t n, std::uint64_t seed,
                                   SampleMethod method = SampleMethod::rejection,
                                   const MetropolisParams& mp = {},
                                   std::size_t rate_check_budget = 200000) {
    box.validate();
    const int dims = box.coords();
    const std::size_t np = psi.num_particles();
    if (dims != static_cast<int>(np) * (psi.dim() + 1))
        throw ConfigurationError("sample_equilibrium: box has " + std::to_string(dims) +
                                 " coordinates, expected " +
                                 std::to_string(np * (psi.dim() + 1)));

    Ensemble ens;
    ens.seed = seed;
    ens.method = method;
    if (n == 0) return ens;  // empty ensemble is valid
    ens.samples.reserve(n);
    Rng rng(seed);

    if (method == SampleMethod::rejection) {
        double grid_max = 0.0;
        detail::grid_scan_max(psi, box, grid_max);
        double envelope = 1.5 * grid_max;
        if (!(envelope > 0.0))
            throw ConfigurationError("sample_equilibrium: density vanishes on the scan grid");
        std::size_t proposals = 0;
        const std::size_t rate_check = std::max<std::size_t>(rate_check_budget, 20 * n);
        std::vector<double> p(static_cast<std::size_t>(dims));
        while (ens.samples.size() < n) {
            for (int q = 0; q < dims; ++q)
                p[static_cast<std::size_t>(q)] = rng.uniform(box.lower[static_cast<std::size_t>(q)],
                                                             box.upper[static_cast<std::size_t>(q)]);
            ++proposals;
            const double rho = psi.density(coords_to_configuration(p, np, psi.dim()));
            if (rho > envelope) {
                // grid scan missed the peak: restart under the exact bound
                envelope = detail::density_upper_bound(psi);
                ens.samples.clear();
                proposals = 0;
                continue;
            }
            if (rng.uniform() * envelope < rho) ens.samples.push_back(p);
            if (proposals >= rate_check &&
                static_cast<double>(ens.samples.size()) < 1e-4 * static_cast<double>(proposals))
                throw EnvelopeTooLoose(
                    "sample_equilibrium: rejection acceptance rate below 1e-4 after " +
                    std::to_string(proposals) + " proposals; use the metropolis sampler");
        }
        return ens;
    }

    // Metropolis: Gaussian random-walk proposals, chain started at the coarse
    // grid maximum so the burn-in never begins inside a node.
    double start_rho = 0.0;
    std::vector<double> current = detail::grid_scan_max(psi, box, start_rho);
    double rho_current = start_rho;
    std::vector<double> scale(static_cast<std::size_t>(dims));
    for (int q = 0; q < dims; ++q)
        scale[static_cast<std::size_t>(q)] =
            (box.upper[static_cast<std::size_t>(q)] - box.lower[static_cast<std::size_t>(q)]) /
            mp.proposal_scale_divisor;
    std::vector<double> proposal(static_cast<std::size_t>(dims));
    long kept = -static_cast<long>(mp.burn_in);
    while (ens.samples.size() < n) {
        bool inside = true;
        for (int q = 0; q < dims; ++q) {
            proposal[static_cast<std::size_t>(q)] =
                current[static_cast<std::size_t>(q)] +
                scale[static_cast<std::size_t>(q)] * rng.normal();
            if (proposal[static_cast<std::size_t>(q)] < box.lower[static_cast<std::size_t>(q)] ||
                proposal[static_cast<std::size_t>(q)] > box.upper[static_cast<std::size_t>(q)])
                inside = false;
        }
        if (inside) {
            const double rho_prop = psi.density(coords_to_configuration(proposal, np, psi.dim()));
            if (rho_prop >= rho_current || rng.uniform() * rho_current < rho_prop) {
                current = proposal;
                rho_current = rho_prop;
            }
        }
        ++kept;
        if (kept > 0 && kept % mp.thinning == 0) ens.samples.push_back(current);
    }
    return ens;
}

// ---------------------------------------------------------------------------
// Equivariance test
// ---------------------------------------------------------------------------

struct CoordinateKS {
    double statistic = 0.0;
    double critical = 0.0;
    double pvalue = 1.0;
    bool passed = true;
};

struct EquivarianceOptions {
    double alpha = 0.01;
    double spatial_velocity_factor = 1.0;  // != 1 corrupts the flow deliberately
    double max_edge_loss = 0.05;
    bool throw_on_edge_loss = true;
    double margin_safety = 1.25;
    int max_probes = 1296;
};

struct EquivarianceReport {
    std::size_t n_requested = 0;
    std::size_t n_used = 0;
    double edge_loss = 1.0;
    int node_halts = 0;
    int probe_node_halts = 0;
    std::vector<double> drift, margin;
    SamplingBox window;
    std::vector<CoordinateKS> ks;
    ChiSquareResult chi2;
    bool chi2_passed = true;
    bool all_ks_passed = true;
    bool edge_loss_ok = true;
    double sigma_span = 0.0;
    std::uint64_t seed = 0;

    bool passed() const { return all_ks_passed && chi2_passed && edge_loss_ok; }
};

namespace detail {

inline unsigned worker_count() {
    unsigned w = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BOHMFLOW_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) w = std::min<unsigned>(w, static_cast<unsigned>(cap));
    }
    return w;
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers = std::min<unsigned>(worker_count(),
                                                std::max<std::size_t>(count / 64, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk, end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Samples the box from rho at sigma = 0, pushes every configuration through
/// the guide flow for sigma_span, and tests the pushed sample against the same
/// (sigma-independent) density rho.  Because the flow transports mass, the
/// comparison window is the box translated by the nominal bulk drift and
/// shrunk by a margin covering the displacement spread, both measured on a
/// deterministic probe grid of the *uncorrupted* field; samples outside the
/// window count as edge loss.
inline EquivarianceReport equivariance_test(const ModeSumWaveFunction& psi,
                                            const EMPotential& field, const SamplingBox& box,
                                            std::size_t n, std::uint64_t seed, double sigma_span,
                                            IntegratorConfig config,
                                            const EquivarianceOptions& options = {}) {
    box.validate();
    if (!(sigma_span > 0.0)) throw ConfigurationError("equivariance_test: sigma_span must be > 0");
    config.n_steps = std::max(1, static_cast<int>(std::lround(sigma_span / config.d_sigma)));
    config.d_sigma = sigma_span / config.n_steps;

    const int dims = box.coords();
    const std::size_t np = psi.num_particles();
    EquivarianceReport rep;
    rep.n_requested = n;
    rep.seed = seed;
    rep.sigma_span = sigma_span;

    // displacement field probes (nominal, uncorrupted flow)
    const int per_dim = std::max(
        3, static_cast<int>(std::floor(std::pow(double(options.max_probes), 1.0 / dims))));
    std::size_t n_probes = 1;
    for (int q = 0; q < dims; ++q) n_probes *= static_cast<std::size_t>(per_dim);
    std::vector<std::vector<double>> probe_disp(n_probes);
    std::vector<double> probe_weight(n_probes, 0.0);
    std::vector<std::uint8_t> probe_ok(n_probes, 0);
    detail::parallel_for(n_probes, [&](std::size_t p) {
        std::vector<double> point(static_cast<std::size_t>(dims));
        std::size_t rem = p;
        for (int q = 0; q < dims; ++q) {
            const int iq = static_cast<int>(rem % static_cast<std::size_t>(per_dim));
            rem /= static_cast<std::size_t>(per_dim);
            const double frac = (iq + 0.5) / per_dim;
            point[static_cast<std::size_t>(q)] =
                box.lower[static_cast<std::size_t>(q)] +
                frac * (box.upper[static_cast<std::size_t>(q)] - box.lower[static_cast<std::size_t>(q)]);
        }
        const Configuration q0 = coords_to_configuration(point, np, psi.dim());
        try {
            const Configuration q1 = flow_map(psi, field, q0, config);
            const auto c1 = configuration_to_coords(q1);
            std::vector<double> d(static_cast<std::size_t>(dims));
            for (int q = 0; q < dims; ++q)
                d[static_cast<std::size_t>(q)] =
                    c1[static_cast<std::size_t>(q)] - point[static_cast<std::size_t>(q)];
            probe_disp[p] = std::move(d);
            probe_weight[p] = psi.density(q0);
            probe_ok[p] = 1;
        } catch (const NodeProximityError&) {
            probe_ok[p] = 0;
        } catch (const IntegrationError&) {
            probe_ok[p] = 0;
        }
    });
    double wsum = 0.0;
    rep.drift.assign(static_cast<std::size_t>(dims), 0.0);
    for (std::size_t p = 0; p < n_probes; ++p) {
        if (!probe_ok[p]) {
            ++rep.probe_node_halts;
            continue;
        }
        wsum += probe_weight[p];
        for (int q = 0; q < dims; ++q)
            rep.drift[static_cast<std::size_t>(q)] += probe_weight[p] * probe_disp[p][static_cast<std::size_t>(q)];
    }
    if (rep.probe_node_halts > static_cast<int>(n_probes / 10) || wsum <= 0.0)
        throw InconclusiveDomain("equivariance_test: too many probe trajectories hit nodes", 1.0);
    for (auto& d : rep.drift) d /= wsum;
    rep.margin.assign(static_cast<std::size_t>(dims), 0.0);
    for (std::size_t p = 0; p < n_probes; ++p) {
        if (!probe_ok[p]) continue;
        for (int q = 0; q < dims; ++q)
            rep.margin[static_cast<std::size_t>(q)] =
                std::max(rep.margin[static_cast<std::size_t>(q)],
                         std::abs(probe_disp[p][static_cast<std::size_t>(q)] -
                                  rep.drift[static_cast<std::size_t>(q)]));
    }
    rep.window.lower.resize(static_cast<std::size_t>(dims));
    rep.window.upper.resize(static_cast<std::size_t>(dims));
    for (int q = 0; q < dims; ++q) {
        const std::size_t uq = static_cast<std::size_t>(q);
        rep.margin[uq] = options.margin_safety * rep.margin[uq] +
                         1e-9 * (box.upper[uq] - box.lower[uq]);
        rep.window.lower[uq] = box.lower[uq] + rep.drift[uq] + rep.margin[uq];
        rep.window.upper[uq] = box.upper[uq] + rep.drift[uq] - rep.margin[uq];
        if (!(rep.window.lower[uq] < rep.window.upper[uq]))
            throw InconclusiveDomain(
                "equivariance_test: displacement spread swallows the box; enlarge the box", 1.0);
    }

    // sample, push, window
    const Ensemble ens = sample_equilibrium(psi, box, n, seed, SampleMethod::rejection);
    std::vector<std::vector<double>> pushed(n);
    std::vector<std::uint8_t> ok(n, 0);
    detail::parallel_for(n, [&](std::size_t s) {
        try {
            const Configuration q1 = flow_map(psi, field,
                                              coords_to_configuration(ens.samples[s], np, psi.dim()),
                                              config, options.spatial_velocity_factor);
            pushed[s] = configuration_to_coords(q1);
            ok[s] = 1;
        } catch (const NodeProximityError&) {
            ok[s] = 0;
        } catch (const IntegrationError&) {
            ok[s] = 0;
        }
    });

    std::vector<std::vector<double>> retained;
    retained.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        if (!ok[s]) {
            ++rep.node_halts;
            continue;
        }
        if (rep.window.contains(pushed[s])) retained.push_back(pushed[s]);
    }
    rep.n_used = retained.size();
    rep.edge_loss = 1.0 - static_cast<double>(rep.n_used) / static_cast<double>(n);
    rep.edge_loss_ok = rep.edge_loss < options.max_edge_loss;
    if (!rep.edge_loss_ok && options.throw_on_edge_loss)
        throw InconclusiveDomain("equivariance_test: edge loss " + std::to_string(rep.edge_loss) +
                                     " >= " + std::to_string(options.max_edge_loss) +
                                     "; enlarge the box or shorten the span",
                                 rep.edge_loss);
    if (rep.n_used < 50)
        throw InconclusiveDomain("equivariance_test: too few samples retained", rep.edge_loss);

    // per-coordinate KS against the exact marginal of rho on the window
    for (int q = 0; q < dims; ++q) {
        std::vector<double> values;
        values.reserve(rep.n_used);
        for (const auto& s : retained) values.push_back(s[static_cast<std::size_t>(q)]);
        CoordinateKS ks;
        ks.statistic = ks_statistic(
            std::move(values), [&](double v) { return marginal_cdf(psi, rep.window, q, v); });
        ks.critical = ks_critical(rep.n_used, options.alpha);
        ks.pvalue = ks_pvalue(ks.statistic, rep.n_used);
        ks.passed = ks.statistic < ks.critical;
        rep.all_ks_passed = rep.all_ks_passed && ks.passed;
        rep.ks.push_back(ks);
    }

    // coarse-bin chi^2 over the configuration spacetime with exact cell masses
    const int bins_per_coord = std::clamp(
        static_cast<int>(std::floor(std::pow(static_cast<double>(rep.n_used) / 30.0, 1.0 / dims))),
        2, 8);
    std::size_t n_cells = 1;
    for (int q = 0; q < dims; ++q) n_cells *= static_cast<std::size_t>(bins_per_coord);
    std::vector<std::size_t> counts(n_cells, 0);
    for (const auto& s : retained) {
        std::size_t cell = 0;
        for (int q = dims - 1; q >= 0; --q) {
            const std::size_t uq = static_cast<std::size_t>(q);
            const double frac = (s[uq] - rep.window.lower[uq]) /
                                (rep.window.upper[uq] - rep.window.lower[uq]);
            const int b = std::min(bins_per_coord - 1,
                                   static_cast<int>(frac * bins_per_coord));
            cell = cell * static_cast<std::size_t>(bins_per_coord) + static_cast<std::size_t>(b);
        }
        ++counts[cell];
    }
    std::vector<double> probs(n_cells, 0.0);
    const double window_mass = density_box_integral(psi, rep.window.lower, rep.window.upper);
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        std::vector<double> lo = rep.window.lower, hi = rep.window.upper;
        std::size_t rem = cell;
        for (int q = 0; q < dims; ++q) {
            const std::size_t uq = static_cast<std::size_t>(q);
            const int b = static_cast<int>(rem % static_cast<std::size_t>(bins_per_coord));
            rem /= static_cast<std::size_t>(bins_per_coord);
            const double w = (rep.window.upper[uq] - rep.window.lower[uq]) / bins_per_coord;
            lo[uq] = rep.window.lower[uq] + b * w;
            hi[uq] = lo[uq] + w;
        }
        probs[cell] = density_box_integral(psi, lo, hi) / window_mass;
    }
    rep.chi2 = chi_square_gof(counts, probs, rep.n_used);
    rep.chi2_passed = rep.chi2.pvalue > options.alpha;
    return rep;
}

// ---------------------------------------------------------------------------
// Frame-independence of the probability assignment
// ---------------------------------------------------------------------------

struct FrameIndependenceReport {
    double beta = 0.0;
    double p_original = 0.0, se_original = 0.0;
    double p_boosted = 0.0, se_boosted = 0.0;
    double diff_over_se = 0.0;
    bool passed = true;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo estimate of the (unnormalized) probability integral of rho over
/// a region V in the original frame, against the boosted-psi integral over the
/// boosted region V'.  The Lorentz map has unit Jacobian so both target the
/// same number; agreement within 3 combined standard errors is required.
inline FrameIndependenceReport frame_independence_test(const ModeSumWaveFunction& psi,
                                                       const SamplingBox& box, double beta,
                                                       std::size_t n, std::uint64_t seed,
                                                       int axis = 0) {
    box.validate();
    if (psi.num_particles() != 1)
        throw ConfigurationError("frame_independence_test: single-particle scenarios only");
    if (std::abs(beta) > 0.6)
        throw ConfigurationError("frame_independence_test: |beta| must be <= 0.6");
    if (n == 0) throw ConfigurationError("frame_independence_test: need n > 0");
    const int dims = box.coords();
    const int dim = psi.dim();

    FrameIndependenceReport rep;
    rep.beta = beta;
    rep.n = n;
    rep.seed = seed;

    {  // original frame
        Rng rng(seed);
        std::vector<double> p(static_cast<std::size_t>(dims));
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            for (int q = 0; q < dims; ++q)
                p[static_cast<std::size_t>(q)] = rng.uniform(box.lower[static_cast<std::size_t>(q)],
                                                             box.upper[static_cast<std::size_t>(q)]);
            const double rho = psi.density(coords_to_configuration(p, 1, dim));
            sum += rho;
            sum2 += rho * rho;
        }
        const double mean = sum / static_cast<double>(n);
        const double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
        rep.p_original = box.volume() * mean;
        rep.se_original = box.volume() * std::sqrt(var / static_cast<double>(n));
    }

    {  // boosted frame: V' = boost(V), psi' = mode-wise boosted psi
        const ModeSumWaveFunction psi_b = boosted_wavefunction(psi, beta, axis);
        // bounding box of the boosted region from its corners
        std::vector<double> blo(static_cast<std::size_t>(dims)), bhi(static_cast<std::size_t>(dims));
        const std::size_t n_corners = std::size_t{1} << dims;
        bool first = true;
        for (std::size_t corner = 0; corner < n_corners; ++corner) {
            std::vector<double> c(static_cast<std::size_t>(dims));
            for (int q = 0; q < dims; ++q)
                c[static_cast<std::size_t>(q)] = (corner >> q) & 1
                                                     ? box.upper[static_cast<std::size_t>(q)]
                                                     : box.lower[static_cast<std::size_t>(q)];
            const auto boosted =
                configuration_to_coords(boost_configuration(coords_to_configuration(c, 1, dim), beta, axis));
            for (int q = 0; q < dims; ++q) {
                const std::size_t uq = static_cast<std::size_t>(q);
                if (first) {
                    blo[uq] = bhi[uq] = boosted[uq];
                } else {
                    blo[uq] = std::min(blo[uq], boosted[uq]);
                    bhi[uq] = std::max(bhi[uq], boosted[uq]);
                }
            }
            first = false;
        }
        double bb_volume = 1.0;
        for (int q = 0; q < dims; ++q)
            bb_volume *= bhi[static_cast<std::size_t>(q)] - blo[static_cast<std::size_t>(q)];

        Rng rng(seed);  // same stream: beta = 0 reproduces the original estimate exactly
        std::vector<double> p(static_cast<std::size_t>(dims));
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            for (int q = 0; q < dims; ++q)
                p[static_cast<std::size_t>(q)] =
                    rng.uniform(blo[static_cast<std::size_t>(q)], bhi[static_cast<std::size_t>(q)]);
            const Configuration y = coords_to_configuration(p, 1, dim);
            const Configuration x = boost_configuration(y, -beta, axis);
            double value = 0.0;
            if (box.contains(configuration_to_coords(x))) value = psi_b.density(y);
            sum += value;
            sum2 += value * value;
        }
        const double mean = sum / static_cast<double>(n);
        const double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
        rep.p_boosted = bb_volume * mean;
        rep.se_boosted = bb_volume * std::sqrt(var / static_cast<double>(n));
    }

    const double se = std::sqrt(rep.se_original * rep.se_original +
                                rep.se_boosted * rep.se_boosted);
    rep.diff_over_se = se > 0.0 ? std::abs(rep.p_original - rep.p_boosted) / se : 0.0;
    rep.passed = std::abs(rep.p_original - rep.p_boosted) <= 3.0 * se || se == 0.0;
    return rep;
}

}  // namespace bohmflow

#endif  // BOHMFLOW_STATS_HPP
