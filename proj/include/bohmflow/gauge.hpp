#ifndef BOHMFLOW_GAUGE_HPP
#define BOHMFLOW_GAUGE_HPP

#include <cmath>
#include <functional>
#include <utility>

#include "bohmflow/minkowski.hpp"

namespace bohmflow {

/// Analytic scalar function chi of a single particle's spacetime point,
/// together with its gradient four-vector in the real-metric representation
/// (spatial = grad chi, temporal = -(1/c) d chi/dt).
struct GaugeScalar {
    std::function<double(const FourVector&)> value;
    std::function<FourVector(const FourVector&)> gradient;
};

/// chi = sum_k a_k x_k + b * ct.  Gradient spatial = a, temporal = -b.
inline GaugeScalar linear_gauge(std::vector<double> spatial_coeffs, double ct_coeff,
                                const Constants& /*constants*/ = {}) {
    const int dim = static_cast<int>(spatial_coeffs.size());
    auto val = [spatial_coeffs, ct_coeff, dim](const FourVector& x) {
        double s = ct_coeff * x.temporal();
        for (int k = 0; k < dim; ++k) s += spatial_coeffs[static_cast<std::size_t>(k)] * x.spatial(k);
        return s;
    };
    auto grad = [spatial_coeffs, ct_coeff, dim](const FourVector& x) {
        FourVector g(x.dim());
        for (int k = 0; k < dim; ++k) g.spatial(k) = spatial_coeffs[static_cast<std::size_t>(k)];
        g.temporal() = -ct_coeff;
        return g;
    };
    return GaugeScalar{std::move(val), std::move(grad)};
}

/// chi = amp * sin(kappa . x + kappa_ct * ct).
inline GaugeScalar sinusoidal_gauge(double amplitude, std::vector<double> kappa, double kappa_ct) {
    const int dim = static_cast<int>(kappa.size());
    auto phase = [kappa, kappa_ct, dim](const FourVector& x) {
        double p = kappa_ct * x.temporal();
        for (int k = 0; k < dim; ++k) p += kappa[static_cast<std::size_t>(k)] * x.spatial(k);
        return p;
    };
    auto val = [phase, amplitude](const FourVector& x) { return amplitude * std::sin(phase(x)); };
    auto grad = [phase, amplitude, kappa, kappa_ct, dim](const FourVector& x) {
        const double cp = amplitude * std::cos(phase(x));
        FourVector g(x.dim());
        for (int k = 0; k < dim; ++k) g.spatial(k) = cp * kappa[static_cast<std::size_t>(k)];
        g.temporal() = -cp * kappa_ct;
        return g;
    };
    return GaugeScalar{std::move(val), std::move(grad)};
}

}  // namespace bohmflow

#endif  // BOHMFLOW_GAUGE_HPP
