#ifndef BOHMFLOW_MINKOWSKI_HPP
#define BOHMFLOW_MINKOWSKI_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bohmflow/errors.hpp"

namespace bohmflow {

// All storage is real-valued with metric signature diag(+1,...,+1,-1) over
// (x^1..x^D, ct).  Formulas written with an imaginary time coordinate
// x4 = ict translate into this representation as follows:
//   event      (x, ict)          ->  spatial = x,        temporal = ct
//   potential  (A, i*phi)        ->  spatial = A,        temporal = phi
//   gradient   (grad f, d f/dict)->  spatial = grad f,   temporal = -(1/c) df/dt
//   velocity   (dX/ds, ic dT/ds) ->  spatial = dX/dsigma, temporal = c dT/dsigma
// so that every repeated-index contraction becomes minkowski_dot.

/// Metric of (1+D)-dimensional Minkowski space, D in {1,2,3}.
struct Metric {
    int spatial_dim = 1;

    Metric() = default;
    explicit Metric(int d) : spatial_dim(d) {
        if (d < 1 || d > 3)
            throw ConfigurationError("Metric: spatial_dim must be 1, 2 or 3, got " +
                                     std::to_string(d));
    }
};

/// One spacetime vector: D spatial components plus one temporal component (ct
/// for events, c*dT/dsigma for velocities).
class FourVector {
  public:
    FourVector() = default;
    explicit FourVector(int dim) : dim_(check_dim(dim)) {}
    FourVector(double x, double ct) : temporal_(ct), dim_(1) { spatial_[0] = x; }
    FourVector(double x, double y, double ct) : temporal_(ct), dim_(2) {
        spatial_[0] = x;
        spatial_[1] = y;
    }
    FourVector(double x, double y, double z, double ct) : temporal_(ct), dim_(3) {
        spatial_[0] = x;
        spatial_[1] = y;
        spatial_[2] = z;
    }

    int dim() const { return dim_; }
    double spatial(int k) const { return spatial_[static_cast<std::size_t>(k)]; }
    double& spatial(int k) { return spatial_[static_cast<std::size_t>(k)]; }
    double temporal() const { return temporal_; }
    double& temporal() { return temporal_; }

    bool finite() const {
        for (int k = 0; k < dim_; ++k)
            if (!std::isfinite(spatial_[static_cast<std::size_t>(k)])) return false;
        return std::isfinite(temporal_);
    }

    FourVector& operator+=(const FourVector& o) {
        for (int k = 0; k < dim_; ++k) spatial_[static_cast<std::size_t>(k)] += o.spatial(k);
        temporal_ += o.temporal_;
        return *this;
    }
    FourVector& operator-=(const FourVector& o) {
        for (int k = 0; k < dim_; ++k) spatial_[static_cast<std::size_t>(k)] -= o.spatial(k);
        temporal_ -= o.temporal_;
        return *this;
    }
    FourVector& operator*=(double s) {
        for (int k = 0; k < dim_; ++k) spatial_[static_cast<std::size_t>(k)] *= s;
        temporal_ *= s;
        return *this;
    }

    friend FourVector operator+(FourVector a, const FourVector& b) { return a += b; }
    friend FourVector operator-(FourVector a, const FourVector& b) { return a -= b; }
    friend FourVector operator*(double s, FourVector v) { return v *= s; }
    friend FourVector operator*(FourVector v, double s) { return v *= s; }

  private:
    static int check_dim(int d) {
        if (d < 1 || d > 3)
            throw ConfigurationError("FourVector: dim must be 1, 2 or 3, got " +
                                     std::to_string(d));
        return d;
    }
    std::array<double, 3> spatial_{};
    double temporal_ = 0.0;
    int dim_ = 1;
};

/// One spacetime point per particle.
using Configuration = std::vector<FourVector>;

struct ParticleParams {
    double mass = 1.0;    // m_i > 0
    double charge = 0.0;  // e_i, Gaussian units

    void validate() const {
        if (!(mass > 0.0)) throw ConfigurationError("ParticleParams: mass must be > 0");
        if (!std::isfinite(charge)) throw ConfigurationError("ParticleParams: charge not finite");
    }
};

/// hbar and c are runtime parameters so that limit studies can rescale them.
struct Constants {
    double hbar = 1.0;
    double c = 1.0;

    void validate() const {
        if (!(hbar > 0.0) || !(c > 0.0))
            throw ConfigurationError("Constants: hbar and c must be > 0");
    }
};

/// Signed contraction  sum_k a_k b_k - a_t b_t.
inline double minkowski_dot(const FourVector& a, const FourVector& b) {
    if (a.dim() != b.dim())
        throw ConfigurationError("minkowski_dot: dimension mismatch (" +
                                 std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
    double s = 0.0;
    for (int k = 0; k < a.dim(); ++k) s += a.spatial(k) * b.spatial(k);
    return s - a.temporal() * b.temporal();
}

inline double minkowski_dot(const FourVector& a, const FourVector& b, const Metric& metric) {
    if (a.dim() != metric.spatial_dim)
        throw ConfigurationError("minkowski_dot: vector dimension " + std::to_string(a.dim()) +
                                 " does not match metric D=" + std::to_string(metric.spatial_dim));
    return minkowski_dot(a, b);
}

/// Boost along a spatial axis:
///   x' = gamma (x - beta ct),   ct' = gamma (ct - beta x).
/// The map is linear with unit Jacobian and preserves minkowski_dot.
inline FourVector lorentz_boost(const FourVector& v, double beta, int axis = 0) {
    if (!(std::abs(beta) < 1.0))
        throw DomainError("lorentz_boost: |beta| must be < 1, got " + std::to_string(beta));
    if (axis < 0 || axis >= v.dim())
        throw ConfigurationError("lorentz_boost: axis " + std::to_string(axis) +
                                 " out of range for D=" + std::to_string(v.dim()));
    const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
    FourVector out = v;
    out.spatial(axis) = gamma * (v.spatial(axis) - beta * v.temporal());
    out.temporal() = gamma * (v.temporal() - beta * v.spatial(axis));
    return out;
}

inline Configuration boost_configuration(const Configuration& q, double beta, int axis = 0) {
    Configuration out;
    out.reserve(q.size());
    for (const auto& x : q) out.push_back(lorentz_boost(x, beta, axis));
    return out;
}

}  // namespace bohmflow

#endif  // BOHMFLOW_MINKOWSKI_HPP
