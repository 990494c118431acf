#ifndef BOHMFLOW_FIELDS_HPP
#define BOHMFLOW_FIELDS_HPP

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "bohmflow/errors.hpp"
#include "bohmflow/gauge.hpp"
#include "bohmflow/minkowski.hpp"

namespace bohmflow {

/// Antisymmetric field tensor at a point, real-metric layout: index D is the
/// temporal slot, spatial block F_jk = dA_j/dx_k - dA_k/dx_j, and the mixed
/// entries F_jD = E_j = -d(phi)/dx_j - dA_j/d(ct).
struct FieldTensor {
    std::array<std::array<double, 4>, 4> f{};
    int dim = 1;

    double operator()(int a, int b) const {
        return f[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
    double& at(int a, int b) { return f[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }

    void antisymmetrize() {
        for (int a = 0; a <= dim; ++a)
            for (int b = 0; b <= dim; ++b) {
                const double v = 0.5 * (f[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] -
                                        f[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]);
                f[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
                f[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = -v;
            }
    }
};

/// Parametric external four-potential families, evaluated per particle point.
/// Real-metric value layout: spatial = A, temporal = phi.
class EMPotential {
  public:
    enum class Family { Zero, ConstantElectric, ConstantMagnetic, PureGauge };

    static EMPotential zero() { return EMPotential(Family::Zero); }

    /// Static gauge phi = -E x_axis, A = 0.
    static EMPotential constant_electric(double E, int axis = 0) {
        EMPotential f(Family::ConstantElectric);
        f.strength_ = E;
        f.axis_ = axis;
        return f;
    }

    /// Landau gauge A_axis1 = -B x_axis2, needs D >= 2.  The magnetic field
    /// points out of the (axis1, axis2) plane.
    static EMPotential constant_magnetic(double B, int axis1 = 0, int axis2 = 1) {
        if (axis1 == axis2) throw ConfigurationError("constant_magnetic: plane axes must differ");
        EMPotential f(Family::ConstantMagnetic);
        f.strength_ = B;
        f.axis_ = axis1;
        f.axis2_ = axis2;
        return f;
    }

    static EMPotential pure_gauge(GaugeScalar chi) {
        EMPotential f(Family::PureGauge);
        f.chi_ = std::move(chi);
        return f;
    }

    Family family() const { return family_; }

    /// (A, phi) at an event.
    FourVector potential_at(const FourVector& x) const {
        FourVector a(x.dim());
        switch (family_) {
            case Family::Zero:
                break;
            case Family::ConstantElectric:
                a.temporal() = -strength_ * x.spatial(axis_);
                break;
            case Family::ConstantMagnetic:
                if (x.dim() < 2)
                    throw ConfigurationError("constant_magnetic needs spatial_dim >= 2");
                a.spatial(axis_) = -strength_ * x.spatial(axis2_);
                break;
            case Family::PureGauge:
                // A_mu = d(chi)/dx_mu, which in real-metric components is
                // exactly the gauge scalar's gradient four-vector.
                a = chi_.gradient(x);
                break;
        }
        return a;
    }

    FieldTensor field_tensor_at(const FourVector& x) const {
        FieldTensor t;
        t.dim = x.dim();
        switch (family_) {
            case Family::Zero:
                break;
            case Family::ConstantElectric:
                t.at(axis_, t.dim) = strength_;
                t.at(t.dim, axis_) = -strength_;
                break;
            case Family::ConstantMagnetic:
                if (x.dim() < 2)
                    throw ConfigurationError("constant_magnetic needs spatial_dim >= 2");
                t.at(axis_, axis2_) = -strength_;
                t.at(axis2_, axis_) = strength_;
                break;
            case Family::PureGauge:
                t = finite_difference_tensor(x);
                break;
        }
        return t;
    }

    /// Central-difference tensor from the potential; used for PureGauge and as
    /// a cross-check of the analytic families.  Step in scenario length units.
    FieldTensor finite_difference_tensor(const FourVector& x, double h = 1e-5) const {
        const int d = x.dim();
        FieldTensor t;
        t.dim = d;
        // dA_b / d(coord a), coords = (x_1..x_D, ct)
        std::array<std::array<double, 4>, 4> dA{};
        for (int a = 0; a <= d; ++a) {
            FourVector xp = x, xm = x;
            if (a < d) {
                xp.spatial(a) += h;
                xm.spatial(a) -= h;
            } else {
                xp.temporal() += h;
                xm.temporal() -= h;
            }
            const FourVector ap = potential_at(xp), am = potential_at(xm);
            for (int b = 0; b <= d; ++b) {
                const double vp = (b < d) ? ap.spatial(b) : ap.temporal();
                const double vm = (b < d) ? am.spatial(b) : am.temporal();
                dA[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (vp - vm) / (2.0 * h);
            }
        }
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                t.at(j, k) = dA[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] -
                             dA[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        for (int j = 0; j < d; ++j) {
            // E_j = -d(phi)/dx_j - dA_j/d(ct)
            const double e = -dA[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] -
                             dA[static_cast<std::size_t>(d)][static_cast<std::size_t>(j)];
            t.at(j, d) = e;
            t.at(d, j) = -e;
        }
        t.antisymmetrize();
        return t;
    }

  private:
    explicit EMPotential(Family f) : family_(f) {}

    Family family_;
    double strength_ = 0.0;
    int axis_ = 0;
    int axis2_ = 1;
    GaugeScalar chi_;
};

}  // namespace bohmflow

#endif  // BOHMFLOW_FIELDS_HPP
