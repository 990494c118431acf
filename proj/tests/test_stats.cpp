#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bohmflow/stats.hpp"

using namespace bohmflow;

namespace {

const Constants kNatural{1.0, 1.0};
const ParticleParams kUnitMass{1.0, 0.0};

ModeSumWaveFunction plane_wave(double k) {
    ProductTerm t;
    t.modes.push_back(on_shell_mode({k}, kUnitMass, kNatural));
    return ModeSumWaveFunction({t}, {kUnitMass}, kNatural);
}

ModeSumWaveFunction two_mode(double k1, double k2, double a, double b) {
    ProductTerm t1, t2;
    t1.coefficient = {a, 0.0};
    t1.modes.push_back(on_shell_mode({k1}, kUnitMass, kNatural));
    t2.coefficient = {b, 0.0};
    t2.modes.push_back(on_shell_mode({k2}, kUnitMass, kNatural));
    return ModeSumWaveFunction({t1, t2}, {kUnitMass}, kNatural);
}

}  // namespace

TEST_CASE("tail probabilities against table values") {
    // chi^2 upper tail: canonical 5% and 1% quantiles
    CHECK(chi_square_pvalue(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-4));
    CHECK(chi_square_pvalue(18.307038, 10) == doctest::Approx(0.05).epsilon(1e-4));
    CHECK(chi_square_pvalue(23.209251, 10) == doctest::Approx(0.01).epsilon(1e-4));
    // KS critical value c(0.01) = 1.6276
    CHECK(ks_critical(10000, 0.01) == doctest::Approx(1.6276 / 100.0).epsilon(1e-4));
}

TEST_CASE("exact box integrals agree with the closed-form two-mode density") {
    const auto psi = two_mode(0.3, -0.2, 1.0, 1.0);
    // integral over x in [0, L], ct in [0, H] of 2 + 2 cos(dk x - dw ct)
    const double dk = 0.5, dw = std::sqrt(1.09) - std::sqrt(1.04);
    const double L = 3.7, H = 2.9;
    auto anti = [&](double x, double t) {  // d^2/dxdt of this is cos(dk x - dw t)
        return std::cos(dk * x - dw * t) / (dk * dw);
    };
    const double cos_part = anti(L, H) - anti(L, 0) - anti(0, H) + anti(0, 0);
    const double expected = 2.0 * L * H + 2.0 * cos_part;
    CHECK(density_box_integral(psi, {0.0, 0.0}, {L, H}) ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("marginal CDF is a proper monotone CDF and linear for constant density") {
    const auto pw = plane_wave(0.3);
    const SamplingBox box{{-1.0, 0.0}, {3.0, 2.0}};
    CHECK(marginal_cdf(pw, box, 0, -1.0) == doctest::Approx(0.0));
    CHECK(marginal_cdf(pw, box, 0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(marginal_cdf(pw, box, 0, 3.0) == doctest::Approx(1.0));
    const auto psi = two_mode(0.5, -0.3, 1.0, 0.4);
    double prev = 0.0;
    for (double v = -1.0; v <= 3.0; v += 0.1) {
        const double f = marginal_cdf(psi, box, 0, v);
        CHECK(f >= prev - 1e-12);
        prev = f;
    }
}

TEST_CASE("ensembles are reproducible byte for byte") {
    const auto psi = two_mode(0.5, -0.3, 1.0, 0.35);
    const SamplingBox box{{0.0, 0.0}, {12.0, 12.0}};
    for (auto method : {SampleMethod::rejection, SampleMethod::metropolis}) {
        const auto a = sample_equilibrium(psi, box, 500, 99, method);
        const auto b = sample_equilibrium(psi, box, 500, 99, method);
        REQUIRE(a.samples.size() == b.samples.size());
        for (std::size_t s = 0; s < a.samples.size(); ++s)
            for (std::size_t q = 0; q < a.samples[s].size(); ++q)
                CHECK(a.samples[s][q] == b.samples[s][q]);
    }
}

TEST_CASE("n = 0 gives a valid empty ensemble") {
    const auto psi = plane_wave(0.3);
    const SamplingBox box{{0.0, 0.0}, {1.0, 1.0}};
    const auto e = sample_equilibrium(psi, box, 0, 1);
    CHECK(e.samples.empty());
}

TEST_CASE("constant density samples are uniform per coordinate") {
    const auto psi = plane_wave(0.3);
    const SamplingBox box{{-2.0, 1.0}, {5.0, 4.0}};
    const std::size_t n = 4000;
    const auto e = sample_equilibrium(psi, box, n, 31415);
    for (int coord = 0; coord < 2; ++coord) {
        std::vector<double> v;
        for (const auto& s : e.samples) v.push_back(s[static_cast<std::size_t>(coord)]);
        const double lo = box.lower[static_cast<std::size_t>(coord)];
        const double hi = box.upper[static_cast<std::size_t>(coord)];
        const double d =
            ks_statistic(std::move(v), [&](double x) { return (x - lo) / (hi - lo); });
        CHECK(d < ks_critical(n, 0.01));
    }
}

TEST_CASE("two-mode marginal histogram passes a chi-square test at alpha = 0.01") {
    const auto psi = two_mode(0.5, -0.3, 1.0, 0.35);
    const SamplingBox box{{0.0, 0.0}, {15.7, 15.7}};
    const std::size_t n = 5000;
    const auto e = sample_equilibrium(psi, box, n, 2718);
    const int bins = 20;
    std::vector<std::size_t> counts(bins, 0);
    for (const auto& s : e.samples) {
        const int b = std::min(bins - 1, static_cast<int>((s[0] - box.lower[0]) /
                                                          (box.upper[0] - box.lower[0]) * bins));
        ++counts[static_cast<std::size_t>(b)];
    }
    std::vector<double> probs(bins, 0.0);
    for (int b = 0; b < bins; ++b) {
        const double x0 = box.lower[0] + (box.upper[0] - box.lower[0]) * b / bins;
        const double x1 = box.lower[0] + (box.upper[0] - box.lower[0]) * (b + 1) / bins;
        probs[static_cast<std::size_t>(b)] =
            marginal_cdf(psi, box, 0, x1) - marginal_cdf(psi, box, 0, x0);
    }
    const auto r = chi_square_gof(counts, probs, n);
    CHECK(r.pvalue > 0.01);
}

TEST_CASE("rejection and metropolis samplers agree") {
    // the chain needs wider proposals and heavier thinning than the sampler
    // defaults before the nominal two-sample KS critical value applies
    const auto psi = two_mode(0.5, -0.3, 1.0, 0.35);
    const SamplingBox box{{0.0, 0.0}, {15.7, 15.7}};
    const std::size_t n = 5000;
    const auto a = sample_equilibrium(psi, box, n, 101, SampleMethod::rejection);
    MetropolisParams mp;
    mp.proposal_scale_divisor = 8.0;
    mp.thinning = 40;
    const auto b = sample_equilibrium(psi, box, n, 202, SampleMethod::metropolis, mp);
    for (int coord = 0; coord < 2; ++coord) {
        std::vector<double> va, vb;
        for (const auto& s : a.samples) va.push_back(s[static_cast<std::size_t>(coord)]);
        for (const auto& s : b.samples) vb.push_back(s[static_cast<std::size_t>(coord)]);
        CHECK(ks_statistic_two_sample(va, vb) < ks_critical_two_sample(n, n, 0.01));
    }
}

TEST_CASE("hopeless envelope raises EnvelopeTooLoose suggesting metropolis") {
    // a 20001-mode packet concentrates the density into a sliver of its
    // recurrence period; acceptance falls below 1e-4
    const ParticleParams heavy{100.0, 0.0};
    const auto psi = gaussian_packet(0.0, 1.0, 20001, heavy, kNatural);
    const double period = 2.0 * M_PI / (8.0 / 20000.0);
    const SamplingBox box{{-period / 2.0, 0.0}, {period / 2.0, 50.0}};
    CHECK_THROWS_WITH_AS(sample_equilibrium(psi, box, 10, 7, SampleMethod::rejection, {}, 30000),
                         doctest::Contains("metropolis"), EnvelopeTooLoose);
}

TEST_CASE("equivariance: plane-wave flow is a translation and passes cleanly") {
    const auto psi = plane_wave(0.3);
    const SamplingBox box{{0.0, 0.0}, {10.0, 10.0}};
    IntegratorConfig cfg;
    cfg.d_sigma = 0.01;
    const auto rep = equivariance_test(psi, EMPotential::zero(), box, 3000, 5, 1.0, cfg);
    CHECK(rep.passed());
    CHECK(rep.edge_loss < 0.01);
    for (const auto& k : rep.ks) CHECK(k.passed);
}

TEST_CASE("equivariance holds for the two-mode scenario at box/10 displacement") {
    const auto psi = two_mode(0.5, -0.3, 1.0, 0.14);
    const SamplingBox box{{0.0, 0.0}, {23.56, 23.56}};
    IntegratorConfig cfg;
    cfg.d_sigma = 0.01;
    const auto rep =
        equivariance_test(psi, EMPotential::zero(), box, 5000, 20240808, 2.1, cfg);
    CHECK(rep.passed());
    CHECK(rep.edge_loss < 0.05);
    // bulk drift moved the window by about a tenth of the box
    CHECK(rep.drift[1] > 0.08 * (box.upper[1] - box.lower[1]));
    CHECK(rep.drift[1] < 0.12 * (box.upper[1] - box.lower[1]));
    for (const auto& k : rep.ks) CHECK(k.statistic < 0.8 * k.critical);
    CHECK(rep.chi2.pvalue > 0.05);
}

TEST_CASE("corrupted flow (spatial velocities x 1.1) is detected") {
    const auto psi = two_mode(0.7, -0.3, 1.0, 0.55);
    const SamplingBox box{{0.0, 0.0}, {37.7, 12.57}};
    IntegratorConfig cfg;
    cfg.d_sigma = 0.02;
    EquivarianceOptions opt;
    opt.throw_on_edge_loss = false;  // power check: loss is reported, not gated

    EquivarianceOptions honest = opt;
    const auto rep0 =
        equivariance_test(psi, EMPotential::zero(), box, 5000, 777, 48.0, cfg, honest);
    CHECK(rep0.all_ks_passed);

    opt.spatial_velocity_factor = 1.1;
    const auto rep1 =
        equivariance_test(psi, EMPotential::zero(), box, 5000, 777, 48.0, cfg, opt);
    CHECK_FALSE(rep1.all_ks_passed);
    // the violation shows decisively, not marginally
    bool strong = false;
    for (const auto& k : rep1.ks) strong |= k.statistic > 1.5 * k.critical;
    CHECK(strong);
}

TEST_CASE("a box swallowed by the displacement spread is inconclusive") {
    const auto psi = two_mode(0.7, -0.3, 1.0, 0.55);
    const SamplingBox box{{0.0, 0.0}, {2.0, 2.0}};
    IntegratorConfig cfg;
    cfg.d_sigma = 0.02;
    CHECK_THROWS_AS(equivariance_test(psi, EMPotential::zero(), box, 200, 1, 30.0, cfg),
                    InconclusiveDomain);
}

TEST_CASE("frame independence: beta = 0 gives identical estimates from one stream") {
    const auto psi = plane_wave(0.3);
    const SamplingBox box{{-3.0, -2.0}, {4.0, 5.0}};
    const auto rep = frame_independence_test(psi, box, 0.0, 20000, 11);
    CHECK(rep.p_original == rep.p_boosted);
    CHECK(rep.passed);
}

TEST_CASE("frame independence: constant density, any beta") {
    const auto psi = plane_wave(0.3);
    const SamplingBox box{{-3.0, -2.0}, {4.0, 5.0}};
    const auto rep = frame_independence_test(psi, box, 0.5, 100000, 11);
    CHECK(rep.passed);
    CHECK(rep.p_original == doctest::Approx(49.0).epsilon(1e-6));  // rho = 1, vol = 49
}

TEST_CASE("frame independence: two-mode packet at beta = 0.5, n = 1e5") {
    const auto psi = two_mode(0.7, -0.3, 1.0, 0.55);
    const SamplingBox box{{-5.0, -4.0}, {6.0, 7.0}};
    const auto rep = frame_independence_test(psi, box, 0.5, 100000, 13);
    CHECK(rep.passed);
    CHECK(rep.diff_over_se < 3.0);
}

TEST_CASE("frame independence rejects out-of-contract inputs") {
    const auto psi = plane_wave(0.3);
    const SamplingBox box{{-1.0, -1.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(frame_independence_test(psi, box, 0.7, 100, 1), ConfigurationError);
}
