#include <doctest.h>

#include <cmath>

#include "fragsim/metrics.hpp"
#include "fragsim/rng.hpp"

using namespace fragsim;

namespace {

StateVector bell_state() {
    StateVector psi(2);
    psi[0] = psi[3] = 1.0 / std::sqrt(2.0);
    return psi;
}

} // namespace

TEST_CASE("uhlmann fidelity special cases") {
    // identical pure states
    const StateVector psi = random_two_qubit_state(4);
    const DensityMatrix rho = partial_trace(psi, {0, 1});
    CHECK(std::abs(uhlmann_fidelity(rho, rho) - 1.0) < 1e-9);

    // orthogonal basis states
    const DensityMatrix r0 = partial_trace(basis_state(1, 0), {0});
    const DensityMatrix r1 = partial_trace(basis_state(1, 1), {0});
    CHECK(uhlmann_fidelity(r0, r1) == doctest::Approx(0.0).epsilon(1e-12));

    // maximally mixed vs pure: 1/2
    const DensityMatrix mixed = partial_trace(bell_state(), {0});
    CHECK(uhlmann_fidelity(mixed, r0) == doctest::Approx(0.5).epsilon(1e-10));

    CHECK_THROWS_AS(uhlmann_fidelity(mixed, partial_trace(bell_state(), {0, 1})),
                    std::invalid_argument);
}

TEST_CASE("uhlmann fidelity equals squared overlap for pure states") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const StateVector a = random_two_qubit_state(100 + s);
        const StateVector b = random_two_qubit_state(200 + s);
        const double f = uhlmann_fidelity(partial_trace(a, {0, 1}), partial_trace(b, {0, 1}));
        CHECK(std::abs(f - std::norm(inner(a, b))) < 1e-9);
    }
}

TEST_CASE("uhlmann fidelity symmetry and unitary invariance") {
    Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        StateVector a(3), b(3);
        for (cplx& c : a.amps) c = cplx{rng.normal(), rng.normal()};
        for (cplx& c : b.amps) c = cplx{rng.normal(), rng.normal()};
        a.normalize();
        b.normalize();
        const DensityMatrix ra = partial_trace(a, {0, 2});
        const DensityMatrix rb = partial_trace(b, {0, 2});
        CHECK(std::abs(uhlmann_fidelity(ra, rb) - uhlmann_fidelity(rb, ra)) < 1e-9);

        // common unitary on the kept pair: evolve both marginal sources
        HermitianOperator u;
        u.add(0.9, {{0, Axis::X}, {2, Axis::Y}});
        const StateVector ua = evolve_step(u, a, 0.37);
        const StateVector ub = evolve_step(u, b, 0.37);
        const double f1 = uhlmann_fidelity(ra, rb);
        const double f2 = uhlmann_fidelity(partial_trace(ua, {0, 2}), partial_trace(ub, {0, 2}));
        CHECK(std::abs(f1 - f2) < 1e-8);
    }
}

TEST_CASE("fragment fidelity wrapper") {
    const FragmentLayout layout(4, {{0, 1}, {2, 3}}, {{2}, {}});
    // fragment 0 simulates registers (0, 1, aux->2)
    const StateVector frag = basis_state(3, 0b010); // spins 0=0, 1=1, aux=0
    const StateVector full = basis_state(4, 0b0100);
    CHECK(fragment_fidelity(frag, full, layout, 0) == doctest::Approx(1.0).epsilon(1e-10));

    const StateVector other = basis_state(4, 0b1000);
    CHECK(fragment_fidelity(frag, other, layout, 0) == doctest::Approx(0.0).epsilon(1e-10));

    CHECK_THROWS_AS(fragment_fidelity(basis_state(2, 0), full, layout, 0),
                    std::invalid_argument);
}

TEST_CASE("concurrence") {
    CHECK(concurrence(basis_state(2, 2)) == doctest::Approx(0.0));
    CHECK(concurrence(family_state(StateFamily::Theta, 1.1)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(concurrence(bell_state()) == doctest::Approx(1.0));
    for (double a : {0.1, 0.3, 0.5, 0.9})
        CHECK(concurrence(family_state(StateFamily::Alpha, a)) ==
              doctest::Approx(2.0 * std::sqrt(a * (1.0 - a))).epsilon(1e-12));
    CHECK_THROWS_AS(concurrence(basis_state(3, 0)), std::invalid_argument);
}

TEST_CASE("variance difference closed forms") {
    SUBCASE("computational basis states have V = V_MF = 0") {
        for (std::size_t x = 0; x < 4; ++x) {
            const VarianceDiff vd = variance_diff(basis_state(2, x));
            CHECK(vd.v == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(vd.v_mf == doctest::Approx(0.0).epsilon(1e-12));
        }
    }

    SUBCASE("theta family: V - V_MF = sin^2(theta), concurrence 0") {
        for (double theta : {0.0, 0.4, 1.0, 1.5707963267948966, 2.2, 3.0}) {
            const VarianceDiff vd = variance_diff(family_state(StateFamily::Theta, theta));
            CHECK(vd.diff() == doctest::Approx(std::sin(theta) * std::sin(theta)).epsilon(1e-9));
            CHECK(vd.concurrence == doctest::Approx(0.0).epsilon(1e-12));
        }
    }

    SUBCASE("alpha family: V = 0, V_MF = 4a(1-a) - 16a^2(1-a)^2") {
        for (double a : {0.0, 0.1, 0.25, 0.5, 0.85, 1.0}) {
            const VarianceDiff vd = variance_diff(family_state(StateFamily::Alpha, a));
            CHECK(vd.v == doctest::Approx(0.0).epsilon(1e-10));
            const double u = a * (1.0 - a);
            CHECK(vd.v_mf == doctest::Approx(4.0 * u - 16.0 * u * u).epsilon(1e-9));
        }
        // the minimum of V - V_MF is -1/4 where a(1-a) = 1/8
        const double a_min = 0.5 - std::sqrt(0.125);
        CHECK(variance_diff(family_state(StateFamily::Alpha, a_min)).diff() ==
              doctest::Approx(-0.25).epsilon(1e-9));
        CHECK(variance_diff(family_state(StateFamily::Alpha, 0.5)).diff() ==
              doctest::Approx(0.0).epsilon(1e-9));
    }

    SUBCASE("beta family stays in the non-negative quadrant") {
        for (double b = 0.0; b <= 3.0; b += 0.1) {
            const VarianceDiff vd = variance_diff(family_state(StateFamily::Beta, b));
            CHECK(vd.diff() >= -1e-9);
            CHECK(vd.concurrence >= -1e-9);
        }
    }
}

TEST_CASE("family state endpoints") {
    const StateVector a0 = family_state(StateFamily::Alpha, 0.0);
    CHECK(basis_index_of(a0) == 3); // |11>
    const StateVector t0 = family_state(StateFamily::Theta, 0.0);
    CHECK(basis_index_of(t0) == 0); // |00>
    CHECK_THROWS_AS(family_state(StateFamily::Alpha, 1.5), std::out_of_range);
}

TEST_CASE("random two-qubit states and the envelope") {
    double mean_conc = 0.0;
    double mean_diff = 0.0;
    const int n = 2000;
    for (int s = 0; s < n; ++s) {
        const StateVector psi = random_two_qubit_state(derive_seed(9000, s));
        CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
        const VarianceDiff vd = variance_diff(psi);
        CHECK(vd.diff() >= -0.25 - 1e-6);
        CHECK(vd.diff() <= 1.0 + 1e-6);
        mean_conc += vd.concurrence;
        mean_diff += vd.diff();
    }
    CHECK(mean_conc / n > 0.0);
    // mean-field corrections help on average over random states
    CHECK(mean_diff / n > 0.0);
}

TEST_CASE("local expectations") {
    const auto [sx0, sz0] = local_expectations(basis_state(1, 0), 0);
    CHECK(sx0 == doctest::Approx(0.0));
    CHECK(sz0 == doctest::Approx(0.5));

    StateVector plus(1);
    plus[0] = plus[1] = 1.0 / std::sqrt(2.0);
    const auto [sxp, szp] = local_expectations(plus, 0);
    CHECK(sxp == doctest::Approx(0.5));
    CHECK(szp == doctest::Approx(0.0).epsilon(1e-12));

    const auto [sxm, szm] = local_expectations(partial_trace(bell_state(), {0}));
    CHECK(sxm == doctest::Approx(0.0));
    CHECK(szm == doctest::Approx(0.0));

    CHECK_THROWS_AS(local_expectations(basis_state(1, 0), 3), std::out_of_range);
}
