#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fragsim/rng.hpp"
#include "fragsim/statevector.hpp"

#include "oracles.hpp"

using namespace fragsim;

namespace {

StateVector random_state(int n, std::uint64_t seed) {
    Rng rng(seed);
    StateVector psi(n);
    for (cplx& c : psi.amps) c = cplx{rng.normal(), rng.normal()};
    psi.normalize();
    return psi;
}

HermitianOperator random_operator(int n, int terms, std::uint64_t seed) {
    Rng rng(seed);
    HermitianOperator op;
    for (int t = 0; t < terms; ++t) {
        std::vector<std::pair<int, Axis>> factors;
        for (int q = 0; q < n; ++q) {
            const auto pick = rng.uniform_int(4);
            if (pick == 3) continue;
            factors.emplace_back(q, static_cast<Axis>(pick));
        }
        op.add(rng.normal(), std::move(factors));
    }
    return op;
}

double max_abs_diff(const StateVector& a, const StateVector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace

TEST_CASE("rng determinism and uniform range") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}

TEST_CASE("rng gaussian moments") {
    Rng rng(7);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sum2 += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("basis states and ordering convention") {
    // qubit 0 is the most significant bit
    const StateVector psi = basis_state(2, 1); // |01>
    CHECK(psi.bit(1, 0) == 0);
    CHECK(psi.bit(1, 1) == 1);
    CHECK(basis_index_of(psi) == 1);
    CHECK_THROWS_AS(basis_state(2, 4), std::out_of_range);
    CHECK_THROWS_AS(basis_index_of(random_state(2, 3)), std::invalid_argument);
}

TEST_CASE("single-spin operator actions") {
    HermitianOperator sz;
    sz.add(1.0, {{0, Axis::Z}});
    const StateVector zero = basis_state(1, 0);
    StateVector out = apply_pauli_sum(sz, zero);
    CHECK(out[0].real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(out[1]) == doctest::Approx(0.0));

    HermitianOperator sx;
    sx.add(1.0, {{0, Axis::X}});
    out = apply_pauli_sum(sx, zero);
    CHECK(std::abs(out[0]) == doctest::Approx(0.0));
    CHECK(out[1].real() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("two-qubit zz on |01>") {
    HermitianOperator op;
    op.add(-4.0, {{0, Axis::Z}, {1, Axis::Z}});
    const StateVector psi = basis_state(2, 1); // |01>
    const StateVector lib = apply_pauli_sum(op, psi);
    CHECK(lib[1].real() == doctest::Approx(1.0).epsilon(1e-14));
    const StateVector dense = oracle::dense_apply(op, psi);
    CHECK(max_abs_diff(lib, dense) < 1e-12);
}

TEST_CASE("expectation values on basis and superposition states") {
    HermitianOperator sz;
    sz.add(1.0, {{0, Axis::Z}});
    for (std::size_t x : {std::size_t{0}, std::size_t{1}}) {
        const double expected = x == 0 ? 0.5 : -0.5;
        CHECK(expectation(sz, basis_state(1, x)) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(site_expectation(basis_state(1, x), 0, Axis::Z) ==
              doctest::Approx(expected).epsilon(1e-14));
    }
    StateVector plus(1);
    plus[0] = plus[1] = 1.0 / std::sqrt(2.0);
    CHECK(expectation(sz, plus) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(site_expectation(plus, 0, Axis::X) == doctest::Approx(0.5).epsilon(1e-14));

    HermitianOperator zz;
    zz.add(1.0, {{0, Axis::Z}, {1, Axis::Z}});
    for (std::size_t x = 0; x < 4; ++x) {
        const double e = expectation(zz, basis_state(2, x));
        CHECK(std::abs(e) == doctest::Approx(0.25).epsilon(1e-14));
    }
}

TEST_CASE("site expectations match operator path on random states") {
    const StateVector psi = random_state(4, 99);
    for (int q = 0; q < 4; ++q) {
        for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
            HermitianOperator op;
            op.add(1.0, {{q, ax}});
            CHECK(site_expectation(psi, q, ax) ==
                  doctest::Approx(expectation(op, psi)).epsilon(1e-12));
        }
    }
}

TEST_CASE("apply_pauli_sum linearity") {
    const StateVector psi = random_state(3, 11);
    const HermitianOperator a = random_operator(3, 4, 21);
    const HermitianOperator b = random_operator(3, 3, 22);
    HermitianOperator a2 = a;
    a2.scale(0.7);
    HermitianOperator b2 = b;
    b2.scale(-1.3);
    HermitianOperator sum = a2;
    sum += b2;

    const StateVector lhs = apply_pauli_sum(sum, psi);
    const StateVector va = apply_pauli_sum(a, psi);
    const StateVector vb = apply_pauli_sum(b, psi);
    double d = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i)
        d = std::max(d, std::abs(lhs[i] - (0.7 * va[i] - 1.3 * vb[i])));
    CHECK(d < 1e-12);
}

TEST_CASE("dense-oracle equivalence for apply and evolve at n <= 4") {
    for (int n = 2; n <= 4; ++n) {
        const StateVector psi = random_state(n, 100 + n);
        const HermitianOperator op = random_operator(n, 5, 200 + n);
        CHECK(max_abs_diff(apply_pauli_sum(op, psi), oracle::dense_apply(op, psi)) < 1e-9);
        const double dt = 0.3;
        CHECK(max_abs_diff(evolve_step(op, psi, dt), oracle::dense_evolve(op, psi, dt)) < 1e-9);
    }
}

TEST_CASE("evolve_step identity and Rabi rotation") {
    const HermitianOperator empty;
    const StateVector psi = random_state(2, 5);
    CHECK(max_abs_diff(evolve_step(empty, psi, 0.5), psi) < 1e-14);

    // H = -h S_x rotates |0> to |1> (up to phase) at t = pi / h
    const double h = 0.8;
    HermitianOperator op;
    op.add(-h, {{0, Axis::X}});
    const StateVector rotated = evolve_step(op, basis_state(1, 0), std::numbers::pi / h);
    CHECK(std::norm(rotated[1]) == doctest::Approx(1.0).epsilon(1e-10));
    // closed form: amplitude on |0> is cos(h t / 2)
    const double t = 0.7;
    const StateVector partway = evolve_step(op, basis_state(1, 0), t);
    CHECK(std::abs(partway[0]) == doctest::Approx(std::cos(h * t / 2.0)).epsilon(1e-10));
}

TEST_CASE("evolve_step preserves norm and energy") {
    const StateVector psi0 = random_state(3, 77);
    const HermitianOperator op = random_operator(3, 6, 78);
    StateVector psi = psi0;
    const double e0 = expectation(op, psi);
    for (int step = 0; step < 100; ++step) psi = evolve_step(op, psi, 0.1);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
    CHECK(expectation(op, psi) == doctest::Approx(e0).epsilon(1e-8));
}

TEST_CASE("eigenstate evolution only changes phases") {
    HermitianOperator zz;
    zz.add(-1.0, {{0, Axis::Z}, {1, Axis::Z}});
    StateVector psi = basis_state(2, 0);
    const StateVector evolved = evolve_step(zz, psi, 0.4);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::norm(evolved[i]) == doctest::Approx(std::norm(psi[i])).epsilon(1e-12));
}

TEST_CASE("evolve_step rejects bad arguments") {
    HermitianOperator op;
    op.add(1.0, {{0, Axis::Z}});
    CHECK_THROWS_AS(evolve_step(op, basis_state(1, 0), 0.0), std::invalid_argument);
    HermitianOperator oob;
    oob.add(1.0, {{3, Axis::Z}});
    CHECK_THROWS_AS(evolve_step(oob, basis_state(2, 0), 0.1), std::out_of_range);
    CHECK_THROWS_AS(apply_pauli_sum(oob, basis_state(2, 0)), std::out_of_range);
}

TEST_CASE("partial trace basics") {
    // product state |0> x |1>, keep qubit 0
    const StateVector psi01 = basis_state(2, 1);
    const DensityMatrix rho = partial_trace(psi01, {0});
    CHECK(rho.at(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(rho.at(1, 1)) < 1e-14);

    // Bell state marginals are maximally mixed
    StateVector bell(2);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    for (int q : {0, 1}) {
        const DensityMatrix marginal = partial_trace(bell, {q});
        CHECK(marginal.at(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(marginal.at(1, 1).real() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(std::abs(marginal.at(0, 1)) < 1e-14);
    }

    CHECK_THROWS_AS(partial_trace(bell, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(bell, {2}), std::out_of_range);
}

TEST_CASE("partial trace against dense oracle and invariants") {
    const StateVector psi = random_state(5, 31);
    for (const std::vector<int>& keep :
         {std::vector<int>{0}, std::vector<int>{2, 4}, std::vector<int>{3, 1, 0}}) {
        const DensityMatrix rho = partial_trace(psi, keep);
        const CMatrix ref = oracle::dense_partial_trace(psi, keep);
        double d = 0.0;
        for (int i = 0; i < rho.dim; ++i)
            for (int j = 0; j < rho.dim; ++j) d = std::max(d, std::abs(rho.at(i, j) - ref.at(i, j)));
        CHECK(d < 1e-12);
        CHECK(std::abs(rho.trace() - cplx{1.0, 0.0}) < 1e-10);
        // purity <= 1
        double purity = 0.0;
        for (int i = 0; i < rho.dim; ++i)
            for (int j = 0; j < rho.dim; ++j) purity += std::norm(rho.at(i, j));
        CHECK(purity <= 1.0 + 1e-10);
        validate_density(rho);
    }
}

TEST_CASE("partial trace of the alpha family marginal") {
    // sqrt(a)|00> + sqrt(1-a)|11> with a = 1/4: marginal diag(1/4, 3/4)
    StateVector psi(2);
    psi[0] = std::sqrt(0.25);
    psi[3] = std::sqrt(0.75);
    const DensityMatrix rho = partial_trace(psi, {0});
    CHECK(rho.at(0, 0).real() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rho.at(1, 1).real() == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("hermitian_eig on known matrices") {
    CMatrix diag(2);
    diag.at(0, 0) = 2.0;
    diag.at(1, 1) = 1.0;
    EigResult eig = hermitian_eig(diag);
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eig.values[1] == doctest::Approx(2.0).epsilon(1e-14));

    CMatrix sx(2);
    sx.at(0, 1) = 1.0;
    sx.at(1, 0) = 1.0;
    eig = hermitian_eig(sx);
    CHECK(eig.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-12));

    CMatrix bad(2);
    bad.at(0, 1) = 1.0; // not Hermitian
    CHECK_THROWS_AS(hermitian_eig(bad), std::invalid_argument);
}

TEST_CASE("hermitian_eig reconstruction on random matrices") {
    Rng rng(55);
    for (int trial = 0; trial < 3; ++trial) {
        const int n = 8;
        CMatrix a(n);
        for (int i = 0; i < n; ++i) {
            a.at(i, i) = rng.normal();
            for (int j = i + 1; j < n; ++j) {
                a.at(i, j) = cplx{rng.normal(), rng.normal()};
                a.at(j, i) = std::conj(a.at(i, j));
            }
        }
        const EigResult eig = hermitian_eig(a);
        // residual ||A v - lambda v||
        for (int k = 0; k < n; ++k) {
            double res = 0.0;
            for (int i = 0; i < n; ++i) {
                cplx av{0.0, 0.0};
                for (int j = 0; j < n; ++j) av += a.at(i, j) * eig.vectors.at(j, k);
                res += std::norm(av - eig.values[k] * eig.vectors.at(i, k));
            }
            CHECK(std::sqrt(res) < 1e-8 * a.frobenius());
        }
        // reconstruction ||V L V^dag - A||
        double recon = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cplx v{0.0, 0.0};
                for (int k = 0; k < n; ++k)
                    v += eig.vectors.at(i, k) * eig.values[k] * std::conj(eig.vectors.at(j, k));
                recon = std::max(recon, std::abs(v - a.at(i, j)));
            }
        CHECK(recon < 1e-8 * a.frobenius());
    }
}

TEST_CASE("sqrt_psd squares back") {
    const StateVector psi = random_state(3, 13);
    const DensityMatrix rho = partial_trace(psi, {0, 1});
    const CMatrix s = sqrt_psd(rho);
    double d = 0.0;
    for (int i = 0; i < rho.dim; ++i)
        for (int j = 0; j < rho.dim; ++j) {
            cplx v{0.0, 0.0};
            for (int k = 0; k < rho.dim; ++k) v += s.at(i, k) * s.at(k, j);
            d = std::max(d, std::abs(v - rho.at(i, j)));
        }
    CHECK(d < 1e-9);
}
