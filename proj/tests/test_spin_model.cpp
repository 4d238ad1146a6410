#include <doctest.h>

#include <cmath>

#include "fragsim/rng.hpp"
#include "fragsim/spin_model.hpp"

#include "oracles.hpp"

using namespace fragsim;

TEST_CASE("tfim chain layout") {
    const SpinModel m = build_tfim_chain(3, 1.0, 0.0);
    CHECK(m.couplings.size() == 2);
    CHECK(m.coupling(0, 1, Axis::Z, Axis::Z) == 1.0);
    CHECK(m.coupling(1, 2, Axis::Z, Axis::Z) == 1.0);
    CHECK(m.coupling(0, 2, Axis::Z, Axis::Z) == 0.0);
    for (double h : m.fields) CHECK(h == 0.0);
    CHECK_THROWS_AS(build_tfim_chain(1, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("coupling keys canonicalize and reject self-couplings") {
    SpinModel m(3);
    m.set_coupling(2, 0, Axis::X, Axis::Z, 0.7);
    CHECK(m.coupling(0, 2, Axis::Z, Axis::X) == 0.7);
    CHECK(m.coupling(2, 0, Axis::X, Axis::Z) == 0.7);
    CHECK_THROWS_AS(m.set_coupling(1, 1, Axis::Z, Axis::Z, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(m.set_coupling(0, 3, Axis::Z, Axis::Z, 1.0), std::out_of_range);
}

TEST_CASE("two-site chain ground energy") {
    // J = 1, h = 0: spectrum {-1/4, -1/4, 1/4, 1/4}
    const SpinModel m = build_tfim_chain(2, 1.0, 0.0);
    const auto dense = oracle::dense_operator(assemble(m), 2);
    CMatrix cm(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) cm.at(i, j) = dense[i][j];
    const EigResult eig = hermitian_eig(cm);
    CHECK(eig.values[0] == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(eig.values[1] == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(eig.values[2] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(eig.values[3] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("random ising ensemble determinism and edge cases") {
    GraphEnsembleConfig cfg;
    cfg.n = 6;
    cfg.seed = 42;

    cfg.edge_prob = 0.0;
    CHECK(sample_random_ising(cfg, 1.0).couplings.empty());

    cfg.edge_prob = 1.0;
    cfg.weight_std = 0.0;
    cfg.weight_mean = 1.0;
    const SpinModel complete = sample_random_ising(cfg, 1.0);
    CHECK(complete.couplings.size() == 15);
    for (const auto& [key, v] : complete.couplings) {
        (void)key;
        CHECK(v == 1.0);
    }

    cfg.edge_prob = 0.5;
    cfg.weight_std = 1.0;
    cfg.weight_mean = 0.0;
    const SpinModel a = sample_random_ising(cfg, 1.0);
    const SpinModel b = sample_random_ising(cfg, 1.0);
    CHECK(spin_model_to_json(a) == spin_model_to_json(b));
    cfg.seed = 43;
    CHECK(spin_model_to_json(a) != spin_model_to_json(sample_random_ising(cfg, 1.0)));

    cfg.edge_prob = 1.5;
    CHECK_THROWS_AS(sample_random_ising(cfg, 1.0), std::invalid_argument);
}

TEST_CASE("edge count statistics over the seeded ensemble") {
    GraphEnsembleConfig cfg;
    cfg.n = 8;
    const double pairs = cfg.n * (cfg.n - 1) / 2.0;
    double total = 0.0;
    const int trials = 1000;
    for (int s = 0; s < trials; ++s) {
        cfg.seed = derive_seed(1234, s);
        total += static_cast<double>(sample_random_ising(cfg, 1.0).couplings.size());
    }
    const double mean = total / trials;
    // binomial: mean p*pairs, sigma of the sample mean
    const double expected = 0.5 * pairs;
    const double sigma = std::sqrt(pairs * 0.25 / trials);
    CHECK(std::abs(mean - expected) < 3.0 * sigma);
}

TEST_CASE("all-to-all gaussian sampler") {
    const SpinModel m = sample_all_to_all_gaussian(5, 7, 0.0);
    CHECK(m.couplings.size() == 10);
    CHECK(m.is_classical());
    const SpinModel m2 = sample_all_to_all_gaussian(5, 7, 0.0);
    CHECK(spin_model_to_json(m) == spin_model_to_json(m2));

    const SpinModel two = sample_all_to_all_gaussian(2, 99, 0.5);
    CHECK(two.couplings.size() == 1);
    CHECK_FALSE(two.is_classical());
}

TEST_CASE("assemble term structure") {
    CHECK(assemble(SpinModel(3)).terms.empty());

    const SpinModel m = build_tfim_chain(2, 1.0, 1.0);
    const HermitianOperator op = assemble(m);
    CHECK(op.terms.size() == 3);
    for (const PauliString& t : op.terms) CHECK(t.coefficient == -1.0);
}

TEST_CASE("assemble is linear in couplings and fields") {
    SpinModel m(2);
    m.set_coupling(0, 1, Axis::Z, Axis::Z, 2.0);
    m.fields[0] = 3.0;
    SpinModel scaled = m;
    for (auto& [k, v] : scaled.couplings) {
        (void)k;
        v *= 2.0;
    }
    for (double& h : scaled.fields) h *= 2.0;

    const StateVector psi = basis_state(2, 2);
    StateVector once = apply_pauli_sum(assemble(m), psi);
    const StateVector twice = apply_pauli_sum(assemble(scaled), psi);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(twice[i] - 2.0 * once[i]) < 1e-14);
}

TEST_CASE("flip symmetry of classical energies") {
    // h = 0 spectra are invariant under flipping every spin
    for (int n = 2; n <= 10; n += 2) {
        const SpinModel m = sample_all_to_all_gaussian(n, 1000 + n, 0.0);
        const HermitianOperator op = assemble(m);
        const std::size_t dim = std::size_t{1} << n;
        const std::size_t mask = dim - 1;
        for (std::size_t x = 0; x < dim / 2; ++x) {
            const double ex = expectation(op, basis_state(n, x));
            const double ef = expectation(op, basis_state(n, x ^ mask));
            CHECK(ex == doctest::Approx(ef).epsilon(1e-12));
        }
    }
}

TEST_CASE("spin model json round trip") {
    GraphEnsembleConfig cfg;
    cfg.n = 5;
    cfg.seed = 11;
    const SpinModel m = sample_random_ising(cfg, 0.7);
    const SpinModel back = spin_model_from_json(spin_model_to_json(m));
    CHECK(back.n == m.n);
    CHECK(back.couplings == m.couplings);
    CHECK(back.fields == m.fields);
    CHECK(back.seed == m.seed);
}
