#include "fragsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fragsim/rng.hpp"

namespace fragsim {

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim != sigma.dim)
        throw std::invalid_argument("fidelity requires matching reduced dimensions");
    const int n = rho.dim;
    const CMatrix s = sqrt_psd(rho);

    // m = sqrt(rho) sigma sqrt(rho)
    CMatrix tmp(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cplx sik = s.at(i, k);
            if (sik == cplx{0.0, 0.0}) continue;
            for (int j = 0; j < n; ++j) tmp.at(i, j) += sik * sigma.at(k, j);
        }
    CMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cplx tik = tmp.at(i, k);
            if (tik == cplx{0.0, 0.0}) continue;
            for (int j = 0; j < n; ++j) m.at(i, j) += tik * s.at(k, j);
        }

    const EigResult eig = hermitian_eig(m);
    double trace_sqrt = 0.0;
    for (double lam : eig.values) trace_sqrt += std::sqrt(std::max(lam, 0.0));
    return trace_sqrt * trace_sqrt;
}

double fragment_fidelity(const StateVector& frag_state, const StateVector& exact_full,
                         const FragmentLayout& layout, int f) {
    const auto& system_spins = layout.partition.at(f);
    const int n_sys = static_cast<int>(system_spins.size());
    const int n_regs = n_sys + static_cast<int>(layout.aux_targets.at(f).size());
    if (frag_state.n_qubits != n_regs)
        throw std::invalid_argument("fragment state does not match the fragment register count");
    if (exact_full.n_qubits != layout.n)
        throw std::invalid_argument("exact state does not cover the full system");

    std::vector<int> local_keep(n_sys);
    for (int r = 0; r < n_sys; ++r) local_keep[r] = r;
    const DensityMatrix rho = partial_trace(frag_state, local_keep);
    const DensityMatrix rho_ex = partial_trace(exact_full, system_spins);
    return uhlmann_fidelity(rho, rho_ex);
}

double concurrence(const StateVector& psi) {
    if (psi.n_qubits != 2) throw std::invalid_argument("concurrence requires a two-qubit state");
    return 2.0 * std::abs(psi[0] * psi[3] - psi[1] * psi[2]);
}

VarianceDiff variance_diff(const StateVector& psi) {
    if (psi.n_qubits != 2) throw std::invalid_argument("variance_diff requires a two-qubit state");

    // coupling scaled to sigma_z sigma_z; qubit 0 is the fragment side
    HermitianOperator zz;
    zz.add(4.0, {{0, Axis::Z}, {1, Axis::Z}});

    const auto variance = [&psi](const HermitianOperator& op) {
        const StateVector opsi = apply_pauli_sum(op, psi);
        const cplx mean = inner(psi, opsi);
        double second = 0.0;
        for (const cplx& c : opsi.amps) second += std::norm(c);
        return second - std::norm(mean);
    };

    VarianceDiff out;
    out.v = variance(zz);
    const double mean_env = 2.0 * site_expectation(psi, 1, Axis::Z); // <sigma_z^{(1)}>
    // var(sigma_z^{(0)} (sigma_z^{(1)} - <sigma_z^{(1)}>))
    HermitianOperator corrected = zz;
    corrected.add(-2.0 * mean_env, {{0, Axis::Z}});
    out.v_mf = variance(corrected);
    out.concurrence = concurrence(psi);
    return out;
}

StateVector random_two_qubit_state(std::uint64_t seed) {
    Rng rng(seed);
    StateVector psi(2);
    for (std::size_t i = 0; i < 4; ++i) psi[i] = cplx{rng.normal(), rng.normal()};
    psi.normalize();
    return psi;
}

StateVector family_state(StateFamily family, double param) {
    StateVector psi(2);
    switch (family) {
    case StateFamily::Alpha: {
        if (param < 0.0 || param > 1.0)
            throw std::out_of_range("alpha must lie in [0, 1]");
        psi[0] = std::sqrt(param);
        psi[3] = std::sqrt(1.0 - param);
        break;
    }
    case StateFamily::Theta: {
        psi[0] = std::cos(param / 2.0);
        psi[2] = cplx{0.0, -1.0} * std::sin(param / 2.0);
        break;
    }
    case StateFamily::Beta: {
        const double norm = 1.0 / std::sqrt(2.0 + 2.0 * param * param);
        psi[0] = norm;
        psi[1] = param * norm;
        psi[2] = -norm;
        psi[3] = param * norm;
        break;
    }
    }
    psi.normalize();
    return psi;
}

std::pair<double, double> local_expectations(const StateVector& psi, int site) {
    return {site_expectation(psi, site, Axis::X), site_expectation(psi, site, Axis::Z)};
}

std::pair<double, double> local_expectations(const DensityMatrix& rho) {
    if (rho.dim != 2) throw std::invalid_argument("expected a single-qubit density matrix");
    // Tr(rho S_x) = Re rho_10, Tr(rho S_z) = (rho_00 - rho_11) / 2
    const double sx = rho.at(1, 0).real();
    const double sz = 0.5 * (rho.at(0, 0).real() - rho.at(1, 1).real());
    return {sx, sz};
}

} // namespace fragsim
