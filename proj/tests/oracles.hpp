#pragma once

// Test-only dense oracles, deliberately independent of the library's
// apply/evolve paths: operators are materialized by explicit Kronecker
// products and evolution goes through the dense eigendecomposition.

#include <complex>
#include <vector>

#include "fragsim/statevector.hpp"

namespace oracle {

using fragsim::cplx;
using Dense = std::vector<std::vector<cplx>>;

inline Dense dense_identity(std::size_t dim) {
    Dense m(dim, std::vector<cplx>(dim, cplx{0.0, 0.0}));
    for (std::size_t i = 0; i < dim; ++i) m[i][i] = 1.0;
    return m;
}

inline Dense kron(const Dense& a, const Dense& b) {
    const std::size_t ra = a.size(), rb = b.size();
    Dense out(ra * rb, std::vector<cplx>(ra * rb, cplx{0.0, 0.0}));
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ra; ++j)
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < rb; ++l)
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
    return out;
}

inline Dense spin_half(fragsim::Axis axis) {
    const cplx I{0.0, 1.0};
    switch (axis) {
    case fragsim::Axis::X: return {{0.0, 0.5}, {0.5, 0.0}};
    case fragsim::Axis::Y: return {{0.0, -0.5 * I}, {0.5 * I, 0.0}};
    default: return {{0.5, 0.0}, {0.0, -0.5}};
    }
}

// Dense matrix of a Pauli-string sum on n qubits (qubit 0 leftmost in the
// Kronecker chain, matching the MSB index convention).
inline Dense dense_operator(const fragsim::HermitianOperator& op, int n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    Dense total(dim, std::vector<cplx>(dim, cplx{0.0, 0.0}));
    for (const fragsim::PauliString& term : op.terms) {
        Dense acc{{cplx{term.coefficient, 0.0}}};
        for (int q = 0; q < n_qubits; ++q) {
            bool found = false;
            for (const auto& [tq, axis] : term.factors) {
                if (tq == q) {
                    acc = kron(acc, spin_half(axis));
                    found = true;
                    break;
                }
            }
            if (!found) acc = kron(acc, dense_identity(2));
        }
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) total[i][j] += acc[i][j];
    }
    return total;
}

inline std::vector<cplx> matvec(const Dense& m, const std::vector<cplx>& v) {
    std::vector<cplx> out(m.size(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

inline fragsim::StateVector dense_apply(const fragsim::HermitianOperator& op,
                                        const fragsim::StateVector& psi) {
    const Dense m = dense_operator(op, psi.n_qubits);
    fragsim::StateVector out(psi.n_qubits);
    out.amps = matvec(m, psi.amps);
    return out;
}

// exp(-i H t) |psi> through the dense eigendecomposition of the oracle matrix.
inline fragsim::StateVector dense_evolve(const fragsim::HermitianOperator& op,
                                         const fragsim::StateVector& psi, double t) {
    const Dense m = dense_operator(op, psi.n_qubits);
    fragsim::CMatrix cm(static_cast<int>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            cm.at(static_cast<int>(i), static_cast<int>(j)) = m[i][j];
    const fragsim::EigResult eig = fragsim::hermitian_eig(cm);

    const int dim = cm.dim;
    std::vector<cplx> coeffs(dim, cplx{0.0, 0.0});
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
            coeffs[k] += std::conj(eig.vectors.at(i, k)) * psi.amps[i];
    fragsim::StateVector out(psi.n_qubits);
    for (int k = 0; k < dim; ++k) {
        const cplx phase = std::exp(cplx{0.0, -eig.values[k] * t});
        for (int i = 0; i < dim; ++i) out.amps[i] += phase * coeffs[k] * eig.vectors.at(i, k);
    }
    return out;
}

// Dense density matrix over `keep` built from the full outer product.
inline fragsim::CMatrix dense_partial_trace(const fragsim::StateVector& psi,
                                            const std::vector<int>& keep) {
    const int n = psi.n_qubits;
    const int nk = static_cast<int>(keep.size());
    const std::size_t dk = std::size_t{1} << nk;
    fragsim::CMatrix rho(static_cast<int>(dk));
    for (std::size_t x = 0; x < psi.dim(); ++x) {
        for (std::size_t y = 0; y < psi.dim(); ++y) {
            // rows/cols of the reduced matrix from the kept bits; only pairs
            // with identical traced bits contribute
            bool same_env = true;
            for (int q = 0; q < n && same_env; ++q) {
                bool kept = false;
                for (int kq : keep) kept |= kq == q;
                if (!kept) same_env = ((x >> (n - 1 - q)) & 1ULL) == ((y >> (n - 1 - q)) & 1ULL);
            }
            if (!same_env) continue;
            std::size_t r = 0, c = 0;
            for (int i = 0; i < nk; ++i) {
                if ((x >> (n - 1 - keep[i])) & 1ULL) r |= std::size_t{1} << (nk - 1 - i);
                if ((y >> (n - 1 - keep[i])) & 1ULL) c |= std::size_t{1} << (nk - 1 - i);
            }
            rho.at(static_cast<int>(r), static_cast<int>(c)) +=
                psi.amps[x] * std::conj(psi.amps[y]);
        }
    }
    return rho;
}

} // namespace oracle
