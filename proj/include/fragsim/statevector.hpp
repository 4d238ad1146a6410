#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fragsim {

using cplx = std::complex<double>;

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

char axis_char(Axis a);
Axis axis_from_char(char c);

// Thrown when an iterative numerical routine fails to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Dense statevector over n qubits. Qubit 0 is the most significant bit of the
// basis index: |q0 q1 ... q_{n-1}> has index q0*2^{n-1} + ... + q_{n-1}.
struct StateVector {
    int n_qubits = 0;
    std::vector<cplx> amps;

    StateVector() = default;
    explicit StateVector(int n) : n_qubits(n), amps(std::size_t{1} << n, cplx{0.0, 0.0}) {}

    std::size_t dim() const { return amps.size(); }
    cplx& operator[](std::size_t i) { return amps[i]; }
    const cplx& operator[](std::size_t i) const { return amps[i]; }

    // Bit of qubit q in basis index x.
    int bit(std::size_t x, int q) const { return static_cast<int>((x >> (n_qubits - 1 - q)) & 1ULL); }

    double norm() const;
    void normalize();
};

StateVector basis_state(int n_qubits, std::size_t index);

cplx inner(const StateVector& a, const StateVector& b);

// Index of the single nonzero amplitude, or throws if the state is not a
// computational basis state (tolerance 1e-12 on the residual weight).
std::size_t basis_index_of(const StateVector& psi);

// Spin-1/2 operator string: coefficient * prod_q S_axis^{(q)} with S = sigma/2.
// An empty factor list is a scaled identity.
struct PauliString {
    double coefficient = 1.0;
    std::vector<std::pair<int, Axis>> factors; // sorted by qubit index, unique

    PauliString() = default;
    PauliString(double c, std::vector<std::pair<int, Axis>> f);

    int max_qubit() const;
};

// Weighted Pauli-string sum with real coefficients (Hermitian by construction).
struct HermitianOperator {
    std::vector<PauliString> terms;

    HermitianOperator& add(double coefficient, std::vector<std::pair<int, Axis>> factors);
    HermitianOperator& operator+=(const HermitianOperator& other);
    void scale(double s);
    int max_qubit() const;
    bool empty() const { return terms.empty(); }

    // Upper bound on the operator norm: sum of |c| * 2^{-k} over terms.
    double norm_bound() const;
};

// H|psi> (unnormalized); the input state is unchanged.
StateVector apply_pauli_sum(const HermitianOperator& op, const StateVector& psi);

// <psi|H|psi>; asserts the imaginary residue is negligible and discards it.
double expectation(const HermitianOperator& op, const StateVector& psi);

// Single-site <S_axis^{(q)}> without building an operator.
double site_expectation(const StateVector& psi, int qubit, Axis axis);

// exp(-i op dt)|psi> via sub-stepped truncated Taylor series; the series is
// extended adaptively until the appended-term norm drops below 1e-13.
StateVector evolve_step(const HermitianOperator& op, const StateVector& psi, double dt);

// dim x dim complex matrix, row-major.
struct CMatrix {
    int dim = 0;
    std::vector<cplx> a;

    CMatrix() = default;
    explicit CMatrix(int d) : dim(d), a(static_cast<std::size_t>(d) * d, cplx{0.0, 0.0}) {}

    cplx& at(int i, int j) { return a[static_cast<std::size_t>(i) * dim + j]; }
    const cplx& at(int i, int j) const { return a[static_cast<std::size_t>(i) * dim + j]; }

    static CMatrix identity(int d);
    double frobenius() const;
    double max_hermiticity_violation() const;
    cplx trace() const;
};

using DensityMatrix = CMatrix;

// Reduced density matrix over `keep` (ordered, distinct); keep[0] is the most
// significant bit of the reduced index.
DensityMatrix partial_trace(const StateVector& psi, const std::vector<int>& keep);

// Throws unless dm is Hermitian, unit-trace and positive within tolerance.
void validate_density(const DensityMatrix& dm, double tol = 1e-9);

struct EigResult {
    std::vector<double> values; // ascending
    CMatrix vectors;            // eigenvector k in column k
};

// Cyclic Jacobi eigendecomposition of a complex Hermitian matrix.
EigResult hermitian_eig(const CMatrix& m);

// Hermitian PSD square root; eigenvalues below zero are clamped (they must be
// numerical noise above -1e-9).
CMatrix sqrt_psd(const CMatrix& m);

// Dense matrix of op on n qubits, built by applying it to basis columns.
CMatrix dense_matrix(const HermitianOperator& op, int n_qubits);

} // namespace fragsim
