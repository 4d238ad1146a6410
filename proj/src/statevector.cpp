#include "fragsim/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace fragsim {

char axis_char(Axis a) {
    switch (a) {
    case Axis::X: return 'x';
    case Axis::Y: return 'y';
    default: return 'z';
    }
}

Axis axis_from_char(char c) {
    switch (c) {
    case 'x': case 'X': return Axis::X;
    case 'y': case 'Y': return Axis::Y;
    case 'z': case 'Z': return Axis::Z;
    default: throw std::invalid_argument(std::string("unknown axis '") + c + "'");
    }
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cplx& c : amps) s += std::norm(c);
    return std::sqrt(s);
}

void StateVector::normalize() {
    const double n = norm();
    if (n <= 0.0) throw std::invalid_argument("cannot normalize a zero state");
    for (cplx& c : amps) c /= n;
}

StateVector basis_state(int n_qubits, std::size_t index) {
    if (n_qubits < 1 || n_qubits > 30) throw std::invalid_argument("unsupported qubit count");
    StateVector psi(n_qubits);
    if (index >= psi.dim()) throw std::out_of_range("basis index out of range");
    psi[index] = cplx{1.0, 0.0};
    return psi;
}

cplx inner(const StateVector& a, const StateVector& b) {
    if (a.n_qubits != b.n_qubits) throw std::invalid_argument("state dimension mismatch");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

std::size_t basis_index_of(const StateVector& psi) {
    std::size_t best = 0;
    double best_w = -1.0;
    double rest = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        const double w = std::norm(psi[i]);
        if (w > best_w) {
            rest += (best_w > 0.0 ? best_w : 0.0);
            best_w = w;
            best = i;
        } else {
            rest += w;
        }
    }
    if (rest > 1e-12) throw std::invalid_argument("state is not a computational basis state");
    return best;
}

PauliString::PauliString(double c, std::vector<std::pair<int, Axis>> f)
    : coefficient(c), factors(std::move(f)) {
    std::sort(factors.begin(), factors.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
        if (factors[i].first == factors[i + 1].first)
            throw std::invalid_argument("duplicate qubit in Pauli string");
    }
    if (!factors.empty() && factors.front().first < 0)
        throw std::out_of_range("negative qubit index in Pauli string");
}

int PauliString::max_qubit() const {
    return factors.empty() ? -1 : factors.back().first;
}

HermitianOperator& HermitianOperator::add(double coefficient,
                                          std::vector<std::pair<int, Axis>> factors) {
    terms.emplace_back(coefficient, std::move(factors));
    return *this;
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& other) {
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
    return *this;
}

void HermitianOperator::scale(double s) {
    for (PauliString& t : terms) t.coefficient *= s;
}

int HermitianOperator::max_qubit() const {
    int m = -1;
    for (const PauliString& t : terms) m = std::max(m, t.max_qubit());
    return m;
}

double HermitianOperator::norm_bound() const {
    double b = 0.0;
    for (const PauliString& t : terms)
        b += std::abs(t.coefficient) * std::pow(0.5, static_cast<double>(t.factors.size()));
    return b;
}

namespace {

struct TermMasks {
    std::size_t flip = 0;  // bits flipped by x and y factors
    std::size_t phase = 0; // bits contributing (-1)^bit (y and z factors)
    int n_y = 0;
    cplx scale{0.0, 0.0}; // coefficient * 2^{-k} * i^{n_y}
};

TermMasks term_masks(const PauliString& t, int n_qubits) {
    TermMasks m;
    for (const auto& [q, ax] : t.factors) {
        if (q < 0 || q >= n_qubits) throw std::out_of_range("Pauli qubit index out of range");
        const std::size_t bit = std::size_t{1} << (n_qubits - 1 - q);
        switch (ax) {
        case Axis::X: m.flip |= bit; break;
        case Axis::Y: m.flip |= bit; m.phase |= bit; ++m.n_y; break;
        case Axis::Z: m.phase |= bit; break;
        }
    }
    static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    m.scale = t.coefficient * std::pow(0.5, static_cast<double>(t.factors.size())) * ipow[m.n_y & 3];
    return m;
}

} // namespace

StateVector apply_pauli_sum(const HermitianOperator& op, const StateVector& psi) {
    StateVector out(psi.n_qubits);
    const std::size_t dim = psi.dim();
    for (const PauliString& t : op.terms) {
        const TermMasks m = term_masks(t, psi.n_qubits);
        if (m.flip == 0 && m.phase == 0) {
            for (std::size_t x = 0; x < dim; ++x) out[x] += m.scale * psi[x];
            continue;
        }
        for (std::size_t x = 0; x < dim; ++x) {
            const int par = std::popcount(x & m.phase) & 1;
            const cplx v = par ? -m.scale : m.scale;
            out[x ^ m.flip] += v * psi[x];
        }
    }
    return out;
}

double expectation(const HermitianOperator& op, const StateVector& psi) {
    const StateVector hpsi = apply_pauli_sum(op, psi);
    const cplx e = inner(psi, hpsi);
    if (std::abs(e.imag()) > 1e-10 * (1.0 + std::abs(e.real())))
        throw NumericalError("non-real expectation of Hermitian operator", std::abs(e.imag()));
    return e.real();
}

double site_expectation(const StateVector& psi, int qubit, Axis axis) {
    if (qubit < 0 || qubit >= psi.n_qubits) throw std::out_of_range("site index out of range");
    const std::size_t bit = std::size_t{1} << (psi.n_qubits - 1 - qubit);
    const std::size_t dim = psi.dim();
    double e = 0.0;
    switch (axis) {
    case Axis::Z:
        for (std::size_t x = 0; x < dim; ++x)
            e += ((x & bit) ? -0.5 : 0.5) * std::norm(psi[x]);
        break;
    case Axis::X:
        // <S_x> = Re sum_{x: bit clear} conj(psi[x]) psi[x^bit]
        for (std::size_t x = 0; x < dim; ++x) {
            if (x & bit) continue;
            e += (std::conj(psi[x]) * psi[x ^ bit]).real();
        }
        break;
    case Axis::Y:
        // S_y |0> = i/2 |1>, so <S_y> = Im sum_{x: bit clear} conj(psi[x]) psi[x^bit]
        for (std::size_t x = 0; x < dim; ++x) {
            if (x & bit) continue;
            e += (std::conj(psi[x]) * psi[x ^ bit]).imag();
        }
        break;
    }
    return e;
}

StateVector evolve_step(const HermitianOperator& op, const StateVector& psi, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("evolve_step requires dt > 0");
    if (op.max_qubit() >= psi.n_qubits) throw std::out_of_range("operator qubit out of range");

    const double bound = op.norm_bound();
    const int substeps = std::max(1, static_cast<int>(std::ceil(bound * dt)));
    const double dts = dt / substeps;
    constexpr int kMaxOrder = 96;
    constexpr double kTermTol = 1e-13;

    StateVector state = psi;
    for (int s = 0; s < substeps; ++s) {
        StateVector result = state;
        StateVector term = state;
        bool converged = op.empty();
        double term_norm = 0.0;
        for (int j = 1; j <= kMaxOrder && !converged; ++j) {
            StateVector hterm = apply_pauli_sum(op, term);
            const cplx factor = cplx{0.0, -dts} / static_cast<double>(j);
            term_norm = 0.0;
            for (std::size_t x = 0; x < hterm.dim(); ++x) {
                hterm[x] *= factor;
                result[x] += hterm[x];
                term_norm += std::norm(hterm[x]);
            }
            term = std::move(hterm);
            term_norm = std::sqrt(term_norm);
            converged = term_norm < kTermTol;
        }
        if (!converged)
            throw NumericalError("propagator series did not converge", term_norm);
        state = std::move(result);
    }

    const double n = state.norm();
    if (std::abs(n - 1.0) > 1e-8)
        throw NumericalError("propagator lost unitarity", std::abs(n - 1.0));
    for (cplx& c : state.amps) c /= n;
    return state;
}

CMatrix CMatrix::identity(int d) {
    CMatrix m(d);
    for (int i = 0; i < d; ++i) m.at(i, i) = cplx{1.0, 0.0};
    return m;
}

double CMatrix::frobenius() const {
    double s = 0.0;
    for (const cplx& c : a) s += std::norm(c);
    return std::sqrt(s);
}

double CMatrix::max_hermiticity_violation() const {
    double v = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j)
            v = std::max(v, std::abs(at(i, j) - std::conj(at(j, i))));
    return v;
}

cplx CMatrix::trace() const {
    cplx t{0.0, 0.0};
    for (int i = 0; i < dim; ++i) t += at(i, i);
    return t;
}

DensityMatrix partial_trace(const StateVector& psi, const std::vector<int>& keep) {
    const int n = psi.n_qubits;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= n) throw std::out_of_range("partial_trace index out of range");
        for (std::size_t j = i + 1; j < keep.size(); ++j)
            if (keep[i] == keep[j]) throw std::invalid_argument("duplicate index in partial_trace");
    }
    const int n_keep = static_cast<int>(keep.size());
    const int n_env = n - n_keep;

    std::vector<int> env;
    for (int q = 0; q < n; ++q)
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) env.push_back(q);

    // bit masks in the full index for each kept / traced qubit
    std::vector<std::size_t> keep_bit(n_keep), env_bit(n_env);
    for (int i = 0; i < n_keep; ++i) keep_bit[i] = std::size_t{1} << (n - 1 - keep[i]);
    for (int i = 0; i < n_env; ++i) env_bit[i] = std::size_t{1} << (n - 1 - env[i]);

    const std::size_t dk = std::size_t{1} << n_keep;
    const std::size_t de = std::size_t{1} << n_env;
    DensityMatrix rho(static_cast<int>(dk));
    std::vector<cplx> col(dk);
    for (std::size_t e = 0; e < de; ++e) {
        std::size_t base = 0;
        for (int i = 0; i < n_env; ++i)
            if ((e >> (n_env - 1 - i)) & 1ULL) base |= env_bit[i];
        for (std::size_t k = 0; k < dk; ++k) {
            std::size_t x = base;
            for (int i = 0; i < n_keep; ++i)
                if ((k >> (n_keep - 1 - i)) & 1ULL) x |= keep_bit[i];
            col[k] = psi[x];
        }
        for (std::size_t r = 0; r < dk; ++r) {
            if (col[r] == cplx{0.0, 0.0}) continue;
            for (std::size_t c = 0; c < dk; ++c)
                rho.at(static_cast<int>(r), static_cast<int>(c)) += col[r] * std::conj(col[c]);
        }
    }
    return rho;
}

void validate_density(const DensityMatrix& dm, double tol) {
    if (dm.max_hermiticity_violation() > tol)
        throw NumericalError("density matrix not Hermitian", dm.max_hermiticity_violation());
    const cplx t = dm.trace();
    if (std::abs(t - cplx{1.0, 0.0}) > tol)
        throw NumericalError("density matrix trace != 1", std::abs(t - cplx{1.0, 0.0}));
    const EigResult eig = hermitian_eig(dm);
    if (eig.values.front() < -1e-9)
        throw NumericalError("density matrix has negative eigenvalue", -eig.values.front());
}

EigResult hermitian_eig(const CMatrix& m) {
    if (m.dim < 1 || m.dim > 4096) throw std::invalid_argument("hermitian_eig dimension unsupported");
    if (m.max_hermiticity_violation() > 1e-8)
        throw std::invalid_argument("hermitian_eig input is not Hermitian");

    const int n = m.dim;
    CMatrix A = m;
    // force exact Hermiticity so rotations stay well conditioned
    for (int i = 0; i < n; ++i) {
        A.at(i, i) = cplx{A.at(i, i).real(), 0.0};
        for (int j = i + 1; j < n; ++j) {
            const cplx v = 0.5 * (A.at(i, j) + std::conj(A.at(j, i)));
            A.at(i, j) = v;
            A.at(j, i) = std::conj(v);
        }
    }
    CMatrix V = CMatrix::identity(n);
    const double fro = std::max(A.frobenius(), 1e-300);

    constexpr int kMaxSweeps = 80;
    double off = 0.0;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(A.at(p, q));
        off = std::sqrt(2.0 * off);
        if (off <= 1e-14 * fro) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = A.at(p, q);
                const double g = std::abs(apq);
                if (g <= 1e-300 || g <= 1e-18 * fro) continue;
                const cplx phase = apq / g;
                const double app = A.at(p, p).real();
                const double aqq = A.at(q, q).real();
                const double tau = (aqq - app) / (2.0 * g);
                double t;
                if (tau >= 0.0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx sp = s * phase;
                const cplx spc = s * std::conj(phase);

                // A <- A J (columns p, q)
                for (int k = 0; k < n; ++k) {
                    const cplx akp = A.at(k, p);
                    const cplx akq = A.at(k, q);
                    A.at(k, p) = c * akp - spc * akq;
                    A.at(k, q) = sp * akp + c * akq;
                }
                // A <- J^dagger A (rows p, q)
                for (int k = 0; k < n; ++k) {
                    const cplx apk = A.at(p, k);
                    const cplx aqk = A.at(q, k);
                    A.at(p, k) = c * apk - sp * aqk;
                    A.at(q, k) = spc * apk + c * aqk;
                }
                // V <- V J
                for (int k = 0; k < n; ++k) {
                    const cplx vkp = V.at(k, p);
                    const cplx vkq = V.at(k, q);
                    V.at(k, p) = c * vkp - spc * vkq;
                    V.at(k, q) = sp * vkp + c * vkq;
                }
            }
        }
    }
    if (off > 1e-10 * fro)
        throw NumericalError("Jacobi eigensolver did not converge", off / fro);

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return A.at(a, a).real() < A.at(b, b).real(); });

    EigResult result;
    result.values.resize(n);
    result.vectors = CMatrix(n);
    for (int k = 0; k < n; ++k) {
        result.values[k] = A.at(order[k], order[k]).real();
        for (int r = 0; r < n; ++r) result.vectors.at(r, k) = V.at(r, order[k]);
    }
    return result;
}

CMatrix sqrt_psd(const CMatrix& m) {
    const EigResult eig = hermitian_eig(m);
    const int n = m.dim;
    if (eig.values.front() < -1e-9)
        throw NumericalError("matrix is not positive semidefinite", -eig.values.front());
    CMatrix out(n);
    for (int k = 0; k < n; ++k) {
        const double lam = std::sqrt(std::max(eig.values[k], 0.0));
        if (lam == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            const cplx vik = eig.vectors.at(i, k) * lam;
            for (int j = 0; j < n; ++j)
                out.at(i, j) += vik * std::conj(eig.vectors.at(j, k));
        }
    }
    return out;
}

CMatrix dense_matrix(const HermitianOperator& op, int n_qubits) {
    if (n_qubits < 1 || n_qubits > 12) throw std::invalid_argument("dense_matrix supports n <= 12");
    const std::size_t dim = std::size_t{1} << n_qubits;
    CMatrix m(static_cast<int>(dim));
    for (std::size_t c = 0; c < dim; ++c) {
        const StateVector col = apply_pauli_sum(op, basis_state(n_qubits, c));
        for (std::size_t r = 0; r < dim; ++r)
            m.at(static_cast<int>(r), static_cast<int>(c)) = col[r];
    }
    return m;
}

} // namespace fragsim
