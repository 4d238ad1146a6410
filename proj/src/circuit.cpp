#include "fragsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fragsim {

namespace {

void check_spec(const AnsatzSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("ansatz requires n >= 1");
    if (spec.brick_layers < 0 || spec.entangling_layers() < 0)
        throw std::invalid_argument("layer counts must be non-negative");
}

int brick_entanglers(int n, int layer) {
    int count = 0;
    for (int q = layer % 2; q + 1 < n; q += 2) ++count;
    return count;
}

} // namespace

int brickwork_param_count(const AnsatzSpec& spec) {
    check_spec(spec);
    int count = 0;
    for (int l = 0; l < spec.brick_layers; ++l)
        count += 2 * spec.n + brick_entanglers(spec.n, l);
    return count;
}

int alltoall_param_count(const AnsatzSpec& spec) {
    check_spec(spec);
    return spec.entangling_layers() * (2 * spec.n + spec.n * (spec.n - 1) / 2);
}

int total_param_count(const AnsatzSpec& spec) {
    return brickwork_param_count(spec) + alltoall_param_count(spec);
}

std::vector<double> ParamVector::flat() const {
    std::vector<double> out = theta;
    out.insert(out.end(), phi.begin(), phi.end());
    return out;
}

ParamVector ParamVector::from_flat(const AnsatzSpec& spec, const std::vector<double>& values) {
    const int n_theta = brickwork_param_count(spec);
    const int n_total = total_param_count(spec);
    if (static_cast<int>(values.size()) != n_total)
        throw std::invalid_argument("parameter count does not match the ansatz");
    ParamVector pv;
    pv.theta.assign(values.begin(), values.begin() + n_theta);
    pv.phi.assign(values.begin() + n_theta, values.end());
    return pv;
}

Circuit build_brickwork_circuit(const AnsatzSpec& spec) {
    check_spec(spec);
    Circuit c;
    c.n_qubits = spec.n;
    int p = 0;
    for (int l = 0; l < spec.brick_layers; ++l) {
        for (int q = 0; q < spec.n; ++q) {
            c.gates.push_back({GateKind::RX, q, -1, p++});
            c.gates.push_back({GateKind::RY, q, -1, p++});
        }
        for (int q = l % 2; q + 1 < spec.n; q += 2)
            c.gates.push_back({GateKind::CRZ, q, q + 1, p++});
    }
    c.n_params = p;
    return c;
}

Circuit build_full_circuit(const AnsatzSpec& spec) {
    Circuit c = build_brickwork_circuit(spec);
    int p = c.n_params;
    for (int l = 0; l < spec.entangling_layers(); ++l) {
        for (int q = 0; q < spec.n; ++q) {
            c.gates.push_back({GateKind::RX, q, -1, p++});
            c.gates.push_back({GateKind::RY, q, -1, p++});
        }
        for (int i = 0; i < spec.n; ++i)
            for (int j = i + 1; j < spec.n; ++j)
                c.gates.push_back({GateKind::CRZ, i, j, p++});
    }
    c.n_params = p;
    return c;
}

void apply_gate(StateVector& psi, const Gate& gate, double angle) {
    const int n = psi.n_qubits;
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const std::size_t dim = psi.dim();

    switch (gate.kind) {
    case GateKind::RX: {
        const std::size_t bit = std::size_t{1} << (n - 1 - gate.q0);
        const cplx is{0.0, -s};
        for (std::size_t x = 0; x < dim; ++x) {
            if (x & bit) continue;
            const cplx a = psi[x];
            const cplx b = psi[x | bit];
            psi[x] = c * a + is * b;
            psi[x | bit] = is * a + c * b;
        }
        break;
    }
    case GateKind::RY: {
        const std::size_t bit = std::size_t{1} << (n - 1 - gate.q0);
        for (std::size_t x = 0; x < dim; ++x) {
            if (x & bit) continue;
            const cplx a = psi[x];
            const cplx b = psi[x | bit];
            psi[x] = c * a - s * b;
            psi[x | bit] = s * a + c * b;
        }
        break;
    }
    case GateKind::CRZ: {
        const std::size_t cbit = std::size_t{1} << (n - 1 - gate.q0);
        const std::size_t tbit = std::size_t{1} << (n - 1 - gate.q1);
        const cplx lo{c, -s}; // e^{-i angle/2} on target |0>
        const cplx hi{c, s};  // e^{+i angle/2} on target |1>
        for (std::size_t x = 0; x < dim; ++x) {
            if (!(x & cbit)) continue;
            psi[x] *= (x & tbit) ? hi : lo;
        }
        break;
    }
    }
}

StateVector run_circuit(const Circuit& circuit, const std::vector<double>& params,
                        const StateVector& psi0) {
    if (static_cast<int>(params.size()) != circuit.n_params)
        throw std::invalid_argument("parameter count does not match the circuit");
    if (psi0.n_qubits != circuit.n_qubits)
        throw std::invalid_argument("initial state does not match the circuit width");
    StateVector psi = psi0;
    for (const Gate& g : circuit.gates) apply_gate(psi, g, params[g.param]);
    return psi;
}

namespace {

// Im <b| G |phi> for the gate generator G (X, Y, or |1><1| Z); the factor
// -i/2 from dU = -i (G/2) U combines with the 2 Re(...) of the chain rule.
double generator_overlap_im(const Gate& gate, const StateVector& b, const StateVector& phi) {
    const int n = b.n_qubits;
    const std::size_t dim = b.dim();
    cplx acc{0.0, 0.0};
    switch (gate.kind) {
    case GateKind::RX: {
        const std::size_t bit = std::size_t{1} << (n - 1 - gate.q0);
        for (std::size_t x = 0; x < dim; ++x) {
            if (x & bit) continue;
            acc += std::conj(b[x]) * phi[x | bit] + std::conj(b[x | bit]) * phi[x];
        }
        break;
    }
    case GateKind::RY: {
        const std::size_t bit = std::size_t{1} << (n - 1 - gate.q0);
        const cplx i{0.0, 1.0};
        for (std::size_t x = 0; x < dim; ++x) {
            if (x & bit) continue;
            acc += std::conj(b[x]) * (-i) * phi[x | bit] + std::conj(b[x | bit]) * i * phi[x];
        }
        break;
    }
    case GateKind::CRZ: {
        const std::size_t cbit = std::size_t{1} << (n - 1 - gate.q0);
        const std::size_t tbit = std::size_t{1} << (n - 1 - gate.q1);
        for (std::size_t x = 0; x < dim; ++x) {
            if (!(x & cbit)) continue;
            const cplx term = std::conj(b[x]) * phi[x];
            acc += (x & tbit) ? -term : term;
        }
        break;
    }
    }
    return acc.imag();
}

} // namespace

std::pair<double, std::vector<double>> energy_and_gradient(const Circuit& circuit,
                                                           const std::vector<double>& params,
                                                           const HermitianOperator& hamiltonian,
                                                           const StateVector& psi0) {
    if (hamiltonian.max_qubit() >= circuit.n_qubits)
        throw std::invalid_argument("Hamiltonian acts outside the circuit width");
    StateVector phi = run_circuit(circuit, params, psi0);
    const double energy = expectation(hamiltonian, phi);
    StateVector b = apply_pauli_sum(hamiltonian, phi);

    std::vector<double> grad(circuit.n_params, 0.0);
    for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
        const Gate& g = *it;
        grad[g.param] += generator_overlap_im(g, b, phi);
        apply_gate(phi, g, -params[g.param]);
        apply_gate(b, g, -params[g.param]);
    }
    return {energy, std::move(grad)};
}

std::vector<FragmentCircuit> fragment_circuit(const AnsatzSpec& spec,
                                              const FragmentLayout& layout) {
    check_spec(spec);
    if (spec.n != layout.n) throw std::invalid_argument("ansatz width does not match the layout");
    const Circuit global = build_brickwork_circuit(spec);

    std::vector<FragmentCircuit> out;
    for (int f = 0; f < layout.n_fragments(); ++f) {
        FragmentCircuit fc;
        fc.registers = layout.registers(f);
        std::vector<int> to_local(spec.n, -1);
        for (std::size_t r = 0; r < fc.registers.size(); ++r) {
            if (to_local[fc.registers[r]] >= 0)
                throw std::invalid_argument("duplicate register claim in fragment");
            to_local[fc.registers[r]] = static_cast<int>(r);
        }

        fc.circuit.n_qubits = static_cast<int>(fc.registers.size());
        fc.circuit.n_params = global.n_params;
        std::set<int> params;
        std::set<int> writeback;
        for (const Gate& g : global.gates) {
            const int l0 = to_local[g.q0];
            const int l1 = g.q1 < 0 ? 0 : to_local[g.q1];
            if (l0 < 0 || l1 < 0) continue;
            Gate mapped = g;
            mapped.q0 = l0;
            if (g.q1 >= 0) mapped.q1 = l1;
            fc.circuit.gates.push_back(mapped);
            params.insert(g.param);
            const bool touches_system =
                layout.contains(f, g.q0) || (g.q1 >= 0 && layout.contains(f, g.q1));
            if (touches_system) writeback.insert(g.param);
        }
        fc.param_indices.assign(params.begin(), params.end());
        fc.writeback_params.assign(writeback.begin(), writeback.end());
        out.push_back(std::move(fc));
    }
    return out;
}

} // namespace fragsim
