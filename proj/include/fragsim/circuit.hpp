#pragma once

#include <vector>

#include "fragsim/fragment.hpp"
#include "fragsim/statevector.hpp"

namespace fragsim {

enum class GateKind { RX, RY, CRZ };

struct Gate {
    GateKind kind;
    int q0 = 0;
    int q1 = -1; // CRZ target; -1 for single-qubit gates
    int param = 0;
};

struct Circuit {
    int n_qubits = 0;
    int n_params = 0;
    std::vector<Gate> gates;
};

// Layered ansatz: brick_layers brickwork layers (x then y rotation per qubit,
// controlled-z rotations on alternating nearest-neighbor pairs) followed by
// ent_layers all-to-all layers (same single-qubit pattern, controlled-z
// rotations on every pair). ent_layers < 0 means n layers.
struct AnsatzSpec {
    int n = 0;
    int brick_layers = 4;
    int ent_layers = -1;

    int entangling_layers() const { return ent_layers < 0 ? n : ent_layers; }
};

int brickwork_param_count(const AnsatzSpec& spec);
int alltoall_param_count(const AnsatzSpec& spec);
int total_param_count(const AnsatzSpec& spec);

// Trainable angles; theta feeds the brickwork section, phi the all-to-all one.
struct ParamVector {
    std::vector<double> theta;
    std::vector<double> phi;

    std::vector<double> flat() const;
    static ParamVector from_flat(const AnsatzSpec& spec, const std::vector<double>& values);
};

// Brickwork section only; parameters [0, brickwork_param_count).
Circuit build_brickwork_circuit(const AnsatzSpec& spec);
// Full circuit; brickwork parameters first, then the all-to-all block.
Circuit build_full_circuit(const AnsatzSpec& spec);

void apply_gate(StateVector& psi, const Gate& gate, double angle);

StateVector run_circuit(const Circuit& circuit, const std::vector<double>& params,
                        const StateVector& psi0);

// Exact energy and analytic gradient via reverse-mode (adjoint)
// differentiation through the statevector.
std::pair<double, std::vector<double>> energy_and_gradient(const Circuit& circuit,
                                                           const std::vector<double>& params,
                                                           const HermitianOperator& hamiltonian,
                                                           const StateVector& psi0);

// One fragment's sub-circuit: the brickwork gates whose supports lie inside
// fragment + auxiliary-target registers, re-labeled onto local registers.
// Parameter indices stay global, so a gate shared by two fragments addresses
// the same slot in both.
struct FragmentCircuit {
    Circuit circuit;                  // n_params equals the global theta count
    std::vector<int> registers;       // global spin per local register
    std::vector<int> param_indices;   // sorted unique global indices used
    std::vector<int> writeback_params; // params of gates touching a system spin
};

std::vector<FragmentCircuit> fragment_circuit(const AnsatzSpec& spec, const FragmentLayout& layout);

} // namespace fragsim
