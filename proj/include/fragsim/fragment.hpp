#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fragsim/spin_model.hpp"
#include "fragsim/statevector.hpp"

namespace fragsim {

// Partition of the system spins into fragments plus, per fragment, the ordered
// list of environment spins impersonated by that fragment's auxiliary
// registers. Fragment f simulates N_f + N_a qubits: registers 0..N_f-1 hold
// the fragment spins in ascending order, followed by the auxiliaries in
// aux_targets order.
struct FragmentLayout {
    int n = 0;
    std::vector<std::vector<int>> partition;
    std::vector<std::vector<int>> aux_targets;

    FragmentLayout() = default;
    FragmentLayout(int n_spins, std::vector<std::vector<int>> parts,
                   std::vector<std::vector<int>> targets);

    int n_fragments() const { return static_cast<int>(partition.size()); }
    int fragment_of(int spin) const;
    // Global spin simulated by each local register of fragment f.
    std::vector<int> registers(int f) const;
    // Local register of a global spin in fragment f, or -1 if absent.
    int local_register(int f, int spin) const;
    bool contains(int f, int spin) const;
};

void validate_layout(const FragmentLayout& layout);

// Split [0, n) into consecutive fragments of the given size (the last fragment
// may be smaller); no auxiliaries.
FragmentLayout contiguous_layout(int n, int fragment_size);

std::string layout_to_json(const FragmentLayout& layout);
FragmentLayout layout_from_json(const std::string& text, int n);

// Exchanged single-site expectations <S_axis^{(j)}>, one row per system spin.
struct MeanFieldTable {
    std::vector<std::array<double, 3>> values; // indexed [spin][axis]
    int step = 0;

    static MeanFieldTable zeros(int n, int step = 0);
    double get(int spin, Axis axis) const;
    void set(int spin, Axis axis, double value);
};

struct ShortTimeError {
    double variance = 0.0;
    std::vector<std::pair<int, double>> per_aux; // (environment spin, v(a))
};

// Couplings with exactly one endpoint inside fragment f.
std::vector<CouplingKey> interface_of(const SpinModel& model, const FragmentLayout& layout, int f);

// Hamiltonian over fragment f's registers keeping exactly the couplings whose
// endpoints both lie in f or among f's auxiliary targets (targets re-labeled
// onto their auxiliary registers), plus the fields on those spins.
HermitianOperator bare_fragment_hamiltonian(const SpinModel& model, const FragmentLayout& layout,
                                            int f);

// Bare fragment Hamiltonian plus one single-site correction
// -J <S_axis^{(absent)}> S_axis^{(present)} for every coupling with exactly
// one endpoint present in the fragment's register space.
HermitianOperator mean_field_fragment_hamiltonian(const SpinModel& model,
                                                  const FragmentLayout& layout, int f,
                                                  const MeanFieldTable& mft);

// Quantum variance of the omitted interface sum of fragment f on the full
// system state.
double short_time_variance(const SpinModel& model, const FragmentLayout& layout, int f,
                           const StateVector& psi_full);

// Restriction of the interface variance to the couplings whose environment
// endpoint is spin a, evaluated on the full system state.
double aux_proxy(const SpinModel& model, const FragmentLayout& layout, int f,
                 const StateVector& psi_full, int a);

// Ranks every environment spin of fragment f by its proxy value, estimated by
// evolving the fragment-plus-single-auxiliary system one step of length dt
// under its bare Hamiltonian from the basis state psi0. Descending proxy,
// ties broken by ascending spin index.
std::vector<int> rank_aux_targets(const SpinModel& model, const FragmentLayout& layout, int f,
                                  const StateVector& psi0, double dt);

// Per-fragment proxy table (variance plus per-candidate values) on a state.
ShortTimeError short_time_error(const SpinModel& model, const FragmentLayout& layout, int f,
                                const StateVector& psi_full);

// Model whose coupling (i, j) survives iff both endpoints lie in some
// fragment's simulated set S_f = fragment spins plus auxiliary targets.
SpinModel masked_coupling_union(const SpinModel& model, const FragmentLayout& layout);

// Basis-state restriction of the full initial state onto fragment f's
// registers; auxiliaries copy their target's bit.
StateVector fragment_basis_state(const FragmentLayout& layout, int f, std::size_t full_index,
                                 int n_total);

// Mean fields of every system spin measured from per-fragment states.
MeanFieldTable measure_mean_fields(const FragmentLayout& layout,
                                   const std::vector<StateVector>& fragment_states, int step);

// Mean fields of every spin measured from a full-system state.
MeanFieldTable measure_mean_fields_full(const StateVector& psi, int step);

// <x|H|x> of a classical (zz-only, h = 0) model at a computational basis state.
double classical_basis_energy(const SpinModel& model, std::size_t basis_index);

// Union of the fragment mean-field Hamiltonians as one state-dependent
// operator: intra-fragment couplings stay two-body, each cross-fragment
// coupling is replaced once by a single-site term weighted by the partner's
// mean field.
HermitianOperator meanfield_union_operator(const SpinModel& model, const FragmentLayout& layout,
                                           const MeanFieldTable& mft);

// <x|H_MF(|x>)|x> for a classical (zz-only) model at a computational basis
// state, with the mean fields read from the state itself.
double meanfield_union_basis_energy(const SpinModel& model, const FragmentLayout& layout,
                                    std::size_t basis_index);

// Uniform random partition into fragments of at most max_fragment_size spins;
// each fragment targets the n_aux environment spins with the largest total
// |J| coupling into it (ties by ascending index).
FragmentLayout random_partition_layout(const SpinModel& model, int max_fragment_size, int n_aux,
                                       std::uint64_t seed);

} // namespace fragsim
