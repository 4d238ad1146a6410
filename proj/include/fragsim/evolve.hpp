#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fragsim/fragment.hpp"
#include "fragsim/spin_model.hpp"
#include "fragsim/statevector.hpp"

namespace fragsim {

enum class Channel { None, Classical, Quantum };
// ActiveWorst re-selects the smallest-proxy targets each step (the v2 arm of
// the ranked-choice experiment).
enum class AuxUpdate { Fixed, Active, ActiveWorst, RandomActive };

struct EvolutionSchedule {
    double dt = 0.1;
    int n_steps = 1;
    Channel channel = Channel::Classical;
    AuxUpdate aux_update = AuxUpdate::Fixed;
    std::uint64_t seed = 0;
    bool mean_field = true;
    // Non-conformant fast path that skips the restart-per-step discipline;
    // numerically identical, used only for speed comparisons.
    bool streaming = false;
};

// Per-step trajectory data. fragment_states is filled by the classical-channel
// protocol (one state per fragment over its registers), full_states by the
// exact and quantum-channel protocols. Index 0 holds the initial state and
// times[k] = k * dt.
struct EvolutionRecord {
    std::vector<double> times;
    std::vector<MeanFieldTable> mean_field_history;
    std::vector<std::vector<StateVector>> fragment_states;
    std::vector<StateVector> full_states;
    std::vector<std::vector<std::vector<int>>> aux_choices;
    // Filled by the metrics layer: per-step, per-fragment Uhlmann fidelity.
    std::vector<std::vector<double>> fidelities;

    int n_steps() const { return static_cast<int>(times.size()) - 1; }
};

// Reference trajectory under the assembled full Hamiltonian.
EvolutionRecord evolve_exact(const SpinModel& model, const StateVector& psi0,
                             const EvolutionSchedule& sched);

// Classically linked fragments: every outer step re-evolves each fragment
// from its initial basis restriction through all previous sub-steps, with
// sub-step m drawing mean fields from table m-1; table k is measured from the
// depth-k states. channel = None freezes all mean fields at zero.
EvolutionRecord evolve_classical_channel(const SpinModel& model, const FragmentLayout& layout,
                                         const StateVector& psi0, const EvolutionSchedule& sched);

// Limited quantum links: the full state evolves under the masked coupling
// union plus mean-field corrections for the still-zeroed couplings; with
// aux_update = Active the targets are re-selected each step from the largest
// proxy values, with RandomActive they are drawn uniformly from the seeded
// stream.
EvolutionRecord evolve_quantum_channel(const SpinModel& model, const FragmentLayout& layout,
                                       const StateVector& psi0, const EvolutionSchedule& sched);

// Fills record.fidelities for a classical- or quantum-channel record against
// the exact reference trajectory.
void attach_fragment_fidelities(EvolutionRecord& record, const EvolutionRecord& exact,
                                const FragmentLayout& layout);

// CSV with one row per (step, fragment): Jt, fidelity, per-site <S_x>, <S_z>.
std::string record_to_csv(const EvolutionRecord& record, const FragmentLayout& layout);

} // namespace fragsim
