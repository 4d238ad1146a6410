#pragma once

#include <cstdint>
#include <vector>

#include "fragsim/fragment.hpp"
#include "fragsim/spin_model.hpp"
#include "fragsim/statevector.hpp"

namespace fragsim {

// Split of an Ising-like Hamiltonian into intra-fragment couplings (h0),
// inter-fragment couplings (hi) and the transverse-field perturbation (v),
// with h0 + hi + lambda * v reproducing the assembled model.
struct PTDecomposition {
    HermitianOperator h0;
    HermitianOperator hi;
    HermitianOperator v;
    double lambda = 1.0;
};

PTDecomposition decompose(const SpinModel& model, const FragmentLayout& layout,
                          double lambda = 1.0);

// Zeroth-order state plus the unnormalized first-order correction.
struct FirstOrderState {
    StateVector zeroth;
    StateVector first_correction;
    double normalization = 1.0;
    // Set when some basis state couples to both members of the spin-flip pair
    // (possible only at n = 2); the half-overlap identity then does not hold.
    bool cross_terms = false;

    StateVector normalized() const;
};

// First-order perturbed eigenstate of the full Hamiltonian for the degenerate
// pair of basis state k: zeroth order is the positive superposition of the
// pair, the correction sums over single-flip neighbors outside it. Throws for
// degeneracies beyond the spin-flip pairs.
FirstOrderState first_order_full(const SpinModel& model, const FragmentLayout& layout,
                                 std::size_t k);

// Mean-field counterpart: zeroth order is the single basis state |k>.
FirstOrderState first_order_meanfield(const SpinModel& model, const FragmentLayout& layout,
                                      std::size_t k);

// <psi_k | psi_k,MF> between the two normalized first-order states; throws
// when the spin-flip cross structure required by the identity is violated.
double first_order_overlap(const FirstOrderState& full, const FirstOrderState& mf);

// Ground basis index of the classical part (smaller index of the degenerate
// pair).
std::size_t classical_ground_index(const SpinModel& model);

struct MeanFieldMinimizeOptions {
    int n_starts = 32;
    int max_iters = 4000;
    double initial_step = 0.1;
    double energy_tol = 1e-12;
};

// Direct statevector minimization of the state-dependent mean-field energy
// <psi| h0 + v |psi> - sum_I J <S_z^(i)> <S_z^(j)> by projected gradient
// descent with step halving, multi-started over seeds.
std::pair<StateVector, double> minimize_meanfield_energy(const SpinModel& model,
                                                         const FragmentLayout& layout, double h,
                                                         std::uint64_t seed,
                                                         const MeanFieldMinimizeOptions& options = {});

struct PtSweepRow {
    double h = 0.0;
    double f_exact_vs_mfmin = 0.0;
    double f_exact_vs_baremin = 0.0;
    double f_exact_vs_ptfull = 0.0;
    double f_exact_vs_ptmf = 0.0;
};

// For each field strength: exact ground state, both first-order states, the
// bare-fragment minimum-energy state and the mean-field minimizer, reported
// as fidelities against the exact ground state.
std::vector<PtSweepRow> pt_sweep(const SpinModel& model, const FragmentLayout& layout,
                                 const std::vector<double>& h_grid, std::uint64_t seed,
                                 const MeanFieldMinimizeOptions& options = {});

} // namespace fragsim
