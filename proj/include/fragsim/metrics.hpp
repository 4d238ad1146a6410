#pragma once

#include <cstdint>
#include <utility>

#include "fragsim/fragment.hpp"
#include "fragsim/statevector.hpp"

namespace fragsim {

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 for density matrices
// of equal dimension.
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// Fidelity between fragment f's reduced system-spin state (auxiliaries traced
// out of frag_state) and the exactly evolved reduced state (environment traced
// out of exact_full).
double fragment_fidelity(const StateVector& frag_state, const StateVector& exact_full,
                         const FragmentLayout& layout, int f);

// Pure two-qubit concurrence 2|c00 c11 - c01 c10|.
double concurrence(const StateVector& psi);

// Interface error variances for the two-qubit single-coupling setting with
// the coupling scaled so that the interaction is sigma_z sigma_z: V is the
// uncorrected variance, v_mf the variance after the mean-field replacement on
// qubit 1.
struct VarianceDiff {
    double v = 0.0;
    double v_mf = 0.0;
    double concurrence = 0.0;

    double diff() const { return v - v_mf; }
};

VarianceDiff variance_diff(const StateVector& psi);

// Normalized complex-Gaussian two-qubit state; deterministic per seed.
StateVector random_two_qubit_state(std::uint64_t seed);

enum class StateFamily { Alpha, Theta, Beta };

// Parameterized two-qubit families probing the envelope boundaries:
//   alpha: sqrt(a)|00> + sqrt(1-a)|11>
//   theta: cos(t/2)|00> - i sin(t/2)|10>
//   beta:  (|00> + b|01> - |10> + b|11>) / sqrt(2 + 2 b^2)
StateVector family_state(StateFamily family, double param);

// (<S_x>, <S_z>) of one site.
std::pair<double, double> local_expectations(const StateVector& psi, int site);
std::pair<double, double> local_expectations(const DensityMatrix& rho_single_qubit);

} // namespace fragsim
