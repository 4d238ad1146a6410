#pragma once

#include <cstdint>
#include <vector>

#include "fragsim/circuit.hpp"
#include "fragsim/fragment.hpp"
#include "fragsim/spin_model.hpp"

namespace fragsim {

struct OptimizerConfig {
    enum class Kind { GradientDescent, Adam };

    double learning_rate = 0.05;
    int max_iters = 5000;
    int check_every = 100;
    double param_tol = 1e-6;
    Kind kind = Kind::GradientDescent;
    std::uint64_t seed = 0;
};

struct PretrainConfig {
    int max_fragment_size = 3;
    int n_aux = 2;
    int batch = 10;            // T candidate partitionings
    double init_bound = 1e-5;  // epsilon for non-pretrained gates
    int steps_per_visit = 1;   // gradient steps per fragment visit
    bool mean_field = true;
    std::uint64_t seed = 0;
};

struct TrainResult {
    std::vector<double> params;
    double energy = 0.0;
    int n_iters = 0;
    double epsilon = 0.0; // (E - E0) / |E0|
};

// Exact ground energy: exhaustive basis enumeration for classical models,
// dense eigendecomposition otherwise (n <= 12).
double ground_energy(const SpinModel& model);

// Full-circuit optimization of <H> from uniform-random angles in [-pi, pi).
TrainResult vanilla_vqe(const AnsatzSpec& spec, const SpinModel& model,
                        const OptimizerConfig& opt);

// Sequential fragment sweep: each visit takes cfg.steps_per_visit gradient
// steps on the fragment's mean-field-corrected Hamiltonian, publishes the
// fragment's system-spin mean fields, and writes the system-spin parameters
// back to the shared vector. Returns the brickwork parameter vector.
std::vector<double> pretrain_fragments(const AnsatzSpec& spec, const SpinModel& model,
                                       const FragmentLayout& layout, const OptimizerConfig& opt,
                                       const PretrainConfig& cfg);

// Draws cfg.batch random layouts, pre-trains each, scores the stitched full
// circuit once per candidate and returns the best candidate's parameters
// (theta pre-trained, phi drawn from [-init_bound, init_bound)).
std::vector<double> batched_pretrain(const AnsatzSpec& spec, const SpinModel& model,
                                     const OptimizerConfig& opt, const PretrainConfig& cfg);

// Full-circuit optimization from the given initial parameters.
TrainResult full_train_from(const AnsatzSpec& spec, const SpinModel& model,
                            const std::vector<double>& params_init, const OptimizerConfig& opt);

std::vector<double> random_angles(int count, std::uint64_t seed);

} // namespace fragsim
