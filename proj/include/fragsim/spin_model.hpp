#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fragsim/statevector.hpp"

namespace fragsim {

// Canonical coupling key: i < j; swapping endpoints swaps the axes with them.
struct CouplingKey {
    int i = 0;
    int j = 0;
    Axis ai = Axis::Z;
    Axis aj = Axis::Z;

    auto tie() const { return std::tuple(i, j, static_cast<int>(ai), static_cast<int>(aj)); }
    bool operator<(const CouplingKey& o) const { return tie() < o.tie(); }
    bool operator==(const CouplingKey& o) const { return tie() == o.tie(); }
};

// Spin-model specification: two-body couplings J_ij acting on axes (ai, aj)
// plus per-site transverse fields along x.
struct SpinModel {
    int n = 0;
    std::map<CouplingKey, double> couplings;
    std::vector<double> fields;
    std::optional<std::uint64_t> seed; // provenance for sampled models

    SpinModel() = default;
    explicit SpinModel(int n_spins) : n(n_spins), fields(n_spins, 0.0) {
        if (n_spins < 1) throw std::invalid_argument("SpinModel requires n >= 1");
    }

    void set_coupling(int i, int j, Axis ai, Axis aj, double value);
    double coupling(int i, int j, Axis ai, Axis aj) const; // 0 if absent

    bool is_zz_only() const;
    bool is_classical() const; // zz-only couplings and zero fields
};

struct GraphEnsembleConfig {
    int n = 0;
    double edge_prob = 0.5;
    double weight_mean = 0.0;
    double weight_std = 1.0;
    std::uint64_t seed = 0;
};

// Open nearest-neighbor chain with uniform z-z coupling J and x field h.
SpinModel build_tfim_chain(int n, double J, double h);

// Erdos-Renyi z-z graph with Gaussian edge weights; deterministic per seed.
SpinModel sample_random_ising(const GraphEnsembleConfig& cfg, double h);

// Complete z-z graph with standard-normal weights; a MaxCut instance at h = 0.
SpinModel sample_all_to_all_gaussian(int n, std::uint64_t seed, double h);

// Pauli-sum Hamiltonian: one -J term per coupling and one -h term per field.
HermitianOperator assemble(const SpinModel& model);

std::string spin_model_to_json(const SpinModel& model);
SpinModel spin_model_from_json(const std::string& text);

} // namespace fragsim
