#include "fragsim/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fragsim/rng.hpp"

namespace fragsim {

namespace {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    int t = 0;

    explicit AdamState(int n) : m(n, 0.0), v(n, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
        constexpr double b1 = 0.9;
        constexpr double b2 = 0.999;
        constexpr double eps = 1e-8;
        ++t;
        const double c1 = 1.0 - std::pow(b1, t);
        const double c2 = 1.0 - std::pow(b2, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        }
    }
};

// Runs `one_iter` until the parameter vector moves by less than param_tol over
// a check window or max_iters is reached; returns the iteration count.
template <class IterFn>
int optimize_until_converged(std::vector<double>& params, const OptimizerConfig& opt,
                             IterFn one_iter) {
    std::vector<double> checkpoint = params;
    int iters = 0;
    while (iters < opt.max_iters) {
        one_iter(params);
        ++iters;
        if (iters % opt.check_every == 0) {
            double delta = 0.0;
            for (std::size_t i = 0; i < params.size(); ++i)
                delta = std::max(delta, std::abs(params[i] - checkpoint[i]));
            if (delta < opt.param_tol) break;
            checkpoint = params;
        }
    }
    return iters;
}

} // namespace

double ground_energy(const SpinModel& model) {
    if (model.is_classical()) {
        double best = std::numeric_limits<double>::infinity();
        const std::size_t dim = std::size_t{1} << model.n;
        for (std::size_t x = 0; x < dim; ++x)
            best = std::min(best, classical_basis_energy(model, x));
        return best;
    }
    if (model.n > 12) throw std::invalid_argument("dense ground energy supports n <= 12");
    const EigResult eig = hermitian_eig(dense_matrix(assemble(model), model.n));
    return eig.values.front();
}

std::vector<double> random_angles(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(count);
    for (double& v : out) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
    return out;
}

TrainResult vanilla_vqe(const AnsatzSpec& spec, const SpinModel& model,
                        const OptimizerConfig& opt) {
    std::vector<double> params = random_angles(total_param_count(spec), opt.seed);
    return full_train_from(spec, model, params, opt);
}

TrainResult full_train_from(const AnsatzSpec& spec, const SpinModel& model,
                            const std::vector<double>& params_init, const OptimizerConfig& opt) {
    if (spec.n != model.n) throw std::invalid_argument("ansatz width does not match the model");
    const Circuit circuit = build_full_circuit(spec);
    if (static_cast<int>(params_init.size()) != circuit.n_params)
        throw std::invalid_argument("initial parameter count does not match the ansatz");
    const HermitianOperator h = assemble(model);
    const StateVector psi0 = basis_state(spec.n, 0);

    TrainResult result;
    result.params = params_init;
    AdamState adam(circuit.n_params);
    result.n_iters = optimize_until_converged(result.params, opt, [&](std::vector<double>& p) {
        auto [energy, grad] = energy_and_gradient(circuit, p, h, psi0);
        (void)energy;
        if (opt.kind == OptimizerConfig::Kind::Adam) {
            adam.step(p, grad, opt.learning_rate);
        } else {
            for (std::size_t i = 0; i < p.size(); ++i) p[i] -= opt.learning_rate * grad[i];
        }
    });

    result.energy = energy_and_gradient(circuit, result.params, h, psi0).first;
    const double e0 = ground_energy(model);
    result.epsilon = (result.energy - e0) / std::abs(e0);
    return result;
}

std::vector<double> pretrain_fragments(const AnsatzSpec& spec, const SpinModel& model,
                                       const FragmentLayout& layout, const OptimizerConfig& opt,
                                       const PretrainConfig& cfg) {
    if (spec.n != model.n) throw std::invalid_argument("ansatz width does not match the model");
    const std::vector<FragmentCircuit> fragments = fragment_circuit(spec, layout);
    std::vector<double> theta = random_angles(brickwork_param_count(spec), opt.seed);
    std::vector<StateVector> zeros;
    for (const FragmentCircuit& fc : fragments)
        zeros.push_back(basis_state(fc.circuit.n_qubits, 0));

    MeanFieldTable mft = MeanFieldTable::zeros(model.n, 0);
    optimize_until_converged(theta, opt, [&](std::vector<double>& th) {
        for (std::size_t f = 0; f < fragments.size(); ++f) {
            const FragmentCircuit& fc = fragments[f];
            const HermitianOperator h =
                cfg.mean_field
                    ? mean_field_fragment_hamiltonian(model, layout, static_cast<int>(f), mft)
                    : bare_fragment_hamiltonian(model, layout, static_cast<int>(f));

            // local update of every parameter the fragment sees
            std::vector<double> local = th;
            for (int step = 0; step < cfg.steps_per_visit; ++step) {
                auto [energy, grad] = energy_and_gradient(fc.circuit, local, h, zeros[f]);
                (void)energy;
                for (int p : fc.param_indices) local[p] -= opt.learning_rate * grad[p];
            }

            // publish the fragment's system-spin mean fields
            const StateVector out = run_circuit(fc.circuit, local, zeros[f]);
            const auto& system = layout.partition[f];
            for (std::size_t r = 0; r < system.size(); ++r)
                for (Axis ax : {Axis::X, Axis::Y, Axis::Z})
                    mft.set(system[r],
                            ax, std::clamp(site_expectation(out, static_cast<int>(r), ax), -0.5, 0.5));

            // copy back the parameters owned through a system spin
            for (int p : fc.writeback_params) th[p] = local[p];
        }
        ++mft.step;
    });
    return theta;
}

std::vector<double> batched_pretrain(const AnsatzSpec& spec, const SpinModel& model,
                                     const OptimizerConfig& opt, const PretrainConfig& cfg) {
    if (cfg.batch < 1) throw std::invalid_argument("batch size must be >= 1");
    const Circuit full = build_full_circuit(spec);
    const HermitianOperator h = assemble(model);
    const StateVector psi0 = basis_state(spec.n, 0);
    const int n_theta = brickwork_param_count(spec);
    const int n_phi = alltoall_param_count(spec);

    std::vector<double> best;
    double best_energy = std::numeric_limits<double>::infinity();
    for (int t = 0; t < cfg.batch; ++t) {
        const std::uint64_t cand_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
        const FragmentLayout layout =
            random_partition_layout(model, cfg.max_fragment_size, cfg.n_aux, cand_seed);
        OptimizerConfig cand_opt = opt;
        cand_opt.seed = derive_seed(cand_seed, 1);
        const std::vector<double> theta = pretrain_fragments(spec, model, layout, cand_opt, cfg);

        std::vector<double> params(n_theta + n_phi);
        std::copy(theta.begin(), theta.end(), params.begin());
        Rng rng(derive_seed(cand_seed, 2));
        for (int i = 0; i < n_phi; ++i)
            params[n_theta + i] = rng.uniform(-cfg.init_bound, cfg.init_bound);

        const double energy = expectation(h, run_circuit(full, params, psi0));
        if (energy < best_energy) {
            best_energy = energy;
            best = std::move(params);
        }
    }
    return best;
}

} // namespace fragsim
