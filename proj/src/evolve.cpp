#include "fragsim/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fragsim/metrics.hpp"
#include "fragsim/rng.hpp"

namespace fragsim {

namespace {

void check_dimensions(const SpinModel& model, const StateVector& psi0,
                      const EvolutionSchedule& sched) {
    if (psi0.n_qubits != model.n) throw std::invalid_argument("initial state dimension mismatch");
    if (sched.dt <= 0.0) throw std::invalid_argument("schedule requires dt > 0");
    if (sched.n_steps < 1) throw std::invalid_argument("schedule requires n_steps >= 1");
}

// Mean-field corrections for every coupling dropped by the mask, applied to
// both endpoints (each present spin feels the mean field of its missing
// partner).
HermitianOperator masked_hamiltonian(const SpinModel& model, const SpinModel& masked,
                                     const MeanFieldTable& mft, bool mean_field) {
    HermitianOperator op = assemble(masked);
    if (!mean_field) return op;
    for (const auto& [key, value] : model.couplings) {
        if (value == 0.0 || masked.couplings.count(key)) continue;
        const double mean_j = mft.get(key.j, key.aj);
        if (mean_j != 0.0) op.add(-value * mean_j, {{key.i, key.ai}});
        const double mean_i = mft.get(key.i, key.ai);
        if (mean_i != 0.0) op.add(-value * mean_i, {{key.j, key.aj}});
    }
    return op;
}

FragmentLayout with_targets(const FragmentLayout& layout,
                            const std::vector<std::vector<int>>& targets) {
    FragmentLayout out = layout;
    out.aux_targets = targets;
    validate_layout(out);
    return out;
}

} // namespace

EvolutionRecord evolve_exact(const SpinModel& model, const StateVector& psi0,
                             const EvolutionSchedule& sched) {
    check_dimensions(model, psi0, sched);
    const HermitianOperator h = assemble(model);

    EvolutionRecord record;
    record.times.push_back(0.0);
    record.full_states.push_back(psi0);
    for (int k = 1; k <= sched.n_steps; ++k) {
        record.times.push_back(k * sched.dt);
        if (h.empty())
            record.full_states.push_back(record.full_states.back());
        else
            record.full_states.push_back(evolve_step(h, record.full_states.back(), sched.dt));
    }
    return record;
}

EvolutionRecord evolve_classical_channel(const SpinModel& model, const FragmentLayout& layout,
                                         const StateVector& psi0, const EvolutionSchedule& sched) {
    check_dimensions(model, psi0, sched);
    validate_layout(layout);
    const std::size_t init_index = basis_index_of(psi0);
    const int n_frag = layout.n_fragments();
    const bool mean_field = sched.mean_field && sched.channel != Channel::None;

    std::vector<StateVector> initial(n_frag);
    std::vector<HermitianOperator> bare(n_frag);
    for (int f = 0; f < n_frag; ++f) {
        initial[f] = fragment_basis_state(layout, f, init_index, model.n);
        bare[f] = bare_fragment_hamiltonian(model, layout, f);
    }

    EvolutionRecord record;
    record.times.push_back(0.0);
    record.fragment_states.push_back(initial);
    record.mean_field_history.push_back(MeanFieldTable::zeros(model.n, 0));
    record.aux_choices.push_back(layout.aux_targets);

    std::vector<StateVector> current = initial;
    for (int k = 1; k <= sched.n_steps; ++k) {
        std::vector<StateVector> states(n_frag);
        for (int f = 0; f < n_frag; ++f) {
            if (sched.streaming) {
                const HermitianOperator h =
                    mean_field
                        ? mean_field_fragment_hamiltonian(model, layout, f,
                                                          record.mean_field_history[k - 1])
                        : bare[f];
                states[f] = h.empty() ? current[f] : evolve_step(h, current[f], sched.dt);
            } else {
                // restart discipline: re-evolve from the initial state through
                // sub-steps 1..k, sub-step m reading table m-1
                StateVector st = initial[f];
                for (int m = 1; m <= k; ++m) {
                    const HermitianOperator h =
                        mean_field
                            ? mean_field_fragment_hamiltonian(model, layout, f,
                                                              record.mean_field_history[m - 1])
                            : bare[f];
                    if (!h.empty()) st = evolve_step(h, st, sched.dt);
                }
                states[f] = std::move(st);
            }
        }
        record.times.push_back(k * sched.dt);
        record.mean_field_history.push_back(measure_mean_fields(layout, states, k));
        record.aux_choices.push_back(layout.aux_targets);
        current = states;
        record.fragment_states.push_back(std::move(states));
    }
    return record;
}

EvolutionRecord evolve_quantum_channel(const SpinModel& model, const FragmentLayout& layout,
                                       const StateVector& psi0, const EvolutionSchedule& sched) {
    check_dimensions(model, psi0, sched);
    validate_layout(layout);
    const int n_frag = layout.n_fragments();
    Rng rng(sched.seed);

    EvolutionRecord record;
    record.times.push_back(0.0);
    record.full_states.push_back(psi0);
    record.mean_field_history.push_back(MeanFieldTable::zeros(model.n, 0));
    record.aux_choices.push_back(layout.aux_targets);

    // per-step decided target sets; index m is used for sub-step m
    std::vector<std::vector<std::vector<int>>> step_targets(1, layout.aux_targets);

    for (int k = 1; k <= sched.n_steps; ++k) {
        std::vector<std::vector<int>> targets = layout.aux_targets;
        const bool ranked_update =
            sched.aux_update == AuxUpdate::Active || sched.aux_update == AuxUpdate::ActiveWorst;
        if (ranked_update && k > 1) {
            const bool worst = sched.aux_update == AuxUpdate::ActiveWorst;
            const StateVector& probe = record.full_states[k - 1];
            for (int f = 0; f < n_frag; ++f) {
                const int budget = static_cast<int>(layout.aux_targets[f].size());
                std::vector<std::pair<double, int>> scored;
                for (int a = 0; a < model.n; ++a) {
                    if (layout.contains(f, a)) continue;
                    scored.emplace_back(aux_proxy(model, layout, f, probe, a), a);
                }
                std::sort(scored.begin(), scored.end(), [&](const auto& l, const auto& r) {
                    if (l.first != r.first) return worst ? l.first < r.first : l.first > r.first;
                    return l.second < r.second;
                });
                targets[f].clear();
                for (int t = 0; t < budget && t < static_cast<int>(scored.size()); ++t)
                    targets[f].push_back(scored[t].second);
            }
        } else if (sched.aux_update == AuxUpdate::RandomActive) {
            for (int f = 0; f < n_frag; ++f) {
                const int budget = static_cast<int>(layout.aux_targets[f].size());
                std::vector<int> pool;
                for (int a = 0; a < model.n; ++a)
                    if (!layout.contains(f, a)) pool.push_back(a);
                targets[f].clear();
                for (int t = 0; t < budget && !pool.empty(); ++t) {
                    const std::size_t pick = rng.uniform_int(pool.size());
                    targets[f].push_back(pool[pick]);
                    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
                }
                std::sort(targets[f].begin(), targets[f].end());
            }
        }
        step_targets.push_back(targets);

        StateVector st = psi0;
        const int first_substep = sched.streaming ? k : 1;
        if (sched.streaming) st = record.full_states[k - 1];
        for (int m = first_substep; m <= k; ++m) {
            const FragmentLayout lay_m = with_targets(layout, step_targets[m]);
            const SpinModel masked = masked_coupling_union(model, lay_m);
            const HermitianOperator h = masked_hamiltonian(
                model, masked, record.mean_field_history[m - 1], sched.mean_field);
            if (!h.empty()) st = evolve_step(h, st, sched.dt);
        }

        record.times.push_back(k * sched.dt);
        record.mean_field_history.push_back(measure_mean_fields_full(st, k));
        record.aux_choices.push_back(targets);
        record.full_states.push_back(std::move(st));
    }
    return record;
}

void attach_fragment_fidelities(EvolutionRecord& record, const EvolutionRecord& exact,
                                const FragmentLayout& layout) {
    const int steps = record.n_steps();
    if (exact.n_steps() < steps)
        throw std::invalid_argument("exact record is shorter than the fragmented record");
    record.fidelities.assign(steps + 1, std::vector<double>(layout.n_fragments(), 0.0));
    for (int k = 0; k <= steps; ++k) {
        for (int f = 0; f < layout.n_fragments(); ++f) {
            if (!record.fragment_states.empty()) {
                record.fidelities[k][f] = fragment_fidelity(record.fragment_states[k][f],
                                                            exact.full_states[k], layout, f);
            } else {
                const DensityMatrix rho =
                    partial_trace(record.full_states[k], layout.partition[f]);
                const DensityMatrix rho_ex =
                    partial_trace(exact.full_states[k], layout.partition[f]);
                record.fidelities[k][f] = uhlmann_fidelity(rho, rho_ex);
            }
        }
    }
}

std::string record_to_csv(const EvolutionRecord& record, const FragmentLayout& layout) {
    std::ostringstream out;
    out << "Jt,fragment,fidelity";
    const int max_frag_size = [&] {
        std::size_t m = 0;
        for (const auto& p : layout.partition) m = std::max(m, p.size());
        return static_cast<int>(m);
    }();
    for (int s = 0; s < max_frag_size; ++s) out << ",sx_" << s << ",sz_" << s;
    out << "\n";
    out.precision(12);

    for (int k = 0; k <= record.n_steps(); ++k) {
        for (int f = 0; f < layout.n_fragments(); ++f) {
            out << record.times[k] << "," << f;
            if (!record.fidelities.empty())
                out << "," << record.fidelities[k][f];
            else
                out << ",";
            for (int s = 0; s < max_frag_size; ++s) {
                if (s >= static_cast<int>(layout.partition[f].size())) {
                    out << ",,";
                    continue;
                }
                double sx = 0.0;
                double sz = 0.0;
                if (!record.fragment_states.empty()) {
                    sx = site_expectation(record.fragment_states[k][f], s, Axis::X);
                    sz = site_expectation(record.fragment_states[k][f], s, Axis::Z);
                } else {
                    sx = site_expectation(record.full_states[k], layout.partition[f][s], Axis::X);
                    sz = site_expectation(record.full_states[k], layout.partition[f][s], Axis::Z);
                }
                out << "," << sx << "," << sz;
            }
            out << "\n";
        }
    }
    return out.str();
}

} // namespace fragsim
