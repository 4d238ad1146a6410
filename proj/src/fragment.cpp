#include "fragsim/fragment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "fragsim/rng.hpp"

namespace fragsim {

FragmentLayout::FragmentLayout(int n_spins, std::vector<std::vector<int>> parts,
                               std::vector<std::vector<int>> targets)
    : n(n_spins), partition(std::move(parts)), aux_targets(std::move(targets)) {
    for (auto& frag : partition) std::sort(frag.begin(), frag.end());
    if (aux_targets.empty()) aux_targets.assign(partition.size(), {});
    validate_layout(*this);
}

int FragmentLayout::fragment_of(int spin) const {
    for (int f = 0; f < n_fragments(); ++f)
        if (contains(f, spin)) return f;
    throw std::out_of_range("spin not covered by layout");
}

std::vector<int> FragmentLayout::registers(int f) const {
    std::vector<int> regs = partition.at(f);
    regs.insert(regs.end(), aux_targets.at(f).begin(), aux_targets.at(f).end());
    return regs;
}

int FragmentLayout::local_register(int f, int spin) const {
    const std::vector<int> regs = registers(f);
    const auto it = std::find(regs.begin(), regs.end(), spin);
    return it == regs.end() ? -1 : static_cast<int>(it - regs.begin());
}

bool FragmentLayout::contains(int f, int spin) const {
    const auto& frag = partition.at(f);
    return std::binary_search(frag.begin(), frag.end(), spin);
}

void validate_layout(const FragmentLayout& layout) {
    if (layout.n < 1) throw std::invalid_argument("layout requires n >= 1");
    if (layout.partition.empty()) throw std::invalid_argument("layout has no fragments");
    if (layout.aux_targets.size() != layout.partition.size())
        throw std::invalid_argument("aux_targets size must match fragment count");

    std::vector<int> seen(layout.n, 0);
    for (const auto& frag : layout.partition) {
        if (frag.empty()) throw std::invalid_argument("empty fragment");
        for (int s : frag) {
            if (s < 0 || s >= layout.n) throw std::out_of_range("fragment spin out of range");
            ++seen[s];
        }
    }
    for (int c : seen)
        if (c != 1) throw std::invalid_argument("partition must cover every spin exactly once");

    for (std::size_t f = 0; f < layout.partition.size(); ++f) {
        std::vector<int> targets = layout.aux_targets[f];
        std::sort(targets.begin(), targets.end());
        if (std::adjacent_find(targets.begin(), targets.end()) != targets.end())
            throw std::invalid_argument("duplicate auxiliary target in a fragment");
        for (int t : targets) {
            if (t < 0 || t >= layout.n) throw std::out_of_range("auxiliary target out of range");
            if (layout.contains(static_cast<int>(f), t))
                throw std::invalid_argument("auxiliary target lies inside its own fragment");
        }
    }
}

FragmentLayout contiguous_layout(int n, int fragment_size) {
    if (fragment_size < 1) throw std::invalid_argument("fragment size must be >= 1");
    std::vector<std::vector<int>> parts;
    for (int start = 0; start < n; start += fragment_size) {
        std::vector<int> frag;
        for (int s = start; s < std::min(n, start + fragment_size); ++s) frag.push_back(s);
        parts.push_back(std::move(frag));
    }
    return FragmentLayout(n, std::move(parts), {});
}

std::string layout_to_json(const FragmentLayout& layout) {
    nlohmann::json j;
    j["partition"] = layout.partition;
    j["aux_targets"] = layout.aux_targets;
    return j.dump(2);
}

FragmentLayout layout_from_json(const std::string& text, int n) {
    const nlohmann::json j = nlohmann::json::parse(text);
    return FragmentLayout(n, j.at("partition").get<std::vector<std::vector<int>>>(),
                          j.contains("aux_targets")
                              ? j.at("aux_targets").get<std::vector<std::vector<int>>>()
                              : std::vector<std::vector<int>>{});
}

MeanFieldTable MeanFieldTable::zeros(int n, int step) {
    MeanFieldTable t;
    t.values.assign(n, {0.0, 0.0, 0.0});
    t.step = step;
    return t;
}

double MeanFieldTable::get(int spin, Axis axis) const {
    if (spin < 0 || spin >= static_cast<int>(values.size()))
        throw std::out_of_range("mean-field entry missing for spin " + std::to_string(spin));
    return values[spin][static_cast<int>(axis)];
}

void MeanFieldTable::set(int spin, Axis axis, double value) {
    if (spin < 0 || spin >= static_cast<int>(values.size()))
        throw std::out_of_range("mean-field entry missing for spin " + std::to_string(spin));
    if (std::abs(value) > 0.5 + 1e-10)
        throw std::invalid_argument("mean field exceeds spin-1/2 bound");
    values[spin][static_cast<int>(axis)] = value;
}

std::vector<CouplingKey> interface_of(const SpinModel& model, const FragmentLayout& layout, int f) {
    if (f < 0 || f >= layout.n_fragments()) throw std::out_of_range("unknown fragment id");
    std::vector<CouplingKey> keys;
    for (const auto& [key, value] : model.couplings) {
        (void)value;
        const bool in_i = layout.contains(f, key.i);
        const bool in_j = layout.contains(f, key.j);
        if (in_i != in_j) keys.push_back(key);
    }
    return keys;
}

HermitianOperator bare_fragment_hamiltonian(const SpinModel& model, const FragmentLayout& layout,
                                            int f) {
    if (f < 0 || f >= layout.n_fragments()) throw std::out_of_range("unknown fragment id");
    const std::vector<int> regs = layout.registers(f);
    HermitianOperator op;
    for (const auto& [key, value] : model.couplings) {
        if (value == 0.0) continue;
        const int ri = layout.local_register(f, key.i);
        const int rj = layout.local_register(f, key.j);
        if (ri < 0 || rj < 0) continue;
        op.add(-value, {{ri, key.ai}, {rj, key.aj}});
    }
    for (std::size_t r = 0; r < regs.size(); ++r) {
        const double h = model.fields.at(regs[r]);
        if (h != 0.0) op.add(-h, {{static_cast<int>(r), Axis::X}});
    }
    return op;
}

HermitianOperator mean_field_fragment_hamiltonian(const SpinModel& model,
                                                  const FragmentLayout& layout, int f,
                                                  const MeanFieldTable& mft) {
    HermitianOperator op = bare_fragment_hamiltonian(model, layout, f);
    for (const auto& [key, value] : model.couplings) {
        if (value == 0.0) continue;
        const int ri = layout.local_register(f, key.i);
        const int rj = layout.local_register(f, key.j);
        if ((ri < 0) == (rj < 0)) continue;
        const int present = ri >= 0 ? ri : rj;
        const Axis present_axis = ri >= 0 ? key.ai : key.aj;
        const int absent = ri >= 0 ? key.j : key.i;
        const Axis absent_axis = ri >= 0 ? key.aj : key.ai;
        const double mean = mft.get(absent, absent_axis);
        if (mean == 0.0) continue;
        op.add(-value * mean, {{present, present_axis}});
    }
    return op;
}

namespace {

// Interface sum of fragment f as an operator, with indices mapped through
// `to_local` (identity for full-space evaluation). Restricting `env_filter`
// to one spin gives the proxy operator.
HermitianOperator interface_operator(const SpinModel& model, const FragmentLayout& layout, int f,
                                     int env_filter, const std::vector<int>* to_local) {
    HermitianOperator op;
    for (const CouplingKey& key : interface_of(model, layout, f)) {
        const double value = model.couplings.at(key);
        if (value == 0.0) continue;
        const int env = layout.contains(f, key.i) ? key.j : key.i;
        if (env_filter >= 0 && env != env_filter) continue;
        int qi = key.i;
        int qj = key.j;
        if (to_local) {
            qi = (*to_local)[qi];
            qj = (*to_local)[qj];
            if (qi < 0 || qj < 0) continue;
        }
        op.add(-value, {{qi, key.ai}, {qj, key.aj}});
    }
    return op;
}

double operator_variance(const HermitianOperator& op, const StateVector& psi) {
    if (op.empty()) return 0.0;
    const StateVector opsi = apply_pauli_sum(op, psi);
    const cplx mean = inner(psi, opsi);
    double second = 0.0;
    for (const cplx& c : opsi.amps) second += std::norm(c);
    return second - std::norm(mean);
}

} // namespace

double short_time_variance(const SpinModel& model, const FragmentLayout& layout, int f,
                           const StateVector& psi_full) {
    if (psi_full.n_qubits != model.n) throw std::invalid_argument("state must cover all spins");
    return operator_variance(interface_operator(model, layout, f, -1, nullptr), psi_full);
}

double aux_proxy(const SpinModel& model, const FragmentLayout& layout, int f,
                 const StateVector& psi_full, int a) {
    if (layout.contains(f, a)) throw std::invalid_argument("proxy spin lies inside the fragment");
    if (psi_full.n_qubits != model.n) throw std::invalid_argument("state must cover all spins");
    return operator_variance(interface_operator(model, layout, f, a, nullptr), psi_full);
}

ShortTimeError short_time_error(const SpinModel& model, const FragmentLayout& layout, int f,
                                const StateVector& psi_full) {
    ShortTimeError err;
    err.variance = short_time_variance(model, layout, f, psi_full);
    for (int a = 0; a < layout.n; ++a) {
        if (layout.contains(f, a)) continue;
        err.per_aux.emplace_back(a, aux_proxy(model, layout, f, psi_full, a));
    }
    return err;
}

std::vector<int> rank_aux_targets(const SpinModel& model, const FragmentLayout& layout, int f,
                                  const StateVector& psi0, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("rank_aux_targets requires dt > 0");
    if (psi0.n_qubits != model.n) throw std::invalid_argument("state must cover all spins");
    const std::size_t full_index = basis_index_of(psi0);

    std::vector<int> candidates;
    for (int a = 0; a < layout.n; ++a)
        if (!layout.contains(f, a)) candidates.push_back(a);
    if (candidates.empty()) throw std::invalid_argument("fragment has no environment spins");

    std::vector<std::pair<double, int>> scored;
    scored.reserve(candidates.size());
    for (int a : candidates) {
        FragmentLayout probe = layout;
        probe.aux_targets.assign(layout.partition.size(), {});
        probe.aux_targets[f] = {a};

        StateVector local = fragment_basis_state(probe, f, full_index, model.n);
        const HermitianOperator bare = bare_fragment_hamiltonian(model, probe, f);
        if (!bare.empty()) local = evolve_step(bare, local, dt);

        std::vector<int> to_local(model.n, -1);
        const std::vector<int> regs = probe.registers(f);
        for (std::size_t r = 0; r < regs.size(); ++r) to_local[regs[r]] = static_cast<int>(r);
        const double v = operator_variance(interface_operator(model, probe, f, a, &to_local), local);
        scored.emplace_back(v, a);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& lhs, const auto& rhs) {
        if (lhs.first != rhs.first) return lhs.first > rhs.first;
        return lhs.second < rhs.second;
    });
    std::vector<int> order;
    order.reserve(scored.size());
    for (const auto& [v, a] : scored) order.push_back(a);
    return order;
}

SpinModel masked_coupling_union(const SpinModel& model, const FragmentLayout& layout) {
    std::vector<std::vector<char>> in_set(layout.n_fragments(), std::vector<char>(model.n, 0));
    for (int f = 0; f < layout.n_fragments(); ++f)
        for (int s : layout.registers(f)) in_set[f][s] = 1;

    SpinModel masked(model.n);
    masked.fields = model.fields;
    masked.seed = model.seed;
    for (const auto& [key, value] : model.couplings) {
        bool survives = false;
        for (int f = 0; f < layout.n_fragments() && !survives; ++f)
            survives = in_set[f][key.i] && in_set[f][key.j];
        if (survives) masked.couplings[key] = value;
    }
    return masked;
}

StateVector fragment_basis_state(const FragmentLayout& layout, int f, std::size_t full_index,
                                 int n_total) {
    const std::vector<int> regs = layout.registers(f);
    std::size_t local = 0;
    for (std::size_t r = 0; r < regs.size(); ++r) {
        const int bit = static_cast<int>((full_index >> (n_total - 1 - regs[r])) & 1ULL);
        if (bit) local |= std::size_t{1} << (regs.size() - 1 - r);
    }
    return basis_state(static_cast<int>(regs.size()), local);
}

MeanFieldTable measure_mean_fields(const FragmentLayout& layout,
                                   const std::vector<StateVector>& fragment_states, int step) {
    MeanFieldTable table = MeanFieldTable::zeros(layout.n, step);
    for (int f = 0; f < layout.n_fragments(); ++f) {
        const auto& frag = layout.partition[f];
        for (std::size_t r = 0; r < frag.size(); ++r) {
            for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
                const double v = site_expectation(fragment_states.at(f), static_cast<int>(r), ax);
                table.set(frag[r], ax, std::clamp(v, -0.5, 0.5));
            }
        }
    }
    return table;
}

MeanFieldTable measure_mean_fields_full(const StateVector& psi, int step) {
    MeanFieldTable table = MeanFieldTable::zeros(psi.n_qubits, step);
    for (int s = 0; s < psi.n_qubits; ++s)
        for (Axis ax : {Axis::X, Axis::Y, Axis::Z})
            table.set(s, ax, std::clamp(site_expectation(psi, s, ax), -0.5, 0.5));
    return table;
}

double classical_basis_energy(const SpinModel& model, std::size_t basis_index) {
    if (!model.is_zz_only()) throw std::invalid_argument("classical energy requires zz couplings");
    double e = 0.0;
    for (const auto& [key, value] : model.couplings) {
        const double mi = ((basis_index >> (model.n - 1 - key.i)) & 1ULL) ? -0.5 : 0.5;
        const double mj = ((basis_index >> (model.n - 1 - key.j)) & 1ULL) ? -0.5 : 0.5;
        e += -value * mi * mj;
    }
    return e;
}

HermitianOperator meanfield_union_operator(const SpinModel& model, const FragmentLayout& layout,
                                           const MeanFieldTable& mft) {
    HermitianOperator op;
    for (const auto& [key, value] : model.couplings) {
        if (value == 0.0) continue;
        if (layout.fragment_of(key.i) == layout.fragment_of(key.j)) {
            op.add(-value, {{key.i, key.ai}, {key.j, key.aj}});
        } else {
            const double mean = mft.get(key.j, key.aj);
            if (mean != 0.0) op.add(-value * mean, {{key.i, key.ai}});
        }
    }
    for (int i = 0; i < model.n; ++i)
        if (model.fields[i] != 0.0) op.add(-model.fields[i], {{i, Axis::X}});
    return op;
}

double meanfield_union_basis_energy(const SpinModel& model, const FragmentLayout& layout,
                                    std::size_t basis_index) {
    if (!model.is_zz_only()) throw std::invalid_argument("mean-field union requires zz couplings");
    const StateVector psi = basis_state(model.n, basis_index);
    const MeanFieldTable mft = measure_mean_fields_full(psi, 0);
    return expectation(meanfield_union_operator(model, layout, mft), psi);
}

FragmentLayout random_partition_layout(const SpinModel& model, int max_fragment_size, int n_aux,
                                       std::uint64_t seed) {
    if (max_fragment_size < 1) throw std::invalid_argument("fragment size must be >= 1");
    if (max_fragment_size + n_aux > model.n)
        throw std::invalid_argument("fragment plus auxiliaries exceeds system size");

    std::vector<int> order(model.n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (int i = model.n - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);

    std::vector<std::vector<int>> parts;
    for (int start = 0; start < model.n; start += max_fragment_size) {
        std::vector<int> frag(order.begin() + start,
                              order.begin() + std::min<std::size_t>(model.n, start + max_fragment_size));
        parts.push_back(std::move(frag));
    }
    FragmentLayout layout(model.n, std::move(parts), {});

    for (int f = 0; f < layout.n_fragments(); ++f) {
        std::vector<std::pair<double, int>> scored;
        for (int a = 0; a < model.n; ++a) {
            if (layout.contains(f, a)) continue;
            double weight = 0.0;
            for (int i : layout.partition[f]) {
                for (Axis ai : {Axis::X, Axis::Y, Axis::Z})
                    for (Axis aj : {Axis::X, Axis::Y, Axis::Z})
                        weight += std::abs(model.coupling(i, a, ai, aj));
            }
            scored.emplace_back(weight, a);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& lhs, const auto& rhs) {
            if (lhs.first != rhs.first) return lhs.first > rhs.first;
            return lhs.second < rhs.second;
        });
        const int count = std::min<int>(n_aux, static_cast<int>(scored.size()));
        for (int k = 0; k < count; ++k) layout.aux_targets[f].push_back(scored[k].second);
    }
    validate_layout(layout);
    return layout;
}

} // namespace fragsim
