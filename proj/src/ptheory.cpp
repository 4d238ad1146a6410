#include "fragsim/ptheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fragsim/rng.hpp"

namespace fragsim {

namespace {

void require_ising(const SpinModel& model) {
    if (!model.is_zz_only())
        throw std::invalid_argument("perturbation theory supports zz couplings plus x fields only");
}

std::size_t flipped(std::size_t x, int n) { return x ^ ((std::size_t{1} << n) - 1); }

// Classical energies of every basis state (fields ignored).
std::vector<double> classical_spectrum(const SpinModel& model) {
    const std::size_t dim = std::size_t{1} << model.n;
    std::vector<double> e(dim);
    for (std::size_t x = 0; x < dim; ++x) e[x] = classical_basis_energy(model, x);
    return e;
}

double degeneracy_tol(const std::vector<double>& spectrum) {
    double scale = 0.0;
    for (double e : spectrum) scale = std::max(scale, std::abs(e));
    return 1e-9 * std::max(scale, 1.0);
}

// Shared first-order machinery: sums -h_i/2 / (E_k - E_y) over the single-flip
// neighbors y of each pair member, weighted by `pair_weight`.
struct CorrectionBuild {
    StateVector correction;
    bool cross_terms = false;
};

CorrectionBuild build_correction(const SpinModel& model, const std::vector<double>& spectrum,
                                 const std::vector<std::size_t>& sources, double pair_weight,
                                 std::size_t k, std::size_t kbar) {
    const int n = model.n;
    const double tol = degeneracy_tol(spectrum);
    CorrectionBuild out;
    out.correction = StateVector(n);
    std::vector<std::uint8_t> touched_by(out.correction.dim(), 0);

    for (std::size_t si = 0; si < sources.size(); ++si) {
        const std::size_t src = sources[si];
        for (int i = 0; i < n; ++i) {
            const double h = model.fields[i];
            if (h == 0.0) continue;
            const std::size_t y = src ^ (std::size_t{1} << (n - 1 - i));
            if (y == k || y == kbar) continue;
            const double gap = spectrum[k] - spectrum[y];
            if (std::abs(gap) < tol)
                throw NumericalError(
                    "accidental degeneracy couples to the perturbation; instance unsupported",
                    std::abs(gap));
            out.correction[y] += pair_weight * (-h / 2.0) / gap;
            touched_by[y] |= static_cast<std::uint8_t>(1u << si);
            if (touched_by[y] == 3) out.cross_terms = true;
        }
    }
    return out;
}

void check_pair_degeneracy(const SpinModel& model, const std::vector<double>& spectrum,
                           std::size_t k) {
    const double tol = degeneracy_tol(spectrum);
    const std::size_t kbar = flipped(k, model.n);
    for (std::size_t x = 0; x < spectrum.size(); ++x) {
        if (x == k || x == kbar) continue;
        if (std::abs(spectrum[x] - spectrum[k]) < tol)
            throw NumericalError("degeneracy beyond the spin-flip pair; instance unsupported",
                                 std::abs(spectrum[x] - spectrum[k]));
    }
}

} // namespace

PTDecomposition decompose(const SpinModel& model, const FragmentLayout& layout, double lambda) {
    require_ising(model);
    validate_layout(layout);
    PTDecomposition d;
    d.lambda = lambda;
    for (const auto& [key, value] : model.couplings) {
        if (value == 0.0) continue;
        const bool intra = layout.fragment_of(key.i) == layout.fragment_of(key.j);
        (intra ? d.h0 : d.hi).add(-value, {{key.i, Axis::Z}, {key.j, Axis::Z}});
    }
    for (int i = 0; i < model.n; ++i)
        if (model.fields[i] != 0.0) d.v.add(-model.fields[i], {{i, Axis::X}});
    return d;
}

StateVector FirstOrderState::normalized() const {
    StateVector out = zeroth;
    for (std::size_t x = 0; x < out.dim(); ++x)
        out[x] = normalization * (zeroth[x] + first_correction[x]);
    return out;
}

FirstOrderState first_order_full(const SpinModel& model, const FragmentLayout& layout,
                                 std::size_t k) {
    require_ising(model);
    validate_layout(layout);
    const std::vector<double> spectrum = classical_spectrum(model);
    check_pair_degeneracy(model, spectrum, k);
    const std::size_t kbar = flipped(k, model.n);

    FirstOrderState st;
    st.zeroth = StateVector(model.n);
    const double w = 1.0 / std::sqrt(2.0);
    st.zeroth[k] = w;
    st.zeroth[kbar] += w;

    CorrectionBuild build = build_correction(model, spectrum, {k, kbar}, w, k, kbar);
    st.first_correction = std::move(build.correction);
    st.cross_terms = build.cross_terms;

    double c2 = 0.0;
    for (const cplx& c : st.first_correction.amps) c2 += std::norm(c);
    st.normalization = 1.0 / std::sqrt(1.0 + c2);

    // first-order energy shift <k0|V|k0> must vanish (single flips leave the pair)
    const cplx overlap = inner(st.zeroth, st.first_correction);
    if (std::abs(overlap) > 1e-12)
        throw NumericalError("first-order correction not orthogonal to the pair",
                             std::abs(overlap));
    return st;
}

FirstOrderState first_order_meanfield(const SpinModel& model, const FragmentLayout& layout,
                                      std::size_t k) {
    require_ising(model);
    validate_layout(layout);
    const std::vector<double> spectrum = classical_spectrum(model);
    check_pair_degeneracy(model, spectrum, k);
    const std::size_t kbar = flipped(k, model.n);

    FirstOrderState st;
    st.zeroth = StateVector(model.n);
    st.zeroth[k] = 1.0;
    CorrectionBuild build = build_correction(model, spectrum, {k}, 1.0, k, kbar);
    st.first_correction = std::move(build.correction);

    double c2 = 0.0;
    for (const cplx& c : st.first_correction.amps) c2 += std::norm(c);
    st.normalization = 1.0 / std::sqrt(1.0 + c2);
    return st;
}

double first_order_overlap(const FirstOrderState& full, const FirstOrderState& mf) {
    if (full.cross_terms)
        throw NumericalError("spin-flip cross terms present; overlap identity does not apply", 1.0);
    const cplx z0 = inner(full.zeroth, mf.zeroth);
    const cplx z1 = inner(full.first_correction, mf.first_correction);
    const cplx total = full.normalization * mf.normalization * (z0 + z1);
    if (std::abs(total.imag()) > 1e-12)
        throw NumericalError("overlap has an imaginary residue", std::abs(total.imag()));
    return total.real();
}

std::size_t classical_ground_index(const SpinModel& model) {
    require_ising(model);
    const std::vector<double> spectrum = classical_spectrum(model);
    return static_cast<std::size_t>(
        std::min_element(spectrum.begin(), spectrum.end()) - spectrum.begin());
}

namespace {

struct MeanFieldObjective {
    HermitianOperator linear; // h0 + v, state-independent
    std::vector<CouplingKey> interface;
    const SpinModel* model = nullptr;

    double energy(const StateVector& psi) const {
        double e = linear.empty() ? 0.0 : expectation(linear, psi);
        for (const CouplingKey& key : interface) {
            const double J = model->couplings.at(key);
            e -= J * site_expectation(psi, key.i, Axis::Z) * site_expectation(psi, key.j, Axis::Z);
        }
        return e;
    }

    // Euclidean gradient wrt conj(amplitudes), projected onto the sphere.
    StateVector gradient(const StateVector& psi) const {
        HermitianOperator g = linear;
        for (const CouplingKey& key : interface) {
            const double J = model->couplings.at(key);
            const double mi = site_expectation(psi, key.i, Axis::Z);
            const double mj = site_expectation(psi, key.j, Axis::Z);
            if (mj != 0.0) g.add(-J * mj, {{key.i, Axis::Z}});
            if (mi != 0.0) g.add(-J * mi, {{key.j, Axis::Z}});
        }
        StateVector gpsi = apply_pauli_sum(g, psi);
        const cplx mean = inner(psi, gpsi);
        for (std::size_t x = 0; x < psi.dim(); ++x) gpsi[x] -= mean * psi[x];
        return gpsi;
    }
};

} // namespace

std::pair<StateVector, double> minimize_meanfield_energy(const SpinModel& model,
                                                         const FragmentLayout& layout, double h,
                                                         std::uint64_t seed,
                                                         const MeanFieldMinimizeOptions& options) {
    require_ising(model);
    if (model.n > 12) throw std::invalid_argument("minimizer supports n <= 12");
    SpinModel model_h = model;
    model_h.fields.assign(model.n, h);

    const PTDecomposition d = decompose(model_h, layout);
    MeanFieldObjective obj;
    obj.linear = d.h0;
    obj.linear += d.v;
    for (const auto& [key, value] : model_h.couplings) {
        (void)value;
        if (layout.fragment_of(key.i) != layout.fragment_of(key.j)) obj.interface.push_back(key);
    }
    obj.model = &model_h;

    StateVector best;
    double best_energy = std::numeric_limits<double>::infinity();
    for (int s = 0; s < options.n_starts; ++s) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        StateVector psi(model.n);
        for (cplx& c : psi.amps) c = cplx{rng.normal(), rng.normal()};
        psi.normalize();

        double e = obj.energy(psi);
        double step = options.initial_step;
        bool done = false;
        for (int it = 0; it < options.max_iters && !done; ++it) {
            const StateVector grad = obj.gradient(psi);
            bool improved = false;
            for (int halving = 0; halving < 40 && !improved; ++halving) {
                StateVector trial = psi;
                for (std::size_t x = 0; x < trial.dim(); ++x) trial[x] -= step * grad[x];
                const double norm = trial.norm();
                if (norm <= 0.0) {
                    step *= 0.5;
                    continue;
                }
                for (cplx& c : trial.amps) c /= norm;
                const double e_trial = obj.energy(trial);
                if (e_trial <= e) {
                    const double gain = e - e_trial;
                    psi = std::move(trial);
                    e = e_trial;
                    improved = true;
                    step = std::min(step * 1.25, 1.0);
                    done = gain < options.energy_tol * (1.0 + std::abs(e));
                } else {
                    step *= 0.5;
                }
            }
            if (!improved) break;
        }
        if (e < best_energy) {
            best_energy = e;
            best = std::move(psi);
        }
    }
    return {best, best_energy};
}

std::vector<PtSweepRow> pt_sweep(const SpinModel& model, const FragmentLayout& layout,
                                 const std::vector<double>& h_grid, std::uint64_t seed,
                                 const MeanFieldMinimizeOptions& options) {
    require_ising(model);
    if (model.n > 10) throw std::invalid_argument("pt_sweep supports n <= 10");
    const std::size_t ground = classical_ground_index(model);

    std::vector<PtSweepRow> rows;
    for (std::size_t idx = 0; idx < h_grid.size(); ++idx) {
        const double h = h_grid[idx];
        SpinModel model_h = model;
        model_h.fields.assign(model.n, h);

        const EigResult exact = hermitian_eig(dense_matrix(assemble(model_h), model.n));
        StateVector exact_ground(model.n);
        for (std::size_t x = 0; x < exact_ground.dim(); ++x)
            exact_ground[x] = exact.vectors.at(static_cast<int>(x), 0);

        const PTDecomposition d = decompose(model_h, layout);
        HermitianOperator bare = d.h0;
        bare += d.v;
        StateVector bare_ground(model.n);
        if (bare.empty()) {
            bare_ground[0] = 1.0;
        } else {
            const EigResult bare_eig = hermitian_eig(dense_matrix(bare, model.n));
            for (std::size_t x = 0; x < bare_ground.dim(); ++x)
                bare_ground[x] = bare_eig.vectors.at(static_cast<int>(x), 0);
        }

        const StateVector pt_full = first_order_full(model_h, layout, ground).normalized();
        const StateVector pt_mf = first_order_meanfield(model_h, layout, ground).normalized();
        const auto [mf_state, mf_energy] =
            minimize_meanfield_energy(model, layout, h, derive_seed(seed, idx), options);
        (void)mf_energy;

        PtSweepRow row;
        row.h = h;
        row.f_exact_vs_mfmin = std::norm(inner(exact_ground, mf_state));
        row.f_exact_vs_baremin = std::norm(inner(exact_ground, bare_ground));
        row.f_exact_vs_ptfull = std::norm(inner(exact_ground, pt_full));
        row.f_exact_vs_ptmf = std::norm(inner(exact_ground, pt_mf));
        rows.push_back(row);
    }
    return rows;
}

} // namespace fragsim
