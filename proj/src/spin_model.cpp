#include "fragsim/spin_model.hpp"

#include <cmath>
#include <utility>

#include <json.hpp>

#include "fragsim/rng.hpp"

namespace fragsim {

namespace {

CouplingKey canonical(int i, int j, Axis ai, Axis aj) {
    if (i == j) throw std::invalid_argument("self-coupling is not allowed");
    if (i < 0 || j < 0) throw std::out_of_range("negative spin index");
    if (i < j) return {i, j, ai, aj};
    return {j, i, aj, ai};
}

} // namespace

void SpinModel::set_coupling(int i, int j, Axis ai, Axis aj, double value) {
    const CouplingKey key = canonical(i, j, ai, aj);
    if (key.j >= n) throw std::out_of_range("coupling index exceeds spin count");
    couplings[key] = value;
}

double SpinModel::coupling(int i, int j, Axis ai, Axis aj) const {
    const auto it = couplings.find(canonical(i, j, ai, aj));
    return it == couplings.end() ? 0.0 : it->second;
}

bool SpinModel::is_zz_only() const {
    for (const auto& [key, value] : couplings) {
        (void)value;
        if (key.ai != Axis::Z || key.aj != Axis::Z) return false;
    }
    return true;
}

bool SpinModel::is_classical() const {
    if (!is_zz_only()) return false;
    for (double h : fields)
        if (h != 0.0) return false;
    return true;
}

SpinModel build_tfim_chain(int n, double J, double h) {
    if (n < 2) throw std::invalid_argument("TFIM chain requires n >= 2");
    SpinModel model(n);
    for (int i = 0; i + 1 < n; ++i) model.set_coupling(i, i + 1, Axis::Z, Axis::Z, J);
    for (int i = 0; i < n; ++i) model.fields[i] = h;
    return model;
}

SpinModel sample_random_ising(const GraphEnsembleConfig& cfg, double h) {
    if (cfg.n < 2) throw std::invalid_argument("ensemble requires n >= 2");
    if (cfg.edge_prob < 0.0 || cfg.edge_prob > 1.0)
        throw std::invalid_argument("edge probability must lie in [0, 1]");
    if (cfg.weight_std < 0.0) throw std::invalid_argument("weight std must be >= 0");

    SpinModel model(cfg.n);
    model.seed = cfg.seed;
    Rng rng(cfg.seed);
    for (int i = 0; i < cfg.n; ++i) {
        for (int j = i + 1; j < cfg.n; ++j) {
            if (rng.uniform() >= cfg.edge_prob) continue;
            model.set_coupling(i, j, Axis::Z, Axis::Z, rng.normal(cfg.weight_mean, cfg.weight_std));
        }
    }
    for (int i = 0; i < cfg.n; ++i) model.fields[i] = h;
    return model;
}

SpinModel sample_all_to_all_gaussian(int n, std::uint64_t seed, double h) {
    if (n < 2) throw std::invalid_argument("all-to-all model requires n >= 2");
    SpinModel model(n);
    model.seed = seed;
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            model.set_coupling(i, j, Axis::Z, Axis::Z, rng.normal());
    for (int i = 0; i < n; ++i) model.fields[i] = h;
    return model;
}

HermitianOperator assemble(const SpinModel& model) {
    HermitianOperator op;
    for (const auto& [key, value] : model.couplings) {
        if (value == 0.0) continue;
        op.add(-value, {{key.i, key.ai}, {key.j, key.aj}});
    }
    for (int i = 0; i < model.n; ++i) {
        if (model.fields[i] == 0.0) continue;
        op.add(-model.fields[i], {{i, Axis::X}});
    }
    return op;
}

std::string spin_model_to_json(const SpinModel& model) {
    nlohmann::json j;
    j["n"] = model.n;
    nlohmann::json couplings = nlohmann::json::array();
    for (const auto& [key, value] : model.couplings) {
        const std::string axes{axis_char(key.ai), axis_char(key.aj)};
        couplings.push_back({key.i, key.j, axes, value});
    }
    j["couplings"] = std::move(couplings);
    j["fields"] = model.fields;
    if (model.seed) j["seed"] = *model.seed;
    return j.dump(2);
}

SpinModel spin_model_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SpinModel model(j.at("n").get<int>());
    for (const auto& c : j.at("couplings")) {
        const std::string axes = c.at(2).get<std::string>();
        if (axes.size() != 2) throw std::invalid_argument("coupling axes must be two characters");
        model.set_coupling(c.at(0).get<int>(), c.at(1).get<int>(),
                           axis_from_char(axes[0]), axis_from_char(axes[1]),
                           c.at(3).get<double>());
    }
    const auto fields = j.at("fields").get<std::vector<double>>();
    if (static_cast<int>(fields.size()) != model.n)
        throw std::invalid_argument("field list length does not match n");
    model.fields = fields;
    if (j.contains("seed")) model.seed = j.at("seed").get<std::uint64_t>();
    return model;
}

} // namespace fragsim
