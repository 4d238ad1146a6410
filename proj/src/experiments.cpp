#include "fragsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fragsim/evolve.hpp"
#include "fragsim/metrics.hpp"
#include "fragsim/parallel.hpp"
#include "fragsim/ptheory.hpp"
#include "fragsim/rng.hpp"
#include "fragsim/svg.hpp"
#include "fragsim/vqe.hpp"

namespace fragsim {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& required,
                const std::set<std::string>& optional) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!required.count(key) && !optional.count(key))
            throw ConfigError("unknown config key '" + key + "'");
    }
    for (const std::string& key : required)
        if (!j.contains(key)) throw ConfigError("missing config key '" + key + "'");
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
}

double geometric_mean(std::vector<double> values, double floor = 1e-16) {
    if (values.empty()) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += std::log(std::max(v, floor));
    return std::exp(acc / static_cast<double>(values.size()));
}

// ---------------------------------------------------------------------------
// evolve: fidelity / local-expectation trajectories (classical and quantum
// channels against the exact reference)
// ---------------------------------------------------------------------------

struct EvolveArm {
    Channel channel = Channel::Classical;
    bool mean_field = true;
    int n_aux = 0;

    std::string channel_name() const {
        switch (channel) {
        case Channel::None: return "none";
        case Channel::Classical: return "classical";
        default: return "quantum";
        }
    }
};

struct EvolveInstanceResult {
    std::string rows;       // fidelity CSV rows
    std::string site_rows;  // optional per-site rows
    // key: (channel, mf, n_aux, step) -> accumulated mean fidelity numerator
    std::map<std::tuple<std::string, int, int, int>, std::pair<double, int>> summary;
};

FragmentLayout ranked_layout(const SpinModel& model, int fragment_size, int n_aux,
                             const StateVector& psi0, double dt) {
    FragmentLayout layout = contiguous_layout(model.n, fragment_size);
    if (n_aux > 0) {
        for (int f = 0; f < layout.n_fragments(); ++f) {
            const std::vector<int> ranked = rank_aux_targets(model, layout, f, psi0, dt);
            for (int k = 0; k < n_aux && k < static_cast<int>(ranked.size()); ++k)
                layout.aux_targets[f].push_back(ranked[k]);
        }
        validate_layout(layout);
    }
    return layout;
}

void run_evolve(const json& cfg, const RunOptions& options) {
    check_keys(cfg,
               {"schema", "experiment", "model", "n_values", "h_values", "fragment_size",
                "n_aux_values", "channels", "dt", "n_steps", "seed"},
               {"J", "edge_prob", "weight_mean", "weight_std", "n_models", "n_models_full",
                "mean_field", "aux_update", "track_sites"});
    const std::string model_kind = cfg.at("model").get<std::string>();
    if (model_kind != "tfim" && model_kind != "random_ising")
        throw ConfigError("model must be 'tfim' or 'random_ising'");
    const std::vector<int> n_values = cfg.at("n_values").get<std::vector<int>>();
    const std::vector<double> h_values = cfg.at("h_values").get<std::vector<double>>();
    const int fragment_size = cfg.at("fragment_size").get<int>();
    const std::vector<int> n_aux_values = cfg.at("n_aux_values").get<std::vector<int>>();
    const std::vector<std::string> channels = cfg.at("channels").get<std::vector<std::string>>();
    const double dt = cfg.at("dt").get<double>();
    const int n_steps = cfg.at("n_steps").get<int>();
    const std::uint64_t seed = options.seed.value_or(cfg.at("seed").get<std::uint64_t>());
    const double J = get_or(cfg, "J", 1.0);
    const int n_models =
        options.full ? get_or(cfg, "n_models_full", get_or(cfg, "n_models", 1))
                     : get_or(cfg, "n_models", 1);
    const std::string mean_field = get_or<std::string>(cfg, "mean_field", "both");
    const std::string aux_update = get_or<std::string>(cfg, "aux_update", "fixed");
    const bool track_sites = get_or(cfg, "track_sites", false);

    std::vector<EvolveArm> arms;
    for (const std::string& ch : channels) {
        Channel channel;
        if (ch == "none") channel = Channel::None;
        else if (ch == "classical") channel = Channel::Classical;
        else if (ch == "quantum") channel = Channel::Quantum;
        else throw ConfigError("unknown channel '" + ch + "'");
        for (int n_aux : n_aux_values) {
            if (channel == Channel::None) {
                arms.push_back({channel, false, n_aux});
                continue;
            }
            if (mean_field == "on" || mean_field == "both") arms.push_back({channel, true, n_aux});
            if (mean_field == "off" || mean_field == "both")
                arms.push_back({channel, false, n_aux});
        }
    }

    struct Task {
        int n = 0;
        double h = 0.0;
        int model_index = 0;
    };
    std::vector<Task> tasks;
    for (int n : n_values)
        for (double h : h_values)
            for (int m = 0; m < n_models; ++m) tasks.push_back({n, h, m});

    std::vector<EvolveInstanceResult> results(tasks.size());
    parallel_for(tasks.size(), options.threads, [&](std::size_t idx) {
        const Task& task = tasks[idx];
        SpinModel model(1);
        StateVector psi0;
        if (model_kind == "tfim") {
            model = build_tfim_chain(task.n, J, task.h);
            psi0 = basis_state(task.n, 0);
        } else {
            GraphEnsembleConfig gcfg;
            gcfg.n = task.n;
            gcfg.edge_prob = get_or(cfg, "edge_prob", 0.5);
            gcfg.weight_mean = get_or(cfg, "weight_mean", 0.0);
            gcfg.weight_std = get_or(cfg, "weight_std", 1.0);
            gcfg.seed = derive_seed(seed, static_cast<std::uint64_t>(task.model_index));
            model = sample_random_ising(gcfg, task.h);
            Rng basis_rng(derive_seed(gcfg.seed, 0xBA515));
            psi0 = basis_state(task.n, basis_rng.uniform_int(std::size_t{1} << task.n));
        }

        EvolutionSchedule sched;
        sched.dt = dt;
        sched.n_steps = n_steps;
        sched.seed = derive_seed(seed, 0x5EED + static_cast<std::uint64_t>(idx));
        const EvolutionRecord exact = evolve_exact(model, psi0, sched);

        EvolveInstanceResult& res = results[idx];
        std::ostringstream rows, site_rows;
        rows.precision(12);
        site_rows.precision(12);
        for (const EvolveArm& arm : arms) {
            const FragmentLayout layout = ranked_layout(model, fragment_size, arm.n_aux, psi0, dt);
            EvolutionSchedule s = sched;
            s.channel = arm.channel;
            s.mean_field = arm.mean_field;
            s.aux_update = AuxUpdate::Fixed;
            if (arm.channel == Channel::Quantum) {
                if (aux_update == "active") s.aux_update = AuxUpdate::Active;
                else if (aux_update == "random_active") s.aux_update = AuxUpdate::RandomActive;
            }
            EvolutionRecord record =
                arm.channel == Channel::Quantum
                    ? evolve_quantum_channel(model, layout, psi0, s)
                    : evolve_classical_channel(model, layout, psi0, s);
            attach_fragment_fidelities(record, exact, layout);

            for (int k = 0; k <= record.n_steps(); ++k) {
                for (int f = 0; f < layout.n_fragments(); ++f) {
                    rows << task.model_index << "," << task.n << "," << task.h << ","
                         << arm.channel_name() << "," << (arm.mean_field ? 1 : 0) << ","
                         << arm.n_aux << "," << f << "," << record.times[k] << ","
                         << record.fidelities[k][f] << "\n";
                    auto& cell = res.summary[{arm.channel_name(), arm.mean_field ? 1 : 0,
                                              arm.n_aux, k}];
                    cell.first += record.fidelities[k][f];
                    cell.second += 1;
                }
                if (track_sites) {
                    for (int site = 0; site < task.n; ++site) {
                        const int f = layout.fragment_of(site);
                        const int reg = layout.local_register(f, site);
                        double sx, sz;
                        if (!record.fragment_states.empty()) {
                            sx = site_expectation(record.fragment_states[k][f], reg, Axis::X);
                            sz = site_expectation(record.fragment_states[k][f], reg, Axis::Z);
                        } else {
                            sx = site_expectation(record.full_states[k], site, Axis::X);
                            sz = site_expectation(record.full_states[k], site, Axis::Z);
                        }
                        site_rows << task.model_index << "," << task.n << "," << task.h << ","
                                  << arm.channel_name() << "," << (arm.mean_field ? 1 : 0) << ","
                                  << arm.n_aux << "," << site << "," << record.times[k] << ","
                                  << sx << "," << sz << ","
                                  << site_expectation(exact.full_states[k], site, Axis::X) << ","
                                  << site_expectation(exact.full_states[k], site, Axis::Z) << "\n";
                    }
                }
            }
        }
        res.rows = rows.str();
        res.site_rows = site_rows.str();
    });

    std::ostringstream fidelity_csv;
    fidelity_csv << "model_index,n,h,channel,mean_field,n_aux,fragment,Jt,fidelity\n";
    for (const EvolveInstanceResult& r : results) fidelity_csv << r.rows;
    write_file(std::filesystem::path(options.out_dir) / "evolve_fidelity.csv",
               fidelity_csv.str());

    if (track_sites) {
        std::ostringstream sites_csv;
        sites_csv << "model_index,n,h,channel,mean_field,n_aux,site,Jt,sx,sz,exact_sx,exact_sz\n";
        for (const EvolveInstanceResult& r : results) sites_csv << r.site_rows;
        write_file(std::filesystem::path(options.out_dir) / "evolve_sites.csv", sites_csv.str());
    }

    std::map<std::tuple<std::string, int, int, int>, std::pair<double, int>> summary;
    for (const EvolveInstanceResult& r : results)
        for (const auto& [key, cell] : r.summary) {
            summary[key].first += cell.first;
            summary[key].second += cell.second;
        }
    std::ostringstream summary_csv;
    summary_csv << "channel,mean_field,n_aux,Jt,mean_fidelity\n";
    summary_csv.precision(12);
    std::map<std::string, SvgSeries> curves;
    for (const auto& [key, cell] : summary) {
        const auto& [channel, mf, n_aux, step] = key;
        const double jt = step * dt;
        const double mean = cell.first / cell.second;
        summary_csv << channel << "," << mf << "," << n_aux << "," << jt << "," << mean << "\n";
        const std::string name =
            channel + (mf ? "+mf" : "") + ",Na=" + std::to_string(n_aux);
        curves[name].name = name;
        curves[name].points.emplace_back(jt, mean);
    }
    write_file(std::filesystem::path(options.out_dir) / "evolve_summary.csv", summary_csv.str());

    if (options.svg) {
        std::vector<SvgSeries> series;
        for (auto& [name, s] : curves) series.push_back(std::move(s));
        write_file(std::filesystem::path(options.out_dir) / "evolve_summary.svg",
                   svg_line_plot("mean fragment fidelity", "Jt", "<F_f>", series));
    }
}

// ---------------------------------------------------------------------------
// aux_rank: ranked auxiliary-choice arms (v0 / v1 / v2 / random) across the
// classical-fixed, quantum-fixed and quantum-active panels
// ---------------------------------------------------------------------------

void run_aux_rank(const json& cfg, const RunOptions& options) {
    check_keys(cfg,
               {"schema", "experiment", "n", "fragment_size", "n_aux", "h", "dt", "n_steps",
                "seed"},
               {"edge_prob", "weight_mean", "weight_std", "n_models", "n_models_full"});
    const int n = cfg.at("n").get<int>();
    const int fragment_size = cfg.at("fragment_size").get<int>();
    const int n_aux = cfg.at("n_aux").get<int>();
    const double h = cfg.at("h").get<double>();
    const double dt = cfg.at("dt").get<double>();
    const int n_steps = cfg.at("n_steps").get<int>();
    const std::uint64_t seed = options.seed.value_or(cfg.at("seed").get<std::uint64_t>());
    const int n_models =
        options.full ? get_or(cfg, "n_models_full", get_or(cfg, "n_models", 1))
                     : get_or(cfg, "n_models", 1);

    struct Arm {
        std::string panel; // classical_fixed | quantum_fixed | quantum_active
        std::string name;  // v0 | v1 | v2 | random
        bool mean_field = true;
    };
    std::vector<Arm> arms;
    for (const char* panel : {"classical_fixed", "quantum_fixed", "quantum_active"})
        for (const char* name : {"v0", "v1", "v2", "random"})
            for (bool mf : {true, false}) {
                if (std::string(panel) == "quantum_active" && std::string(name) == "v1") continue;
                arms.push_back({panel, name, mf});
            }

    std::vector<std::string> chunks(n_models);
    std::vector<std::map<std::tuple<std::string, std::string, int, int>,
                         std::pair<double, int>>> partial(n_models);
    parallel_for(static_cast<std::size_t>(n_models), options.threads, [&](std::size_t m) {
        GraphEnsembleConfig gcfg;
        gcfg.n = n;
        gcfg.edge_prob = get_or(cfg, "edge_prob", 0.5);
        gcfg.weight_mean = get_or(cfg, "weight_mean", 0.0);
        gcfg.weight_std = get_or(cfg, "weight_std", 1.0);
        gcfg.seed = derive_seed(seed, m);
        const SpinModel model = sample_random_ising(gcfg, h);
        Rng basis_rng(derive_seed(gcfg.seed, 0xBA515));
        const StateVector psi0 = basis_state(n, basis_rng.uniform_int(std::size_t{1} << n));

        EvolutionSchedule base;
        base.dt = dt;
        base.n_steps = n_steps;
        const EvolutionRecord exact = evolve_exact(model, psi0, base);

        const FragmentLayout bare_layout = contiguous_layout(n, fragment_size);
        std::vector<std::vector<int>> ranked(bare_layout.n_fragments());
        for (int f = 0; f < bare_layout.n_fragments(); ++f)
            ranked[f] = rank_aux_targets(model, bare_layout, f, psi0, dt);

        std::ostringstream rows;
        rows.precision(12);
        for (const Arm& arm : arms) {
            FragmentLayout layout = bare_layout;
            Rng pick_rng(derive_seed(gcfg.seed, 0xA0C + (arm.mean_field ? 1 : 0)));
            for (int f = 0; f < layout.n_fragments(); ++f) {
                const std::vector<int>& order = ranked[f];
                std::vector<int> targets;
                if (arm.name == "random") {
                    std::vector<int> pool = order;
                    for (int k = 0; k < n_aux && !pool.empty(); ++k) {
                        const std::size_t pick = pick_rng.uniform_int(pool.size());
                        targets.push_back(pool[pick]);
                        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
                    }
                } else {
                    const int group = arm.name == "v0" ? 0 : arm.name == "v1" ? 1 : 2;
                    int start = group * n_aux;
                    if (arm.name == "v2") start = static_cast<int>(order.size()) - n_aux;
                    start = std::clamp(start, 0, static_cast<int>(order.size()) - n_aux);
                    targets.assign(order.begin() + start, order.begin() + start + n_aux);
                }
                std::sort(targets.begin(), targets.end());
                layout.aux_targets[f] = targets;
            }
            validate_layout(layout);

            EvolutionSchedule s = base;
            s.mean_field = arm.mean_field;
            s.seed = derive_seed(gcfg.seed, 0xAC7);
            EvolutionRecord record;
            if (arm.panel == "classical_fixed") {
                s.channel = Channel::Classical;
                record = evolve_classical_channel(model, layout, psi0, s);
            } else {
                s.channel = Channel::Quantum;
                if (arm.panel == "quantum_active") {
                    if (arm.name == "random") s.aux_update = AuxUpdate::RandomActive;
                    else if (arm.name == "v0") s.aux_update = AuxUpdate::Active;
                    else s.aux_update = AuxUpdate::ActiveWorst;
                }
                record = evolve_quantum_channel(model, layout, psi0, s);
            }
            attach_fragment_fidelities(record, exact, layout);
            for (int k = 0; k <= record.n_steps(); ++k)
                for (int f = 0; f < layout.n_fragments(); ++f) {
                    rows << m << "," << arm.panel << "," << arm.name << ","
                         << (arm.mean_field ? 1 : 0) << "," << f << "," << record.times[k] << ","
                         << record.fidelities[k][f] << "\n";
                    auto& cell =
                        partial[m][{arm.panel, arm.name, arm.mean_field ? 1 : 0, k}];
                    cell.first += record.fidelities[k][f];
                    cell.second += 1;
                }
        }
        chunks[m] = rows.str();
    });

    std::ostringstream csv;
    csv << "model_index,panel,arm,mean_field,fragment,Jt,fidelity\n";
    for (const std::string& c : chunks) csv << c;
    write_file(std::filesystem::path(options.out_dir) / "aux_rank.csv", csv.str());

    std::map<std::tuple<std::string, std::string, int, int>, std::pair<double, int>> summary;
    for (const auto& p : partial)
        for (const auto& [key, cell] : p) {
            summary[key].first += cell.first;
            summary[key].second += cell.second;
        }
    std::ostringstream summary_csv;
    summary_csv << "panel,arm,mean_field,Jt,mean_fidelity\n";
    summary_csv.precision(12);
    for (const auto& [key, cell] : summary) {
        const auto& [panel, name, mf, step] = key;
        summary_csv << panel << "," << name << "," << mf << "," << step * dt << ","
                    << cell.first / cell.second << "\n";
    }
    write_file(std::filesystem::path(options.out_dir) / "aux_rank_summary.csv",
               summary_csv.str());
}

// ---------------------------------------------------------------------------
// vqe: vanilla vs fragment-initialized arms over seeded graph ensembles
// ---------------------------------------------------------------------------

void run_vqe(const json& cfg, const RunOptions& options) {
    check_keys(cfg,
               {"schema", "experiment", "n_values", "h_values", "n_graphs", "T_values", "arms",
                "seed"},
               {"n_graphs_full", "brick_layers", "ent_layers", "learning_rate", "max_iters",
                "check_every", "param_tol", "optimizer", "max_fragment_size", "n_aux",
                "init_bound"});
    const std::vector<int> n_values = cfg.at("n_values").get<std::vector<int>>();
    const std::vector<double> h_values = cfg.at("h_values").get<std::vector<double>>();
    const std::vector<int> t_values = cfg.at("T_values").get<std::vector<int>>();
    const std::vector<std::string> arms = cfg.at("arms").get<std::vector<std::string>>();
    const int n_graphs = options.full ? get_or(cfg, "n_graphs_full", cfg.at("n_graphs").get<int>())
                                      : cfg.at("n_graphs").get<int>();
    const std::uint64_t seed = options.seed.value_or(cfg.at("seed").get<std::uint64_t>());
    for (const std::string& arm : arms)
        if (arm != "vanilla" && arm != "frag_mf" && arm != "frag_nomf")
            throw ConfigError("unknown vqe arm '" + arm + "'");

    OptimizerConfig opt;
    opt.learning_rate = get_or(cfg, "learning_rate", 0.05);
    opt.max_iters = get_or(cfg, "max_iters", 5000);
    opt.check_every = get_or(cfg, "check_every", 100);
    opt.param_tol = get_or(cfg, "param_tol", 1e-6);
    const std::string optimizer = get_or<std::string>(cfg, "optimizer", "gd");
    if (optimizer == "adam") opt.kind = OptimizerConfig::Kind::Adam;
    else if (optimizer != "gd") throw ConfigError("optimizer must be 'gd' or 'adam'");

    PretrainConfig pre;
    pre.max_fragment_size = get_or(cfg, "max_fragment_size", 3);
    pre.n_aux = get_or(cfg, "n_aux", 2);
    pre.init_bound = get_or(cfg, "init_bound", 1e-5);

    struct Task {
        int n;
        double h;
        int graph;
        std::string arm;
        int T;
    };
    std::vector<Task> tasks;
    for (int n : n_values)
        for (double h : h_values)
            for (int g = 0; g < n_graphs; ++g)
                for (const std::string& arm : arms) {
                    if (arm == "vanilla") tasks.push_back({n, h, g, arm, 0});
                    else
                        for (int T : t_values) tasks.push_back({n, h, g, arm, T});
                }

    std::vector<std::string> rows(tasks.size());
    parallel_for(tasks.size(), options.threads, [&](std::size_t idx) {
        const Task& task = tasks[idx];
        const std::uint64_t graph_seed =
            derive_seed(derive_seed(seed, static_cast<std::uint64_t>(task.n) * 1000 +
                                               static_cast<std::uint64_t>(task.graph)),
                        std::hash<double>{}(task.h));
        const SpinModel model = sample_all_to_all_gaussian(task.n, graph_seed, task.h);
        AnsatzSpec spec;
        spec.n = task.n;
        spec.brick_layers = get_or(cfg, "brick_layers", 4);
        spec.ent_layers = get_or(cfg, "ent_layers", -1);

        OptimizerConfig arm_opt = opt;
        arm_opt.seed = derive_seed(graph_seed, std::hash<std::string>{}(task.arm));
        TrainResult result;
        if (task.arm == "vanilla") {
            result = vanilla_vqe(spec, model, arm_opt);
        } else {
            PretrainConfig p = pre;
            p.batch = task.T;
            p.mean_field = task.arm == "frag_mf";
            p.seed = derive_seed(arm_opt.seed, 17);
            const std::vector<double> init = batched_pretrain(spec, model, arm_opt, p);
            result = full_train_from(spec, model, init, arm_opt);
        }
        std::ostringstream row;
        row.precision(12);
        row << graph_seed << "," << task.n << "," << task.h << "," << task.arm << "," << task.T
            << "," << result.epsilon << "," << result.n_iters << "\n";
        rows[idx] = row.str();
    });

    std::ostringstream csv;
    csv << "seed,n,h,method,T,epsilon,n_iters\n";
    for (const std::string& r : rows) csv << r;
    write_file(std::filesystem::path(options.out_dir) / "vqe_results.csv", csv.str());

    // summary: geometric mean epsilon and arithmetic mean iterations
    std::map<std::tuple<int, double, std::string, int>, std::pair<std::vector<double>, double>>
        grouped;
    for (std::size_t idx = 0; idx < tasks.size(); ++idx) {
        const Task& task = tasks[idx];
        std::istringstream in(rows[idx]);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(in, field, ',')) fields.push_back(field);
        auto& cell = grouped[{task.n, task.h, task.arm, task.T}];
        cell.first.push_back(std::stod(fields[5]));
        cell.second += std::stod(fields[6]);
    }
    std::ostringstream summary;
    summary << "n,h,method,T,geomean_epsilon,mean_iters\n";
    summary.precision(12);
    for (const auto& [key, cell] : grouped) {
        const auto& [n, h, arm, T] = key;
        summary << n << "," << h << "," << arm << "," << T << ","
                << geometric_mean(cell.first) << ","
                << cell.second / static_cast<double>(cell.first.size()) << "\n";
    }
    write_file(std::filesystem::path(options.out_dir) / "vqe_summary.csv", summary.str());
}

// ---------------------------------------------------------------------------
// envelope: variance-difference scatter plus the parameterized families
// ---------------------------------------------------------------------------

void run_envelope(const json& cfg, const RunOptions& options) {
    check_keys(cfg, {"schema", "experiment", "n_samples", "seed"},
               {"alpha_points", "theta_points", "beta_points", "beta_max", "theta_max"});
    const int n_samples = cfg.at("n_samples").get<int>();
    const std::uint64_t seed = options.seed.value_or(cfg.at("seed").get<std::uint64_t>());

    std::ostringstream scatter;
    scatter << "sample,concurrence,V,V_MF,V_minus_VMF\n";
    scatter.precision(12);
    for (int s = 0; s < n_samples; ++s) {
        const StateVector psi = random_two_qubit_state(derive_seed(seed, s));
        const VarianceDiff vd = variance_diff(psi);
        scatter << s << "," << vd.concurrence << "," << vd.v << "," << vd.v_mf << ","
                << vd.diff() << "\n";
    }
    write_file(std::filesystem::path(options.out_dir) / "envelope_scatter.csv", scatter.str());

    const auto sweep_family = [&](StateFamily family, double lo, double hi, int points,
                                  const std::string& name) {
        std::ostringstream csv;
        csv << "param,concurrence,V,V_MF,V_minus_VMF\n";
        csv.precision(12);
        std::vector<SvgSeries> series(2);
        series[0].name = "V-V_MF";
        series[1].name = "concurrence";
        for (int k = 0; k < points; ++k) {
            const double p = lo + (hi - lo) * k / (points - 1);
            const VarianceDiff vd = variance_diff(family_state(family, p));
            csv << p << "," << vd.concurrence << "," << vd.v << "," << vd.v_mf << ","
                << vd.diff() << "\n";
            series[0].points.emplace_back(p, vd.diff());
            series[1].points.emplace_back(p, vd.concurrence);
        }
        write_file(std::filesystem::path(options.out_dir) / ("family_" + name + ".csv"),
                   csv.str());
        if (options.svg)
            write_file(std::filesystem::path(options.out_dir) / ("family_" + name + ".svg"),
                       svg_line_plot("family " + name, name, "value", series));
    };
    sweep_family(StateFamily::Alpha, 0.0, 1.0, get_or(cfg, "alpha_points", 101), "alpha");
    sweep_family(StateFamily::Theta, 0.0, get_or(cfg, "theta_max", std::numbers::pi),
                 get_or(cfg, "theta_points", 101), "theta");
    sweep_family(StateFamily::Beta, 0.0, get_or(cfg, "beta_max", 3.0),
                 get_or(cfg, "beta_points", 101), "beta");
}

// ---------------------------------------------------------------------------
// pt_sweep: perturbation-theory fidelity curves over a transverse-field grid
// ---------------------------------------------------------------------------

void run_pt_sweep(const json& cfg, const RunOptions& options) {
    check_keys(cfg, {"schema", "experiment", "n", "fragment_size", "h_start", "h_stop", "h_step",
                     "seed"},
               {"n_starts", "model_seed"});
    const int n = cfg.at("n").get<int>();
    const int fragment_size = cfg.at("fragment_size").get<int>();
    const double h_start = cfg.at("h_start").get<double>();
    const double h_stop = cfg.at("h_stop").get<double>();
    const double h_step = cfg.at("h_step").get<double>();
    if (h_step <= 0.0) throw ConfigError("h_step must be positive");
    const std::uint64_t seed = options.seed.value_or(cfg.at("seed").get<std::uint64_t>());
    const std::uint64_t model_seed = get_or<std::uint64_t>(cfg, "model_seed", seed);

    MeanFieldMinimizeOptions mopts;
    mopts.n_starts = get_or(cfg, "n_starts", 32);

    // resample until the classical spectrum has no degeneracy beyond the pairs
    SpinModel model(2);
    FragmentLayout layout;
    bool found = false;
    for (std::uint64_t attempt = 0; attempt < 100 && !found; ++attempt) {
        model = sample_all_to_all_gaussian(n, derive_seed(model_seed, attempt), 0.0);
        layout = contiguous_layout(n, fragment_size);
        try {
            SpinModel probe = model;
            probe.fields.assign(n, 1.0);
            (void)first_order_full(probe, layout, classical_ground_index(probe));
            found = true;
        } catch (const NumericalError&) {
        }
    }
    if (!found) throw NumericalError("no supported instance found", 0.0);

    std::vector<double> grid;
    for (double h = h_start; h <= h_stop + 1e-12; h += h_step) grid.push_back(h);
    const std::vector<PtSweepRow> rows = pt_sweep(model, layout, grid, seed, mopts);

    std::ostringstream csv;
    csv << "h,F_exact_vs_mfmin,F_exact_vs_baremin,F_exact_vs_ptfull,F_exact_vs_ptmf\n";
    csv.precision(12);
    std::vector<SvgSeries> series(4);
    series[0].name = "H_MF minimizer";
    series[1].name = "bare fragment minimizer";
    series[2].name = "PT (full)";
    series[3].name = "PT (mean-field)";
    for (const PtSweepRow& row : rows) {
        csv << row.h << "," << row.f_exact_vs_mfmin << "," << row.f_exact_vs_baremin << ","
            << row.f_exact_vs_ptfull << "," << row.f_exact_vs_ptmf << "\n";
        series[0].points.emplace_back(row.h, row.f_exact_vs_mfmin);
        series[1].points.emplace_back(row.h, row.f_exact_vs_baremin);
        series[2].points.emplace_back(row.h, row.f_exact_vs_ptfull);
        series[3].points.emplace_back(row.h, row.f_exact_vs_ptmf);
    }
    write_file(std::filesystem::path(options.out_dir) / "pt_sweep.csv", csv.str());
    if (options.svg)
        write_file(std::filesystem::path(options.out_dir) / "pt_sweep.svg",
                   svg_line_plot("ground-state fidelity vs h", "h", "fidelity", series));
}

} // namespace

void run_experiment_file(const std::string& config_path, const RunOptions& options,
                         const std::string& expected_experiment) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    json cfg;
    try {
        cfg = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!cfg.contains("schema") || cfg.at("schema").get<int>() != 1)
        throw ConfigError("config schema must be 1");
    if (!cfg.contains("experiment")) throw ConfigError("missing 'experiment' field");
    if (!expected_experiment.empty() &&
        cfg.at("experiment").get<std::string>() != expected_experiment)
        throw ConfigError("config declares experiment '" +
                          cfg.at("experiment").get<std::string>() + "' but the subcommand expects '" +
                          expected_experiment + "'");

    std::filesystem::create_directories(options.out_dir);

    // provenance dump next to the results
    {
        json prov = cfg;
        if (options.seed) prov["seed"] = *options.seed;
        prov["full"] = options.full;
        write_file(std::filesystem::path(options.out_dir) / "provenance.json", prov.dump(2) + "\n");
    }

    const std::string experiment = cfg.at("experiment").get<std::string>();
    try {
        if (experiment == "evolve") run_evolve(cfg, options);
        else if (experiment == "aux_rank") run_aux_rank(cfg, options);
        else if (experiment == "vqe") run_vqe(cfg, options);
        else if (experiment == "envelope") run_envelope(cfg, options);
        else if (experiment == "pt_sweep") run_pt_sweep(cfg, options);
        else throw ConfigError("unknown experiment '" + experiment + "'");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
}

std::string canonical_config(const std::string& text) {
    return json::parse(text).dump(2) + "\n";
}

} // namespace fragsim
