#include "kerrnet/scenarios.hpp"

#include "kerrnet/measures.hpp"
#include "kerrnet/parallel.hpp"
#include "kerrnet/spectral.hpp"

#include <cmath>
#include <limits>

namespace kerrnet {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

NetworkParams with_k(NetworkParams p, double k) {
    p.k_a = k;
    p.k_b = k;
    p.k_int = -2.0 * k;
    return p;
}

NoiseSpec uniform_noise(NoiseKind kind, double gamma) {
    NoiseSpec n;
    n.kind = kind;
    n.gamma_a = n.gamma_b = n.gamma = gamma;
    return n;
}

PassageSettings passage_settings(const RunConfig& cfg) {
    PassageSettings s;
    s.dt_closed = cfg.integrator.dt_closed;
    s.dt_open = cfg.integrator.dt_open;
    s.cadence = cfg.integrator.cadence;
    s.phi_target = cfg.ramp.phi_target.value_or(std::numbers::pi / 2);
    s.hold_time = cfg.integrator.hold_time;
    s.mes_m = cfg.passage.mes_m;
    return s;
}

bool silent(const NoiseSpec& n) {
    switch (n.kind) {
        case NoiseKind::none: return true;
        case NoiseKind::single_mode_loss:
        case NoiseKind::phase_flip_single: return n.gamma_a == 0.0 && n.gamma_b == 0.0;
        default: return n.gamma == 0.0;
    }
}

json time_units(std::initializer_list<const char*> dimensionless) {
    json u = {{"t", "1/J"}, {"phi", "rad"}, {"energy", "J"}};
    for (const char* c : dimensionless) {
        u[c] = "dimensionless";
    }
    return u;
}

template <class State>
std::vector<std::pair<std::string, std::function<double(const State&)>>> entanglement_observers(
    const OccupationBasis& basis) {
    const std::vector<SiteMode> a12{{0, 0}, {0, 1}};
    const std::vector<SiteMode> b12{{1, 0}, {1, 1}};
    const Partition pair_split{a12, b12};
    const Partition species = Partition::species_split(basis);
    std::vector<std::pair<std::string, std::function<double(const State&)>>> out;
    out.emplace_back("N_G", [](const State& s) { return global_negativity(s); });
    out.emplace_back("N_a1a2", [](const State& s) { return pairwise_negativity(s, {0, 0}, {0, 1}); });
    out.emplace_back("N_a1a2_b1b2", [pair_split](const State& s) { return negativity(s, pair_split); });
    out.emplace_back("pi_tangle", [](const State& s) { return pi_tangle(s, 0); });
    out.emplace_back("geo_mean_tangle", [](const State& s) { return geo_mean_tangle(s, 0); });
    if constexpr (std::is_same_v<State, PureState>) {
        out.emplace_back("schmidt_number", [species](const State& s) {
            return static_cast<double>(schmidt_number(s.normalized(), species));
        });
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ScenarioResult run_spectrum(const RunConfig& cfg) {
    const auto& sc = cfg.spectrum;
    const auto grid = uniform_grid(sc.phi_min, sc.phi_max, static_cast<std::size_t>(sc.grid_points));
    const bool track = sc.track_level >= 0;
    const auto sweep = eigen_sweep(cfg.model, grid, sc.n_levels, track);
    const auto levels = static_cast<int>(sweep.levels.cols());

    std::vector<std::string> cols{"phi"};
    for (int l = 0; l < levels; ++l) {
        cols.push_back("level_" + std::to_string(l));
    }
    CsvTable spectrum(cols);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<CsvTable::Cell> row{grid[g]};
        for (int l = 0; l < levels; ++l) {
            row.emplace_back(sweep.levels(static_cast<Eigen::Index>(g), l));
        }
        spectrum.add_row(std::move(row));
    }

    const auto alcs = detect_alc(sweep, sc.alc_level);
    const std::string pair = std::to_string(sc.alc_level) + "-" + std::to_string(sc.alc_level + 1);
    CsvTable alc({"phi_star", "gap", "level_pair"});
    json alc_json = json::array();
    for (const auto& a : alcs) {
        alc.add_row({a.phi_star, a.gap, pair});
        alc_json.push_back({{"phi_star", a.phi_star}, {"gap", a.gap}, {"phi_star_over_pi", a.phi_star / std::numbers::pi}});
    }

    ScenarioResult res{"spectrum", {}, {}};
    json level_units = {{"phi", "rad"}};
    for (int l = 0; l < levels; ++l) {
        level_units["level_" + std::to_string(l)] = "J";
    }
    res.tables.push_back({"spectrum", std::move(spectrum), level_units});
    res.tables.push_back({"alc", std::move(alc), {{"phi_star", "rad"}, {"gap", "J"}, {"level_pair", "level indices"}}});
    if (track) {
        if (sc.track_level >= levels) {
            throw ContractError("spectrum.track_level must be below the number of levels (" + std::to_string(levels) +
                                ")");
        }
        const auto path = track_state(sweep, sc.track_level);
        CsvTable tracked({"phi", "level", "overlap", "ambiguous", "energy"});
        for (std::size_t g = 0; g < grid.size(); ++g) {
            tracked.add_row({grid[g], static_cast<long long>(path.level[g]), path.overlap[g],
                             static_cast<long long>(path.ambiguous[g] ? 1 : 0),
                             sweep.levels(static_cast<Eigen::Index>(g), path.level[g])});
        }
        res.tables.push_back({"tracked", std::move(tracked),
                              {{"phi", "rad"}, {"level", "index"}, {"overlap", "dimensionless"},
                               {"ambiguous", "flag"}, {"energy", "J"}}});
    }
    res.summary = {{"dimension", sweep.basis->dimension()}, {"levels", levels}, {"grid_points", grid.size()},
                   {"alc", alc_json}};
    return res;
}

ScenarioResult run_passage(const RunConfig& cfg) {
    const auto& params = cfg.model;
    const auto exact = params.make_basis(CapKind::exact);
    const PureState psi0 = cfg.passage.initial == "mes" ? mes_state(exact, cfg.passage.mes_m, params.species_total)
                                                        : ground_state(params, cfg.ramp.phi_start);
    const double t_max = cfg.integrator.t_max.value_or(cfg.ramp.arrival_time() + cfg.integrator.hold_time);
    if (!std::isfinite(t_max)) {
        throw ContractError("integrator.t_max is required when the ramp never reaches phi_target");
    }
    Observers obs;
    obs.target = mes_state(exact, cfg.passage.mes_m, params.species_total);
    obs.cadence = cfg.integrator.cadence;

    Trajectory tr;
    const bool closed = silent(cfg.noise);
    if (closed) {
        if (cfg.passage.entanglement) {
            obs.pure = entanglement_observers<PureState>(*exact);
        }
        tr = evolve_closed(params, cfg.ramp, psi0, cfg.integrator.dt_closed, t_max, obs).trajectory;
    } else {
        const auto basis = params.make_basis(CapKind::at_most);
        if (cfg.passage.entanglement) {
            obs.mixed = entanglement_observers<DensityMatrix>(*basis);
        }
        tr = evolve_lindblad(params, cfg.ramp, DensityMatrix::from_pure(transfer(psi0, basis)), cfg.noise,
                             cfg.integrator.dt_open, t_max, obs)
                 .trajectory;
    }

    const std::vector<std::string> measures{"N_G", "N_a1a2", "N_a1a2_b1b2", "pi_tangle", "geo_mean_tangle",
                                            "schmidt_number"};
    std::vector<std::string> cols{"t", "phi", "fidelity", "energy"};
    cols.insert(cols.end(), measures.begin(), measures.end());
    cols.insert(cols.end(), {"trace", "purity"});
    CsvTable table(cols);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        std::vector<CsvTable::Cell> row{tr.t[i], tr.phi[i], tr.fidelity[i], tr.energy[i]};
        for (const auto& m : measures) {
            const auto it = tr.extra.find(m);
            row.emplace_back(it == tr.extra.end() ? kNaN : it->second[i]);
        }
        row.emplace_back(tr.trace[i]);
        row.emplace_back(tr.purity[i]);
        table.add_row(std::move(row));
        if (tr.fidelity[i] > tr.fidelity[peak]) {
            peak = i;
        }
    }
    ScenarioResult res{"passage", {}, {}};
    res.tables.push_back({"trajectory", std::move(table),
                          time_units({"fidelity", "N_G", "N_a1a2", "N_a1a2_b1b2", "pi_tangle", "geo_mean_tangle",
                                      "schmidt_number", "trace", "purity"})});
    res.summary = {{"dynamics", closed ? "closed" : "lindblad"},
                   {"records", tr.size()},
                   {"t_max", t_max},
                   {"peak_fidelity", tr.fidelity[peak]},
                   {"t_at_peak", tr.t[peak]},
                   {"phi_at_peak", tr.phi[peak]},
                   {"final_fidelity", tr.fidelity.back()}};
    return res;
}

ScenarioResult run_alpha_scan(const RunConfig& cfg) {
    const auto scan = scan_alpha(cfg.model, cfg.noise, cfg.alpha_scan.alphas, passage_settings(cfg));
    CsvTable table({"alpha", "peak_fidelity"});
    for (const auto& row : scan.rows) {
        table.add_row({row.alpha, row.peak_fidelity});
    }
    ScenarioResult res{"alpha-scan", {}, {}};
    res.tables.push_back({"alpha_scan", std::move(table), {{"alpha", "J"}, {"peak_fidelity", "dimensionless"}}});
    res.summary = {{"alpha_opt", scan.alpha_opt}, {"peak_fidelity_at_opt", scan.peak_opt}};
    return res;
}

ScenarioResult run_lossy_prep(const RunConfig& cfg) {
    const auto& lp = cfg.lossy_prep;
    const NoiseKind kind = noise_kind_from_string(lp.kind);
    const auto settings = passage_settings(cfg);

    std::vector<double> alphas;
    json alpha_sources = json::array();
    for (const auto& curve : lp.curves) {
        if (curve.alpha) {
            alphas.push_back(*curve.alpha);
            alpha_sources.push_back({{"k", curve.k}, {"alpha", *curve.alpha}, {"source", "config"}});
        } else {
            const auto scan = scan_alpha(with_k(cfg.model, curve.k), NoiseSpec{}, lp.alpha_grid, settings);
            alphas.push_back(scan.alpha_opt);
            alpha_sources.push_back({{"k", curve.k}, {"alpha", scan.alpha_opt}, {"source", "alpha_scan"}});
        }
    }

    const std::size_t per_curve = lp.gammas.size();
    std::vector<double> peaks(lp.curves.size() * per_curve);
    parallel_for(peaks.size(), [&](std::size_t job) {
        const std::size_t c = job / per_curve;
        const double gamma = lp.gammas[job % per_curve];
        peaks[job] =
            passage_peak_fidelity(with_k(cfg.model, lp.curves[c].k), uniform_noise(kind, gamma), alphas[c], settings);
    });
    CsvTable table({"gamma", "k", "alpha", "peak_fidelity"});
    for (std::size_t job = 0; job < peaks.size(); ++job) {
        const std::size_t c = job / per_curve;
        table.add_row({lp.gammas[job % per_curve], lp.curves[c].k, alphas[c], peaks[job]});
    }

    ScenarioResult res{"lossy-prep", {}, {}};
    res.tables.push_back({"fidelity_vs_gamma", std::move(table),
                          {{"gamma", "J"}, {"k", "J"}, {"alpha", "J"}, {"peak_fidelity", "dimensionless"}}});
    res.summary = {{"curves", alpha_sources}};

    if (lp.gamma_c.enabled) {
        const auto& gc = lp.gamma_c;
        GammaCriticalSettings gs;
        gs.kind = kind;
        gs.window_lo = gc.window_lo;
        gs.window_hi = gc.window_hi;
        gs.dt = cfg.integrator.dt_open;
        gs.cadence = cfg.integrator.cadence;
        gs.mes_m = cfg.passage.mes_m;
        const auto found = find_gamma_critical(with_k(cfg.model, gc.k), gc.alpha, gc.grid, gs);
        auto probes = found.probes;
        std::sort(probes.begin(), probes.end(), [](const GammaProbe& a, const GammaProbe& b) { return a.gamma < b.gamma; });
        CsvTable t({"gamma", "has_interior_maximum", "peak_fidelity_in_window"});
        for (const auto& p : probes) {
            t.add_row({p.gamma, static_cast<long long>(p.has_interior_maximum ? 1 : 0), p.peak_fidelity});
        }
        res.tables.push_back({"gamma_c", std::move(t),
                              {{"gamma", "J"}, {"has_interior_maximum", "flag"}, {"peak_fidelity_in_window", "dimensionless"}}});
        res.summary["gamma_c"] = {{"value", found.gamma_c ? json(*found.gamma_c) : json(nullptr)},
                                  {"open_ended", found.open_ended},
                                  {"k", gc.k},
                                  {"alpha", gc.alpha},
                                  {"probes", found.probes.size()}};
    }
    return res;
}

ScenarioResult run_robustness(const RunConfig& cfg) {
    const auto& rc = cfg.robustness;
    const bool loss = rc.pair == "loss";
    const auto basis = cfg.model.make_basis(loss ? CapKind::at_most : CapKind::exact);
    const auto mes = mes_state(basis, rc.mes_m, cfg.model.species_total);
    const RampSchedule hold{0.0, rc.phi, rc.phi};
    Observers obs;
    obs.target = mes;
    obs.cadence = cfg.integrator.cadence;
    const NoiseSpec standard = uniform_noise(loss ? NoiseKind::single_mode_loss : NoiseKind::phase_flip_single, rc.gamma);
    const NoiseSpec coupled =
        uniform_noise(loss ? NoiseKind::coupled_two_mode_loss : NoiseKind::phase_flip_coupled, rc.gamma);

    std::vector<Trajectory> runs(2);
    parallel_for(2, [&](std::size_t i) {
        runs[i] = evolve_lindblad(cfg.model, hold, DensityMatrix::from_pure(mes), i == 0 ? standard : coupled,
                                  cfg.integrator.dt_open, rc.t_max, obs)
                      .trajectory;
    });
    CsvTable table({"t", "fidelity_standard", "fidelity_coupled"});
    bool dominates = true;
    double min_std = 1.0;
    double min_cpl = 1.0;
    for (std::size_t i = 0; i < runs[0].size(); ++i) {
        table.add_row({runs[0].t[i], runs[0].fidelity[i], runs[1].fidelity[i]});
        dominates = dominates && runs[1].fidelity[i] >= runs[0].fidelity[i];
        min_std = std::min(min_std, runs[0].fidelity[i]);
        min_cpl = std::min(min_cpl, runs[1].fidelity[i]);
    }
    ScenarioResult res{"robustness", {}, {}};
    res.tables.push_back({"robustness", std::move(table),
                          {{"t", "1/J"}, {"fidelity_standard", "dimensionless"}, {"fidelity_coupled", "dimensionless"}}});
    res.summary = {{"pair", rc.pair},
                   {"standard_channel", to_string(standard.kind)},
                   {"coupled_channel", to_string(coupled.kind)},
                   {"min_fidelity_standard", min_std},
                   {"min_fidelity_coupled", min_cpl},
                   {"coupled_never_below_standard", dominates}};
    return res;
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"spectrum", "passage", "lossy-prep", "alpha-scan", "robustness"};
    return names;
}

ScenarioResult run_scenario(const std::string& subcommand, const RunConfig& cfg) {
    if (subcommand == "spectrum") return run_spectrum(cfg);
    if (subcommand == "passage") return run_passage(cfg);
    if (subcommand == "lossy-prep") return run_lossy_prep(cfg);
    if (subcommand == "alpha-scan") return run_alpha_scan(cfg);
    if (subcommand == "robustness") return run_robustness(cfg);
    throw ContractError("unknown subcommand '" + subcommand + "'");
}

json sidecar(const ScenarioResult& result, const OutputTable& table, const RunConfig& cfg) {
    return {{"schema_version", kSchemaVersion},
            {"generator", std::string("kerrnet ") + KERRNET_VERSION},
            {"subcommand", result.subcommand},
            {"file", table.name + ".csv"},
            {"columns", table.table.columns()},
            {"rows", table.table.rows()},
            {"units", table.units},
            {"summary", result.summary},
            {"config", cfg.to_json()}};
}

std::vector<std::filesystem::path> write_outputs(const ScenarioResult& result, const RunConfig& cfg,
                                                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& t : result.tables) {
        const auto csv = dir / (t.name + ".csv");
        const auto meta = dir / (t.name + ".json");
        t.table.write(csv);
        write_text(meta, sidecar(result, t, cfg).dump(2) + "\n");
        written.push_back(csv);
        written.push_back(meta);
    }
    return written;
}

}  // namespace kerrnet
