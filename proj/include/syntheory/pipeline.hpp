#pragma once

// Batch orchestration: run configuration, per-cell symbol selection, the
// generate -> derive -> data -> replacements -> biased-data pipeline with
// discard accounting, deterministic parallel execution, and validation of
// written trees.
//
// Every per-system stream is seeded by a stable hash of (master seed, cell
// key, system index, attempt index): a discard and resample of one system
// can never perturb its siblings, and output trees are identical for any
// worker count.

#include "syntheory/dataset_io.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

namespace syntheory {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct CellBudgetExhausted : std::runtime_error {
    explicit CellBudgetExhausted(const std::string& what) : std::runtime_error(what) {}
};

struct GridCell {
    int num_vars = 6;
    int num_derivs = 2;
    int num_consts = 2;
    int num_eqns = 4;

    std::string name() const {
        return "vars" + std::to_string(num_vars) + "_derivs" + std::to_string(num_derivs) + "_eqns" +
               std::to_string(num_eqns);
    }
};

struct RunConfig {
    std::string symbols_path;
    std::string symbols_text;  // used when nonempty instead of the path
    std::vector<GridCell> grid{GridCell{}};
    int systems_per_config = 3;
    int points = 1000;
    std::uint64_t seed = 0;
    std::string out_root = "dataset";
    NoiseFamily noise_family = NoiseFamily::Gaussian;
    std::vector<double> consequence_noise_levels = default_consequence_noise_levels();
    std::vector<double> system_noise_levels = default_system_noise_levels();
    bool last_column_noise = false;  // consequence tables: noise only the solved column
    int replacements_per_system = 5;
    int cell_attempt_budget = 200;  // resamples allowed per (cell, system index)
    int jobs = 1;

    GeneratorConfig generator;       // seed is filled from `seed`
    ConsequenceConfig consequence;
    DatagenOptions datagen;
};

// ---------------------------------------------------------------------------
// Config file: `key = value` lines, `{a,b,c}` lists, `#` comments.

namespace pipedetail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> parse_list(const std::string& value, const std::string& key) {
    std::string v = trim(value);
    if (v.size() < 2 || v.front() != '{' || v.back() != '}')
        throw ConfigError(key + ": expected a {a,b,c} list");
    std::vector<std::string> out;
    std::string body = v.substr(1, v.size() - 2);
    if (trim(body).empty()) return out;
    std::size_t pos = 0;
    while (true) {
        auto comma = body.find(',', pos);
        out.push_back(trim(body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : parse_list(value, key)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError(key + ": bad number " + item);
        }
    }
    return out;
}

inline GridCell parse_cell(const std::string& text) {
    GridCell cell;
    if (std::sscanf(text.c_str(), "%d:%d:%d:%d", &cell.num_vars, &cell.num_derivs, &cell.num_consts,
                    &cell.num_eqns) != 4)
        throw ConfigError("grid cell must be vars:derivs:consts:eqns, got " + text);
    if (cell.num_vars < 1 || cell.num_derivs < 0 || cell.num_consts < 0 || cell.num_eqns < 1)
        throw ConfigError("grid cell out of range: " + text);
    return cell;
}

}  // namespace pipedetail

inline void apply_config_line(RunConfig& run, const std::string& key, const std::string& value) {
    using pipedetail::parse_double_list;
    auto as_int = [&](const std::string& v) {
        try {
            return std::stoi(v);
        } catch (const std::exception&) {
            throw ConfigError(key + ": bad integer " + v);
        }
    };
    auto as_double = [&](const std::string& v) {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw ConfigError(key + ": bad number " + v);
        }
    };
    auto as_bool = [&](const std::string& v) {
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw ConfigError(key + ": bad boolean " + v);
    };

    if (key == "symbols") run.symbols_path = value;
    else if (key == "grid") {
        run.grid.clear();
        for (const auto& item : pipedetail::parse_list(value, key))
            run.grid.push_back(pipedetail::parse_cell(item));
        if (run.grid.empty()) throw ConfigError("grid: must be nonempty");
    } else if (key == "systems_per_config") run.systems_per_config = as_int(value);
    else if (key == "points") run.points = as_int(value);
    else if (key == "seed") run.seed = std::stoull(value);
    else if (key == "out") run.out_root = value;
    else if (key == "noise_family") run.noise_family = noise_family_from_string(value);
    else if (key == "noise_levels") run.consequence_noise_levels = parse_double_list(value, key);
    else if (key == "system_noise_levels") run.system_noise_levels = parse_double_list(value, key);
    else if (key == "last_column_noise") run.last_column_noise = as_bool(value);
    else if (key == "replacements_per_system") run.replacements_per_system = as_int(value);
    else if (key == "cell_attempt_budget") run.cell_attempt_budget = as_int(value);
    else if (key == "jobs") run.jobs = as_int(value);
    else if (key == "dimensional_mode") run.generator.dimensional_mode = as_bool(value);
    else if (key == "max_power") run.generator.max_power = as_int(value);
    else if (key == "max_factors") run.generator.max_factors = as_int(value);
    else if (key == "prob_factors_per_term") run.generator.prob_factors_per_term = parse_double_list(value, key);
    else if (key == "prob_num_terms") run.generator.prob_num_terms = parse_double_list(value, key);
    else if (key == "prob_small_constants") run.generator.prob_small_constants = parse_double_list(value, key);
    else if (key == "same_factor_variable_bias") run.generator.same_factor_variable_bias = as_double(value);
    else if (key == "same_factor_derivative_bias") run.generator.same_factor_derivative_bias = as_double(value);
    else if (key == "prob_all_positive") run.generator.prob_all_positive = as_double(value);
    else if (key == "vdc_samples") run.generator.vdc_samples = as_int(value);
    else if (key == "uom_enumeration_cap") run.generator.uom_enumeration_cap = std::stoull(value);
    else if (key == "equation_attempts") run.generator.equation_attempts = as_int(value);
    else if (key == "system_attempts") run.generator.system_attempts = as_int(value);
    else if (key == "replacement_attempts") run.generator.replacement_attempts = as_int(value);
    else if (key == "gb_step_budget") {
        run.generator.groebner.step_budget = std::stoull(value);
        run.consequence.groebner.step_budget = std::stoull(value);
    } else if (key == "term_limit") run.consequence.term_limit = as_int(value);
    else if (key == "consequence_attempts") run.consequence.max_attempts = as_int(value);
    else if (key == "point_attempts") run.datagen.point_attempts = as_int(value);
    else if (key == "value_bound") run.datagen.value_bound = as_double(value);
    else throw ConfigError("unknown config key: " + key);
}

inline RunConfig parse_run_config(const std::string& text) {
    RunConfig run;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = pipedetail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        apply_config_line(run, pipedetail::trim(line.substr(0, eq)), pipedetail::trim(line.substr(eq + 1)));
    }
    return run;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

// ---------------------------------------------------------------------------
// Cell symbol selection: the first V variable-like entries, D derivatives
// and C constants of the universe, in canonical order.

inline SymbolTable cell_symbol_table(const SymbolTable& universe, const GridCell& cell) {
    std::vector<SymbolInfo> picked;
    int vars = 0, derivs = 0, consts = 0;
    for (const auto& info : universe.entries()) {
        if (is_variable_like(info.kind) && vars < cell.num_vars) {
            picked.push_back(info);
            ++vars;
        } else if (info.kind == SymbolKind::Derivatif && derivs < cell.num_derivs) {
            picked.push_back(info);
            ++derivs;
        } else if (is_constant_kind(info.kind) && consts < cell.num_consts) {
            picked.push_back(info);
            ++consts;
        }
    }
    if (vars < cell.num_vars || derivs < cell.num_derivs || consts < cell.num_consts)
        throw ConfigError("symbol universe too small for cell " + cell.name());
    return SymbolTable::build(std::move(picked));
}

// ---------------------------------------------------------------------------
// One system: generate everything or report a typed discard.

struct DiscardCounts {
    int inconsistent = 0;
    int consequence_rejected = 0;
    int no_real_solution = 0;
    int budget_exceeded = 0;
    int exhausted = 0;

    int total() const {
        return inconsistent + consequence_rejected + no_real_solution + budget_exceeded + exhausted;
    }

    nlohmann::json to_json() const {
        return {{"inconsistent", inconsistent},
                {"consequence_rejected", consequence_rejected},
                {"no_real_solution", no_real_solution},
                {"budget_exceeded", budget_exceeded},
                {"exhausted", exhausted}};
    }
};

struct SystemOutcome {
    TheoryBundle bundle;
    DiscardCounts discards;
    int attempts_used = 0;
};

/// Runs the full pipeline for one (cell, system index) slot, resampling
/// with fresh derived seeds after every typed discard.
inline SystemOutcome generate_system_bundle(const RunConfig& run,
                                            const std::shared_ptr<const SymbolTable>& table,
                                            const GridCell& cell, int system_index, DictCache& cache) {
    DiscardCounts discards;
    GeneratorConfig cfg = run.generator;
    cfg.seed = run.seed;

    std::shared_ptr<const UomTermDict> uom;
    std::shared_ptr<const VdcSigDict> vdc;
    if (cfg.dimensional_mode) {
        uom = cache.uom(cfg, *table);
        vdc = cache.vdc(cfg, *table);
    } else {
        uom = std::make_shared<const UomTermDict>();
        vdc = std::make_shared<const VdcSigDict>();
    }

    for (int attempt = 0; attempt < run.cell_attempt_budget; ++attempt) {
        std::uint64_t stream_seed = derive_seed(
            run.seed, {hash_string(cell.name()), static_cast<std::uint64_t>(system_index),
                       static_cast<std::uint64_t>(attempt)});
        RngStream rng(stream_seed);
        try {
            TheorySystem system = gen_system(cfg, *table, cell.num_eqns, *uom, *vdc, rng);
            system.seed = stream_seed;

            auto derived = derive_consequence(system, run.consequence, rng);
            if (derived.status == ConsequenceStatus::InconsistentSystem) {
                ++discards.inconsistent;
                continue;
            }
            if (derived.status != ConsequenceStatus::Accepted) {
                ++discards.consequence_rejected;
                continue;
            }
            Consequence consequence = *derived.value;

            TheoryBundle bundle;
            bundle.table = table;
            bundle.system = std::move(system);
            bundle.consequence = std::move(consequence);
            bundle.consequence_config = run.consequence;
            bundle.cell = cell.name();
            bundle.system_index = system_index;
            bundle.seed = stream_seed;
            bundle.points = run.points;
            bundle.noise_family = run.noise_family;

            bundle.consequence_data =
                gen_consequence_data(bundle.consequence, *table, run.points, rng, run.datagen);
            NoiseMode mode = run.last_column_noise ? NoiseMode::LastColumn : NoiseMode::AllColumns;
            for (double level : run.consequence_noise_levels) {
                NoiseSpec spec{run.noise_family, level};
                bundle.consequence_noise.push_back(
                    {spec, apply_noise(bundle.consequence_data, spec, mode, rng)});
            }

            Polynomial lifted = bundle.lifted_consequence();
            std::vector<std::size_t> replaceable;
            for (std::size_t i = 0; i < bundle.system.axioms.size(); ++i)
                if (!bundle.system.trig_identity_index() || *bundle.system.trig_identity_index() != i)
                    replaceable.push_back(i);
            for (int k = 0; k < run.replacements_per_system; ++k) {
                std::size_t index = replaceable[rng.uniform_below(replaceable.size())];
                Equation axiom = gen_replacement_axiom(bundle.system, index, lifted, *uom, *vdc, rng);
                bundle.replacements.push_back({index, std::move(axiom)});
            }

            bundle.system_data = gen_biased_system_data(bundle.system, run.points, rng, run.datagen);
            for (double level : run.system_noise_levels) {
                NoiseSpec spec{run.noise_family, level};
                bundle.system_noise.push_back(
                    {spec, apply_noise(bundle.system_data, spec, NoiseMode::AllColumns, rng)});
            }

            return SystemOutcome{std::move(bundle), discards, attempt + 1};
        } catch (const Inconsistent&) {
            ++discards.inconsistent;
        } catch (const NoRealSolutionInRegion&) {
            ++discards.no_real_solution;
        } catch (const UnsolvableConsequence&) {
            ++discards.consequence_rejected;
        } catch (const BudgetExceeded&) {
            ++discards.budget_exceeded;
        } catch (const ExhaustedAttempts&) {
            ++discards.exhausted;
        }
    }
    throw CellBudgetExhausted(cell.name() + " system " + std::to_string(system_index));
}

// ---------------------------------------------------------------------------
// Whole-run generation with a deterministic worker pool.

struct RunManifest {
    nlohmann::json json;

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoFailure("cannot write manifest: " + path.string());
        out << json.dump(2) << "\n";
    }
};

inline SymbolTable load_universe(const RunConfig& run) {
    if (!run.symbols_text.empty()) return SymbolTable::parse_spec(run.symbols_text);
    if (run.symbols_path.empty()) throw ConfigError("no symbol spec configured");
    std::ifstream in(run.symbols_path);
    if (!in) throw ConfigError("cannot read symbol spec: " + run.symbols_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return SymbolTable::parse_spec(buf.str());
}

inline RunManifest cmd_generate(const RunConfig& run, std::ostream& log) {
    SymbolTable universe = load_universe(run);
    DictCache cache;

    struct Task {
        GridCell cell;
        int system_index;
        std::shared_ptr<const SymbolTable> table;
    };
    std::vector<Task> tasks;
    std::map<std::string, std::shared_ptr<const SymbolTable>> cell_tables;
    for (const auto& cell : run.grid) {
        auto table = std::make_shared<const SymbolTable>(cell_symbol_table(universe, cell));
        cell_tables[cell.name()] = table;
        for (int i = 1; i <= run.systems_per_config; ++i) tasks.push_back({cell, i, table});
    }

    struct Slot {
        std::optional<SystemOutcome> outcome;
        std::optional<BundleManifest> manifest;
        std::string error;
    };
    std::vector<Slot> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    int jobs = std::max(1, run.jobs);

    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                SystemOutcome outcome =
                    generate_system_bundle(run, tasks[i].table, tasks[i].cell, tasks[i].system_index, cache);
                slots[i].manifest = write_bundle(outcome.bundle, run.out_root);
                slots[i].outcome = std::move(outcome);
            } catch (const std::exception& e) {
                slots[i].error = e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    RunManifest manifest;
    manifest.json["seed"] = run.seed;
    manifest.json["points"] = run.points;
    manifest.json["systems_per_config"] = run.systems_per_config;
    manifest.json["noise_family"] = to_string(run.noise_family);
    manifest.json["config_digest"] = sha256_hex(run.generator.generation_key());
    manifest.json["cells"] = nlohmann::json::array();

    bool failed = false;
    std::size_t slot = 0;
    for (const auto& cell : run.grid) {
        nlohmann::json cell_json;
        cell_json["cell"] = cell.name();
        cell_json["systems"] = nlohmann::json::array();
        int attempted = 0, emitted = 0, discarded = 0;
        for (int i = 1; i <= run.systems_per_config; ++i, ++slot) {
            const Slot& s = slots[slot];
            nlohmann::json sys_json;
            sys_json["index"] = i;
            if (s.outcome) {
                ++emitted;
                attempted += s.outcome->attempts_used;
                discarded += s.outcome->discards.total();
                sys_json["seed"] = s.outcome->bundle.seed;
                sys_json["attempts"] = s.outcome->attempts_used;
                sys_json["discards"] = s.outcome->discards.to_json();
                sys_json["directory"] = s.manifest->directory;
                nlohmann::json files;
                for (const auto& [name, digest] : s.manifest->files) files[name] = digest;
                sys_json["files"] = files;
                log << cell.name() << "/system_" << i << ": ok (attempts " << s.outcome->attempts_used
                    << ", discards " << s.outcome->discards.total() << ")\n";
            } else {
                failed = true;
                sys_json["error"] = s.error;
                log << cell.name() << "/system_" << i << ": FAILED " << s.error << "\n";
            }
            cell_json["systems"].push_back(sys_json);
        }
        cell_json["attempted"] = attempted;
        cell_json["emitted"] = emitted;
        cell_json["discarded"] = discarded;
        manifest.json["cells"].push_back(cell_json);
    }
    manifest.json["complete"] = !failed;
    std::filesystem::create_directories(run.out_root);
    manifest.save(std::filesystem::path(run.out_root) / "manifest.json");
    if (failed) throw CellBudgetExhausted("one or more systems could not be generated");
    return manifest;
}

// ---------------------------------------------------------------------------
// Validation of a written tree.

struct ValidationIssue {
    std::string bundle;
    std::string check;
    std::string detail;
};

struct ValidationReport {
    int bundles = 0;
    int checks = 0;
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }

    nlohmann::json to_json() const {
        nlohmann::json out;
        out["bundles"] = bundles;
        out["checks"] = checks;
        out["failures"] = nlohmann::json::array();
        for (const auto& i : issues)
            out["failures"].push_back({{"bundle", i.bundle}, {"check", i.check}, {"detail", i.detail}});
        out["ok"] = ok();
        return out;
    }
};

namespace pipedetail {

inline double noise_sd_target(NoiseFamily family, double sigma) {
    switch (family) {
        case NoiseFamily::Gaussian: return sigma;
        case NoiseFamily::Exponential: return std::sqrt(2.0) * sigma;
        case NoiseFamily::LogNormal: return (1.0 + std::sqrt(1.0 + 8.0 * sigma * sigma)) / 2.0;
    }
    return sigma;
}

inline void check_noise_table(const DataTable& clean, const DataTable& noisy, const NoiseSpec& spec,
                              const std::string& bundle, const std::string& table_name,
                              ValidationReport& report) {
    double slack = clean.rows.size() >= 1000 ? 0.10 : 0.25;
    for (std::size_t c = 0; c < clean.columns.size(); ++c) {
        ++report.checks;
        if (clean.roles[c] == ColumnRole::Constant) {
            for (std::size_t r = 0; r < clean.rows.size(); ++r)
                if (noisy.rows[r][c] != clean.rows[r][c]) {
                    report.issues.push_back({bundle, table_name, "constant column " + clean.columns[c] +
                                                                      " was perturbed"});
                    break;
                }
            continue;
        }
        double sigma = spec.epsilon * std::fabs(clean.column_mean(c));
        if (sigma <= 0) continue;
        double acc = 0, acc2 = 0;
        for (std::size_t r = 0; r < clean.rows.size(); ++r) {
            double d = noisy.rows[r][c] - clean.rows[r][c];
            acc += d;
            acc2 += d * d;
        }
        double n = static_cast<double>(clean.rows.size());
        double mean = acc / n;
        double sd = std::sqrt(std::max(0.0, acc2 / n - mean * mean));
        if (sd == 0.0) continue;  // untouched column (last-column noise mode)
        double target = noise_sd_target(spec.family, sigma);
        if (std::fabs(sd - target) > slack * target)
            report.issues.push_back({bundle, table_name,
                                     "column " + clean.columns[c] + " noise sd " + format_double(sd) +
                                         " vs target " + format_double(target)});
    }
}

}  // namespace pipedetail

/// Re-checks one bundle: axiom consistency, consequence membership,
/// replacement non-membership, residuals, dimensional homogeneity, theta
/// identities and noise calibration.
inline void validate_bundle(const TheoryBundle& b, const std::string& name, ValidationReport& report) {
    const SymbolTable& table = *b.table;
    auto issue = [&](const std::string& check, const std::string& detail) {
        report.issues.push_back({name, check, detail});
    };
    GroebnerOptions gb_opts = b.system.config.groebner;
    auto order = BlockLexOrder::canonical(table.size());

    ++report.checks;
    GroebnerBasis gb = buchberger(b.system.axiom_polys(), order, gb_opts);
    if (!gb.is_consistent()) issue("consistency", "axiom system reduces to the whole ring");

    ++report.checks;
    if (!normal_form(b.lifted_consequence(), gb, gb_opts).is_zero())
        issue("consequence-membership", "cofactor * consequence is not in the axiom ideal");

    if (b.system.config.dimensional_mode) {
        for (const auto& axiom : b.system.axioms) {
            ++report.checks;
            Dimension d0 = dim_of_monomial(axiom.poly().terms().front().mono, table);
            for (const auto& term : axiom.poly().terms())
                if (!(dim_of_monomial(term.mono, table) == d0)) {
                    issue("dimensional-homogeneity", axiom.str());
                    break;
                }
        }
    }

    for (std::size_t k = 0; k < b.replacements.size(); ++k) {
        ++report.checks;
        const auto& rep = b.replacements[k];
        std::string tag = "replacement_" + std::to_string(k + 1);
        if (rep.axiom_index >= b.system.axioms.size()) {
            issue(tag, "axiom index out of range");
            continue;
        }
        TheorySystem replaced = rep.replaced_system(b.system);
        GroebnerBasis gb_new = buchberger(replaced.axiom_polys(), order, gb_opts);
        if (!gb_new.is_consistent()) issue(tag, "replaced system is inconsistent");
        else if (normal_form(b.lifted_consequence(), gb_new, gb_opts).is_zero())
            issue(tag, "original consequence still derivable");
        std::vector<Polynomial> remaining;
        for (std::size_t j = 0; j < b.system.axioms.size(); ++j)
            if (j != rep.axiom_index) remaining.push_back(b.system.axioms[j].poly());
        if (!remaining.empty()) {
            GroebnerBasis gb_rem = buchberger(remaining, order, gb_opts);
            if (normal_form(rep.axiom.poly(), gb_rem, gb_opts).is_zero())
                issue(tag, "replacement lies in the ideal of the remaining axioms");
        }
    }

    // clean-data residuals
    bool ode_path = false;
    for (const auto& col : b.consequence_data.roles)
        if (col == ColumnRole::Derivative) ode_path = true;
    double conseq_tol = ode_path ? 1e-4 : 1e-6;
    ++report.checks;
    if (static_cast<int>(b.consequence_data.rows.size()) != b.points)
        issue("consequence-data", "row count " + std::to_string(b.consequence_data.rows.size()));
    for (std::size_t r = 0; r < b.consequence_data.rows.size(); ++r) {
        auto values = b.consequence_data.row_assignment(table, r);
        if (b.consequence.polynomial.poly().relative_residual(values) > conseq_tol) {
            issue("consequence-residual", "row " + std::to_string(r));
            break;
        }
    }
    ++report.checks;
    for (std::size_t r = 0; r < b.system_data.rows.size(); ++r) {
        auto values = b.system_data.row_assignment(table, r);
        bool bad = false;
        for (const auto& axiom : b.system.axioms)
            if (axiom.poly().relative_residual(values) > 1e-6) bad = true;
        if (bad) {
            issue("system-residual", "row " + std::to_string(r));
            break;
        }
    }

    // theta identity on clean tables
    auto check_theta = [&](const DataTable& data, const std::string& tag) {
        auto sin_id = table.theta_aux(ThetaKind::Sin);
        auto cos_id = table.theta_aux(ThetaKind::Cos);
        if (!sin_id || !cos_id) return;
        auto has = [&](const std::string& n) {
            return std::find(data.columns.begin(), data.columns.end(), n) != data.columns.end();
        };
        if (!has(table.info(*sin_id).name) || !has(table.info(*cos_id).name)) return;
        ++report.checks;
        std::size_t sc = data.column_index(table.info(*sin_id).name);
        std::size_t cc = data.column_index(table.info(*cos_id).name);
        for (const auto& row : data.rows)
            if (std::fabs(row[sc] * row[sc] + row[cc] * row[cc] - 1.0) > 1e-12) {
                issue(tag, "sin^2 + cos^2 != 1");
                break;
            }
    };
    check_theta(b.consequence_data, "theta-identity-consequence");
    check_theta(b.system_data, "theta-identity-system");

    for (const auto& [spec, noisy] : b.consequence_noise)
        pipedetail::check_noise_table(b.consequence_data, noisy, spec, name,
                                      "noise-consequence-" + format_noise_level(spec.epsilon), report);
    for (const auto& [spec, noisy] : b.system_noise)
        pipedetail::check_noise_table(b.system_data, noisy, spec, name,
                                      "noise-system-" + format_noise_level(spec.epsilon), report);
}

inline ValidationReport cmd_validate(const std::filesystem::path& root, std::ostream& log) {
    namespace fs = std::filesystem;
    ValidationReport report;
    if (!fs::exists(root)) throw IoFailure("no such tree: " + root.string());
    std::vector<fs::path> bundle_dirs;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().filename() == "meta.txt")
            bundle_dirs.push_back(entry.path().parent_path());
    std::sort(bundle_dirs.begin(), bundle_dirs.end());
    for (const auto& dir : bundle_dirs) {
        ++report.bundles;
        std::string name = fs::relative(dir, root).string();
        std::size_t before = report.issues.size();
        try {
            TheoryBundle b = read_bundle(dir);
            validate_bundle(b, name, report);
        } catch (const std::exception& e) {
            report.issues.push_back({name, "read", e.what()});
        }
        log << name << ": " << (report.issues.size() == before ? "pass" : "FAIL") << "\n";
    }
    return report;
}

}  // namespace syntheory
