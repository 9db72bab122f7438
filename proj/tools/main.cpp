// Command-line front end: generate dataset trees, validate them, and
// rework individual bundles (extra replacements, re-derived consequences,
// regenerated data).
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error,
// 3 generation budget exhausted.

#include "syntheory/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace syntheory;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

struct GenerateFlags {
    std::string config_path;
    std::string symbols;
    std::string out;
    std::string grid;
    std::string noise;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
    int points = 0;
    int systems = 0;
    int dims = -1;  // -1 unset, 0 off, 1 on
};

RunConfig assemble_run_config(const GenerateFlags& flags) {
    RunConfig run;
    if (!flags.config_path.empty()) run = load_run_config(flags.config_path);
    if (!flags.symbols.empty()) run.symbols_path = flags.symbols;
    if (!flags.out.empty()) run.out_root = flags.out;
    if (!flags.grid.empty()) apply_config_line(run, "grid", flags.grid);
    if (!flags.noise.empty()) apply_config_line(run, "noise_levels", flags.noise);
    if (flags.seed_set) run.seed = flags.seed;
    if (flags.jobs > 0) run.jobs = flags.jobs;
    if (flags.points > 0) run.points = flags.points;
    if (flags.systems > 0) run.systems_per_config = flags.systems;
    if (flags.dims >= 0) run.generator.dimensional_mode = flags.dims == 1;
    run.generator.validate();
    if (run.symbols_path.empty() && run.symbols_text.empty())
        throw ConfigError("a symbol spec is required (--symbols or config `symbols = ...`)");
    return run;
}

/// Rebuilds the generation dictionaries a bundle was produced with.
struct BundleDicts {
    std::shared_ptr<const UomTermDict> uom;
    std::shared_ptr<const VdcSigDict> vdc;
};

BundleDicts dicts_for(const TheoryBundle& bundle, DictCache& cache) {
    if (!bundle.system.config.dimensional_mode)
        return {std::make_shared<const UomTermDict>(), std::make_shared<const VdcSigDict>()};
    return {cache.uom(bundle.system.config, *bundle.table), cache.vdc(bundle.system.config, *bundle.table)};
}

int run_generate(const GenerateFlags& flags) {
    RunConfig run = assemble_run_config(flags);
    cmd_generate(run, std::cout);
    std::cout << "manifest: " << (std::filesystem::path(run.out_root) / "manifest.json").string() << "\n";
    return kExitOk;
}

int run_validate(const std::string& root, const std::string& json_out) {
    ValidationReport report = cmd_validate(root, std::cout);
    if (!json_out.empty()) {
        std::ofstream out(json_out, std::ios::binary);
        out << report.to_json().dump(2) << "\n";
    }
    std::cout << report.bundles << " bundles, " << report.checks << " checks, " << report.issues.size()
              << " failures\n";
    for (const auto& issue : report.issues)
        std::cout << "FAIL " << issue.bundle << " [" << issue.check << "] " << issue.detail << "\n";
    return report.ok() ? kExitOk : kExitValidation;
}

int run_replace(const std::string& dir, int index) {
    TheoryBundle bundle = read_bundle(dir);
    DictCache cache;
    auto dicts = dicts_for(bundle, cache);

    std::vector<std::size_t> replaceable;
    for (std::size_t i = 0; i < bundle.system.axioms.size(); ++i)
        if (!bundle.system.trig_identity_index() || *bundle.system.trig_identity_index() != i)
            replaceable.push_back(i);
    RngStream rng(derive_seed(bundle.seed,
                              {hash_string("replace"), static_cast<std::uint64_t>(bundle.replacements.size())}));
    std::size_t target;
    if (index >= 0) {
        target = static_cast<std::size_t>(index);
        if (target >= bundle.system.axioms.size())
            throw ConfigError("axiom index out of range: " + std::to_string(index));
        if (bundle.system.trig_identity_index() && *bundle.system.trig_identity_index() == target)
            throw ConfigError("the trig identity axiom cannot be replaced");
    } else {
        target = replaceable[rng.uniform_below(replaceable.size())];
    }

    Equation axiom = gen_replacement_axiom(bundle.system, target, bundle.lifted_consequence(), *dicts.uom,
                                           *dicts.vdc, rng);
    bundle.replacements.push_back({target, axiom});
    write_bundle(bundle, std::filesystem::path(dir).parent_path().parent_path());
    std::cout << "replacement_" << bundle.replacements.size() << ".txt (axiom " << target
              << "): " << axiom.str() << "\n";
    return kExitOk;
}

int run_consequence(const std::string& dir) {
    TheoryBundle bundle = read_bundle(dir);
    RngStream rng(derive_seed(bundle.seed, {hash_string("consequence-rederive")}));
    auto result = derive_consequence(bundle.system, bundle.consequence_config, rng);
    if (result.status == ConsequenceStatus::InconsistentSystem) throw Inconsistent();
    if (result.status != ConsequenceStatus::Accepted) {
        std::cout << "no consequence found within the attempt budget\n";
        return kExitBudget;
    }
    bool same = result.value->polynomial == bundle.consequence.polynomial;
    bundle.consequence = *result.value;
    RngStream data_rng(derive_seed(bundle.seed, {hash_string("consequence-data-rederive")}));
    bundle.consequence_data =
        gen_consequence_data(bundle.consequence, *bundle.table, bundle.points, data_rng);
    for (auto& [spec, table] : bundle.consequence_noise)
        table = apply_noise(bundle.consequence_data, spec, NoiseMode::AllColumns, data_rng);
    write_bundle(bundle, std::filesystem::path(dir).parent_path().parent_path());
    std::cout << "consequence" << (same ? " (unchanged)" : " (new)") << ": "
              << bundle.consequence.polynomial.str() << "\n";
    return kExitOk;
}

int run_data(const std::string& dir, std::uint64_t seed, bool seed_set) {
    TheoryBundle bundle = read_bundle(dir);
    std::uint64_t stream_seed =
        seed_set ? seed : derive_seed(bundle.seed, {hash_string("data-regenerate")});
    RngStream rng(stream_seed);
    bundle.consequence_data = gen_consequence_data(bundle.consequence, *bundle.table, bundle.points, rng);
    for (auto& [spec, table] : bundle.consequence_noise)
        table = apply_noise(bundle.consequence_data, spec, NoiseMode::AllColumns, rng);
    bundle.system_data = gen_biased_system_data(bundle.system, bundle.points, rng);
    for (auto& [spec, table] : bundle.system_noise)
        table = apply_noise(bundle.system_data, spec, NoiseMode::AllColumns, rng);
    write_bundle(bundle, std::filesystem::path(dir).parent_path().parent_path());
    std::cout << "regenerated data for " << dir << " with seed " << stream_seed << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic physical theory and dataset generator"};
    app.require_subcommand(1);

    GenerateFlags gen;
    auto* generate = app.add_subcommand("generate", "generate a dataset tree");
    generate->add_option("--config", gen.config_path, "run configuration file");
    generate->add_option("--symbols", gen.symbols, "symbol spec file");
    generate->add_option("--out", gen.out, "output root directory");
    generate->add_option("--grid", gen.grid, "grid cells, e.g. {6:2:2:4,6:2:2:5}");
    generate->add_option("--noise", gen.noise, "consequence noise levels, e.g. {1e-3,1e-2}");
    generate->add_option("--seed", gen.seed, "master seed")->trigger_on_parse();
    generate->add_option("--jobs", gen.jobs, "worker threads");
    generate->add_option("--points", gen.points, "rows per data table");
    generate->add_option("--systems-per-config", gen.systems, "systems per grid cell");
    auto* dims_on = generate->add_flag("--dims", "dimensionally consistent mode (default)");
    auto* dims_off = generate->add_flag("--no-dims", "free generation mode");

    std::string validate_root, validate_json;
    auto* validate = app.add_subcommand("validate", "re-check a dataset tree");
    validate->add_option("root", validate_root, "dataset root")->required();
    validate->add_option("--json", validate_json, "write a machine-readable report");

    std::string replace_dir;
    int replace_index = -1;
    auto* replace = app.add_subcommand("replace", "append a replacement axiom to a bundle");
    replace->add_option("bundle", replace_dir, "bundle directory (…/system_k)")->required();
    replace->add_option("--index", replace_index, "axiom index to replace (default: random)");

    std::string conseq_dir;
    auto* conseq = app.add_subcommand("consequence", "re-derive the consequence for a bundle");
    conseq->add_option("bundle", conseq_dir, "bundle directory")->required();

    std::string data_dir;
    std::uint64_t data_seed = 0;
    bool data_seed_set = false;
    auto* data = app.add_subcommand("data", "regenerate the data tables of a bundle");
    data->add_option("bundle", data_dir, "bundle directory")->required();
    data->add_option("--seed", data_seed, "stream seed for regeneration")
        ->each([&](const std::string&) { data_seed_set = true; });

    CLI11_PARSE(app, argc, argv);
    gen.seed_set = generate->count("--seed") > 0;
    gen.dims = dims_off->count() ? 0 : (dims_on->count() ? 1 : -1);

    try {
        if (*generate) return run_generate(gen);
        if (*validate) return run_validate(validate_root, validate_json);
        if (*replace) return run_replace(replace_dir, replace_index);
        if (*conseq) return run_consequence(conseq_dir);
        if (*data) return run_data(data_dir, data_seed, data_seed_set);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SymbolError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CellBudgetExhausted& e) {
        std::cerr << "generation budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ExhaustedAttempts& e) {
        std::cerr << "generation budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
