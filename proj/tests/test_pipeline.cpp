#include "syntheory/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace syntheory;
namespace fs = std::filesystem;

namespace {

const char* kUniverse = R"(
Fc var kg*m/s^2
Fg var kg*m/s^2
W var kg*m^2/s^2
m1 var kg
m2 var kg
d1 var m
d2 var m
p var kg*m/s
dx1dt deriv m/s x1 t 1
d2x1dt2 deriv m/s^2 x1 t 2
dx2dt deriv m/s x2 t 1
d2x2dt2 deriv m/s^2 x2 t 2
G const m^3/kg*s^2
c const m/s
)";

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("syntheory_pipe_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunConfig small_run(const fs::path& out, std::uint64_t seed) {
    RunConfig run;
    run.symbols_text = kUniverse;
    run.grid = {GridCell{6, 2, 2, 4}};
    run.systems_per_config = 1;
    run.points = 60;
    run.seed = seed;
    run.out_root = out.string();
    return run;
}

std::map<std::string, std::string> tree_digests(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        out[fs::relative(entry.path(), root).string()] = sha256_hex(buf.str());
    }
    return out;
}

}  // namespace

TEST_CASE("config file parsing") {
    RunConfig run = parse_run_config(R"(
# comment
seed = 42
grid = {6:2:2:4, 7:3:2:5}
points = 500
noise_levels = {1e-3, 1e-2}
prob_small_constants = {0.7, 0.1, 0.1, 0.1}
dimensional_mode = false
)");
    CHECK(run.seed == 42);
    REQUIRE(run.grid.size() == 2);
    CHECK(run.grid[1].num_vars == 7);
    CHECK(run.grid[1].num_eqns == 5);
    CHECK(run.points == 500);
    CHECK(run.consequence_noise_levels == std::vector<double>{1e-3, 1e-2});
    CHECK(run.generator.prob_small_constants[0] == 0.7);
    CHECK_FALSE(run.generator.dimensional_mode);

    CHECK_THROWS_AS(parse_run_config("nonsense\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("unknown_key = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("grid = {6:2:2}\n"), ConfigError);
}

TEST_CASE("cell symbol selection takes canonical prefixes") {
    SymbolTable universe = SymbolTable::parse_spec(kUniverse);
    SymbolTable cell = cell_symbol_table(universe, GridCell{6, 2, 1, 4});
    CHECK(cell.size() == 9);
    CHECK(cell.count_variable_like() == 6);
    CHECK(cell.count(SymbolKind::Derivatif) == 2);
    CHECK(cell.count_constants() == 1);
    CHECK(cell.info(0).name == "Fc");
    CHECK(cell.info(6).name == "dx1dt");
    CHECK(cell.info(8).name == "G");
    CHECK_THROWS_AS(cell_symbol_table(universe, GridCell{20, 2, 1, 4}), ConfigError);
}

TEST_CASE("generate, write, validate, and reproduce a small run") {
    fs::path out1 = temp_dir("run1");
    RunConfig run = small_run(out1, 20240601);

    std::ostringstream log;
    RunManifest manifest = cmd_generate(run, log);
    CHECK(manifest.json["complete"] == true);
    CHECK(manifest.json["cells"][0]["emitted"] == 1);
    // discard accounting: attempted = emitted + discarded
    int attempted = manifest.json["cells"][0]["attempted"];
    int emitted = manifest.json["cells"][0]["emitted"];
    int discarded = manifest.json["cells"][0]["discarded"];
    CHECK(attempted == emitted + discarded);

    fs::path bundle_dir = out1 / "vars6_derivs2_eqns4" / "system_1";
    CHECK(fs::exists(bundle_dir / "system.txt"));
    CHECK(fs::exists(bundle_dir / "consequence.txt"));
    CHECK(fs::exists(bundle_dir / "replacement_5.txt"));
    CHECK(fs::exists(bundle_dir / "consequence_noise_5e-02.dat"));
    CHECK(fs::exists(bundle_dir / "system_noise_1e-04.dat"));
    CHECK(fs::exists(bundle_dir / "meta.txt"));

    // validation passes on a fresh tree
    std::ostringstream vlog;
    ValidationReport report = cmd_validate(out1, vlog);
    CHECK(report.bundles == 1);
    for (const auto& issue : report.issues)
        UNSCOPED_INFO(issue.bundle << " [" << issue.check << "] " << issue.detail);
    CHECK(report.ok());

    // byte-identical rerun with the same seed
    fs::path out2 = temp_dir("run2");
    RunConfig run2 = small_run(out2, 20240601);
    std::ostringstream log2;
    cmd_generate(run2, log2);
    CHECK(tree_digests(out1) == tree_digests(out2));

    // thread-count independence
    fs::path out3 = temp_dir("run3");
    RunConfig run3 = small_run(out3, 20240601);
    run3.jobs = 4;
    std::ostringstream log3;
    cmd_generate(run3, log3);
    CHECK(tree_digests(out1) == tree_digests(out3));

    // a corrupted value is caught and located
    {
        fs::path dat = bundle_dir / "system.dat";
        std::ifstream in(dat);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string content = buf.str();
        auto pos = content.rfind('\n', content.size() - 2);
        auto comma = content.find(',', pos);
        content.replace(comma + 1, content.find(',', comma + 1) - comma - 1, "123456.0");
        std::ofstream(dat, std::ios::binary) << content;
        std::ostringstream vlog2;
        ValidationReport broken = cmd_validate(out1, vlog2);
        CHECK_FALSE(broken.ok());
        bool residual_issue = false;
        for (const auto& issue : broken.issues)
            if (issue.check == "system-residual") residual_issue = true;
        CHECK(residual_issue);
    }

    // a replacement equal to the original axiom is a non-membership failure
    {
        TheoryBundle b = read_bundle(out2 / "vars6_derivs2_eqns4" / "system_1");
        std::size_t index = b.replacements.front().axiom_index;
        b.replacements.front().axiom = b.system.axioms[index];
        write_bundle(b, out2);
        std::ostringstream vlog3;
        ValidationReport broken = cmd_validate(out2, vlog3);
        bool membership_issue = false;
        for (const auto& issue : broken.issues)
            if (issue.check == "replacement_1") membership_issue = true;
        CHECK(membership_issue);
    }

    fs::remove_all(out1);
    fs::remove_all(out2);
    fs::remove_all(out3);
}

TEST_CASE("free mode run emits a tree as well") {
    fs::path out = temp_dir("free");
    RunConfig run = small_run(out, 31337);
    run.generator.dimensional_mode = false;
    run.points = 40;
    std::ostringstream log;
    RunManifest manifest = cmd_generate(run, log);
    CHECK(manifest.json["complete"] == true);
    std::ostringstream vlog;
    ValidationReport report = cmd_validate(out, vlog);
    for (const auto& issue : report.issues)
        UNSCOPED_INFO(issue.bundle << " [" << issue.check << "] " << issue.detail);
    CHECK(report.ok());
    fs::remove_all(out);
}
