#pragma once

// Bundle serialization: the on-disk dataset tree and its lossless reader.
//
//   <root>/vars{V}_derivs{D}_eqns{E}/system_{i}/
//     system.txt                     one axiom per line, canonical text
//     consequence.txt                the consequence polynomial
//     replacement_1..k.txt           replacement axioms
//     system.dat, consequence.dat    CSV: header of symbol names, then rows
//     consequence_noise_{lvl}.dat, system_noise_{lvl}.dat
//     meta.txt                       key: value provenance lines
//
// Data values are written as the shortest decimal strings that reload to
// the same binary64 value. meta.txt carries everything generation needs,
// so a bundle can be regenerated from meta.txt alone.

#include "syntheory/bundle.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace syntheory {

struct IoFailure : std::runtime_error {
    explicit IoFailure(const std::string& what) : std::runtime_error(what) {}
};

struct MissingFile : std::runtime_error {
    explicit MissingFile(const std::string& path) : std::runtime_error("missing file: " + path) {}
};

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw IoFailure("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

/// Shortest decimal that round-trips to the same binary64.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw IoFailure("double formatting failed");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(where + ": bad numeric value '" + std::string(s) + "'");
    return v;
}

/// Noise level filename token: mantissa `e` signed two-digit exponent
/// (1e-03, 5e-02).
inline std::string format_noise_level(double level) {
    if (level <= 0) throw std::invalid_argument("noise level must be positive");
    int exponent = static_cast<int>(std::floor(std::log10(level) + 1e-12));
    double mantissa = level / std::pow(10.0, exponent);
    long m = std::lround(mantissa);
    if (std::fabs(mantissa - static_cast<double>(m)) > 1e-9)
        throw std::invalid_argument("noise level must have a single-digit mantissa");
    if (m == 10) {
        m = 1;
        ++exponent;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lde%+03d", m, exponent);
    return buf;
}

struct BundleManifest {
    std::string directory;  // relative to the output root
    std::vector<std::pair<std::string, std::string>> files;  // name -> sha256
};

namespace iodetail {

inline void write_file(const std::filesystem::path& path, const std::string& content,
                       BundleManifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoFailure("write failed: " + path.string());
    manifest.files.emplace_back(path.filename().string(), sha256_hex(content));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string dat_text(const DataTable& data) {
    std::ostringstream out;
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        if (c) out << ",";
        out << data.columns[c];
    }
    out << "\n";
    for (const auto& row : data.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ",";
            out << format_double(row[c]);
        }
        out << "\n";
    }
    return out.str();
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

inline DataTable parse_dat(const std::string& content, const std::string& where,
                           const std::vector<ColumnRole>& roles) {
    DataTable out;
    std::istringstream in(content);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (lineno == 1) {
            out.columns = cells;
            continue;
        }
        if (cells.size() != out.columns.size())
            throw ParseError(where + " line " + std::to_string(lineno) + ": ragged row");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells)
            row.push_back(parse_double(cell, where + " line " + std::to_string(lineno)));
        out.rows.push_back(std::move(row));
    }
    if (out.columns.empty()) throw ParseError(where + ": missing header row");
    if (roles.size() != out.columns.size())
        throw ParseError(where + ": role metadata does not match the header");
    out.roles = roles;
    return out;
}

inline std::string roles_line(const DataTable& data) {
    std::ostringstream out;
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        if (c) out << ",";
        out << data.columns[c] << "=" << to_string(data.roles[c]);
    }
    return out.str();
}

inline std::vector<ColumnRole> parse_roles_line(const std::string& line, const std::string& where) {
    std::vector<ColumnRole> out;
    if (line.empty()) return out;
    for (const auto& item : split(line, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError(where + ": bad role entry " + item);
        out.push_back(column_role_from_string(item.substr(eq + 1)));
    }
    return out;
}

inline std::string doubles_csv(const std::vector<double>& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ",";
        out << format_double(values[i]);
    }
    return out.str();
}

inline std::vector<double> parse_doubles_csv(const std::string& line, const std::string& where) {
    std::vector<double> out;
    if (line.empty()) return out;
    for (const auto& item : split(line, ',')) out.push_back(parse_double(item, where));
    return out;
}

inline std::string names_csv(const std::set<SymbolId>& ids, const SymbolTable& table) {
    std::ostringstream out;
    bool first = true;
    for (SymbolId s : ids) {
        if (!first) out << ",";
        out << table.info(s).name;
        first = false;
    }
    return out.str();
}

}  // namespace iodetail

/// Role of a symbol in the bundle, as recorded in meta.txt: constants are
/// constants, consequence-support symbols are measured, other derivatives
/// are derived, the rest is latent.
inline std::string bundle_symbol_role(const TheoryBundle& bundle, SymbolId s) {
    const auto& info = bundle.table->info(s);
    if (is_constant_kind(info.kind)) return "constant";
    if (bundle.consequence.polynomial.poly().support().count(s)) return "measured";
    if (info.kind == SymbolKind::Derivatif) return "derived";
    return "latent";
}

inline std::string meta_text(const TheoryBundle& b) {
    const SymbolTable& table = *b.table;
    const GeneratorConfig& cfg = b.system.config;
    std::ostringstream out;
    out << "generator_version: 1\n";
    out << "cell: " << b.cell << "\n";
    out << "system_index: " << b.system_index << "\n";
    out << "seed: " << b.seed << "\n";
    out << "points: " << b.points << "\n";
    out << "noise_family: " << to_string(b.noise_family) << "\n";
    out << "includes_trig_identity: " << (b.system.includes_trig_identity ? "true" : "false") << "\n";
    out << "config_digest: " << sha256_hex(cfg.generation_key()) << "\n";
    out << "config.max_power: " << cfg.max_power << "\n";
    out << "config.max_factors: " << cfg.max_factors << "\n";
    out << "config.prob_factors_per_term: " << iodetail::doubles_csv(cfg.prob_factors_per_term) << "\n";
    out << "config.prob_num_terms: " << iodetail::doubles_csv(cfg.prob_num_terms) << "\n";
    out << "config.prob_small_constants: " << iodetail::doubles_csv(cfg.prob_small_constants) << "\n";
    out << "config.same_factor_variable_bias: " << format_double(cfg.same_factor_variable_bias) << "\n";
    out << "config.same_factor_derivative_bias: " << format_double(cfg.same_factor_derivative_bias) << "\n";
    out << "config.prob_all_positive: " << format_double(cfg.prob_all_positive) << "\n";
    out << "config.dimensional_mode: " << (cfg.dimensional_mode ? "true" : "false") << "\n";
    out << "config.seed: " << cfg.seed << "\n";
    out << "config.vdc_samples: " << cfg.vdc_samples << "\n";
    out << "consequence.term_limit: " << b.consequence_config.term_limit << "\n";
    out << "consequence.max_attempts: " << b.consequence_config.max_attempts << "\n";
    out << "consequence.cofactor: " << b.consequence.cofactor.str(table) << "\n";
    out << "consequence.measured: " << iodetail::names_csv(b.consequence.measured.all(), table) << "\n";
    out << "consequence.attempt_index: " << b.consequence.attempt_index << "\n";
    std::vector<double> conseq_levels, system_levels;
    for (const auto& [spec, data] : b.consequence_noise) conseq_levels.push_back(spec.epsilon);
    for (const auto& [spec, data] : b.system_noise) system_levels.push_back(spec.epsilon);
    out << "consequence_noise_levels: " << iodetail::doubles_csv(conseq_levels) << "\n";
    out << "system_noise_levels: " << iodetail::doubles_csv(system_levels) << "\n";
    for (std::size_t k = 0; k < b.replacements.size(); ++k)
        out << "replacement_" << (k + 1) << ".index: " << b.replacements[k].axiom_index << "\n";
    for (SymbolId s = 0; s < table.size(); ++s) {
        const auto& info = table.info(s);
        out << "symbol." << info.name << ": ";
        switch (info.kind) {
            case SymbolKind::Variable: out << "var " << info.unit.str(); break;
            case SymbolKind::ThetaAux:
                out << (*info.theta == ThetaKind::Theta  ? "theta"
                        : *info.theta == ThetaKind::Sin ? "sin"
                        : *info.theta == ThetaKind::Cos ? "cos"
                                                        : "exp")
                    << " 1";
                break;
            case SymbolKind::Derivatif:
                out << "deriv " << info.unit.str() << " " << info.deriv->dependent << " "
                    << info.deriv->independent << " " << info.deriv->order;
                break;
            case SymbolKind::PhysicalConstant: out << "const " << info.unit.str(); break;
            case SymbolKind::MathematicalConstant: out << "mathconst 1 " << format_double(*info.value); break;
        }
        out << "\n";
        out << "role." << info.name << ": " << bundle_symbol_role(b, s) << "\n";
    }
    out << "table_roles.consequence: " << iodetail::roles_line(b.consequence_data) << "\n";
    out << "table_roles.system: " << iodetail::roles_line(b.system_data) << "\n";
    return out.str();
}

/// Writes the bundle under root and returns the manifest of written files.
inline BundleManifest write_bundle(const TheoryBundle& b, const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    fs::path dir = root / b.cell / ("system_" + std::to_string(b.system_index));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());

    BundleManifest manifest;
    manifest.directory = (fs::path(b.cell) / ("system_" + std::to_string(b.system_index))).string();

    std::ostringstream system_txt;
    for (const auto& axiom : b.system.axioms) system_txt << axiom.str() << "\n";
    iodetail::write_file(dir / "system.txt", system_txt.str(), manifest);
    iodetail::write_file(dir / "consequence.txt", b.consequence.polynomial.str() + "\n", manifest);
    for (std::size_t k = 0; k < b.replacements.size(); ++k)
        iodetail::write_file(dir / ("replacement_" + std::to_string(k + 1) + ".txt"),
                             b.replacements[k].axiom.str() + "\n", manifest);
    iodetail::write_file(dir / "consequence.dat", iodetail::dat_text(b.consequence_data), manifest);
    iodetail::write_file(dir / "system.dat", iodetail::dat_text(b.system_data), manifest);
    for (const auto& [spec, data] : b.consequence_noise)
        iodetail::write_file(dir / ("consequence_noise_" + format_noise_level(spec.epsilon) + ".dat"),
                             iodetail::dat_text(data), manifest);
    for (const auto& [spec, data] : b.system_noise)
        iodetail::write_file(dir / ("system_noise_" + format_noise_level(spec.epsilon) + ".dat"),
                             iodetail::dat_text(data), manifest);
    iodetail::write_file(dir / "meta.txt", meta_text(b), manifest);
    return manifest;
}

/// Reads a bundle directory written by write_bundle.
inline TheoryBundle read_bundle(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    auto meta_content = iodetail::read_file(dir / "meta.txt");

    std::map<std::string, std::string> meta;
    {
        std::istringstream in(meta_content);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto colon = line.find(": ");
            if (colon == std::string::npos)
                throw ParseError("meta.txt line " + std::to_string(lineno) + ": expected `key: value`");
            meta[line.substr(0, colon)] = line.substr(colon + 2);
        }
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = meta.find(key);
        if (it == meta.end()) throw ParseError("meta.txt: missing key " + key);
        return it->second;
    };

    TheoryBundle b;
    // rebuild the symbol table from the symbol.* lines, preserving meta order
    {
        std::string spec;
        std::istringstream in(meta_content);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("symbol.", 0) != 0) continue;
            auto colon = line.find(": ");
            spec += line.substr(7, colon - 7) + " " + line.substr(colon + 2) + "\n";
        }
        b.table = std::make_shared<const SymbolTable>(SymbolTable::parse_spec(spec));
    }
    const SymbolTable& table = *b.table;

    b.cell = need("cell");
    b.system_index = std::stoi(need("system_index"));
    b.seed = std::stoull(need("seed"));
    b.points = std::stoi(need("points"));
    b.noise_family = noise_family_from_string(need("noise_family"));

    GeneratorConfig cfg;
    cfg.max_power = std::stoi(need("config.max_power"));
    cfg.max_factors = std::stoi(need("config.max_factors"));
    cfg.prob_factors_per_term = iodetail::parse_doubles_csv(need("config.prob_factors_per_term"), "meta.txt");
    cfg.prob_num_terms = iodetail::parse_doubles_csv(need("config.prob_num_terms"), "meta.txt");
    cfg.prob_small_constants = iodetail::parse_doubles_csv(need("config.prob_small_constants"), "meta.txt");
    cfg.same_factor_variable_bias = parse_double(need("config.same_factor_variable_bias"), "meta.txt");
    cfg.same_factor_derivative_bias = parse_double(need("config.same_factor_derivative_bias"), "meta.txt");
    cfg.prob_all_positive = parse_double(need("config.prob_all_positive"), "meta.txt");
    cfg.dimensional_mode = need("config.dimensional_mode") == "true";
    cfg.seed = std::stoull(need("config.seed"));
    cfg.vdc_samples = std::stoi(need("config.vdc_samples"));

    b.system.table = b.table.get();
    b.system.config = cfg;
    b.system.seed = b.seed;
    b.system.includes_trig_identity = need("includes_trig_identity") == "true";
    {
        std::istringstream in(iodetail::read_file(dir / "system.txt"));
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                b.system.axioms.push_back(Equation::parse(line, table));
            } catch (const ParseError& e) {
                throw ParseError("system.txt line " + std::to_string(lineno) + ": " + e.what());
            }
        }
    }

    b.consequence_config.term_limit = std::stoi(need("consequence.term_limit"));
    b.consequence_config.max_attempts = std::stoi(need("consequence.max_attempts"));
    {
        std::istringstream in(iodetail::read_file(dir / "consequence.txt"));
        std::string line;
        if (!std::getline(in, line)) throw ParseError("consequence.txt: empty");
        b.consequence.polynomial = Equation::parse(line, table);
    }
    {
        const std::string& cofactor_text = need("consequence.cofactor");
        Polynomial p = Equation::parse_polynomial(cofactor_text, table);
        if (p.num_terms() != 1 || p.leading_term().coeff != 1)
            throw ParseError("meta.txt: consequence.cofactor must be a unit monomial");
        b.consequence.cofactor = p.leading_term().mono;
    }
    {
        std::set<SymbolId> ids;
        const std::string& csv = need("consequence.measured");
        if (!csv.empty())
            for (const auto& name : iodetail::split(csv, ',')) ids.insert(table.require(name));
        b.consequence.measured = MeasuredSet::from_ids(ids, table);
    }
    b.consequence.attempt_index = std::stoi(need("consequence.attempt_index"));

    for (std::size_t k = 1;; ++k) {
        auto it = meta.find("replacement_" + std::to_string(k) + ".index");
        if (it == meta.end()) break;
        fs::path file = dir / ("replacement_" + std::to_string(k) + ".txt");
        std::istringstream in(iodetail::read_file(file));
        std::string line;
        if (!std::getline(in, line)) throw ParseError(file.filename().string() + ": empty");
        b.replacements.push_back({std::stoul(it->second), Equation::parse(line, table)});
    }

    auto conseq_roles = iodetail::parse_roles_line(need("table_roles.consequence"), "meta.txt");
    auto system_roles = iodetail::parse_roles_line(need("table_roles.system"), "meta.txt");
    b.consequence_data =
        iodetail::parse_dat(iodetail::read_file(dir / "consequence.dat"), "consequence.dat", conseq_roles);
    b.system_data = iodetail::parse_dat(iodetail::read_file(dir / "system.dat"), "system.dat", system_roles);

    for (double level : iodetail::parse_doubles_csv(need("consequence_noise_levels"), "meta.txt")) {
        std::string name = "consequence_noise_" + format_noise_level(level) + ".dat";
        b.consequence_noise.push_back(
            {NoiseSpec{b.noise_family, level},
             iodetail::parse_dat(iodetail::read_file(dir / name), name, conseq_roles)});
    }
    for (double level : iodetail::parse_doubles_csv(need("system_noise_levels"), "meta.txt")) {
        std::string name = "system_noise_" + format_noise_level(level) + ".dat";
        b.system_noise.push_back({NoiseSpec{b.noise_family, level},
                                  iodetail::parse_dat(iodetail::read_file(dir / name), name, system_roles)});
    }
    return b;
}

}  // namespace syntheory
