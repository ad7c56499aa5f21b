// Command-line front end: compute bracket tables, run verification suites,
// export cells, kernels and H polynomials, and manage the table cache.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <fvtr/cutjoin.hpp>
#include <fvtr/engine.hpp>
#include <fvtr/serialize.hpp>
#include <fvtr/suites.hpp>

namespace fs = std::filesystem;
using namespace fvtr;

namespace
{

enum exit_code { ok = 0, verification_failed = 1, usage_error = 2, internal_error = 3 };

struct RunConfig {
    int chi_max = 3;
    int truncation_margin = 0;
    std::string framing = "symbolic";
    std::string output = "json";
    std::string cache_dir;
    std::uint64_t seed = 20240611;
    unsigned threads = 0;
    std::string out_path;
};

struct usage : error {
    using error::error;
};

std::optional<Rational> parse_framing(const std::string &text)
{
    if (text == "symbolic") {
        return std::nullopt;
    }
    try {
        return parse_rational(text);
    } catch (const error &) {
        throw usage("framing must be 'symbolic' or a rational p/q, got '" + text + "'");
    }
}

CellId parse_cell(const std::string &text)
{
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos) {
            throw std::invalid_argument(text);
        }
        std::size_t u1 = 0, u2 = 0;
        const int g = std::stoi(text.substr(0, comma), &u1);
        const int n = std::stoi(text.substr(comma + 1), &u2);
        if (u1 != comma || u2 != text.size() - comma - 1) {
            throw std::invalid_argument(text);
        }
        if (!is_stable(g, n)) {
            throw usage("cell " + text + " is not stable");
        }
        return {g, n};
    } catch (const std::logic_error &) {
        throw usage("cell selector must look like g,n; got '" + text + "'");
    }
}

std::string cache_file(const RunConfig &cfg)
{
    return (fs::path(cfg.cache_dir) / "brackets.json").string();
}

// Engine primed from the cache (if any), run to chi_max and written back.
std::unique_ptr<Engine> run_engine(const RunConfig &cfg, int chi_max)
{
    auto engine = std::make_unique<Engine>(EngineOptions{cfg.truncation_margin, cfg.threads});
    if (!cfg.cache_dir.empty() && fs::exists(cache_file(cfg))) {
        engine->load(table_from_string(read_file(cache_file(cfg))));
    }
    engine->run_to_budget(chi_max);
    if (!cfg.cache_dir.empty()) {
        std::error_code ec;
        fs::create_directories(cfg.cache_dir, ec);
        if (ec) {
            throw usage("cannot create cache directory " + cfg.cache_dir + ": " + ec.message());
        }
        write_file(cache_file(cfg), table_to_string(engine->table(), cfg.truncation_margin));
    }
    return engine;
}

std::vector<CellId> cells_up_to(const BracketTable &t, int chi_max)
{
    std::vector<CellId> out;
    for (const auto &[c, e] : t.cells()) {
        if (c.chi() <= chi_max) {
            out.push_back(c);
        }
    }
    return out;
}

void emit(const RunConfig &cfg, const std::string &text)
{
    if (cfg.out_path.empty()) {
        std::cout << text;
    } else {
        write_file(cfg.out_path, text);
    }
}

int cmd_compute(const RunConfig &cfg)
{
    const auto at_f = parse_framing(cfg.framing);
    auto engine = run_engine(cfg, cfg.chi_max);
    BracketTable view;
    const std::vector<CellId> cells = cells_up_to(engine->table(), cfg.chi_max);
    for (const CellId &c : cells) {
        view.publish(c, engine->table().cell(c));
    }
    if (cfg.output == "csv") {
        emit(cfg, table_to_csv(view, cells, at_f));
        return ok;
    }
    nlohmann::json j = table_to_json(view, cfg.truncation_margin);
    if (at_f) {
        j["framing"] = to_string(*at_f);
        j["brackets"] = cells_to_json(view, cells, at_f);
    }
    emit(cfg, j.dump(2) + "\n");
    return ok;
}

int cmd_verify(const RunConfig &cfg, const std::string &suite)
{
    auto engine = run_engine(cfg, cfg.chi_max);
    const unsigned threads = engine->options().threads;
    const BracketTable &table = engine->table();
    SuiteReport report;
    const bool all = suite == "all";
    if (all || suite == "oracle") {
        report.append(suite_oracle(table, cfg.chi_max, cfg.seed));
    }
    if (all || suite == "symmetry") {
        report.append(suite_symmetry(table, engine->kernels(), threads));
    }
    if (all || suite == "kernels") {
        report.append(suite_kernels(cfg.truncation_margin, 3, 2, threads));
        report.append(suite_used_kernels(engine->kernels()));
    }
    if (all || suite == "cutjoin") {
        report.append(suite_cutjoin(table, cfg.chi_max, threads));
    }
    nlohmann::json j = report.to_json();
    j["format"] = "fvtr-report";
    j["version"] = 1;
    j["suite"] = suite;
    j["chi_max"] = cfg.chi_max;
    j["truncation_margin"] = cfg.truncation_margin;
    j["seed"] = cfg.seed;
    if (cfg.output == "csv") {
        std::string text = "suite,name,passed\n";
        for (const auto &c : report.checks) {
            text += c.suite + "," + c.name + "," + (c.passed ? "pass" : "fail") + "\n";
        }
        emit(cfg, text);
    } else {
        emit(cfg, j.dump(2) + "\n");
    }
    if (const Check *bad = report.first_failure()) {
        std::cerr << "verification failed: " << bad->name << " " << bad->detail.dump() << "\n";
        return verification_failed;
    }
    std::cerr << report.checks.size() << " checks passed\n";
    return ok;
}

struct ExportSelection {
    std::vector<std::string> cells;
    std::vector<std::string> kernels;
    std::vector<std::string> hs;
    std::string at_f;
};

// "I:a,b" or "II:b"
std::pair<int, int> parse_kernel(const std::string &text)
{
    try {
        if (text.rfind("I:", 0) == 0) {
            const CellId ab = [&] {
                const auto s = text.substr(2);
                const auto comma = s.find(',');
                if (comma == std::string::npos) {
                    throw std::invalid_argument(s);
                }
                return CellId{std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
            }();
            if (ab.g < 0 || ab.n < 0) {
                throw std::invalid_argument(text);
            }
            return {ab.g, ab.n};
        }
        if (text.rfind("II:", 0) == 0) {
            const int b = std::stoi(text.substr(3));
            if (b < 0) {
                throw std::invalid_argument(text);
            }
            return {-1, b};
        }
    } catch (const std::logic_error &) {
    }
    throw usage("kernel selector must be I:a,b or II:b; got '" + text + "'");
}

int cmd_export(const RunConfig &cfg, const ExportSelection &sel)
{
    if (sel.cells.empty() && sel.kernels.empty() && sel.hs.empty()) {
        throw usage("export needs at least one of --cell, --kernel, --H");
    }
    const auto at_f = parse_framing(sel.at_f.empty() ? cfg.framing : sel.at_f);
    std::vector<CellId> cells, hs;
    int chi = 1;
    for (const auto &s : sel.cells) {
        cells.push_back(parse_cell(s));
        chi = std::max(chi, cells.back().chi());
    }
    for (const auto &s : sel.hs) {
        hs.push_back(parse_cell(s));
        chi = std::max(chi, hs.back().chi());
    }
    std::vector<std::pair<int, int>> kernels;
    for (const auto &s : sel.kernels) {
        kernels.push_back(parse_kernel(s));
    }
    std::unique_ptr<Engine> engine;
    if (!cells.empty() || !hs.empty()) {
        engine = run_engine(cfg, chi);
    }
    KernelStore store(cfg.truncation_margin);
    auto kernel_poly = [&](const std::pair<int, int> &k) -> const Poly & {
        return k.first >= 0 ? store.type_I(k.first, k.second).kernel : store.type_II(k.second).kernel;
    };
    auto kernel_name = [](const std::pair<int, int> &k) {
        return k.first >= 0 ? "I:" + std::to_string(k.first) + "," + std::to_string(k.second)
                            : "II:" + std::to_string(k.second);
    };
    std::optional<PhiTower> tower;
    if (!hs.empty()) {
        tower = engine->tower(chi);
    }
    if (cfg.output == "csv") {
        std::string text;
        if (!cells.empty()) {
            text += table_to_csv(engine->table(), cells, at_f);
        }
        for (const auto &k : kernels) {
            text += "# kernel " + kernel_name(k) + "\n" + poly_to_csv(kernel_poly(k), at_f);
        }
        for (const CellId &c : hs) {
            text += "# H " + std::to_string(c.g) + "," + std::to_string(c.n) + "\n"
                    + poly_to_csv(assemble_H(c.g, c.n, engine->table(), *tower).poly, at_f);
        }
        emit(cfg, text);
        return ok;
    }
    nlohmann::json j = nlohmann::json::object();
    if (at_f) {
        j["framing"] = to_string(*at_f);
    }
    if (!cells.empty()) {
        j["brackets"] = cells_to_json(engine->table(), cells, at_f);
    }
    for (const auto &k : kernels) {
        j["kernels"][kernel_name(k)] = poly_to_json(kernel_poly(k), at_f);
    }
    for (const CellId &c : hs) {
        j["H"][std::to_string(c.g) + "|" + std::to_string(c.n)]
            = poly_to_json(assemble_H(c.g, c.n, engine->table(), *tower).poly, at_f);
    }
    emit(cfg, j.dump(2) + "\n");
    return ok;
}

int cmd_cache(const RunConfig &cfg, const std::string &action)
{
    if (cfg.cache_dir.empty()) {
        throw usage("no cache directory; pass --cache DIR or set FVTR_CACHE_DIR");
    }
    const std::string path = cache_file(cfg);
    if (action == "clear") {
        std::error_code ec;
        fs::remove(path, ec);
        std::cout << "removed " << path << "\n";
        return ok;
    }
    nlohmann::json j{{"path", path}, {"exists", fs::exists(path)}};
    if (fs::exists(path)) {
        const BracketTable t = table_from_string(read_file(path));
        j["chi_max"] = t.chi_max();
        j["cells"] = t.cells().size();
        j["entries"] = t.entry_count();
    }
    std::cout << j.dump(2) << "\n";
    return ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Framed-vertex Hodge integral brackets: recursion, verification and export"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML or INI file with option defaults; flags win");

    RunConfig cfg;
    app.add_option("--chi-max", cfg.chi_max, "Largest 2g-2+n to compute")->check(CLI::PositiveNumber);
    app.add_option("--truncation-margin", cfg.truncation_margin, "Extra series order for kernel extraction")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--framing", cfg.framing, "symbolic, or a rational p/q to specialize output values");
    app.add_option("--output", cfg.output, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--cache", cfg.cache_dir, "Directory holding the bracket table cache")->envname("FVTR_CACHE_DIR");
    app.add_option("--seed", cfg.seed, "Seed for randomized spot checks");
    app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
    app.add_option("--out", cfg.out_path, "Write the result here instead of stdout");

    auto *compute = app.add_subcommand("compute", "Run the recursion up to --chi-max and print the table");

    std::string suite = "all";
    auto *verify = app.add_subcommand("verify", "Run verification suites; exit 1 on the first failure");
    verify->add_option("--suite", suite, "Suite to run")
        ->check(CLI::IsMember({"cutjoin", "kernels", "symmetry", "oracle", "all"}));

    ExportSelection sel;
    auto *exporter = app.add_subcommand("export", "Export bracket cells, kernels or assembled H polynomials");
    exporter->add_option("--cell", sel.cells, "Bracket cell g,n (repeatable)");
    exporter->add_option("--kernel", sel.kernels, "Kernel I:a,b or II:b (repeatable)");
    exporter->add_option("--H", sel.hs, "Assembled H for cell g,n (repeatable)");
    exporter->add_option("--at-f", sel.at_f, "Evaluate coefficients at f = p/q");

    std::string action = "info";
    auto *cache = app.add_subcommand("cache", "Inspect or clear the table cache");
    cache->add_option("action", action, "info or clear")->check(CLI::IsMember({"info", "clear"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (compute->parsed()) {
            return cmd_compute(cfg);
        }
        if (verify->parsed()) {
            return cmd_verify(cfg, suite);
        }
        if (exporter->parsed()) {
            return cmd_export(cfg, sel);
        }
        if (cache->parsed()) {
            return cmd_cache(cfg, action);
        }
    } catch (const invariant_violation &e) {
        std::cerr << "internal invariant violated: " << e.what() << "\n";
        return internal_error;
    } catch (const usage &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const parse_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const pole_at_framing &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const index_out_of_range &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage_error;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return internal_error;
    }
    return usage_error;
}
