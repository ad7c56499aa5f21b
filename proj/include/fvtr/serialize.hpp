#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <fvtr/engine.hpp>
#include <fvtr/errors.hpp>
#include <fvtr/frational.hpp>
#include <fvtr/tpoly.hpp>

namespace fvtr
{

// On-disk bracket tables are canonical JSON: sorted keys "g|b1,b2,...", values
// in FRational text form, a format/version header and the list of cells that
// were computed (a computed cell may hold no nonzero entry).
inline constexpr const char *table_format = "fvtr-bracket-table";
inline constexpr int table_version = 1;

inline std::string bracket_key(int g, const MultiIndex &b)
{
    std::string s = std::to_string(g) + "|";
    for (std::size_t i = 0; i < b.size(); ++i) {
        s += (i ? "," : "") + std::to_string(b[i]);
    }
    return s;
}

inline std::pair<int, MultiIndex> parse_bracket_key(const std::string &key)
{
    const auto bar = key.find('|');
    if (bar == std::string::npos || bar == 0) {
        throw parse_error("bracket key '" + key + "' is not of the form g|b1,...");
    }
    std::pair<int, MultiIndex> out;
    try {
        std::size_t used = 0;
        out.first = std::stoi(key.substr(0, bar), &used);
        if (used != bar) {
            throw parse_error("bad genus in '" + key + "'");
        }
        std::stringstream ss(key.substr(bar + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            out.second.push_back(std::stoi(item, &used));
            if (used != item.size()) {
                throw parse_error("bad index in '" + key + "'");
            }
        }
    } catch (const std::logic_error &) {
        throw parse_error("bracket key '" + key + "' has a non-integer field");
    }
    if (out.second.empty()) {
        throw parse_error("bracket key '" + key + "' has no indices");
    }
    return out;
}

inline nlohmann::json table_to_json(const BracketTable &t, int truncation_margin = 0)
{
    nlohmann::json j;
    j["format"] = table_format;
    j["version"] = table_version;
    j["chi_max"] = t.chi_max();
    j["truncation_margin"] = truncation_margin;
    j["cells"] = nlohmann::json::array();
    nlohmann::json br = nlohmann::json::object();
    for (const auto &[c, entries] : t.cells()) {
        j["cells"].push_back(std::to_string(c.g) + "|" + std::to_string(c.n));
        for (const auto &[b, v] : entries) {
            br[bracket_key(c.g, b)] = to_string(v);
        }
    }
    j["brackets"] = std::move(br);
    return j;
}

inline std::string table_to_string(const BracketTable &t, int truncation_margin = 0)
{
    return table_to_json(t, truncation_margin).dump(2) + "\n";
}

inline BracketTable table_from_json(const nlohmann::json &j)
{
    if (!j.is_object() || j.value("format", std::string()) != table_format) {
        throw parse_error("not a bracket table file");
    }
    if (j.value("version", -1) != table_version) {
        throw parse_error("unsupported table version " + j.value("version", nlohmann::json()).dump());
    }
    std::map<CellId, BracketTable::Entries> cells;
    for (const auto &c : j.at("cells")) {
        const auto [g, nv] = parse_bracket_key(c.get<std::string>());
        if (nv.size() != 1) {
            throw parse_error("cell '" + c.get<std::string>() + "' is not of the form g|n");
        }
        cells[{g, nv[0]}];
    }
    for (const auto &[key, value] : j.at("brackets").items()) {
        auto [g, b] = parse_bracket_key(key);
        const CellId c{g, static_cast<int>(b.size())};
        auto it = cells.find(c);
        if (it == cells.end()) {
            throw parse_error("bracket '" + key + "' belongs to an undeclared cell");
        }
        it->second[sorted(b)] = parse_frational(value.get<std::string>());
    }
    BracketTable t;
    for (auto &[c, e] : cells) {
        t.publish(c, std::move(e));
    }
    return t;
}

inline BracketTable table_from_string(const std::string &text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw parse_error(std::string("table file is not valid JSON: ") + e.what());
    }
    try {
        return table_from_json(j);
    } catch (const nlohmann::json::exception &e) {
        throw parse_error(std::string("malformed table file: ") + e.what());
    }
}

// Renders a value symbolically, or as a rational when a framing is given.
inline std::string render_value(const FRational &v, const std::optional<Rational> &at_f)
{
    return at_f ? to_string(evaluate_at(v, *at_f)) : to_string(v);
}

// Rows g,n,b,value with b space separated; one row per sorted multi-index.
inline std::string table_to_csv(const BracketTable &t, const std::vector<CellId> &cells,
                                const std::optional<Rational> &at_f = std::nullopt)
{
    std::string out = "g,n,b,value\n";
    for (const CellId &c : cells) {
        for (const auto &[b, v] : t.cell(c)) {
            std::string bs;
            for (std::size_t i = 0; i < b.size(); ++i) {
                bs += (i ? " " : "") + std::to_string(b[i]);
            }
            out += std::to_string(c.g) + "," + std::to_string(c.n) + "," + bs + "," + render_value(v, at_f) + "\n";
        }
    }
    return out;
}

inline nlohmann::json cells_to_json(const BracketTable &t, const std::vector<CellId> &cells,
                                    const std::optional<Rational> &at_f = std::nullopt)
{
    nlohmann::json j = nlohmann::json::object();
    for (const CellId &c : cells) {
        for (const auto &[b, v] : t.cell(c)) {
            j[bracket_key(c.g, b)] = render_value(v, at_f);
        }
    }
    return j;
}

inline std::string exponent_key(const Exponents &e)
{
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) {
        s += (i ? "," : "") + std::to_string(e[i]);
    }
    return s;
}

// Terms in descending graded-lex order as [exponents, coefficient] pairs.
inline nlohmann::json poly_to_json(const TPolynomial<FRational> &p, const std::optional<Rational> &at_f = std::nullopt)
{
    nlohmann::json terms = nlohmann::json::array();
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        terms.push_back({exponent_key(it->first), render_value(it->second, at_f)});
    }
    return {{"arity", p.arity()}, {"terms", std::move(terms)}};
}

inline std::string poly_to_csv(const TPolynomial<FRational> &p, const std::optional<Rational> &at_f = std::nullopt)
{
    std::string out = "exponents,coefficient\n";
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        std::string e = exponent_key(it->first);
        for (char &ch : e) {
            ch = ch == ',' ? ' ' : ch;
        }
        out += e + "," + render_value(it->second, at_f) + "\n";
    }
    return out;
}

inline std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw parse_error("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string &path, const std::string &content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw error("cannot write " + tmp);
        }
        out << content;
        if (!out) {
            throw error("short write to " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw error("cannot move " + tmp + " to " + path);
    }
}

} // namespace fvtr
