// Acceptance runner: one [PASS]/[FAIL] line per criterion, exit status 1 if
// any criterion fails. All comparisons are exact (tolerance zero).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fvtr/cutjoin.hpp>
#include <fvtr/engine.hpp>
#include <fvtr/psi_oracle.hpp>
#include <fvtr/serialize.hpp>
#include <fvtr/suites.hpp>

using namespace fvtr;

namespace
{

const FRational f = FRational::f();

struct Outcome {
    bool passed = false;
    std::string note;
};

int failures = 0;

void criterion(int id, const std::string &title, const std::function<Outcome()> &body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception &e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.passed ? 0 : 1;
    char time[32];
    std::snprintf(time, sizeof time, "%.2fs", secs);
    std::cout << (o.passed ? "[PASS] " : "[FAIL] ") << id << ". " << title << " (tolerance 0, exact; " << time
              << ")" << (o.note.empty() ? "" : " - " + o.note) << std::endl;
}

Engine &engine5()
{
    static Engine e;
    static const bool ran = (e.run_to_budget(5), true);
    (void)ran;
    return e;
}

long double_factorial(int m)
{
    long r = 1;
    for (; m > 1; m -= 2) {
        r *= m;
    }
    return r;
}

std::string summarize_failures(const SuiteReport &r)
{
    std::string s;
    for (const auto &c : r.checks) {
        if (!c.passed) {
            s += (s.empty() ? "" : "; ") + c.name + " " + c.detail.dump();
        }
    }
    return s;
}

} // namespace

int main()
{
    criterion(1, "initial data reproduction", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const BracketTable t = seed_initial_data();
        BracketTable expect;
        expect.publish({0, 3}, {{{0, 0, 0}, FRational(1)}});
        expect.publish({1, 1}, {{{0}, (f * f + f + 1) / 24}, {{1}, -f * (f + 1) / 24}});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return Outcome{t == expect && secs < 1.0, "(0,3),(1,1) seeded"};
    });

    criterion(2, "genus-0 oracle equality at (0,4), (0,5)", [] {
        const BracketTable &t = engine5().table();
        const bool c4 = t.cell({0, 4}) == BracketTable::Entries{{{0, 0, 0, 1}, FRational(1)}};
        const bool c5 = t.cell({0, 5})
                        == BracketTable::Entries{{{0, 0, 0, 0, 2}, FRational(1)}, {{0, 0, 0, 1, 1}, FRational(2)}};
        bool closed = true;
        for (int n : {4, 5}) {
            for (const auto &b : detail::sorted_indices(n, n)) {
                closed = closed && t.get(0, b) == FRational(psi_genus_zero(b));
            }
        }
        return Outcome{c4 && c5 && closed, "(0,0,0,1)->1, (0,0,0,1,1)->2, (0,0,0,0,2)->1, others 0"};
    });

    criterion(3, "cut-join identity residual = 0", [] {
        HAssembler h(engine5().table());
        std::string note;
        bool ok = true;
        for (CellId c : {CellId{0, 4}, CellId{1, 2}, CellId{2, 1}, CellId{0, 5}, CellId{1, 3}, CellId{2, 2},
                         CellId{1, 4}, CellId{3, 1}}) {
            const CutJoinReport r = verify_cutjoin(c.g, c.n, h);
            ok = ok && r.passed();
            note += (note.empty() ? "" : " ") + to_string(c) + ":" + std::to_string(r.residual.size());
        }
        return Outcome{ok, "residual terms " + note};
    });

    criterion(4, "kernel well-formedness (zero residual, cap guard silent)", [] {
        Engine &e = engine5();
        const SuiteReport r = suite_used_kernels(e.kernels());
        // the chi <= 5 run needs Type I up to a+b = 5 and Type II up to b = 5
        std::size_t type_I = 0, type_II = 0;
        for (const auto &c : r.checks) {
            (c.name.find("kernel_II") != std::string::npos ? type_II : type_I)++;
        }
        const bool complete = type_I == 12 && type_II == 6;
        return Outcome{r.passed() && complete, std::to_string(type_I) + " Type I and " + std::to_string(type_II)
                                                   + " Type II kernels decomposed" + summarize_failures(r)};
    });

    criterion(5, "cross-form agreement (Type I a,b <= 3; Type II b <= 2)", [] {
        const SuiteReport r = suite_kernels(0, 3, 2);
        bool ok = !r.checks.empty();
        for (const auto &c : r.checks) {
            ok = ok && c.detail.value("cross_form", false);
        }
        return Outcome{ok, std::to_string(r.checks.size()) + " kernels compared" + summarize_failures(r)};
    });

    criterion(6, "eta parity, even parts, half-difference and leading terms (N = 25, n <= 6)", [] {
        const int N = 25;
        const auto c = curve_series(N);
        const PhiTower tw = build_phi_tower(6);
        const EtaFamily fam = build_eta_family(*c, tw, 6);
        const std::vector<Series> sp = series_powers(c->s_t_of_v, N);
        bool ok = true;
        for (int n = 0; n <= 6; ++n) {
            const Series &e = fam.eta(n);
            const Series half = (evaluate_along(tw.phi(n), c->t_powers) - evaluate_along(tw.phi(n), sp))
                                * FRational(Rational(1, 2));
            const Series diff = e - half;
            ok = ok && e.is_odd() && fam.even(n).is_even() && fam.even(n).is_power_series();
            ok = ok && diff.is_zero() && diff.trunc() >= 0;
            ok = ok && e.lead() == -(2 * n + 1)
                 && e.leading() == pow(f, n) / pow(f + 1, n + 1) * FRational(double_factorial(2 * n - 1));
        }
        return Outcome{ok, "n = 0..6"};
    });

    criterion(7, "truncation stability at margin + 4", [] {
        Engine &base = engine5();
        Engine wide(EngineOptions{4, 0});
        wide.run_to_budget(5);
        const bool tables = wide.table() == base.table();
        const auto a = base.kernels().computed();
        const auto b = wide.kernels().computed();
        bool kernels = a.size() == b.size();
        for (const auto &[k, entry] : a) {
            auto it = b.find(k);
            kernels = kernels && it != b.end() && it->second->kernel == entry->kernel;
        }
        return Outcome{tables && kernels, std::to_string(base.table().cells().size()) + " cells and "
                                              + std::to_string(a.size()) + " kernels compared"};
    });

    criterion(8, "symmetry recovery and support bound", [] {
        Engine &e = engine5();
        bool ok = !e.step_results().empty();
        std::size_t checked = 0;
        for (const auto &[c, r] : e.step_results()) {
            std::map<MultiIndex, std::vector<FRational>> orbits;
            for (const auto &[b, v] : r.unsorted) {
                ok = ok && detail::index_sum(b) <= cell_dimension(c.g, c.n);
                orbits[sorted(b)].push_back(v);
            }
            for (const auto &[b, vs] : orbits) {
                ok = ok && static_cast<long>(vs.size()) == orbit_size(b);
                for (const auto &v : vs) {
                    ok = ok && v == vs.front();
                }
                ok = ok && r.entries.count(b) && r.entries.at(b) == vs.front();
            }
            ok = ok && orbits.size() == r.entries.size();
            checked += r.unsorted.size();
        }
        return Outcome{ok, std::to_string(e.step_results().size()) + " cells, " + std::to_string(checked)
                               + " unsorted entries"};
    });

    criterion(9, "specialization commutation at f = 2, 3 on (1,2), (0,5)", [] {
        bool ok = true;
        for (CellId c : {CellId{1, 2}, CellId{0, 5}}) {
            for (int p : {2, 3}) {
                ok = ok && specialization_check(engine5().table(), c, Rational(p)).passed;
            }
        }
        return Outcome{ok, ""};
    });

    criterion(10, "determinism of cache and report files", [] {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "fvtr_acceptance";
        fs::create_directories(dir);
        std::vector<std::string> tables, reports;
        for (int run = 0; run < 2; ++run) {
            Engine e;
            e.run_to_budget(4);
            SuiteReport r = suite_oracle(e.table(), 4);
            r.append(suite_cutjoin(e.table(), 3));
            const std::string tpath = (dir / ("table" + std::to_string(run) + ".json")).string();
            const std::string rpath = (dir / ("report" + std::to_string(run) + ".json")).string();
            write_file(tpath, table_to_string(e.table()));
            write_file(rpath, r.to_json().dump(2) + "\n");
            tables.push_back(read_file(tpath));
            reports.push_back(read_file(rpath));
        }
        fs::remove_all(dir);
        return Outcome{tables[0] == tables[1] && reports[0] == reports[1],
                       std::to_string(tables[0].size()) + " and " + std::to_string(reports[0].size()) + " bytes"};
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
