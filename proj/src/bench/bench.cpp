// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "qz/bench.hpp"
#include "qz/concrete.hpp"
#include "qz/parser.hpp"

namespace qz::bench {

namespace {

std::string shortest(double v) {
    char buf[64];
    return {buf, std::to_chars(buf, buf + sizeof buf, v).ptr};
}

// Bound of an interval literal; negative values keep their sign inside.
std::string literal(double lo, double hi) { return "[" + shortest(lo) + ", " + shortest(hi) + "]"; }

const char* const kArctanConstants[] = {"0.0028662257",  "-0.0161657367", "0.0429096138",  "-0.0752896400",
                                        "0.1065626393",  "-0.1420889944", "0.1999355085",  "-0.3333314528"};

std::string power(int k) {
    std::string s = "(x";
    for (int i = 1; i < k; ++i) {
        s += "*x";
    }
    return s + ")";
}

std::string constant(const char* c) { return c[0] == '-' ? std::string("(") + c + ")" : std::string(c); }

// 1 - C1 op x^2 + C2 op x^4 + ... + C8 op x^16
std::string series(const char* op) {
    std::string s = "1";
    for (int i = 0; i < 8; ++i) {
        s += i == 0 ? " - " : " + ";
        s += constant(kArctanConstants[i]) + op + power(2 * (i + 1));
    }
    return s;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

using Boxes = std::vector<std::pair<std::string, ExtInterval>>;

template <class T>
void check_sample(const ConcreteOutcome<T>& out, const Boxes& boxes, int& bad) {
    for (const auto& [name, box] : boxes) {
        const T* v = out.find(name);
        if (v != nullptr && !encloses(box, *v)) {
            ++bad;
            return;
        }
    }
}

McReport mc_check(const lang::Program& p, const Boxes& boxes, bool unreachable, int samples, std::uint64_t seed,
                  Reference ref, bool decimal_constants = true) {
    McReport rep;
    LiteralSampler ref_sampler(seed);
    LiteralSampler fp_sampler(seed);
    ConcreteRunner<long double> ld(ref_sampler, 100000, decimal_constants);
    ConcreteRunner<Rational> exact(ref_sampler, 100000, decimal_constants);
    ConcreteRunner<double> b64(fp_sampler);
    for (int s = 0; s < samples; ++s) {
        int bad = 0;
        RunStatus status = RunStatus::Ok;
        if (ref == Reference::Exact) {
            const auto out = exact.run(p);
            status = out.status;
            if (status == RunStatus::Ok) {
                check_sample(out, boxes, bad);
            }
        } else {
            const auto out = ld.run(p);
            status = out.status;
            if (status == RunStatus::Ok) {
                check_sample(out, boxes, bad);
            }
        }
        if (status != RunStatus::Ok) {
            ++rep.skipped;
        } else {
            ++rep.runs;
            // a reachable concrete end contradicts an unreachable verdict
            rep.violations += unreachable || bad > 0 ? 1 : 0;
        }
        const auto f = b64.run(p);
        if (f.status == RunStatus::Ok) {
            int escape = unreachable ? 1 : 0;
            check_sample(f, boxes, escape);
            rep.binary64_escapes += escape > 0 ? 1 : 0;
        }
    }
    return rep;
}

Boxes boxes_of(const AnalysisResult& r) {
    Boxes b;
    for (const VarResult& v : r.vars) {
        b.emplace_back(v.name, v.range);
    }
    return b;
}

AnalysisConfig analysis_config(const BenchConfig& cfg, DomainKind d, Conc c) {
    AnalysisConfig a;
    a.domain = d;
    a.conc = c;
    a.fp = cfg.fp;
    return a;
}

BenchRow make_row(const std::string& bench, DomainKind d, Conc c, int param, const std::string& var,
                  const ExtInterval& box) {
    BenchRow row;
    row.bench = bench;
    row.domain = d;
    row.conc = c;
    row.param = param;
    row.var = var;
    row.lo = box.lo();
    row.hi = box.hi();
    row.width = box.width();
    return row;
}

void merge_warnings(std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (const std::string& w : from) {
        if (std::find(into.begin(), into.end(), w) == into.end()) {
            into.push_back(w);
        }
    }
}

void apply_mc(BenchRow& row, const McReport& mc) {
    row.mc_runs = mc.runs;
    row.mc_violations = mc.violations;
    row.mc_binary64_escapes = mc.binary64_escapes;
}

// Runs the tasks on the pool and concatenates their rows in a stable order.
std::vector<BenchRow> run_tasks(const std::vector<std::function<std::vector<BenchRow>()>>& tasks, unsigned threads) {
    std::vector<std::vector<BenchRow>> parts(tasks.size());
    parallel_for(tasks.size(), threads, [&](std::size_t i) { parts[i] = tasks[i](); });
    std::vector<BenchRow> rows;
    for (auto& p : parts) {
        rows.insert(rows.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    }
    sort_rows(rows);
    return rows;
}

// One row for `var` from a single analysis of `source`.
BenchRow single_run(const std::string& bench, const BenchConfig& cfg, DomainKind d, Conc c, int param,
                    const std::string& source, const std::string& var) {
    const lang::Program p = lang::parse_program(source);
    const auto start = std::chrono::steady_clock::now();
    const AnalysisResult r = analyze(p, analysis_config(cfg, d, c));
    const double ms = elapsed_ms(start);
    const VarResult* v = r.find(var);
    BenchRow row = make_row(bench, d, c, param, var, v != nullptr ? v->range : ExtInterval::whole());
    row.ms = ms;
    row.unreachable = r.unreachable;
    row.warnings = r.warnings;
    const McReport mc = mc_check(p, {{var, v != nullptr ? v->range : ExtInterval::whole()}}, r.unreachable,
                                 cfg.mc_samples, cfg.seed + static_cast<std::uint64_t>(param), Reference::LongDouble, cfg.fp);
    apply_mc(row, mc);
    return row;
}

} // namespace

std::string gen_arctan(double lo, double hi) {
    const std::string div = series("/");
    std::string s = "x = " + literal(lo, hi) + ";\n";
    s += "if (x > 1.) {\n  y = 1.5708 - 1/x*(" + div + ");\n}\n";
    s += "if (x < 1.) {\n  y = -1.5708 - 1/x*(" + div + ");\n}\n";
    s += "else {\n  y = x*(" + series("*") + ");\n}\n";
    return s;
}

lang::Program stolfi_program(double lo, double hi) {
    lang::Program p = lang::parse_program("y = sqrt(x*x + x - 0.5) / sqrt(x*x + 0.5);");
    p.body.insert(p.body.begin(), lang::Stmt::assign("x", lang::Expr::interval(lo, hi)));
    return p;
}

std::string householder_source(int depth, double a_lo, double a_hi) {
    std::string s = "A = " + literal(a_lo, a_hi) + ";\nx = 0.0625;\n";
    for (int i = 0; i < depth; ++i) {
        s += "r = 1 - A*x*x;\nx = x*(1 + 0.5*r + 0.375*r*r);\n";
    }
    return s;
}

std::string random_program(std::uint64_t seed, const RandomProgramShape& shape) {
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    static const char* const names[] = {"a", "b", "c", "d", "e", "f"};
    const int max_vars = std::clamp(shape.max_vars, 1, 6);
    std::vector<std::string> vars;
    std::string s;
    const int inputs = pick(1, std::min(3, max_vars));
    for (int i = 0; i < inputs; ++i) {
        const int lo = pick(-30, 30);
        const int w = pick(0, 20);
        vars.emplace_back(names[i]);
        s += vars.back() + " = [" + shortest(lo / 10.0) + ", " + shortest((lo + w) / 10.0) + "];\n";
    }
    std::function<std::string(int)> expr = [&](int depth) -> std::string {
        if (depth == 0 || pick(0, 3) == 0) {
            if (pick(0, 4) == 0) {
                const int k = pick(-25, 25);
                const std::string c = shortest(k / 10.0);
                return k < 0 ? "(" + c + ")" : c;
            }
            return vars[static_cast<std::size_t>(pick(0, static_cast<int>(vars.size()) - 1))];
        }
        static const char* const ops[] = {" + ", " - ", " * "};
        return "(" + expr(depth - 1) + ops[pick(0, 2)] + expr(depth - 1) + ")";
    };
    for (int k = 0; k < shape.statements; ++k) {
        const std::string rhs = expr(pick(1, std::max(1, shape.max_depth)));
        std::string target;
        if (static_cast<int>(vars.size()) < max_vars && pick(0, 1) == 0) {
            target = names[vars.size()];
            s += target + " = " + rhs + ";\n";
            vars.push_back(target);
        } else {
            target = vars[static_cast<std::size_t>(pick(0, static_cast<int>(vars.size()) - 1))];
            s += target + " = " + rhs + ";\n";
        }
    }
    return s;
}

std::vector<std::pair<DomainKind, Conc>> combos(const BenchConfig& cfg) {
    std::vector<std::pair<DomainKind, Conc>> out;
    for (DomainKind d : cfg.domains) {
        for (Conc c : cfg.concs) {
            if (c == Conc::Sdp && d != DomainKind::Quad) {
                continue;
            }
            out.emplace_back(d, c);
        }
    }
    return out;
}

std::vector<BenchRow> run_stolfi(const BenchConfig& cfg) {
    std::vector<std::function<std::vector<BenchRow>()>> tasks;
    for (const auto& [d, c] : combos(cfg)) {
        for (int parts = 1; parts <= cfg.stolfi_max_partitions; ++parts) {
            tasks.emplace_back([&cfg, d = d, c = c, parts]() -> std::vector<BenchRow> {
                const double lo = cfg.stolfi_lo;
                const double hi = cfg.stolfi_hi;
                const auto start = std::chrono::steady_clock::now();
                std::optional<ExtInterval> hull_box;
                std::vector<std::string> warnings;
                for (int i = 0; i < parts; ++i) {
                    const double a = lo + (hi - lo) * i / parts;
                    const double b = i + 1 == parts ? hi : lo + (hi - lo) * (i + 1) / parts;
                    const AnalysisResult r = analyze(stolfi_program(a, b), analysis_config(cfg, d, c));
                    merge_warnings(warnings, r.warnings);
                    if (r.unreachable) {
                        continue;
                    }
                    const ExtInterval y = r.find("y")->range;
                    hull_box = hull_box ? hull(*hull_box, y) : y;
                }
                const double ms = elapsed_ms(start);
                BenchRow row = make_row("stolfi", d, c, parts, "y", hull_box.value_or(ExtInterval(0, 0)));
                row.unreachable = !hull_box.has_value();
                row.ms = ms;
                row.warnings = std::move(warnings);
                const McReport mc = mc_check(stolfi_program(lo, hi), {{"y", hull_box.value_or(ExtInterval(0, 0))}},
                                             row.unreachable, cfg.mc_samples,
                                             cfg.seed + static_cast<std::uint64_t>(parts), Reference::LongDouble, cfg.fp);
                apply_mc(row, mc);
                return {row};
            });
        }
    }
    return run_tasks(tasks, cfg.threads);
}

std::vector<BenchRow> run_householder(const BenchConfig& cfg) {
    std::vector<std::function<std::vector<BenchRow>()>> tasks;
    for (const auto& [d, c] : combos(cfg)) {
        for (int depth : cfg.householder_depths) {
            tasks.emplace_back([&cfg, d = d, c = c, depth]() -> std::vector<BenchRow> {
                return {single_run("householder", cfg, d, c, depth, householder_source(depth), "x")};
            });
        }
    }
    return run_tasks(tasks, cfg.threads);
}

std::vector<BenchRow> run_arctan(const BenchConfig& cfg) {
    std::vector<std::function<std::vector<BenchRow>()>> tasks;
    for (const auto& [d, c] : combos(cfg)) {
        tasks.emplace_back([&cfg, d = d, c = c]() -> std::vector<BenchRow> {
            return {single_run("arctan", cfg, d, c, 0, gen_arctan(cfg.arctan_lo, cfg.arctan_hi), "y")};
        });
    }
    return run_tasks(tasks, cfg.threads);
}

std::vector<BenchRow> run_named(const std::string& name, const BenchConfig& cfg) {
    if (name == "arctan") {
        return run_arctan(cfg);
    }
    if (name == "stolfi") {
        return run_stolfi(cfg);
    }
    if (name == "householder") {
        return run_householder(cfg);
    }
    if (name == "all") {
        std::vector<BenchRow> rows = run_arctan(cfg);
        for (auto* run : {&run_householder, &run_stolfi}) {
            std::vector<BenchRow> more = (*run)(cfg);
            rows.insert(rows.end(), more.begin(), more.end());
        }
        sort_rows(rows);
        return rows;
    }
    throw std::invalid_argument("unknown bench '" + name + "'");
}

void sort_rows(std::vector<BenchRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return std::tie(a.bench, a.domain, a.conc, a.param, a.var) < std::tie(b.bench, b.domain, b.conc, b.param, b.var);
    });
}

namespace {

std::string num17(double v) {
    if (std::isinf(v)) {
        return v < 0 ? "-inf" : "inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num6(double v) {
    if (std::isinf(v)) {
        return v < 0 ? "-inf" : "inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string ms3(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

std::string emit_csv(const std::vector<BenchRow>& rows) {
    std::string out = "case,domain,conc,param,var,lo,hi,width,ms\n";
    for (const BenchRow& r : rows) {
        out += r.bench + "," + to_string(r.domain) + "," + to_string(r.conc) + "," + std::to_string(r.param) + "," +
               r.var + "," + num17(r.lo) + "," + num17(r.hi) + "," + num17(r.width) + "," + ms3(r.ms) + "\n";
    }
    return out;
}

std::string emit_md(const std::vector<BenchRow>& rows) {
    std::string out = "| case | domain | conc | param | var | lo | hi | width | ms | mc runs | mc violations |\n";
    out += "|---|---|---|---:|---|---:|---:|---:|---:|---:|---:|\n";
    for (const BenchRow& r : rows) {
        out += "| " + r.bench + " | " + to_string(r.domain) + " | " + to_string(r.conc) + " | " +
               std::to_string(r.param) + " | " + r.var + " | " + (r.unreachable ? "empty" : num6(r.lo)) + " | " +
               (r.unreachable ? "empty" : num6(r.hi)) + " | " + num6(r.width) + " | " + ms3(r.ms) + " | " +
               std::to_string(r.mc_runs) + " | " + std::to_string(r.mc_violations) + " |\n";
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> emit_plotdata(const std::vector<BenchRow>& rows) {
    std::vector<std::pair<std::string, std::string>> files;
    std::string bench;
    std::string series;
    for (const BenchRow& r : rows) {
        const std::string key = to_string(r.domain) + " " + to_string(r.conc);
        if (files.empty() || r.bench != bench) {
            files.emplace_back(r.bench, "");
            bench = r.bench;
            series.clear();
        }
        std::string& text = files.back().second;
        if (key != series) {
            if (!text.empty()) {
                text += "\n\n";
            }
            text += "# " + key + " " + r.var + "\n";
            series = key;
        }
        text += std::to_string(r.param) + " " + num17(r.width) + "\n";
    }
    return files;
}

McReport mc_soundness(const lang::Program& p, const AnalysisResult& r, int samples, std::uint64_t seed,
                      Reference ref) {
    // without fp accounting, constants are analyzed as their binary64 values
    return mc_check(p, boxes_of(r), r.unreachable, samples, seed, ref, r.config.fp);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f) {
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace qz::bench
