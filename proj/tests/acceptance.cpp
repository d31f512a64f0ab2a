// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per primary criterion. Tolerances and
// time budgets are pinned below. A criterion marked expected-red is one whose
// literal statement cannot hold; its failure is reported but does not change
// the exit status. Any other failure exits with 1.

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qz/analyzer.hpp"
#include "qz/bench.hpp"
#include "qz/concrete.hpp"
#include "qz/domain.hpp"
#include "qz/form_text.hpp"
#include "qz/parser.hpp"
#include "qz/sdp.hpp"
#include "support.hpp"

namespace {

using qz::Conc;
using qz::DomainKind;
using qz::Interval;
using qz::QuadraticForm;
namespace bench = qz::bench;

constexpr double kGuardTol = 1e-6;
constexpr double kSdpTol = 1e-4;
constexpr double kTheoremSlack = 1e-9;
constexpr std::uint64_t kUlpSlack = 4;
constexpr int kMcSamples = 10000;
constexpr std::uint64_t kSeed = bench::kDefaultSeed;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    // Non-empty when the literal criterion is known not to hold.
    std::string expected_red;
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt(const qz::ExtInterval& i) { return "[" + fmt(i.lo()) + ", " + fmt(i.hi()) + "]"; }

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t ulp_distance(double a, double b) {
    auto key = [](double v) {
        const auto bits = std::bit_cast<std::int64_t>(v);
        return bits < 0 ? std::numeric_limits<std::int64_t>::min() - bits : bits;
    };
    const std::int64_t ka = key(a);
    const std::int64_t kb = key(b);
    return static_cast<std::uint64_t>(ka > kb ? ka - kb : kb - ka);
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

qz::AnalysisConfig config(DomainKind d, Conc c, bool fp) {
    qz::AnalysisConfig cfg;
    cfg.domain = d;
    cfg.conc = c;
    cfg.fp = fp;
    return cfg;
}

// x after the guard is c + k*e with one fresh symbol.
bool is_center_plus_one_symbol(const QuadraticForm& x, double c, double k) {
    return x.quadratic().empty() && x.linear().size() == 1 && !x.has_error_terms() && near(x.center(), c, kGuardTol) &&
           near(std::abs(x.linear()[0].coef), k, kGuardTol);
}

Outcome guard_example() {
    Outcome o;
    const auto cfg = config(DomainKind::Quad, Conc::Sdp, false);
    const auto lit = qz::analyze_source("x = [-2, 0]; assume(x + 1 >= 0);", cfg);
    const auto& lx = *lit.find("x");
    const bool lit_ok = near(lx.range.lo(), -1.0, kGuardTol) && near(lx.range.hi(), 0.25, kGuardTol) &&
                        is_center_plus_one_symbol(*lx.form, -0.375, 0.625);

    const auto enc = qz::analyze_source("e1 = [-1, 1]; e2 = [-1, 1];\n"
                                        "x = -1 + e1 - e2 - e1*e1;\n"
                                        "y = 1 + 2*e2 + e1*e2;\n"
                                        "assume(x + 1 >= 0);",
                                        cfg);
    const auto& ex = *enc.find("x");
    const bool enc_ok = near(ex.range.lo(), -1.0, kGuardTol) && near(ex.range.hi(), 0.25, kGuardTol) &&
                        is_center_plus_one_symbol(*ex.form, -0.375, 0.625);
    o.pass = lit_ok;
    o.detail = "literal program: x = " + qz::to_string(*lx.form) + ", box " + fmt(lx.range) +
               "; quadratic-state encoding: x = " + qz::to_string(*ex.form) + ", box " + fmt(ex.range) +
               (enc_ok ? " (matches)" : " (MISMATCH)");
    if (!enc_ok) {
        o.detail += " [encoding failed too]";
    }
    return o;
}

Outcome sdp_reproduction() {
    const QuadraticForm q = qz::parse_form("e1 - e2 - e1*e1");
    const Interval s = qz::sdp::gamma_sdp(q);
    const Interval mt = qz::concretize_mt(q);
    Outcome o;
    const bool strict = mt.contains(s) && s.width() < mt.width();
    o.pass = near(s.lo(), -3.0, kSdpTol) && near(s.hi(), 1.25, kSdpTol) && strict && near(mt.hi(), 2.0, 0.0) &&
             near(mt.lo(), -3.0, 0.0);
    o.detail = "sdp [" + fmt(s.lo()) + ", " + fmt(s.hi()) + "], mt [" + fmt(mt.lo()) + ", " + fmt(mt.hi()) + "]";
    return o;
}

Outcome bounds_theorem() {
    std::mt19937_64 rng(kSeed);
    int violations = 0;
    int forms = 0;
    std::string first;
    for (int k = 0; k < 200; ++k) {
        const int m = 1 + static_cast<int>(rng() % 5);
        const QuadraticForm q = qz::testing::random_form(rng, {.symbols = m});
        const Interval mt = qz::concretize_mt(q);
        const Interval s = qz::sdp::gamma_sdp(q);
        const Interval g = qz::sdp::grid_oracle(q, 201, kSeed + static_cast<std::uint64_t>(k));
        const bool ok = mt.lo() - kTheoremSlack <= s.lo() && s.lo() <= g.lo() && g.hi() <= s.hi() &&
                        s.hi() <= mt.hi() + kTheoremSlack;
        ++forms;
        if (!ok) {
            ++violations;
            if (first.empty()) {
                first = "; first at form " + std::to_string(k) + ": " + qz::to_string(q);
            }
        }
    }
    return {violations == 0, std::to_string(forms) + " forms, " + std::to_string(violations) + " violations" + first};
}

// Small programs exercising each operator and statement form.
const char* const kOperatorPrograms[] = {
    "x = [-3, 5]; y = [0.5, 2]; a = x + y; b = x - y; c = x * y; d = x / y; e = -x;",
    "x = [-1, 1]; y = x * x - x; z = y * y - 2 * y;",
    "x = [0.1, 0.7]; y = 1 / x + x * x; z = y / (x + 1);",
    "x = [-1, 1]; y = 1 / x;",
    "x = [0.5, 2]; y = sqrt(x); z = y * y - x;",
    "x = [4, 9]; y = sqrt(x) * sqrt(x) - x;",
    "x = [-1, 3]; y = sqrt(x) + x;",
    "x = [-2, 0]; assume(x + 1 >= 0); y = x * x;",
    "x = [-2, 2]; y = [-1, 3]; assume(x * y <= 1); assume(x - y >= -2); z = x * y;",
    "x = [-2, 2]; assume(x * x < 1); assume(x > -0.5);",
    "x = [1, 3]; y = x; assume(y != 2); z = y - x;",
    "x = [-2, 2]; if (x > 0.5) { y = x * x; } else { y = 1 - x; } z = y * x;",
    "x = [-1, 1]; y = [-1, 1]; if (x * y >= 0) { z = x + y; } else { z = x - y; }",
    "x = [0.5, 1]; n = [0, 1]; while (x < 4) { x = 2 * x; n = n + 1; }",
    "x = [0, 1]; k = 0; while (k < 100) { x = 0.5 * x + 0.25; k = k + 1; }",
    "x = [1, 2]; y = [1, 2]; assume(x <= y); z = x * y - y * x; w = y - x;",
    "e1 = [-1, 1]; e2 = [-1, 1]; x = -1 + e1 - e2 - e1*e1; y = 1 + 2*e2 + e1*e2; assume(x + 1 >= 0); z = x * y;",
    "a = [0.1, 0.2]; b = 0.1; c = a * b + 0.3; d = c - 0.3;",
};

struct Run {
    DomainKind domain;
    Conc conc;
};

const Run kRuns[] = {{DomainKind::Interval, Conc::Mt},
                     {DomainKind::Affine, Conc::Mt},
                     {DomainKind::Quad, Conc::Mt},
                     {DomainKind::Quad, Conc::Sdp}};

Outcome soundness_suite() {
    std::ostringstream out;
    std::atomic<int> violations{0};
    std::atomic<long> runs{0};
    std::atomic<long> skipped{0};

    std::mutex mu;
    std::vector<std::string> failures;

    // Operator-level programs. fp mode carries the soundness contract; the
    // idealized mode leaves the analyzer's own rounding uncharged, so its
    // escapes are counted apart.
    std::atomic<int> idealized{0};
    const std::size_t n_ops = std::size(kOperatorPrograms);
    bench::parallel_for(n_ops * 2, 0, [&](std::size_t i) {
        const std::string src = kOperatorPrograms[i / 2];
        const bool fp = i % 2 == 0;
        const auto p = qz::lang::parse_program(src);
        const auto ref = src.find("sqrt") == std::string::npos ? bench::Reference::Exact : bench::Reference::LongDouble;
        for (const Run& r : kRuns) {
            auto cfg = config(r.domain, r.conc, fp);
            cfg.unroll = 120;
            const auto res = qz::analyze(p, cfg);
            const auto mc = bench::mc_soundness(p, res, kMcSamples, kSeed + i / 2, ref);
            if (!fp) {
                idealized += mc.violations;
                continue;
            }
            violations += mc.violations;
            if (mc.violations > 0) {
                const std::lock_guard<std::mutex> lock(mu);
                failures.push_back("program " + std::to_string(i / 2 + 1) + " " + qz::to_string(r.domain) + "-" +
                                   qz::to_string(r.conc));
            }
            runs += mc.runs;
            skipped += mc.skipped;
        }
    });
    const int op_violations = violations.load();
    out << "operators: " << n_ops << " programs x 4 runs, " << op_violations << " violations";
    std::sort(failures.begin(), failures.end());
    for (const auto& f : failures) {
        out << " [" << f << "]";
    }
    out << " (idealized mode, not a contract: " << idealized.load() << " escapes)";

    // random straight-line programs, exact reference, one sample stream per program
    constexpr int kPrograms = 100;
    std::atomic<int> rnd{0};
    bench::parallel_for(kPrograms, 0, [&](std::size_t i) {
        const std::string src = bench::random_program(kSeed + i);
        const auto p = qz::lang::parse_program(src);
        for (const Run& r : kRuns) {
            if (r.conc == Conc::Sdp) {
                continue;
            }
            const auto res = qz::analyze(p, config(r.domain, r.conc, true));
            const auto mc = bench::mc_soundness(p, res, kMcSamples, kSeed ^ i, bench::Reference::Exact);
            rnd += mc.violations;
            runs += mc.runs;
            skipped += mc.skipped;
        }
    });
    out << "; random programs: " << kPrograms << " x 3 domains, " << rnd.load() << " violations";

    // the three benchmarks
    bench::BenchConfig cfg;
    cfg.concs = {Conc::Mt, Conc::Sdp};
    cfg.mc_samples = kMcSamples;
    const auto rows = bench::run_named("all", cfg);
    int bench_violations = 0;
    for (const auto& row : rows) {
        bench_violations += row.mc_violations;
        runs += row.mc_runs;
    }
    out << "; benchmarks: " << rows.size() << " rows, " << bench_violations << " violations";
    out << "; " << runs.load() << " concrete runs checked, " << skipped.load() << " blocked or undefined";
    return {op_violations + rnd.load() + bench_violations == 0, out.str()};
}

Outcome join_theorem() {
    std::mt19937_64 rng(kSeed);
    const qz::testing::FormShape shape{3, 2.0, true, 0.6};
    long escapes = 0;
    long checked = 0;
    std::uint64_t worst_ulp = 0;
    for (int pair = 0; pair < 200; ++pair) {
        qz::NoiseRegistry reg(3);
        qz::DomainOptions options;
        options.fp = true;
        qz::Domain<qz::QuadAlgebra> d(reg, options);
        qz::Domain<qz::QuadAlgebra>::State a;
        qz::Domain<qz::QuadAlgebra>::State b;
        for (const char* name : {"u", "v", "w"}) {
            a.bind(name, qz::testing::random_form(rng, shape));
            b.bind(name, qz::testing::random_form(rng, shape));
        }
        const auto j = d.join(a, b);
        for (int s = 0; s < 1000; ++s) {
            const auto t = qz::testing::random_assignment(rng, 3);
            for (const auto* side : {&a, &b}) {
                for (const auto& [name, value] : side->entries()) {
                    const Interval box = qz::concretize_mt(j.project(name).value());
                    ++checked;
                    escapes += qz::testing::encloses(box, qz::eval(value.value(), t)) ? 0 : 1;
                }
            }
        }
        // Minkowski decomposition per component
        for (const auto& [name, value] : a.entries()) {
            qz::NoiseRegistry r2(3);
            const auto fj = qz::join_forms(value.value(), b.project(name).value(), qz::concretize_mt, r2, false);
            const Interval box = qz::concretize_mt(fj.form);
            const Interval sum = qz::concretize_mt(fj.base) + fj.residual;
            worst_ulp = std::max({worst_ulp, ulp_distance(box.lo(), sum.lo()), ulp_distance(box.hi(), sum.hi())});
        }
    }
    return {escapes == 0 && worst_ulp <= kUlpSlack, std::to_string(checked) + " sampled points, " +
                                                        std::to_string(escapes) + " outside the join box; worst " +
                                                        "Minkowski gap " + std::to_string(worst_ulp) + " ulp"};
}

Outcome abstraction_property() {
    std::mt19937_64 rng(kSeed);
    std::uint64_t worst = 0;
    int misses = 0;
    for (int k = 0; k < 1000; ++k) {
        const double c = qz::testing::uniform(rng, -1e3, 1e3);
        const double w = std::ldexp(qz::testing::uniform(rng, 0.0, 1.0), static_cast<int>(rng() % 40) - 20);
        const Interval i(c - w, c + w);
        qz::NoiseRegistry reg;
        const Interval g = qz::concretize_mt(qz::abstract_interval(i, reg));
        misses += g.contains(i) ? 0 : 1;
        // slack in ulps of the interval's magnitude: a midpoint-radius pair
        // cannot place an endpoint near zero closer than the radius rounding
        const double unit = qz::ulp(std::max(std::abs(i.lo()), std::abs(i.hi())));
        const double slack = std::max(i.lo() - g.lo(), g.hi() - i.hi());
        worst = std::max(worst, static_cast<std::uint64_t>(std::ceil(slack / unit)));
    }
    return {misses == 0 && worst <= kUlpSlack, "1000 intervals, " + std::to_string(misses) +
                                                   " not enclosed, worst slack " + std::to_string(worst) +
                                                   " ulp of max(|lo|, |hi|)"};
}

Outcome fp_accounting() {
    std::string src = "s = 0;\n";
    for (int i = 0; i < 10000; ++i) {
        src += "s = s + 0.1;\n";
    }
    const auto r = qz::analyze_source(src, config(DomainKind::Quad, Conc::Mt, true));
    const auto box = r.find("s")->range;
    using qz::Rational;
    const Rational decimal_sum = Rational(10000) * qz::decimal_rational("0.1");
    const Rational binary_sum = Rational(10000) * Rational(0.1);
    double float_sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        float_sum += 0.1;
    }
    const double envelope = 1e4 * std::ldexp(1.0, -50);
    const bool ok = qz::encloses(box, decimal_sum) && qz::encloses(box, binary_sum) && box.width() <= envelope;
    return {ok, "box [" + fmt17(box.lo()) + ", " + fmt17(box.hi()) + "], width " + fmt(box.width()) + " (envelope " + fmt(envelope) +
                    "); exact sums inside; binary64 loop result " + fmt17(float_sum) +
                    (qz::encloses(box, float_sum) ? " inside" : " outside (real semantics, not reported)")};
}

Outcome figure_claims() {
    bench::BenchConfig cfg;
    cfg.concs = {Conc::Mt, Conc::Sdp};
    cfg.mc_samples = 1000;
    const auto hh = bench::run_householder(cfg);
    const auto st = bench::run_stolfi(cfg);
    auto width = [](const std::vector<bench::BenchRow>& rows, DomainKind d, Conc c, int p) {
        for (const auto& r : rows) {
            if (r.domain == d && r.conc == c && r.param == p) {
                return r.width;
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    std::ostringstream out;
    bool ok = true;

    const double q5 = width(hh, DomainKind::Quad, Conc::Mt, 5);
    const double qs5 = width(hh, DomainKind::Quad, Conc::Sdp, 5);
    const double a5 = width(hh, DomainKind::Affine, Conc::Mt, 5);
    const double i5 = width(hh, DomainKind::Interval, Conc::Mt, 5);
    const bool order = q5 <= a5 && qs5 <= a5 && a5 <= i5;
    ok = ok && order;
    out << "householder depth 5 widths quad " << fmt(q5) << " / quad-sdp " << fmt(qs5) << " / affine " << fmt(a5)
        << " / interval " << fmt(i5) << (order ? " ordered" : " NOT ordered");

    const double lo_lim = 1 / std::sqrt(20.0);
    const double hi_lim = 0.25;
    std::vector<int> missing;
    int iterates_escaped = 0;
    for (const auto& r : hh) {
        iterates_escaped += r.mc_violations;
        if (!(r.lo <= lo_lim && hi_lim <= r.hi) && std::find(missing.begin(), missing.end(), r.param) == missing.end()) {
            missing.push_back(r.param);
        }
    }
    std::sort(missing.begin(), missing.end());
    ok = ok && missing.empty();
    out << "; 1/sqrt(A) range [" << fmt(lo_lim) << ", 0.25] outside the box at depths {";
    for (std::size_t k = 0; k < missing.size(); ++k) {
        out << (k ? "," : "") << missing[k];
    }
    out << "} (the iterates themselves: " << iterates_escaped << " Monte-Carlo escapes)";

    bool mono = true;
    for (const auto& [d, c] : bench::combos(cfg)) {
        mono = mono && width(st, d, c, 14) <= width(st, d, c, 1);
    }
    ok = ok && mono;
    out << "; stolfi width(14) <= width(1) " << (mono ? "for every domain" : "VIOLATED");

    for (Conc c : {Conc::Mt, Conc::Sdp}) {
        std::vector<int> worse;
        for (int p = 1; p <= cfg.stolfi_max_partitions; ++p) {
            if (width(st, DomainKind::Quad, c, p) > width(st, DomainKind::Interval, Conc::Mt, p)) {
                worse.push_back(p);
            }
        }
        ok = ok && worse.empty();
        out << "; stolfi quad-" << qz::to_string(c) << " wider than interval at partitions {";
        for (std::size_t k = 0; k < worse.size(); ++k) {
            out << (k ? "," : "") << worse[k];
        }
        out << "}";
    }
    return {ok, out.str()};
}

Outcome sdp_witness() {
    const QuadraticForm q = qz::parse_form("e1 - e1*e1");
    const Interval s = qz::sdp::gamma_sdp(q);
    const Interval mt = qz::concretize_mt(q);
    return {s.hi() <= 0.26 && mt.hi() == 1.0 && s.hi() >= 0.25,
            "sdp hi " + fmt(s.hi()) + ", mt hi " + fmt(mt.hi()) + ", optimum 0.25"};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "guard example x + 1 >= 0 (quad, sdp)", 1.0,
         "the literal program starts from an interval, so x <= 0 is known and the exact result is "
         "-0.5 + 0.5e with box [-1, 0]; the stated box needs the quadratic two-variable state",
         guard_example},
        {2, "gamma_sdp(e1 - e2 - e1^2) = [-3, 1.25]", 1.0, "", sdp_reproduction},
        {3, "MT <= SDP <= sampled range on 200 random forms", 120.0, "", bounds_theorem},
        {4, "Monte-Carlo soundness suite", 300.0, "", soundness_suite},
        {5, "join soundness and Minkowski decomposition", 60.0, "", join_theorem},
        {6, "gamma_MT(alpha(I)) encloses I within 4 ulp", 10.0, "", abstraction_property},
        {7, "floating-point accounting for 10^4 additions of 0.1", 10.0, "", fp_accounting},
        {8, "householder and stolfi figure claims", 120.0,
         "the box at depth d encloses the d-th iterate, which for d <= 3 has not reached [0.2236, 0.25] "
         "(depth 0 is the point 0.0625); on stolfi, the zonotope quotient loses the sign of sqrt and is "
         "wider than plain intervals at some partition counts",
         figure_claims},
        {9, "hi(gamma_sdp(e1 - e1^2)) <= 0.26 with B_MT = 1", 1.0, "", sdp_witness},
    };

    int unexpected = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        std::string status = pass ? "PASS" : (c.expected_red.empty() || !in_time ? "FAIL" : "FAIL [expected-red]");
        if (!pass && status == "FAIL") {
            ++unexpected;
        }
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2f s of %.0f s", secs, c.budget_s);
        std::cout << status << "  " << c.id << ". " << c.name << " (" << timing << ")\n      " << o.detail << "\n";
        if (!pass && !c.expected_red.empty()) {
            std::cout << "      why: " << c.expected_red << "\n";
        }
    }
    std::cout << (unexpected == 0 ? "acceptance: ok" : "acceptance: " + std::to_string(unexpected) + " failing")
              << "\n";
    return unexpected == 0 ? 0 : 1;
}
