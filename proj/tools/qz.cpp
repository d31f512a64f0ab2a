// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
//
// qz analyze | bounds | bench

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qz/analyzer.hpp"
#include "qz/bench.hpp"
#include "qz/form_text.hpp"
#include "qz/parser.hpp"
#include "qz/sdp.hpp"

namespace {

enum Exit : int { kOk = 0, kParse = 1, kConfig = 2, kInternal = 3 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw qz::ConfigError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

qz::DomainKind domain_of(const std::string& s) {
    if (auto d = qz::parse_domain_kind(s)) {
        return *d;
    }
    throw qz::ConfigError("unknown domain '" + s + "'");
}

qz::Conc conc_of(const std::string& s) {
    if (auto c = qz::parse_conc(s)) {
        return *c;
    }
    throw qz::ConfigError("unknown concretization '" + s + "'");
}

std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct AnalyzeArgs {
    std::string file;
    std::string domain = "quad";
    std::string conc = "mt";
    bool fp = false;
    int unroll = 50;
    int passes = 1;
    bool trace = false;
    std::string format = "text";
};

int run_analyze(const AnalyzeArgs& a) {
    qz::AnalysisConfig cfg;
    cfg.domain = domain_of(a.domain);
    cfg.conc = conc_of(a.conc);
    cfg.fp = a.fp;
    cfg.unroll = a.unroll;
    cfg.backward_passes = a.passes;
    cfg.trace = a.trace;
    qz::validate(cfg);
    const std::string source = read_file(a.file);
    try {
        const qz::AnalysisResult r = qz::analyze_source(source, cfg);
        std::cout << (a.format == "json" ? qz::report_json(r) : qz::report_text(r));
    } catch (const qz::lang::SyntaxError& e) {
        std::cerr << a.file << ":" << e.what() << "\n";
        return kParse;
    }
    return kOk;
}

struct BoundsArgs {
    std::string form;
    std::string method = "mt";
};

int run_bounds(const BoundsArgs& a) {
    qz::QuadraticForm q;
    try {
        q = qz::parse_form(a.form);
    } catch (const qz::FormSyntaxError& e) {
        std::cerr << "form: " << e.what() << "\n";
        return kParse;
    }
    qz::Interval r;
    if (a.method == "mt") {
        r = qz::concretize_mt(q);
    } else if (a.method == "sdp") {
        r = qz::sdp::gamma_sdp(q);
    } else {
        r = qz::sdp::grid_oracle(q);
    }
    std::cout << g12(r.lo()) << " " << g12(r.hi()) << "\n";
    return kOk;
}

struct BenchArgs {
    std::string name;
    std::string domains = "interval,affine,quad";
    std::string conc = "mt";
    std::string csv;
    std::string md;
    std::string plotdata;
    std::uint64_t seed = qz::bench::kDefaultSeed;
    int samples = 10000;
    std::vector<double> stolfi_range{-2.0, 2.0};
    std::vector<double> arctan_range{1.0, 10.0};
    int partitions = 14;
    int max_depth = 8;
    unsigned threads = 0;
    bool binary_exact = false;
};

int run_bench(const BenchArgs& a) {
    qz::bench::BenchConfig cfg;
    cfg.domains.clear();
    for (const std::string& d : split(a.domains)) {
        cfg.domains.push_back(domain_of(d));
    }
    cfg.concs.clear();
    for (const std::string& c : split(a.conc)) {
        cfg.concs.push_back(conc_of(c));
    }
    if (cfg.domains.empty() || cfg.concs.empty() || qz::bench::combos(cfg).empty()) {
        throw qz::ConfigError("no runnable domain/concretization pair (sdp needs quad)");
    }
    if (a.stolfi_range[0] > a.stolfi_range[1] || a.arctan_range[0] > a.arctan_range[1]) {
        throw qz::ConfigError("empty input range");
    }
    cfg.fp = !a.binary_exact;
    cfg.seed = a.seed;
    cfg.mc_samples = a.samples;
    cfg.stolfi_lo = a.stolfi_range[0];
    cfg.stolfi_hi = a.stolfi_range[1];
    cfg.arctan_lo = a.arctan_range[0];
    cfg.arctan_hi = a.arctan_range[1];
    cfg.stolfi_max_partitions = a.partitions;
    cfg.householder_depths.clear();
    for (int d = 0; d <= a.max_depth; ++d) {
        cfg.householder_depths.push_back(d);
    }
    cfg.threads = a.threads;

    const std::vector<qz::bench::BenchRow> rows = qz::bench::run_named(a.name, cfg);
    if (!a.csv.empty()) {
        write_file(a.csv, qz::bench::emit_csv(rows));
    }
    if (!a.md.empty()) {
        write_file(a.md, qz::bench::emit_md(rows));
    }
    if (!a.plotdata.empty()) {
        std::filesystem::create_directories(a.plotdata);
        for (const auto& [bench, text] : qz::bench::emit_plotdata(rows)) {
            write_file(std::filesystem::path(a.plotdata) / (bench + ".dat"), text);
        }
        const nlohmann::ordered_json meta = {{"seed", cfg.seed},
                                             {"mc_samples", cfg.mc_samples},
                                             {"fp", cfg.fp},
                                             {"stolfi_range", {cfg.stolfi_lo, cfg.stolfi_hi}},
                                             {"stolfi_max_partitions", cfg.stolfi_max_partitions},
                                             {"householder_a", {16, 20}},
                                             {"householder_max_depth", a.max_depth},
                                             {"arctan_range", {cfg.arctan_lo, cfg.arctan_hi}}};
        write_file(std::filesystem::path(a.plotdata) / "meta.json", meta.dump(2) + "\n");
    }
    if (a.csv.empty() && a.md.empty()) {
        std::cout << qz::bench::emit_md(rows);
    }
    int violations = 0;
    for (const auto& r : rows) {
        violations += r.mc_violations;
    }
    std::cerr << "# seed " << cfg.seed << ", stolfi range [" << cfg.stolfi_lo << ", " << cfg.stolfi_hi
              << "], arctan range [" << cfg.arctan_lo << ", " << cfg.arctan_hi << "], " << rows.size()
              << " rows, " << violations << " Monte-Carlo violations\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qz: range analysis with quadratic zonotopes"};
    app.require_subcommand(1);

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Analyze a program");
    analyze->add_option("file", aa.file, "Source file")->required();
    analyze->add_option("--domain", aa.domain, "interval|affine|quad")
        ->check(CLI::IsMember({"interval", "affine", "quad"}));
    analyze->add_option("--conc", aa.conc, "mt|sdp")->check(CLI::IsMember({"mt", "sdp"}));
    analyze->add_flag("--fp", aa.fp, "Account for binary64 rounding");
    analyze->add_option("--unroll", aa.unroll, "Loop unrolling bound");
    analyze->add_option("--backward-passes", aa.passes, "Guard refinement passes");
    analyze->add_flag("--trace", aa.trace, "Print the box after every statement");
    analyze->add_option("--format", aa.format, "text|json")->check(CLI::IsMember({"text", "json"}));

    BoundsArgs ba;
    auto* bounds = app.add_subcommand("bounds", "Range of a quadratic form");
    bounds->add_option("--form", ba.form, "Form text, e.g. 'e1 - e2 - e1*e1'")->required();
    bounds->add_option("--method", ba.method, "mt|sdp|grid")->check(CLI::IsMember({"mt", "sdp", "grid"}));

    BenchArgs be;
    auto* bench = app.add_subcommand("bench", "Run the benchmarks");
    bench->add_option("name", be.name, "arctan|stolfi|householder|all")
        ->required()
        ->check(CLI::IsMember({"arctan", "stolfi", "householder", "all"}));
    bench->add_option("--domains", be.domains, "Comma-separated domains");
    bench->add_option("--conc", be.conc, "Comma-separated concretizations");
    bench->add_option("--csv", be.csv, "CSV output file");
    bench->add_option("--md", be.md, "Markdown table output file");
    bench->add_option("--plotdata", be.plotdata, "Directory for per-bench plot data");
    bench->add_option("--seed", be.seed, "Monte-Carlo seed");
    bench->add_option("--samples", be.samples, "Monte-Carlo samples per row")->check(CLI::NonNegativeNumber);
    bench->add_option("--stolfi-range", be.stolfi_range, "Stolfi input range lo hi")->expected(2);
    bench->add_option("--arctan-range", be.arctan_range, "Arctan input range lo hi")->expected(2);
    bench->add_option("--partitions", be.partitions, "Largest Stolfi partition count")->check(CLI::PositiveNumber);
    bench->add_option("--max-depth", be.max_depth, "Deepest Householder unrolling")->check(CLI::NonNegativeNumber);
    bench->add_option("--threads", be.threads, "Worker threads, 0 for all cores");
    bench->add_flag("--real", be.binary_exact, "Do not charge the analyzer's own rounding (idealized mode)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*analyze) {
            return run_analyze(aa);
        }
        if (*bounds) {
            return run_bounds(ba);
        }
        return run_bench(be);
    } catch (const qz::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}
