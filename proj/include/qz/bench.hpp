// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qz/analyzer.hpp"
#include "qz/ast.hpp"
#include "qz/interval.hpp"

namespace qz::bench {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

/// Arctan polynomial program over `x = [lo, hi]`, with the eight constants
/// written out and powers expanded into products.
std::string gen_arctan(double lo = 1.0, double hi = 10.0);

/// sqrt(x^2 + x - 1/2) / sqrt(x^2 + 1/2) on one cell.
lang::Program stolfi_program(double lo, double hi);
/// Householder iteration for 1/sqrt(A) unrolled `depth` times.
std::string householder_source(int depth, double a_lo = 16.0, double a_hi = 20.0);

struct RandomProgramShape {
    int max_vars = 4;
    int max_depth = 4;
    int statements = 4;
};

/// Straight-line program over + - * with interval-literal inputs.
std::string random_program(std::uint64_t seed, const RandomProgramShape& shape = {});

struct BenchConfig {
    std::vector<DomainKind> domains{DomainKind::Interval, DomainKind::Affine, DomainKind::Quad};
    std::vector<Conc> concs{Conc::Mt};
    bool fp = true;
    std::uint64_t seed = kDefaultSeed;
    int mc_samples = 10000;
    double stolfi_lo = -2.0;
    double stolfi_hi = 2.0;
    int stolfi_max_partitions = 14;
    std::vector<int> householder_depths{0, 1, 2, 3, 4, 5, 6, 7, 8};
    double arctan_lo = 1.0;
    double arctan_hi = 10.0;
    unsigned threads = 0; // 0: hardware concurrency
};

struct BenchRow {
    std::string bench;
    DomainKind domain = DomainKind::Quad;
    Conc conc = Conc::Mt;
    int param = 0;
    std::string var;
    double lo = 0.0;
    double hi = 0.0;
    double width = 0.0;
    double ms = 0.0;
    bool unreachable = false;
    // Monte-Carlo check against long double execution of the same program.
    int mc_runs = 0;
    int mc_violations = 0;
    int mc_binary64_escapes = 0; // reported only; not a soundness contract
    std::vector<std::string> warnings;
};

/// (domain, conc) pairs to run; sdp only pairs with quad.
std::vector<std::pair<DomainKind, Conc>> combos(const BenchConfig& cfg);

std::vector<BenchRow> run_stolfi(const BenchConfig& cfg);
std::vector<BenchRow> run_householder(const BenchConfig& cfg);
std::vector<BenchRow> run_arctan(const BenchConfig& cfg);
/// "arctan", "stolfi", "householder" or "all". Throws std::invalid_argument.
std::vector<BenchRow> run_named(const std::string& name, const BenchConfig& cfg);

/// Rows sorted by (bench, domain, conc, param, var).
void sort_rows(std::vector<BenchRow>& rows);

std::string emit_csv(const std::vector<BenchRow>& rows);
std::string emit_md(const std::vector<BenchRow>& rows);
/// One block per (domain, conc) of "param width" lines, blocks separated by
/// two blank lines; one string per bench, keyed by bench name.
std::vector<std::pair<std::string, std::string>> emit_plotdata(const std::vector<BenchRow>& rows);

struct McReport {
    int runs = 0;          // samples that reached the end
    int skipped = 0;       // blocked, undefined or diverged samples
    int violations = 0;    // points outside the box under the reference arithmetic
    int binary64_escapes = 0;
};

enum class Reference { Exact, LongDouble };

/// Samples the program's interval literals, executes it concretely and
/// counts final values outside the analysis box. Exact execution needs a
/// program without sqrt.
McReport mc_soundness(const lang::Program& p, const AnalysisResult& r, int samples, std::uint64_t seed,
                      Reference ref);

/// Runs f(i) for i in [0, n) on a pool of worker threads.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f);

} // namespace qz::bench
