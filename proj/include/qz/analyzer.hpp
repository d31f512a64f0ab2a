// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qz/ast.hpp"
#include "qz/domain.hpp"
#include "qz/quadratic_form.hpp"

namespace qz {

/// Invalid analysis settings (e.g. SDP concretization outside the quad domain).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct AnalysisConfig {
    DomainKind domain = DomainKind::Quad;
    Conc conc = Conc::Mt;
    bool fp = false;
    int unroll = 50;
    int backward_passes = 1;
    bool trace = false;
    sdp::SdpOptions sdp;
};

/// Throws ConfigError.
void validate(const AnalysisConfig& cfg);

struct VarResult {
    std::string name;
    ExtInterval range;
    bool top = false;
    std::optional<QuadraticForm> form; // affine and quad domains
};

struct TraceEntry {
    lang::SourcePos pos;
    std::string statement;
    bool unreachable = false;
    std::vector<std::pair<std::string, ExtInterval>> box;
};

struct AnalysisResult {
    AnalysisConfig config;
    bool unreachable = false;
    std::vector<VarResult> vars; // insertion order
    std::vector<std::string> warnings;
    std::vector<TraceEntry> trace;

    [[nodiscard]] const VarResult* find(std::string_view name) const;
};

/// Abstract execution of a program. Runs the definite-assignment check
/// first (throws lang::SyntaxError) and validates the configuration.
AnalysisResult analyze(const lang::Program& p, const AnalysisConfig& cfg);
AnalysisResult analyze_source(std::string_view source, const AnalysisConfig& cfg);

std::string report_text(const AnalysisResult& r);
/// {"config": {...}, "unreachable": b, "vars": {name: [lo, hi]}, "forms": {...},
/// "warnings": [...]}; unbounded ends are null.
std::string report_json(const AnalysisResult& r);

} // namespace qz
