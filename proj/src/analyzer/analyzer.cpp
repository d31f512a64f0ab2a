// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <charconv>
#include <cmath>
#include <type_traits>

#include "json.hpp"
#include "qz/analyzer.hpp"
#include "qz/form_text.hpp"
#include "qz/parser.hpp"

namespace qz {

void validate(const AnalysisConfig& cfg) {
    if (cfg.conc == Conc::Sdp && cfg.domain != DomainKind::Quad) {
        throw ConfigError("the sdp concretization needs the quad domain");
    }
    if (cfg.unroll < 1) {
        throw ConfigError("unroll bound must be at least 1");
    }
    if (cfg.backward_passes < 1) {
        throw ConfigError("backward passes must be at least 1");
    }
}

const VarResult* AnalysisResult::find(std::string_view name) const {
    for (const VarResult& v : vars) {
        if (v.name == name) {
            return &v;
        }
    }
    return nullptr;
}

namespace {

std::string headline(const lang::Stmt& s) {
    switch (s.kind) {
    case lang::StmtKind::Assign:
        return s.target + " = " + lang::to_source(*s.expr);
    case lang::StmtKind::Assume:
        return "assume(" + lang::to_source(s.cond) + ")";
    case lang::StmtKind::If:
        return "if (" + lang::to_source(s.cond) + ")";
    case lang::StmtKind::While:
        return "while (" + lang::to_source(s.cond) + ")";
    }
    return "";
}

void assigned(const lang::Block& b, std::vector<std::string>& out) {
    for (const lang::StmtPtr& s : b) {
        if (s->kind == lang::StmtKind::Assign && std::find(out.begin(), out.end(), s->target) == out.end()) {
            out.push_back(s->target);
        }
        assigned(s->then_block, out);
        assigned(s->else_block, out);
    }
}

std::string where(lang::SourcePos pos) { return std::to_string(pos.line) + ":" + std::to_string(pos.col); }

template <class A>
class Interpreter {
  public:
    using D = Domain<A>;
    using State = typename D::State;

    Interpreter(NoiseRegistry& reg, const AnalysisConfig& cfg)
        : cfg_(cfg), dom_(reg, DomainOptions{cfg.fp, cfg.conc, cfg.sdp, cfg.backward_passes}) {}

    AnalysisResult run(const lang::Program& p) {
        const State out = exec(p.body, State{});
        AnalysisResult r;
        r.config = cfg_;
        r.unreachable = out.unreachable();
        for (const auto& [name, v] : out.entries()) {
            VarResult vr{name, dom_.range(v), v.is_top(), std::nullopt};
            if constexpr (std::is_same_v<typename A::Value, QuadraticForm>) {
                if (v.is_value()) {
                    vr.form = v.value();
                }
            }
            r.vars.push_back(std::move(vr));
        }
        r.warnings = dom_.warnings();
        r.trace = std::move(trace_);
        return r;
    }

  private:
    State exec(const lang::Block& b, State s) {
        for (const lang::StmtPtr& st : b) {
            s = exec(*st, std::move(s));
            if (cfg_.trace) {
                const Box box = dom_.box(s);
                trace_.push_back({st->pos, headline(*st), box.unreachable, box.vars});
            }
        }
        return s;
    }

    State exec(const lang::Stmt& st, State s) {
        switch (st.kind) {
        case lang::StmtKind::Assign:
            return dom_.assign(std::move(s), st.target, *st.expr);
        case lang::StmtKind::Assume:
            return dom_.guard(s, st.cond);
        case lang::StmtKind::If: {
            const State t = exec(st.then_block, dom_.guard(s, st.cond));
            const State e = exec(st.else_block, dom_.guard(s, lang::negate(st.cond)));
            return dom_.join(t, e);
        }
        case lang::StmtKind::While:
            return loop(st, std::move(s));
        }
        return s;
    }

    // Bounded unrolling. acc joins every state reaching the loop head; the
    // exit condition is applied to it once the iterates stop growing, the
    // body becomes unreachable, or the bound is hit.
    State loop(const lang::Stmt& st, State s) {
        const lang::RelExpr exit = lang::negate(st.cond);
        State acc = s;
        State iter = std::move(s);
        for (int k = 0; k < cfg_.unroll; ++k) {
            const State in = dom_.guard(iter, st.cond);
            if (in.unreachable()) {
                return dom_.guard(acc, exit);
            }
            iter = exec(st.then_block, in);
            const Box before = dom_.box(acc);
            if (box_leq(dom_.box(iter), before)) {
                return dom_.guard(dom_.join(acc, iter), exit);
            }
            acc = dom_.join(acc, iter);
        }
        // Later iterations are unknown: everything the body writes is lost.
        dom_.note("loop at " + where(st.pos) + " did not stabilize within " + std::to_string(cfg_.unroll) +
                  " unrollings; variables assigned in its body are set to Top");
        std::vector<std::string> written;
        assigned(st.then_block, written);
        for (const std::string& name : written) {
            if (acc.find(name) != nullptr) {
                acc.bind(name, D::Value::top());
            }
        }
        return dom_.guard(acc, exit);
    }

    AnalysisConfig cfg_;
    D dom_;
    std::vector<TraceEntry> trace_;
};

} // namespace

AnalysisResult analyze(const lang::Program& p, const AnalysisConfig& cfg) {
    validate(cfg);
    lang::check_definite_assignment(p);
    NoiseRegistry reg;
    switch (cfg.domain) {
    case DomainKind::Interval:
        return Interpreter<IntervalAlgebra>(reg, cfg).run(p);
    case DomainKind::Affine:
        return Interpreter<AffineAlgebra>(reg, cfg).run(p);
    case DomainKind::Quad:
        return Interpreter<QuadAlgebra>(reg, cfg).run(p);
    }
    throw ConfigError("unknown domain");
}

AnalysisResult analyze_source(std::string_view source, const AnalysisConfig& cfg) {
    return analyze(lang::parse_program(source), cfg);
}

namespace {

std::string shortest(double v) {
    if (std::isinf(v)) {
        return v < 0 ? "-inf" : "inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

nlohmann::ordered_json bound_json(double v) {
    if (std::isinf(v)) {
        return nullptr;
    }
    return v;
}

} // namespace

std::string report_text(const AnalysisResult& r) {
    std::string out;
    if (r.unreachable) {
        out += "unreachable: no execution reaches the end of the program\n";
    } else {
        std::size_t width = 0;
        for (const VarResult& v : r.vars) {
            width = std::max(width, v.name.size());
        }
        for (const VarResult& v : r.vars) {
            out += v.name + std::string(width - v.name.size(), ' ') + " ∈ [" + shortest(v.range.lo()) + ", " +
                   shortest(v.range.hi()) + "]";
            if (v.top) {
                out += " (top)";
            }
            out += "\n";
        }
    }
    for (const TraceEntry& t : r.trace) {
        out += "trace " + where(t.pos) + " " + t.statement + (t.unreachable ? " : unreachable" : " :");
        for (const auto& [name, iv] : t.box) {
            out += " " + name + "=[" + shortest(iv.lo()) + ", " + shortest(iv.hi()) + "]";
        }
        out += "\n";
    }
    for (const std::string& w : r.warnings) {
        out += "warning: " + w + "\n";
    }
    return out;
}

std::string report_json(const AnalysisResult& r) {
    nlohmann::ordered_json j;
    j["config"] = {{"domain", to_string(r.config.domain)},
                   {"conc", to_string(r.config.conc)},
                   {"fp", r.config.fp},
                   {"unroll", r.config.unroll},
                   {"backward_passes", r.config.backward_passes}};
    j["unreachable"] = r.unreachable;
    j["vars"] = nlohmann::ordered_json::object();
    nlohmann::ordered_json forms = nlohmann::ordered_json::object();
    if (!r.unreachable) {
        for (const VarResult& v : r.vars) {
            j["vars"][v.name] = {bound_json(v.range.lo()), bound_json(v.range.hi())};
            if (v.form) {
                forms[v.name] = to_string(*v.form);
            }
        }
    }
    if (!forms.empty()) {
        j["forms"] = std::move(forms);
    }
    j["warnings"] = r.warnings;
    if (!r.trace.empty()) {
        nlohmann::ordered_json trace = nlohmann::ordered_json::array();
        for (const TraceEntry& t : r.trace) {
            nlohmann::ordered_json box = nlohmann::ordered_json::object();
            for (const auto& [name, iv] : t.box) {
                box[name] = {bound_json(iv.lo()), bound_json(iv.hi())};
            }
            trace.push_back({{"line", t.pos.line},
                             {"col", t.pos.col},
                             {"stmt", t.statement},
                             {"unreachable", t.unreachable},
                             {"box", std::move(box)}});
        }
        j["trace"] = std::move(trace);
    }
    return j.dump(2) + "\n";
}

} // namespace qz
