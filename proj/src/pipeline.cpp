#include "heapinv/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "heapinv/typecheck.hpp"

namespace heapinv {

const char* to_string(EquisafeOutcome::Status s) {
    switch (s) {
    case EquisafeOutcome::Status::Agree: return "agree";
    case EquisafeOutcome::Status::Disagree: return "disagree";
    case EquisafeOutcome::Status::PreconditionViolation: return "precondition-violation";
    }
    return "?";
}

EquisafeOutcome run_equisafe(const ast::Program& p, const EquisafeOptions& opts) {
    const auto& cfg = opts.config;
    const auto& D = opts.domain;
    EquisafeOutcome out;

    bool fun = cfg.base == EncodingBase::RWfun || cfg.base == EncodingBase::RWmem;
    if (fun && !(cfg.base == EncodingBase::RWfun && opts.assume_memsafe))
        out.memory = check_memory_safety(p, D, cfg.fun_alloc_write);
    if (cfg.base == EncodingBase::RWfun && out.memory && !out.memory->memory_safe) {
        out.status = EquisafeOutcome::Status::PreconditionViolation;
        return out;
    }

    if (cfg.base == EncodingBase::N) {
        out.encoded = encode(p, cfg);
    } else {
        out.encoded = encode(enc_n(p), cfg);
    }
    auto report = check_equisafety(p, out.encoded.program, D);

    bool plain_r = cfg.base == EncodingBase::R && !cfg.tagging && !cfg.caching && cfg.drop_args.empty() &&
                   cfg.scope_vars.empty();
    if (plain_r) {
        const auto& n = out.encoded.names;
        report.cosim = cosimulate(out.encoded.source, out.encoded.program, D, {n.last, n.cnt_alloc, n.last_addr});
    }

    if (cfg.base == EncodingBase::RWmem)
        out.expected_unsafe = out.memory->invalid_access || (!cfg.strip_asserts && report.original.unsafe());
    else
        out.expected_unsafe = report.original.unsafe();

    bool agree = report.encoded.unsafe() == out.expected_unsafe && (!report.cosim || report.cosim->ok());
    out.status = agree ? EquisafeOutcome::Status::Agree : EquisafeOutcome::Status::Disagree;
    out.report = std::move(report);
    return out;
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ast::Program load_program_file(const std::filesystem::path& file) { return load_program(read_file(file)); }

std::vector<CorpusEntry> load_manifest(const std::filesystem::path& dir) {
    auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
    std::vector<CorpusEntry> out;
    for (const auto& e : j.at("entries")) {
        CorpusEntry c;
        c.name = e.at("name").get<std::string>();
        c.file = dir / e.at("file").get<std::string>();
        auto label = e.at("expected").get<std::string>();
        if (label != "Safe" && label != "Unsafe") throw std::runtime_error("bad label for " + c.name);
        c.expected_unsafe = label == "Unsafe";
        c.memory_safe = e.value("memorySafe", true);
        c.invalid_access = e.value("invalidAccess", false);
        if (e.contains("scopeVars")) c.scope_vars = e.at("scopeVars").get<std::vector<std::string>>();
        c.note = e.value("note", "");
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

}  // namespace heapinv
