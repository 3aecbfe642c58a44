#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heapinv/encode.hpp"
#include "heapinv/fixpoint.hpp"

namespace heapinv {

struct EquisafeOptions {
    EncodingConfig config;
    InputDomain domain;
    bool assume_memsafe = false;
};

struct EquisafeOutcome {
    enum class Status { Agree, Disagree, PreconditionViolation } status = Status::Agree;
    EncodedProgram encoded;  // encoding of Enc_n(p); for base N just Enc_n(p)
    std::optional<EquisafetyReport> report;
    std::optional<MemorySafetyReport> memory;
    // what the encoded verdict's Unsafe-ness is compared with: the original's,
    // or for rwmem the presence of invalid accesses (plus the original's asserts
    // unless they were stripped)
    bool expected_unsafe = false;
};

const char* to_string(EquisafeOutcome::Status s);

// Bounded equi-safety of p and its encoding. Co-simulation runs for plain R.
EquisafeOutcome run_equisafe(const ast::Program& p, const EquisafeOptions& opts);

struct CorpusEntry {
    std::string name;
    std::filesystem::path file;
    bool expected_unsafe = false;
    bool memory_safe = true;
    bool invalid_access = false;
    std::vector<std::string> scope_vars;
    std::string note;
};

std::vector<CorpusEntry> load_manifest(const std::filesystem::path& dir);
ast::Program load_program_file(const std::filesystem::path& file);
std::string read_file(const std::filesystem::path& file);

}  // namespace heapinv
