#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "heapinv/chc.hpp"
#include "heapinv/encode.hpp"
#include "heapinv/fixpoint.hpp"
#include "heapinv/pipeline.hpp"
#include "heapinv/report.hpp"
#include "heapinv/syntax.hpp"
#include "heapinv/typecheck.hpp"

namespace fs = std::filesystem;
using namespace heapinv;

namespace {

// exit codes
constexpr int kOk = 0;
constexpr int kNegative = 1;  // unsafe / disagree / unsat / corpus mismatch
constexpr int kToolError = 2;
constexpr int kPrecondition = 3;
constexpr int kUnknown = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainFlags {
    std::string in = "-3:3", seed = "0:255", last_addr = "0:6";
    std::uint64_t loop_fuel = 64, heap_fuel = 32;
    std::size_t iteration_cap = 0;

    void add(CLI::App* app) {
        app->add_option("--in-range", in, "input range lo:hi")->capture_default_str();
        app->add_option("--seed-range", seed, "seed range lo:hi")->capture_default_str();
        app->add_option("--last-addr-range", last_addr, "prophecy range lo:hi")->capture_default_str();
        app->add_option("--loop-fuel", loop_fuel)->capture_default_str();
        app->add_option("--heap-fuel", heap_fuel)->capture_default_str();
        app->add_option("--iteration-cap", iteration_cap, "0 = 10 * grid size");
    }

    static IntRange range(const std::string& s) {
        auto colon = s.find(':', 1);
        try {
            if (colon == std::string::npos) {
                auto v = std::stoll(s);
                return {v, v};
            }
            return {std::stoll(s.substr(0, colon)), std::stoll(s.substr(colon + 1))};
        } catch (const std::exception&) {
            throw UsageError("bad range '" + s + "'");
        }
    }

    InputDomain domain() const {
        InputDomain D;
        D.in = range(in);
        D.seed = range(seed);
        D.last_addr = range(last_addr);
        D.loop_fuel = loop_fuel;
        D.heap_op_fuel = heap_fuel;
        if (iteration_cap) D.iteration_cap = iteration_cap;
        try {
            D.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return D;
    }
};

struct EncodingFlags {
    std::string enc;
    bool tag = false, cache = false, native_havoc = false, fun_alloc_write = false, strip_asserts = false;
    bool bounded = false;
    std::string scope_vars, drop;

    void add(CLI::App* app, bool with_bounded) {
        app->add_option("--enc", enc, "n, r, rw, rwfun or rwmem");
        app->add_flag("--tag", tag, "tag predicates with statement locations");
        app->add_flag("--cache", cache, "one-element read cache");
        app->add_option("--scope-vars", scope_vars, "comma separated variables appended to R");
        app->add_option("--drop", drop, "argument removal, e.g. R:1,W:2 (0-based)");
        app->add_flag("--native-havoc", native_havoc, "emit x := nondet() instead of the seed macro");
        app->add_flag("--fun-alloc-write", fun_alloc_write, "rwfun/rwmem: alloc records the initial object");
        app->add_flag("--strip-asserts", strip_asserts, "rwmem: drop the program's own asserts");
        if (with_bounded) app->add_flag("--bounded", bounded, "apply the heap-operation bound before encoding");
    }

    bool any() const { return !enc.empty(); }

    EncodingConfig config() const {
        EncodingConfig c;
        try {
            c.base = parse_encoding_base(enc);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        c.tagging = tag;
        c.caching = cache;
        c.native_havoc = native_havoc;
        c.fun_alloc_write = fun_alloc_write;
        c.strip_asserts = strip_asserts;
        std::stringstream ss(scope_vars);
        for (std::string v; std::getline(ss, v, ',');)
            if (!v.empty()) c.scope_vars.push_back(v);
        if (!drop.empty()) c.drop_args = parse_drop_spec(drop);
        return c;
    }

    // encoder output, or p itself when no encoding was requested
    ast::Program apply(const ast::Program& p) const {
        if (!any()) return p;
        auto cfg = config();
        const ast::Program src = bounded && cfg.base != EncodingBase::N ? enc_n(p) : p;
        return encode(src, cfg).program;
    }
};

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

int check_rwfun_precondition(const ast::Program& p, const EncodingFlags& ef, bool assume_memsafe,
                             const InputDomain& D) {
    if (!ef.any() || assume_memsafe) return kOk;
    if (ef.config().base != EncodingBase::RWfun) return kOk;
    auto m = check_memory_safety(p, D, ef.fun_alloc_write);
    if (m.memory_safe) return kOk;
    std::cerr << "precondition violated: rwfun needs a memory-safe program";
    if (m.event) std::cerr << " (" << to_string(*m.event) << ")";
    std::cerr << "; pass --assume-memsafe to encode anyway\n";
    return kPrecondition;
}

// ---------------------------------------------------------------- encode
struct EncodeCmd {
    std::string file, output;
    EncodingFlags ef;
    DomainFlags df;
    bool assume_memsafe = false;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("encode", "rewrite a program into a heap-free encoding");
        c->add_option("file", file)->required();
        c->add_option("-o,--output", output, "output .up file (stdout by default)");
        ef.add(c, true);
        df.add(c);
        c->add_flag("--assume-memsafe", assume_memsafe, "skip the rwfun memory-safety check");
        c->callback([this] { code = run(); });
    }
    int code = kOk;

    int run() {
        if (!ef.any()) throw UsageError("encode needs --enc");
        auto p = load_program_file(file);
        if (int rc = check_rwfun_precondition(p, ef, assume_memsafe, df.domain()); rc != kOk) return rc;
        write_output(output, pretty_print(ef.apply(p)));
        return kOk;
    }
};

// ---------------------------------------------------------------- run
struct RunCmd {
    std::string file, interp = "none";
    long long in = 0, seed = 0, last_addr = 0;
    bool trace_heap = false, json_out = false, grid = false;
    EncodingFlags ef;
    DomainFlags df;
    int code = kOk;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("run", "evaluate a program on one input (or the whole grid)");
        c->add_option("file", file)->required();
        c->add_option("--in", in)->capture_default_str();
        c->add_option("--seed", seed)->capture_default_str();
        c->add_option("--last-addr", last_addr)->capture_default_str();
        c->add_option("--interp", interp, "none, fixpoint, or an interpretation file")->capture_default_str();
        c->add_flag("--trace-heap", trace_heap, "use the trace view of the heap");
        c->add_flag("--grid", grid, "run every point of the input domain and summarise");
        c->add_flag("--json", json_out, "JSON lines output");
        ef.add(c, true);
        df.add(c);
        c->callback([this] { code = run(); });
    }

    int run() {
        auto p = ef.apply(load_program_file(file));
        auto D = df.domain();
        Evaluator ev(p);

        std::unique_ptr<PredicateOracle> oracle;
        Interpretation istar;
        if (interp == "none") {
            oracle = std::make_unique<EmptyOracle>();
        } else if (interp == "fixpoint") {
            istar = least_fixpoint(p, D).interpretation;
            oracle = std::make_unique<BoundInterpretation>(p, istar);
        } else {
            std::string text = read_file(interp);
            try {
                oracle = std::make_unique<FormulaOracle>(p, parse_formula_file(text, p));
            } catch (const DiagnosticError& e) {
                std::cerr << e.render(interp);
                return kToolError;
            }
        }

        RunOptions opts = D.run_options();
        opts.trace_heap = trace_heap;

        auto one = [&](std::int64_t i, std::int64_t s, std::int64_t l) {
            return ev.run(ev.initial_stack(Integer(i), Integer(s), Integer(l), D.heap_op_fuel), *oracle, opts);
        };

        if (!grid) {
            auto r = one(in, seed, last_addr);
            if (json_out) {
                std::cout << run_json(p, r).dump() << "\n";
            } else {
                std::cout << "outcome: " << to_string(p, r.outcome) << "\n";
                std::cout << "heap length: " << r.heap_len << "\n";
                for (std::size_t k = 0; k < p.vars.size(); ++k)
                    std::cout << "  " << p.vars[k].name << " = " << to_string(p, r.stack[k]) << "\n";
            }
            return r.outcome.is_bot() ? kNegative : kOk;
        }

        std::size_t top = 0, bot = 0, undef = 0;
        for (auto i = D.in.lo; i <= D.in.hi; ++i)
            for (auto l = D.last_addr.lo; l <= D.last_addr.hi; ++l)
                for (auto s = D.seed.lo; s <= D.seed.hi; ++s) {
                    auto r = one(i, s, l);
                    top += r.outcome.is_top();
                    bot += r.outcome.is_bot();
                    undef += r.outcome.is_undefined();
                    if (json_out) {
                        json j = run_json(p, r);
                        j["point"] = to_json(p, GridPoint{i, s, l});
                        std::cout << j.dump() << "\n";
                    } else if (r.outcome.is_bot()) {
                        std::cout << "in=" << i << " seed=" << s << " lastAddr=" << l << ": "
                                  << to_string(p, r.outcome) << "\n";
                    }
                }
        if (!json_out)
            std::cout << "points " << D.grid_size() << ": top " << top << ", bot " << bot << ", undefined " << undef
                      << "\n";
        return bot ? kNegative : kOk;
    }
};

// ---------------------------------------------------------------- fixpoint
struct FixpointCmd {
    std::string file;
    bool json_out = false;
    EncodingFlags ef;
    DomainFlags df;
    int code = kOk;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("fixpoint", "bounded least fixpoint and safety verdict");
        c->add_option("file", file)->required();
        c->add_flag("--json", json_out);
        ef.add(c, true);
        df.add(c);
        c->callback([this] { code = run(); });
    }

    int run() {
        auto p = ef.apply(load_program_file(file));
        auto r = least_fixpoint(p, df.domain());
        auto v = verdict_from(r);
        if (json_out) {
            std::cout << fixpoint_json(p, r, v).dump(2) << "\n";
        } else {
            std::cout << "verdict: " << to_string(v.kind) << "\n";
            std::cout << "iterations: " << r.iterations << "\n";
            for (const auto& d : p.preds)
                std::cout << "|" << d.name << "| = " << r.interpretation.relation(d.name).size() << "\n";
            if (v.inconclusive_count) std::cout << "fuel-exhausted points: " << v.inconclusive_count << "\n";
            if (v.witness)
                std::cout << "witness: in=" << v.witness->point.in << " seed=" << v.witness->point.seed
                          << " lastAddr=" << v.witness->point.last_addr << " " << v.witness->pred
                          << to_string(p, v.witness->tuple) << "\n";
        }
        return v.unsafe() ? kNegative : kOk;
    }
};

// ---------------------------------------------------------------- equisafe
struct EquisafeCmd {
    std::string file;
    bool json_out = false, assume_memsafe = false;
    EncodingFlags ef;
    DomainFlags df;
    int code = kOk;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("equisafe", "compare bounded verdicts of a program and its encoding");
        c->add_option("file", file)->required();
        c->add_flag("--json", json_out);
        c->add_flag("--assume-memsafe", assume_memsafe, "skip the rwfun memory-safety check");
        ef.add(c, false);
        df.add(c);
        c->callback([this] { code = run(); });
    }

    int run() {
        if (!ef.any()) ef.enc = "r";
        auto p = load_program_file(file);
        EquisafeOptions o{ef.config(), df.domain(), assume_memsafe};
        auto res = run_equisafe(p, o);
        if (json_out) {
            std::cout << equisafe_json(p, res).dump(2) << "\n";
        } else {
            std::cout << "status: " << to_string(res.status) << "\n";
            if (res.memory && !res.memory->memory_safe)
                std::cout << "memory: " << (res.memory->event ? to_string(*res.memory->event) : "unsafe") << "\n";
            if (res.report) {
                std::cout << "original: " << to_string(res.report->original.kind) << "\n";
                std::cout << "encoded (" << to_string(o.config.base) << "): " << to_string(res.report->encoded.kind)
                          << "\n";
                if (res.report->cosim)
                    std::cout << "cosim: " << res.report->cosim->points_checked << " points, "
                              << res.report->cosim->violations << " violations\n";
            }
        }
        switch (res.status) {
        case EquisafeOutcome::Status::Agree: return kOk;
        case EquisafeOutcome::Status::Disagree: return kNegative;
        case EquisafeOutcome::Status::PreconditionViolation: return kPrecondition;
        }
        return kToolError;
    }
};

// ---------------------------------------------------------------- emit-chc / solve
struct EmitCmd {
    std::string file, output;
    bool flatten = false, assume_memsafe = false;
    EncodingFlags ef;
    DomainFlags df;
    int code = kOk;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("emit-chc", "translate a heap-free program (or its encoding) to SMT-LIB HORN");
        c->add_option("file", file)->required();
        c->add_option("-o,--output", output);
        c->add_flag("--flatten-objects", flatten, "objects as integer fields instead of datatypes");
        c->add_flag("--assume-memsafe", assume_memsafe);
        ef.add(c, true);
        df.add(c);
        c->callback([this] { code = run(); });
    }

    static std::string emit(const ast::Program& p, const EncodingFlags& ef, bool flatten) {
        EncodingFlags e = ef;
        e.native_havoc = true;
        return chc::emit_smtlib(chc::to_chc(e.apply(p), {flatten}));
    }

    int run() {
        auto p = load_program_file(file);
        if (int rc = check_rwfun_precondition(p, ef, assume_memsafe, df.domain()); rc != kOk) return rc;
        write_output(output, emit(p, ef, flatten));
        return kOk;
    }
};

struct SolveCmd {
    std::string file, solver;
    double timeout = 300;
    bool flatten = false;
    EncodingFlags ef;
    int code = kOk;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("solve", "run a Horn solver on a .smt2 file or an encoded .up program");
        c->add_option("file", file)->required();
        c->add_option("--solver", solver, "command template with {file}; default $HEAPINV_SOLVER or z3");
        c->add_option("--timeout", timeout, "seconds")->capture_default_str();
        c->add_flag("--flatten-objects", flatten);
        ef.add(c, true);
        c->callback([this] { code = run(); });
    }

    int run() {
        std::string cmd = solver.empty() ? chc::default_solver_command() : solver;
        std::string path = file;
        std::optional<fs::path> tmp;
        if (fs::path(file).extension() != ".smt2") {
            tmp = fs::temp_directory_path() / ("heapinv-" + std::to_string(::getpid()) + ".smt2");
            std::ofstream(*tmp) << EmitCmd::emit(load_program_file(file), ef, flatten);
            path = tmp->string();
        }
        auto r = chc::solve(path, cmd, timeout);
        if (tmp) fs::remove(*tmp);
        std::cout << chc::to_string(r.answer);
        if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
        std::cout << "\n";
        switch (r.answer) {
        case chc::SolverAnswer::Sat: return kOk;
        case chc::SolverAnswer::Unsat: return kNegative;
        case chc::SolverAnswer::Unknown: return kUnknown;
        case chc::SolverAnswer::ToolError: return kToolError;
        }
        return kToolError;
    }
};

// ---------------------------------------------------------------- corpus
struct CorpusCmd {
    std::string dir = HEAPINV_CORPUS_DIR, filter, subset = "all";
    bool json_out = false, use_scope = false;
    EncodingFlags ef;
    DomainFlags df;
    CLI::Option* filter_opt = nullptr;
    int code = kOk;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("corpus", "run the equi-safety pipeline over the bundled corpus");
        c->add_option("--dir", dir)->capture_default_str();
        filter_opt = c->add_option("--filter", filter, "substring of entry names");
        c->add_option("--subset", subset, "all, memsafe or memerror")->capture_default_str();
        c->add_flag("--scope", use_scope, "append each entry's scope variables to R");
        c->add_flag("--json", json_out);
        ef.add(c, false);
        df.add(c);
        c->callback([this] { code = run(); });
    }

    struct Row {
        CorpusEntry entry;
        std::string original, encoded, status, error;
        bool ok = true;
        json detail;
    };

    Row evaluate(const CorpusEntry& e, const EncodingConfig& base_cfg, const InputDomain& D) const {
        Row row{e, {}, {}, {}, {}, true, {}};
        try {
            auto p = load_program_file(e.file);
            EquisafeOptions o{base_cfg, D, false};
            if (use_scope && !e.scope_vars.empty()) o.config.scope_vars = e.scope_vars;
            auto res = run_equisafe(p, o);
            row.status = to_string(res.status);
            row.detail = equisafe_json(p, res);
            if (res.status == EquisafeOutcome::Status::PreconditionViolation) {
                // rwfun only claims agreement on memory-safe programs
                row.status = "skipped";
                row.ok = !e.memory_safe;
                auto v = check_safety(p, D);
                row.original = to_string(v.kind);
                row.ok = row.ok && v.unsafe() == e.expected_unsafe;
                return row;
            }
            row.original = to_string(res.report->original.kind);
            row.encoded = to_string(res.report->encoded.kind);
            bool label_ok = res.report->original.unsafe() == e.expected_unsafe;
            row.ok = label_ok && res.status == EquisafeOutcome::Status::Agree;
            if (!label_ok) row.status += " (label mismatch)";
        } catch (const std::exception& ex) {
            row.ok = false;
            row.status = "error";
            row.error = ex.what();
        }
        return row;
    }

    int run() {
        if (filter_opt->count() && filter.empty()) throw UsageError("--filter must not be empty");
        if (subset != "all" && subset != "memsafe" && subset != "memerror")
            throw UsageError("--subset must be all, memsafe or memerror");
        if (!ef.any()) ef.enc = "r";
        auto cfg = ef.config();
        auto D = df.domain();

        std::vector<CorpusEntry> entries;
        for (auto& e : load_manifest(dir)) {
            if (!filter.empty() && e.name.find(filter) == std::string::npos) continue;
            if (subset == "memsafe" && !e.memory_safe) continue;
            if (subset == "memerror" && e.memory_safe) continue;
            entries.push_back(std::move(e));
        }
        if (entries.empty()) throw UsageError("no corpus entry matches");

        std::vector<Row> rows(entries.size());
        std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
        for (std::size_t start = 0; start < entries.size(); start += workers) {
            std::vector<std::future<Row>> batch;
            for (std::size_t i = start; i < std::min(entries.size(), start + workers); ++i)
                batch.push_back(std::async(std::launch::async, [&, i] { return evaluate(entries[i], cfg, D); }));
            for (std::size_t i = 0; i < batch.size(); ++i) rows[start + i] = batch[i].get();
        }

        std::size_t bad = 0;
        json all = json::array();
        for (const auto& r : rows) {
            bad += !r.ok;
            if (json_out) {
                json j = {{"name", r.entry.name},
                          {"expected", r.entry.expected_unsafe ? "Unsafe" : "Safe"},
                          {"original", r.original},
                          {"encoded", r.encoded},
                          {"status", r.status},
                          {"ok", r.ok}};
                if (!r.error.empty()) j["error"] = r.error;
                all.push_back(j);
            } else {
                std::cout << (r.ok ? "ok   " : "FAIL ") << r.entry.name << "  expected "
                          << (r.entry.expected_unsafe ? "Unsafe" : "Safe") << "  original " << r.original
                          << "  encoded " << (r.encoded.empty() ? "-" : r.encoded) << "  " << r.status;
                if (!r.error.empty()) std::cout << ": " << r.error;
                std::cout << "\n";
            }
        }
        if (json_out)
            std::cout << json{{"encoding", to_string(cfg.base)}, {"entries", all}, {"mismatches", bad}}.dump(2)
                      << "\n";
        else
            std::cout << rows.size() - bad << "/" << rows.size() << " as expected\n";
        return bad ? kNegative : kOk;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heapinv: heap encodings via time-indexed invariants"};
    app.require_subcommand(1);
    EncodeCmd encode_cmd;
    RunCmd run_cmd;
    FixpointCmd fixpoint_cmd;
    EquisafeCmd equisafe_cmd;
    EmitCmd emit_cmd;
    SolveCmd solve_cmd;
    CorpusCmd corpus_cmd;
    encode_cmd.add(app);
    run_cmd.add(app);
    fixpoint_cmd.add(app);
    equisafe_cmd.add(app);
    emit_cmd.add(app);
    solve_cmd.add(app);
    corpus_cmd.add(app);

    std::string current_file;
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kToolError;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kToolError;
    } catch (const DiagnosticError& e) {
        for (auto* sub : app.get_subcommands()) {
            if (auto* o = sub->get_option_no_throw("file"); o && o->count()) current_file = o->as<std::string>();
        }
        std::cerr << e.render(current_file.empty() ? "<input>" : current_file);
        return kToolError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kToolError;
    }
    for (int c : {encode_cmd.code, run_cmd.code, fixpoint_cmd.code, equisafe_cmd.code, emit_cmd.code, solve_cmd.code,
                  corpus_cmd.code})
        if (c != kOk) return c;
    return kOk;
}
