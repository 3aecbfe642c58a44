#include "heapinv/report.hpp"

namespace heapinv {

namespace {

json tuple_json(const ast::Program& p, const Tuple& t) {
    json a = json::array();
    for (const auto& v : t) a.push_back(to_string(p, v));
    return a;
}

const char* reason_name(UndefinedReason r) {
    switch (r) {
    case UndefinedReason::AssumeFailed: return "AssumeFailed";
    case UndefinedReason::FuelExhausted: return "FuelExhausted";
    case UndefinedReason::None: break;
    }
    return "None";
}

}  // namespace

json to_json(const ast::Program& p, const Outcome& o) {
    json j;
    switch (o.kind) {
    case OutcomeKind::Top: j["kind"] = "Top"; break;
    case OutcomeKind::Bot:
        j["kind"] = "Bot";
        j["pred"] = o.pred;
        j["tuple"] = tuple_json(p, o.tuple);
        break;
    case OutcomeKind::Undefined:
        j["kind"] = "Undefined";
        j["reason"] = reason_name(o.reason);
        break;
    }
    j["text"] = to_string(p, o);
    return j;
}

json to_json(const ast::Program&, const GridPoint& g) {
    return {{"in", g.in}, {"seed", g.seed}, {"lastAddr", g.last_addr}};
}

json run_json(const ast::Program& p, const ExecResult& r) {
    json stack = json::object();
    for (std::size_t i = 0; i < p.vars.size() && i < r.stack.size(); ++i)
        stack[p.vars[i].name] = to_string(p, r.stack[i]);
    return {{"outcome", to_json(p, r.outcome)}, {"stack", stack}, {"heapLen", r.heap_len}};
}

json fixpoint_json(const ast::Program& p, const FixpointResult& r, const SafetyVerdict& v) {
    json sizes = json::object();
    for (const auto& d : p.preds) sizes[d.name] = r.interpretation.relation(d.name).size();
    json witnesses = json::array();
    if (v.witness) {
        json w = to_json(p, v.witness->point);
        w["pred"] = v.witness->pred;
        w["tuple"] = tuple_json(p, v.witness->tuple);
        witnesses.push_back(w);
    }
    return {{"verdict", to_string(v.kind)},
            {"iterations", r.iterations},
            {"predicateSizes", sizes},
            {"inconclusiveCount", v.inconclusive_count},
            {"unsafeCount", v.unsafe_count},
            {"witnesses", witnesses}};
}

json cosim_json(const CosimReport& c) {
    return {{"pointsChecked", c.points_checked},
            {"violations", c.violations},
            {"samples", c.samples},
            {"uncoveredGroups", c.uncovered_groups},
            {"totalGroups", c.total_groups}};
}

json memory_json(const MemorySafetyReport& m) {
    json j = {{"memorySafe", m.memory_safe}, {"invalidAccess", m.invalid_access}};
    if (m.point) j["point"] = to_json(ast::Program{}, *m.point);
    if (m.event) j["event"] = to_string(*m.event);
    return j;
}

json equisafe_json(const ast::Program& original, const EquisafeOutcome& o) {
    json j;
    j["status"] = to_string(o.status);
    const auto& cfg = o.encoded.config;
    j["encoding"] = {{"base", to_string(cfg.base)}, {"tagging", cfg.tagging}, {"caching", cfg.caching}};
    if (o.memory) j["memory"] = memory_json(*o.memory);
    if (o.report) {
        j["original"] = fixpoint_json(original, o.report->original_fixpoint, o.report->original);
        j["encoded"] = fixpoint_json(o.encoded.program, o.report->encoded_fixpoint, o.report->encoded);
        j["expectedUnsafe"] = o.expected_unsafe;
        if (o.report->cosim) j["cosim"] = cosim_json(*o.report->cosim);
    }
    return j;
}

}  // namespace heapinv
