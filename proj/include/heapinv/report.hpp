#pragma once

#include <json.hpp>

#include "heapinv/fixpoint.hpp"
#include "heapinv/interp.hpp"
#include "heapinv/pipeline.hpp"

namespace heapinv {

using json = nlohmann::json;

json to_json(const ast::Program& p, const Outcome& o);
json to_json(const ast::Program& p, const GridPoint& g);
json run_json(const ast::Program& p, const ExecResult& r);
json fixpoint_json(const ast::Program& p, const FixpointResult& r, const SafetyVerdict& v);
json cosim_json(const CosimReport& c);
json memory_json(const MemorySafetyReport& m);
json equisafe_json(const ast::Program& original, const EquisafeOutcome& o);

}  // namespace heapinv
