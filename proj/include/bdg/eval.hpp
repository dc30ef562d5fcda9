#pragma once

#include <map>
#include <string>
#include <vector>

#include "bdg/graph.hpp"

namespace bdg {

// Recorded behavior of a model run: one sample stream per top-level
// Outport or Terminator block, keyed by block name.
struct Trace {
    int steps = 0;
    std::map<std::string, std::vector<double>> values;

    bool operator==(const Trace&) const = default;
};

// Runs the model as a synchronous dataflow network for the given number
// of steps. `inputs` supplies one sample stream per top-level Inport,
// keyed by block name; missing streams and exhausted streams read as 0.
//
// Supported block types: Gain, Sum, Product, Constant, UnitDelay, Inport,
// Outport, Terminator and SubSystem. A UnitDelay outputs its stored state
// (initially 0) and latches its input at the end of each step, so any
// feedback loop must pass through one; a loop without a delay raises
// UnresolvableCycleError. Other block types raise UnsupportedBlockError,
// and malformed Gain/Value parameters raise BadParameterError.
Trace evaluate(const ModelGraph& graph,
               const std::map<std::string, std::vector<double>>& inputs,
               int steps);

} // namespace bdg
