#pragma once

#include "mapn/graph.hpp"

#include <string>
#include <vector>

namespace mapn {

/// Scenario-aware dataflow description of a graph and its variants:
///
///     <sadf name=...>
///       <graph>
///         <actor name=.../>                      one per process
///         <channel name=... src=... dst=... color=.../>
///       </graph>
///       <detector name="variants" initial="s1">
///         <scenario name="s<i>" key=...>         one per variant
///           <rate channel=... production=.. consumption=../>
///         </scenario>
///         <transition from="s<i>" to="s<i+1>"/>  cyclic, last returns to s1
///       </detector>
///     </sadf>
///
/// Rates are 1 on channels of the variant and 0 elsewhere. Throws
/// ConfigError on an empty variant list.
std::string exportSadf(const MapnGraph& g, const std::vector<Variant>& variants, const std::string& name = "mapn");

} // namespace mapn
