#pragma once

#include "btnslab/graph.hpp"
#include "btnslab/models.hpp"
#include "btnslab/network.hpp"
#include "btnslab/tensor.hpp"

#include <json.hpp>

namespace btns {

using Json = nlohmann::json;

/// {"shape": [...], "re": [...], "im": [...]} in row-major order.
Json to_json(const Tensor& t);
Tensor tensor_from_json(const Json& j);

Json to_json(const NetworkShape& s);
NetworkShape shape_from_json(const Json& j);

Json to_json(const TNSRep& rep);
TNSRep tns_from_json(const Json& j);

/// Adds an "a"/"dloc" header to the plain layout.
Json to_json(const BTNSRep& rep);
BTNSRep btns_from_json(const Json& j);

Json to_json(const KnownState& k);

}  // namespace btns
