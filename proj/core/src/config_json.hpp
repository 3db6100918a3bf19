#pragma once

#include "json_util.hpp"
#include "krein/config.hpp"

namespace krein::detail {

PotentialSpec potential_from(const Json& j);
Json potential_json(const PotentialSpec& s);
ModelSpec model_from(const Json& j);
Json model_json(const ModelSpec& m);

}  // namespace krein::detail
