#pragma once

#ifdef SPHEREBRANCH_SYSTEM_JSON
#include <nlohmann/json.hpp>
#else
#include <json.hpp>
#endif

namespace spherebranch {
using Json = nlohmann::json;
}
