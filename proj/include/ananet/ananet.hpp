#pragma once

#include "ananet/agent.hpp"
#include "ananet/document.hpp"
#include "ananet/dot.hpp"
#include "ananet/error.hpp"
#include "ananet/evaluation.hpp"
#include "ananet/generator.hpp"
#include "ananet/llm/backend.hpp"
#include "ananet/llm/parse.hpp"
#include "ananet/network.hpp"
#include "ananet/optimizer.hpp"
#include "ananet/planner.hpp"
#include "ananet/search.hpp"
#include "ananet/status.hpp"
#include "ananet/text.hpp"

namespace ananet {
inline constexpr std::string_view kVersion = "0.1.0";
}
