#pragma once

#include "mindmeld/config.hpp"
#include "mindmeld/dot.hpp"
#include "mindmeld/error.hpp"
#include "mindmeld/lexer.hpp"
#include "mindmeld/memory.hpp"
#include "mindmeld/mindmap.hpp"
#include "mindmeld/replay.hpp"
#include "mindmeld/session.hpp"
#include "mindmeld/trust.hpp"
