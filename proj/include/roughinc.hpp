#pragma once

#include "roughinc/grid.hpp"
#include "roughinc/path.hpp"
#include "roughinc/norms.hpp"
#include "roughinc/sets.hpp"
#include "roughinc/young.hpp"
#include "roughinc/rough.hpp"
#include "roughinc/drivers.hpp"
#include "roughinc/ydi.hpp"
#include "roughinc/selection.hpp"
#include "roughinc/rdi.hpp"
#include "roughinc/io.hpp"
#include "roughinc/map_expr.hpp"
