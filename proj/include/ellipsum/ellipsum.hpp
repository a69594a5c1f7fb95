#pragma once

#include "core.hpp"
#include "minkowski.hpp"
#include "bounds.hpp"
#include "reachset.hpp"
#include "io.hpp"
#include "svg.hpp"
