#pragma once

#include "axioms.hpp"
#include "builtins.hpp"
#include "category_io.hpp"
#include "decompose.hpp"
#include "fusion.hpp"
#include "lattice.hpp"
#include "mps.hpp"
#include "report.hpp"
#include "tube.hpp"
#include "types.hpp"
#include "wha.hpp"
