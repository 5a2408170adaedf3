#pragma once

#include "gradspace/grid/domain.hpp"
#include "gradspace/grid/operators.hpp"
#include "gradspace/grid/solvers.hpp"
