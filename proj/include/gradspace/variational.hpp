#pragma once

#include "gradspace/variational/dirichlet.hpp"
#include "gradspace/variational/feasible.hpp"
#include "gradspace/variational/rayleigh.hpp"
