#pragma once

#include "gradspace/engine/cg.hpp"
#include "gradspace/engine/descent.hpp"
#include "gradspace/engine/dykstra.hpp"
#include "gradspace/engine/eigh.hpp"
#include "gradspace/engine/interior.hpp"
#include "gradspace/engine/psd.hpp"
#include "gradspace/engine/rayleigh.hpp"
#include "gradspace/engine/separable.hpp"
