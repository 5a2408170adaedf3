#pragma once

#include "gradspace/lattice/operations.hpp"
