#pragma once

#include "gradspace/metric/gradients.hpp"
#include "gradspace/metric/space.hpp"
