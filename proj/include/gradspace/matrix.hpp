#pragma once

#include "gradspace/matrix/operations.hpp"
#include "gradspace/matrix/symmetric.hpp"
