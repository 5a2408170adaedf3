#pragma once

#include "gradspace/cli/build.hpp"
#include "gradspace/cli/certify.hpp"
#include "gradspace/cli/io.hpp"
#include "gradspace/cli/problem.hpp"
#include "gradspace/cli/run.hpp"
#include "gradspace/cli/selftest.hpp"
