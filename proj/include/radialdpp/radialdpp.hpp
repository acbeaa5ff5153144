#pragma once

#include "asymptotics.hpp"
#include "ensemble.hpp"
#include "experiments.hpp"
#include "oracle.hpp"
#include "piece_table.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "serialization.hpp"
#include "special_functions.hpp"
#include "stats.hpp"
#include "test_function.hpp"
#include "truncation.hpp"
#include "util.hpp"
