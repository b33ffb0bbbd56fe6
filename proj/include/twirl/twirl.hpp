#pragma once

// Umbrella header for the twirl library.

#include "twirl/classify.hpp"
#include "twirl/errors.hpp"
#include "twirl/graph_model.hpp"
#include "twirl/linear_solve.hpp"
#include "twirl/moments.hpp"
#include "twirl/montecarlo.hpp"
#include "twirl/partition.hpp"
#include "twirl/permutation.hpp"
#include "twirl/polynomial.hpp"
#include "twirl/rational_function.hpp"
#include "twirl/weingarten.hpp"
