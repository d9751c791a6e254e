#pragma once

// Discrete-time Hawkes process toolkit: the intensity Markov chain and its
// piecewise-constant path, continuous-time exact samplers, transition
// operators and generators, and the statistical convergence experiments.

#include "hawkesdt/chain.hpp"
#include "hawkesdt/exact.hpp"
#include "hawkesdt/experiment.hpp"
#include "hawkesdt/io.hpp"
#include "hawkesdt/moments.hpp"
#include "hawkesdt/operators.hpp"
#include "hawkesdt/params.hpp"
#include "hawkesdt/quadrature.hpp"
#include "hawkesdt/rng.hpp"
#include "hawkesdt/stats.hpp"
#include "hawkesdt/test_functions.hpp"
