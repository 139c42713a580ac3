#pragma once

// Umbrella header for the word-problem library.

#include "wp/bench.hpp"
#include "wp/bigint.hpp"
#include "wp/chain.hpp"
#include "wp/error.hpp"
#include "wp/exact_matrix.hpp"
#include "wp/mod_matrix.hpp"
#include "wp/rng.hpp"
#include "wp/sieve.hpp"
#include "wp/solvers.hpp"
#include "wp/words.hpp"
