#ifndef TSL0_TSL0_HPP
#define TSL0_TSL0_HPP

// Umbrella header for the whole library.

#include "tsl0/bench.hpp"
#include "tsl0/errors.hpp"
#include "tsl0/io.hpp"
#include "tsl0/linalg.hpp"
#include "tsl0/solver.hpp"
#include "tsl0/tensor.hpp"
#include "tsl0/uniqueness.hpp"

#endif  // TSL0_TSL0_HPP
