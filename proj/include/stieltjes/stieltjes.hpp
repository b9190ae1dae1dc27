#pragma once

// Umbrella header for the whole library.

#include "stieltjes/approx.hpp"
#include "stieltjes/derivator.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/expression.hpp"
#include "stieltjes/gpoly.hpp"
#include "stieltjes/gram.hpp"
#include "stieltjes/integrate.hpp"
#include "stieltjes/partition.hpp"
#include "stieltjes/target.hpp"
