#pragma once

#include "eom/auction.hpp"
#include "eom/distributions.hpp"
#include "eom/environment.hpp"
#include "eom/errors.hpp"
#include "eom/estimators.hpp"
#include "eom/experiments.hpp"
#include "eom/guarantees.hpp"
#include "eom/inference.hpp"
#include "eom/io.hpp"
#include "eom/kernel.hpp"
#include "eom/mechanisms.hpp"
#include "eom/numeric.hpp"
#include "eom/rng.hpp"
#include "eom/solvers.hpp"
#include "eom/special_functions.hpp"
