#ifndef BOHMFLOW_BOHMFLOW_HPP
#define BOHMFLOW_BOHMFLOW_HPP

#include "bohmflow/dynamics.hpp"
#include "bohmflow/errors.hpp"
#include "bohmflow/fields.hpp"
#include "bohmflow/gauge.hpp"
#include "bohmflow/goodness_of_fit.hpp"
#include "bohmflow/io.hpp"
#include "bohmflow/minkowski.hpp"
#include "bohmflow/nonrelativistic.hpp"
#include "bohmflow/rng.hpp"
#include "bohmflow/scenario.hpp"
#include "bohmflow/stats.hpp"
#include "bohmflow/wavefunction.hpp"

#endif  // BOHMFLOW_BOHMFLOW_HPP
