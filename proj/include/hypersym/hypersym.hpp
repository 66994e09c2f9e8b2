#pragma once

#include "hypersym/action_angle.hpp"
#include "hypersym/chart_calculus.hpp"
#include "hypersym/fibration_model.hpp"
#include "hypersym/geometric_structures.hpp"
#include "hypersym/polynomial.hpp"
#include "hypersym/special_kahler.hpp"
