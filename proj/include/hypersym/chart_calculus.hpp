#pragma once

// Coordinate-chart exterior calculus: charts, fields, forms, (1,1)-tensors.
#include "hypersym/chart.hpp"
#include "hypersym/endomorphism.hpp"
#include "hypersym/forms.hpp"
