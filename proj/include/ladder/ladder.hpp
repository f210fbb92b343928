#pragma once

#include "ladder/diophantine.hpp"
#include "ladder/kappa.hpp"
#include "ladder/numeric.hpp"
#include "ladder/params.hpp"
#include "ladder/quadrature.hpp"
#include "ladder/series.hpp"
#include "ladder/special.hpp"
