#pragma once

#include "rotopt/error.hpp"
#include "rotopt/linalg.hpp"
#include "rotopt/parity_polytope.hpp"
#include "rotopt/diag_feasibility.hpp"
#include "rotopt/one_constraint.hpp"
#include "rotopt/sut.hpp"
