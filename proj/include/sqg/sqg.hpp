#pragma once

#include "sqg/checkpoint.hpp"
#include "sqg/commands.hpp"
#include "sqg/config.hpp"
#include "sqg/convergence.hpp"
#include "sqg/errors.hpp"
#include "sqg/estimates.hpp"
#include "sqg/fft.hpp"
#include "sqg/field.hpp"
#include "sqg/grid.hpp"
#include "sqg/lattice_zeta.hpp"
#include "sqg/ledger.hpp"
#include "sqg/operators.hpp"
#include "sqg/parallel.hpp"
#include "sqg/quadrature.hpp"
#include "sqg/solver.hpp"
#include "sqg/spectrum.hpp"
