#pragma once

#include "aahflow/dynamics.hpp"
#include "aahflow/equilibrium.hpp"
#include "aahflow/errors.hpp"
#include "aahflow/grid.hpp"
#include "aahflow/model.hpp"
#include "aahflow/numerics.hpp"
#include "aahflow/parallel.hpp"
#include "aahflow/phase_state.hpp"
#include "aahflow/wigner.hpp"
