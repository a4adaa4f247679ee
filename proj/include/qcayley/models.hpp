#pragma once

#include "qcayley/models/grid.hpp"
#include "qcayley/models/hamiltonian.hpp"
#include "qcayley/models/states.hpp"
