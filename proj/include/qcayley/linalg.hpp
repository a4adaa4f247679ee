#pragma once

#include "qcayley/errors.hpp"
#include "qcayley/linalg/banded_matrix.hpp"
#include "qcayley/linalg/complex_matrix.hpp"
#include "qcayley/linalg/matrix_exponential.hpp"
#include "qcayley/linalg/shifted_solve.hpp"
#include "qcayley/linalg/types.hpp"
