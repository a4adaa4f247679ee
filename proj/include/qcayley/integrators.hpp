#pragma once

#include "qcayley/integrators/coefficients.hpp"
#include "qcayley/integrators/propagate.hpp"
#include "qcayley/integrators/steps.hpp"
