#pragma once

#include "qcayley/caylpol/caylpol.hpp"
#include "qcayley/caylpol/window.hpp"
