#pragma once

#include "qcayley/krotov/krotov.hpp"
