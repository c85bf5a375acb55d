#pragma once

#include "transcal/common.hpp"
#include "transcal/normal.hpp"
#include "transcal/domain.hpp"
#include "transcal/models.hpp"
#include "transcal/kalman.hpp"
#include "transcal/optimize.hpp"
#include "transcal/simulate.hpp"
#include "transcal/laplace.hpp"
#include "transcal/particle.hpp"
#include "transcal/parallel.hpp"
#include "transcal/gpr.hpp"
#include "transcal/calibrate.hpp"
#include "transcal/io.hpp"

#define TRANSCAL_VERSION "1.0.0"
