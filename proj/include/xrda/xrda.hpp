#pragma once

#include "xrda/errors.hpp"
#include "xrda/mirror.hpp"
#include "xrda/point.hpp"
#include "xrda/problem.hpp"
#include "xrda/reference.hpp"
#include "xrda/regularizer.hpp"
#include "xrda/schedule.hpp"
#include "xrda/solver.hpp"
