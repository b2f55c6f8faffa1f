#pragma once

#include "applications.hpp"
#include "calculus.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "extreal.hpp"
#include "field.hpp"
#include "kernel.hpp"
#include "landscape.hpp"
#include "reference_problems.hpp"
#include "solver.hpp"
#include "version.hpp"
