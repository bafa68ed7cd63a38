#pragma once

#include "fracmag/cc_lab.hpp"
#include "fracmag/errors.hpp"
#include "fracmag/field.hpp"
#include "fracmag/gagliardo.hpp"
#include "fracmag/grid.hpp"
#include "fracmag/groundstate.hpp"
#include "fracmag/io.hpp"
#include "fracmag/kernel.hpp"
#include "fracmag/operator.hpp"
#include "fracmag/parallel.hpp"
#include "fracmag/params.hpp"
#include "fracmag/potential.hpp"
#include "fracmag/vec3.hpp"
