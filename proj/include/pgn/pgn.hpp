#pragma once

#include "rational.hpp"
#include "dims.hpp"
#include "pwl.hpp"
#include "templates.hpp"
#include "contraction.hpp"
#include "json_io.hpp"
#include "formulas.hpp"
#include "lattice.hpp"
#include "variational.hpp"
#include "game.hpp"
