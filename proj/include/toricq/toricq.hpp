#pragma once

#include "toricq/error.hpp"
#include "toricq/scalar.hpp"
#include "toricq/linalg.hpp"
#include "toricq/polytope.hpp"
#include "toricq/quasilattice.hpp"
#include "toricq/momentflow.hpp"
#include "toricq/quotient.hpp"
#include "toricq/json_io.hpp"
#include "toricq/report.hpp"
