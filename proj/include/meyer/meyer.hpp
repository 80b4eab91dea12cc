#pragma once

#include "meyer/error.hpp"
#include "meyer/expr.hpp"
#include "meyer/lattice_cps.hpp"
#include "meyer/weights.hpp"
#include "meyer/measures.hpp"
#include "meyer/mixed_view.hpp"
#include "meyer/transform.hpp"
#include "meyer/eberlein.hpp"
#include "meyer/aperiodicity.hpp"
#include "meyer/io.hpp"
