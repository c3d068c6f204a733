#pragma once

#include "analytics.hpp"
#include "complex.hpp"
#include "errors.hpp"
#include "hodge.hpp"
#include "io.hpp"
#include "joint.hpp"
#include "parallel.hpp"
#include "statistical.hpp"
#include "synthetic.hpp"
