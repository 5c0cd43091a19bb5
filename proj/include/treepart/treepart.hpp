#pragma once

#include "number.hpp"
#include "tree.hpp"
#include "plfn.hpp"
#include "region.hpp"
#include "dynflow.hpp"
#include "oracle.hpp"
#include "engine.hpp"
#include "bounded.hpp"
#include "parametric.hpp"
#include "fixed_sink.hpp"
#include "brute.hpp"
#include "io.hpp"
