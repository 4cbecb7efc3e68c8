#pragma once

#include "rmlm/core.hpp"
#include "rmlm/graph.hpp"
#include "rmlm/mlcm.hpp"
#include "rmlm/taildep.hpp"
#include "rmlm/identify.hpp"
#include "rmlm/simulate.hpp"
#include "rmlm/generate.hpp"
#include "rmlm/io.hpp"
