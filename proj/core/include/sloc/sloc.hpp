#pragma once

#include "sloc/anderson.hpp"
#include "sloc/bounds.hpp"
#include "sloc/flow.hpp"
#include "sloc/lattice.hpp"
#include "sloc/linalg.hpp"
#include "sloc/localgap.hpp"
#include "sloc/localizer.hpp"
#include "sloc/operators.hpp"
#include "sloc/rng.hpp"
#include "sloc/tapering.hpp"
#include "sloc/tapering_profile.hpp"
#include "sloc/version.hpp"
