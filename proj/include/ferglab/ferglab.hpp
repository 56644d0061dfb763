#pragma once

#include "ferglab/certify.hpp"
#include "ferglab/common.hpp"
#include "ferglab/filter.hpp"
#include "ferglab/hmm.hpp"
#include "ferglab/io.hpp"
#include "ferglab/metrics.hpp"
#include "ferglab/parallel.hpp"
#include "ferglab/rng.hpp"
#include "ferglab/simplex.hpp"
#include "ferglab/simulate.hpp"
#include "ferglab/svd.hpp"
#include "ferglab/transport.hpp"
#include "ferglab/types.hpp"
