#pragma once

// Umbrella header for the coordinated-behavior detection toolkit.

#include "cibnet/analysis.hpp"
#include "cibnet/audiofp.hpp"
#include "cibnet/error.hpp"
#include "cibnet/graph_io.hpp"
#include "cibnet/ingest.hpp"
#include "cibnet/pipeline.hpp"
#include "cibnet/prune.hpp"
#include "cibnet/run.hpp"
#include "cibnet/simnet.hpp"
#include "cibnet/synthbench.hpp"
#include "cibnet/trace_kind.hpp"
#include "cibnet/traces.hpp"
#include "cibnet/wav.hpp"
