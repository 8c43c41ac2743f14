#pragma once

// Umbrella header.

#include "dpkmeans/core.hpp"
#include "dpkmeans/csv.hpp"
#include "dpkmeans/datasets.hpp"
#include "dpkmeans/dp_kmeans.hpp"
#include "dpkmeans/dp_mech.hpp"
#include "dpkmeans/metrics.hpp"
#include "dpkmeans/sweep.hpp"
#include "dpkmeans/trace_io.hpp"
#include "dpkmeans/zones.hpp"
