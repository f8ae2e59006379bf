#pragma once

#include "evl/alpha_shape.hpp"
#include "evl/cli.hpp"
#include "evl/compose.hpp"
#include "evl/core_support.hpp"
#include "evl/delaunay.hpp"
#include "evl/gmm.hpp"
#include "evl/harness.hpp"
#include "evl/kmeans.hpp"
#include "evl/learner.hpp"
#include "evl/level_iw.hpp"
#include "evl/microcluster.hpp"
#include "evl/report.hpp"
#include "evl/scargc.hpp"
#include "evl/stream.hpp"
#include "evl/types.hpp"
