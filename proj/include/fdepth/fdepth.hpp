// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

// Umbrella header.

#ifndef FDEPTH_FDEPTH_HPP
#define FDEPTH_FDEPTH_HPP

#include "fdepth/cloud_interp.hpp"
#include "fdepth/core_geometry.hpp"
#include "fdepth/depth_fusion.hpp"
#include "fdepth/error.hpp"
#include "fdepth/eval_harness.hpp"
#include "fdepth/frame.hpp"
#include "fdepth/io.hpp"
#include "fdepth/pipeline.hpp"
#include "fdepth/roi_estimators.hpp"
#include "fdepth/synth_oracle.hpp"

#endif  // FDEPTH_FDEPTH_HPP
