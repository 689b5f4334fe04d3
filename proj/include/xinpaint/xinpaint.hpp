/*
Copyright 2026 The xinpaint Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Umbrella header.

#ifndef XINPAINT_XINPAINT_HPP_
#define XINPAINT_XINPAINT_HPP_

#include "xinpaint/analysis.hpp"
#include "xinpaint/core/error.hpp"
#include "xinpaint/core/grid.hpp"
#include "xinpaint/core/image.hpp"
#include "xinpaint/core/parallel.hpp"
#include "xinpaint/core/png_io.hpp"
#include "xinpaint/core/rng.hpp"
#include "xinpaint/dataset.hpp"
#include "xinpaint/degrade.hpp"
#include "xinpaint/evaluate.hpp"
#include "xinpaint/manifest.hpp"
#include "xinpaint/maskgen.hpp"
#include "xinpaint/metrics.hpp"
#include "xinpaint/plugin.hpp"
#include "xinpaint/records.hpp"
#include "xinpaint/version.hpp"

#endif  // XINPAINT_XINPAINT_HPP_
