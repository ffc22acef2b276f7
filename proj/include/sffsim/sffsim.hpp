// Copyright 2026 The sffsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header.

#include "sffsim/analysis.hpp"
#include "sffsim/error.hpp"
#include "sffsim/linalg.hpp"
#include "sffsim/models.hpp"
#include "sffsim/noise.hpp"
#include "sffsim/protocol.hpp"
#include "sffsim/rng.hpp"
#include "sffsim/runner/config.hpp"
#include "sffsim/runner/experiment.hpp"
#include "sffsim/runner/output.hpp"
#include "sffsim/spectral.hpp"
