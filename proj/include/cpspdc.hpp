// Copyright 2026 The cpspdc Authors
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

#ifndef CPSPDC_CPSPDC_HPP
#define CPSPDC_CPSPDC_HPP

#include "cpspdc/analysis.hpp"
#include "cpspdc/config.hpp"
#include "cpspdc/dispersion.hpp"
#include "cpspdc/error.hpp"
#include "cpspdc/grid.hpp"
#include "cpspdc/interference.hpp"
#include "cpspdc/io.hpp"
#include "cpspdc/jsa.hpp"
#include "cpspdc/parallel.hpp"
#include "cpspdc/phasematch.hpp"
#include "cpspdc/rng.hpp"
#include "cpspdc/tags.hpp"
#include "cpspdc/tagsim.hpp"
#include "cpspdc/units.hpp"

#endif
