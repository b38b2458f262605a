// Copyright 2026 The colgen Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "colgen/cell.hpp"
#include "colgen/column.hpp"
#include "colgen/error.hpp"
#include "colgen/evalmetrics.hpp"
#include "colgen/exact.hpp"
#include "colgen/finite_universe.hpp"
#include "colgen/gapstats.hpp"
#include "colgen/io.hpp"
#include "colgen/lp.hpp"
#include "colgen/master.hpp"
#include "colgen/pose.hpp"
#include "colgen/synthetic.hpp"
