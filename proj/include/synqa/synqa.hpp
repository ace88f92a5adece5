// Copyright 2026 The synqa Authors
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

#include "synqa/align.hpp"
#include "synqa/assessment.hpp"
#include "synqa/csv.hpp"
#include "synqa/distance.hpp"
#include "synqa/encoding.hpp"
#include "synqa/errors.hpp"
#include "synqa/fixtures.hpp"
#include "synqa/isolation_forest.hpp"
#include "synqa/privacy.hpp"
#include "synqa/quality.hpp"
#include "synqa/random.hpp"
#include "synqa/random_forest.hpp"
#include "synqa/report.hpp"
#include "synqa/table.hpp"
#include "synqa/tsne.hpp"
