// Copyright 2026 The rydstat Authors
//
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

#include "rydstat/blockade.hpp"
#include "rydstat/clicks.hpp"
#include "rydstat/config.hpp"
#include "rydstat/error.hpp"
#include "rydstat/fock.hpp"
#include "rydstat/pipeline.hpp"
#include "rydstat/ratemodel.hpp"
#include "rydstat/reproduce.hpp"
#include "rydstat/rng.hpp"
#include "rydstat/source.hpp"
#include "rydstat/transfer.hpp"
