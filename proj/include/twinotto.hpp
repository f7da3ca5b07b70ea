// Copyright 2026 The twinotto Authors
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

#include "twinotto/errors.hpp"
#include "twinotto/gaussian.hpp"
#include "twinotto/model.hpp"
#include "twinotto/polariton.hpp"
#include "twinotto/integrator.hpp"
#include "twinotto/cycle.hpp"
#include "twinotto/thermo.hpp"
#include "twinotto/fock.hpp"
#include "twinotto/config.hpp"
#include "twinotto/io.hpp"
#include "twinotto/commands.hpp"
