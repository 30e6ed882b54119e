// Copyright 2026 The bf16x9 Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "bf16x9/bf16.hpp"
#include "bf16x9/decompose.hpp"
#include "bf16x9/dispatch.hpp"
#include "bf16x9/gemm.hpp"
#include "bf16x9/generator.hpp"
#include "bf16x9/matrix.hpp"
#include "bf16x9/matrix_io.hpp"
#include "bf16x9/metrics.hpp"
#include "bf16x9/random.hpp"
#include "bf16x9/request.hpp"
#include "bf16x9/roundtrip.hpp"
#include "bf16x9/sweep.hpp"
