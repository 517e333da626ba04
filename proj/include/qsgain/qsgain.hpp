// Copyright 2026 The qsgain Authors
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

#include "qsgain/error.hpp"
#include "qsgain/linalg.hpp"
#include "qsgain/model.hpp"
#include "qsgain/smallgain.hpp"
#include "qsgain/uncertainty.hpp"
#include "qsgain/moments.hpp"
#include "qsgain/random.hpp"
#include "qsgain/opa.hpp"
#include "qsgain/fockcheck.hpp"
#include "qsgain/io.hpp"
