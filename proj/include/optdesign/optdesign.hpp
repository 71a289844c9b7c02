// Copyright 2026 The optdesign Authors
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

#ifndef OPTDESIGN_OPTDESIGN_HPP
#define OPTDESIGN_OPTDESIGN_HPP

#include "optdesign/errors.hpp"
#include "optdesign/gp.hpp"
#include "optdesign/information.hpp"
#include "optdesign/likelihood.hpp"
#include "optdesign/models.hpp"
#include "optdesign/parallel.hpp"
#include "optdesign/random.hpp"
#include "optdesign/search.hpp"
#include "optdesign/selection.hpp"
#include "optdesign/session_csv.hpp"
#include "optdesign/sobol.hpp"
#include "optdesign/stopgo.hpp"

#endif  // OPTDESIGN_OPTDESIGN_HPP
