/*
 * Copyright 2026 The rqkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>

#include "rq/common.hpp"
#include "rq/rq_extract.hpp"

namespace rq::testing {

/// A random dialog turn mixing words, punctuation runs, emoticons, tags and URLs.
std::string random_turn(Rng &rng);

/// A random instance with 0-3 pre sentences, 1-3 self-answer sentences and 0-3 post sentences.
extract::RQInstance random_instance(Rng &rng);

}  // namespace rq::testing
