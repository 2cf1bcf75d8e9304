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

#include <cstddef>
#include <span>

#include "rq/common.hpp"

namespace rq::eval {

struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
};

struct PRF1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

Confusion confusion(std::span<const Label> predictions, std::span<const Label> gold, Label positive);

/// Precision, recall and F1 for one class; each is 0 when its denominator is 0.
PRF1 prf1(std::span<const Label> predictions, std::span<const Label> gold, Label positive);

PRF1 prf1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

/// Harmonic mean of precision and recall, 0 when both are 0.
double f1_from(double precision, double recall);

/// Unweighted mean of the two classes' F1.
double macro_f1(std::span<const Label> predictions, std::span<const Label> gold);

/// Rounds to two decimals the way the rendered tables do.
double round2(double x);

}  // namespace rq::eval
