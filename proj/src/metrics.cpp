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

#include "rq/metrics.hpp"

#include <cmath>

namespace rq::eval {

Confusion confusion(std::span<const Label> predictions, std::span<const Label> gold, Label positive) {
    if (predictions.size() != gold.size()) {
        throw Error("prf1: " + std::to_string(predictions.size()) + " predictions for " + std::to_string(gold.size()) +
                    " gold labels");
    }
    Confusion c;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool pred_pos = predictions[i] == positive;
        const bool gold_pos = gold[i] == positive;
        if (pred_pos && gold_pos) ++c.tp;
        else if (pred_pos) ++c.fp;
        else if (gold_pos) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double f1_from(double precision, double recall) {
    const double denom = precision + recall;
    return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

PRF1 prf1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    PRF1 r;
    r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    r.f1 = f1_from(r.precision, r.recall);
    return r;
}

PRF1 prf1(std::span<const Label> predictions, std::span<const Label> gold, Label positive) {
    if (gold.empty()) throw Error("prf1: empty input");
    const Confusion c = confusion(predictions, gold, positive);
    return prf1_from_counts(c.tp, c.fp, c.fn);
}

double macro_f1(std::span<const Label> predictions, std::span<const Label> gold) {
    return 0.5 * (prf1(predictions, gold, Label::positive).f1 + prf1(predictions, gold, Label::negative).f1);
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

}  // namespace rq::eval
