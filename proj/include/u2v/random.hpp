// SPDX-License-Identifier: Apache-2.0
//
// u2vchan: non-stationary UAV-to-vehicle MIMO channel simulator
// Copyright (C) 2026 The u2vchan authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace u2v
{

using Rng = std::mt19937_64;

// Independent, reproducible stream for (seed, stream ids...).
inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {})
{
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * stream.size());
    words.push_back(static_cast<std::uint32_t>(seed));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    for (auto id : stream)
    {
        words.push_back(static_cast<std::uint32_t>(id));
        words.push_back(static_cast<std::uint32_t>(id >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

inline double uniform01(Rng &rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng &rng)
{
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

} // namespace u2v
