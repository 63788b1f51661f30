// Copyright 2026 The dpiw Authors.
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

#include <string>
#include <vector>

namespace dpiw {

/// One (epsilon, delta) purchase together with the mechanism that made it.
struct PrivacySpend {
  double epsilon = 0.0;
  double delta = 0.0;
  std::string mechanism;
};

/// Basic composition: epsilons and deltas add across mechanisms.
PrivacySpend compose_spends(const std::vector<PrivacySpend>& ledger);

}  // namespace dpiw
