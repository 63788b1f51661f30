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

#include "dpiw/core/privacy_ledger.hpp"

namespace dpiw {

PrivacySpend compose_spends(const std::vector<PrivacySpend>& ledger) {
  PrivacySpend total;
  for (const auto& s : ledger) {
    total.epsilon += s.epsilon;
    total.delta += s.delta;
    if (!s.mechanism.empty()) {
      if (!total.mechanism.empty()) total.mechanism += "; ";
      total.mechanism += s.mechanism;
    }
  }
  return total;
}

}  // namespace dpiw
