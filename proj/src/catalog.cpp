// Copyright 2026 The edgesched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "edgesched/catalog.hpp"

#include <string>

#include "edgesched/common.hpp"

namespace edgesched {

ServiceCatalog::ServiceCatalog(std::vector<ServiceSpec> specs)
    : specs_(std::move(specs)) {
  if (specs_.empty()) throw ValidationError("service catalog must hold W >= 1 types");
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const ServiceSpec& s = specs_[i];
    if (!(s.nominal_proc_ms > 0 && s.replicate_cpu > 0 && s.replicate_mem > 0 &&
          s.image_size_mb > 0)) {
      throw ValidationError("service " + std::to_string(i + 1) +
                            ": replicate fields must be > 0");
    }
    if (!(s.deadline_min_ms > 0 && s.deadline_max_ms >= s.deadline_min_ms)) {
      throw ValidationError("service " + std::to_string(i + 1) +
                            ": need 0 < deadline_min_ms <= deadline_max_ms");
    }
    if (!(s.request_cpu > 0 && s.request_mem > 0 && s.input_size_kb >= 0 &&
          s.weight >= 0)) {
      throw ValidationError("service " + std::to_string(i + 1) +
                            ": bad request profile");
    }
  }
}

const ServiceSpec& ServiceCatalog::operator[](int service) const {
  if (service < 1 || service > size()) {
    throw ContractError("unknown service type " + std::to_string(service));
  }
  return specs_[static_cast<std::size_t>(service - 1)];
}

}  // namespace edgesched
