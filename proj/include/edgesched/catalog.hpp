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

#ifndef EDGESCHED_CATALOG_HPP_
#define EDGESCHED_CATALOG_HPP_

#include <vector>

namespace edgesched {

/// Static description of one service type. The first four fields describe the
/// deployed replicate; the rest describe the requests synthesized for it.
struct ServiceSpec {
  double nominal_proc_ms = 500.0;  // on a speed_factor 1.0 executor
  double replicate_cpu = 500.0;    // millicores reserved per replicate
  double replicate_mem = 512.0;    // MB reserved per replicate
  double image_size_mb = 200.0;

  double deadline_min_ms = 1000.0;
  double deadline_max_ms = 3000.0;
  double request_cpu = 400.0;
  double request_mem = 256.0;
  double input_size_kb = 100.0;
  double weight = 1.0;  // relative popularity in synthesized traffic
};

/// Service types are numbered 1..W.
class ServiceCatalog {
 public:
  ServiceCatalog() = default;
  explicit ServiceCatalog(std::vector<ServiceSpec> specs);

  int size() const { return static_cast<int>(specs_.size()); }
  const ServiceSpec& operator[](int service) const;
  const std::vector<ServiceSpec>& specs() const { return specs_; }

 private:
  std::vector<ServiceSpec> specs_;
};

}  // namespace edgesched

#endif  // EDGESCHED_CATALOG_HPP_
