// Copyright 2026 The nmcollide Authors
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

#include "nmcollide/tolerance.hpp"

namespace nmc {

namespace {
ToleranceProfile& profile_storage() {
  static ToleranceProfile profile;
  return profile;
}
}  // namespace

const ToleranceProfile& tolerances() { return profile_storage(); }

void set_tolerances(const ToleranceProfile& profile) { profile_storage() = profile; }

}  // namespace nmc
