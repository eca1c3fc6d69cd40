// Copyright 2026 The AAI Toolkit Authors. All rights reserved.
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

#include "aai/common.hpp"

namespace aai {

const char* error_category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::config:
      return "config";
    case ErrorCategory::data:
      return "data";
    case ErrorCategory::numerical:
      return "numerical";
  }
  return "unknown";
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::config:
      return 2;
    case ErrorCategory::data:
      return 3;
    case ErrorCategory::numerical:
      return 4;
  }
  return 1;
}

}  // namespace aai
