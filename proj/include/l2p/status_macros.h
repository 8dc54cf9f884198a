// Copyright 2026 The L2P Authors
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

#ifndef L2P_STATUS_MACROS_H_
#define L2P_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define L2P_RETURN_IF_ERROR(expr)              \
  do {                                         \
    const ::absl::Status _l2p_status = (expr); \
    if (!_l2p_status.ok()) return _l2p_status; \
  } while (0)

#define L2P_STATUS_CONCAT_INNER_(x, y) x##y
#define L2P_STATUS_CONCAT_(x, y) L2P_STATUS_CONCAT_INNER_(x, y)

#define L2P_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                               \
  if (!statusor.ok()) return statusor.status();          \
  lhs = *std::move(statusor)

#define L2P_ASSIGN_OR_RETURN(lhs, rexpr) \
  L2P_ASSIGN_OR_RETURN_IMPL_(            \
      L2P_STATUS_CONCAT_(_l2p_statusor_, __LINE__), lhs, rexpr)

#endif  // L2P_STATUS_MACROS_H_
