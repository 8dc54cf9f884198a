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

#include "l2p/cli/run_config.h"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "l2p/status_macros.h"

namespace l2p::cli {
namespace {

using Json = nlohmann::ordered_json;

absl::Status RejectUnknownKeys(const Json& object,
                               const std::set<std::string>& allowed,
                               const std::string& where) {
  for (const auto& item : object.items()) {
    if (!allowed.contains(item.key())) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key '", item.key(), "' in ", where));
    }
  }
  return absl::OkStatus();
}

template <typename T>
absl::Status ReadField(const Json& object, const char* key, T& out,
                       bool required) {
  const auto it = object.find(key);
  if (it == object.end()) {
    if (required) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing required key '", key, "'"));
    }
    return absl::OkStatus();
  }
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad value for '", key, "': ", e.what()));
  }
  return absl::OkStatus();
}

const char* ProblemName(Problem p) {
  return p == Problem::kOpe ? "ope" : "oco";
}

absl::StatusOr<RunConfig> FromJson(const Json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("run config must be a JSON object");
  }
  L2P_RETURN_IF_ERROR(RejectUnknownKeys(
      j,
      {"schema", "problem", "T", "d", "epsilon", "delta", "reps", "base_seed",
       "adversary", "fresh_stream_per_rep", "overrides", "oco", "output_dir",
       "threads"},
      "run config"));

  int schema = 0;
  L2P_RETURN_IF_ERROR(ReadField(j, "schema", schema, true));
  if (schema != kRunConfigSchema) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported schema ", schema, "; expected ",
                     kRunConfigSchema));
  }

  RunConfig c;
  std::string problem = "ope";
  L2P_RETURN_IF_ERROR(ReadField(j, "problem", problem, true));
  if (problem == "ope") {
    c.problem = Problem::kOpe;
  } else if (problem == "oco") {
    c.problem = Problem::kOco;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("problem must be 'ope' or 'oco', got '", problem, "'"));
  }
  L2P_RETURN_IF_ERROR(ReadField(j, "T", c.horizon, true));
  L2P_RETURN_IF_ERROR(ReadField(j, "d", c.dimension, true));
  L2P_RETURN_IF_ERROR(ReadField(j, "epsilon", c.epsilon, true));
  L2P_RETURN_IF_ERROR(ReadField(j, "delta", c.delta, false));
  L2P_RETURN_IF_ERROR(ReadField(j, "reps", c.reps, false));
  L2P_RETURN_IF_ERROR(ReadField(j, "base_seed", c.base_seed, false));
  L2P_RETURN_IF_ERROR(
      ReadField(j, "fresh_stream_per_rep", c.fresh_stream_per_rep, false));
  L2P_RETURN_IF_ERROR(ReadField(j, "output_dir", c.output_dir, false));
  L2P_RETURN_IF_ERROR(ReadField(j, "threads", c.threads, false));
  if (c.horizon < 1 || c.dimension < 1 || c.reps < 1 || c.threads < 0) {
    return absl::InvalidArgumentError(
        "T, d and reps must be positive and threads nonnegative");
  }
  if (!(c.epsilon > 0.0) || !(c.delta > 0.0 && c.delta < 1.0)) {
    return absl::InvalidArgumentError(
        "epsilon must be positive and delta in (0, 1)");
  }

  c.adversary.kind = c.problem == Problem::kOpe ? StreamKind::kBernoulli
                                                : StreamKind::kIidSphere;
  c.adversary.epsilon = c.epsilon;
  if (const auto it = j.find("adversary"); it != j.end()) {
    const Json& a = *it;
    if (!a.is_object()) {
      return absl::InvalidArgumentError("adversary must be an object");
    }
    L2P_RETURN_IF_ERROR(RejectUnknownKeys(
        a, {"kind", "seed", "means", "epsilon"}, "adversary"));
    std::string kind;
    L2P_RETURN_IF_ERROR(ReadField(a, "kind", kind, true));
    L2P_ASSIGN_OR_RETURN(c.adversary.kind, ParseStreamKind(kind));
    L2P_RETURN_IF_ERROR(ReadField(a, "seed", c.adversary.seed, false));
    L2P_RETURN_IF_ERROR(ReadField(a, "means", c.adversary.means, false));
    L2P_RETURN_IF_ERROR(ReadField(a, "epsilon", c.adversary.epsilon, false));
  }

  if (const auto it = j.find("overrides"); it != j.end() && !it->is_null()) {
    const Json& o = *it;
    if (!o.is_object()) {
      return absl::InvalidArgumentError("overrides must be an object");
    }
    L2P_RETURN_IF_ERROR(RejectUnknownKeys(o, {"B", "eta", "p"}, "overrides"));
    if (!o.contains("B") || !o.contains("eta") || !o.contains("p")) {
      return absl::InvalidArgumentError(
          "overrides must set all of B, eta and p, or be omitted");
    }
    Overrides ov;
    L2P_RETURN_IF_ERROR(ReadField(o, "B", ov.batch_size, true));
    L2P_RETURN_IF_ERROR(ReadField(o, "eta", ov.eta, true));
    L2P_RETURN_IF_ERROR(ReadField(o, "p", ov.p, true));
    c.overrides = ov;
  }

  if (const auto it = j.find("oco"); it != j.end()) {
    const Json& g = *it;
    if (!g.is_object()) {
      return absl::InvalidArgumentError("oco must be an object");
    }
    L2P_RETURN_IF_ERROR(RejectUnknownKeys(g, {"L", "D"}, "oco"));
    L2P_RETURN_IF_ERROR(ReadField(g, "L", c.oco.lipschitz, false));
    L2P_RETURN_IF_ERROR(ReadField(g, "D", c.oco.diameter, false));
    if (!(c.oco.lipschitz > 0.0) || !(c.oco.diameter > 0.0)) {
      return absl::InvalidArgumentError("oco.L and oco.D must be positive");
    }
  }
  return c;
}

}  // namespace

absl::StatusOr<RunConfig> ParseRunConfig(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("run config is not valid JSON: ", e.what()));
  }
  return FromJson(j);
}

absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot open config file ", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseRunConfig(buffer.str());
}

std::string RunConfigToJson(const RunConfig& c) {
  Json j;
  j["schema"] = kRunConfigSchema;
  j["problem"] = ProblemName(c.problem);
  j["T"] = c.horizon;
  j["d"] = c.dimension;
  j["epsilon"] = c.epsilon;
  j["delta"] = c.delta;
  j["reps"] = c.reps;
  j["base_seed"] = c.base_seed;
  j["adversary"] = {{"kind", std::string(StreamKindName(c.adversary.kind))},
                    {"seed", c.adversary.seed},
                    {"means", c.adversary.means},
                    {"epsilon", c.adversary.epsilon}};
  j["fresh_stream_per_rep"] = c.fresh_stream_per_rep;
  if (c.overrides.has_value()) {
    j["overrides"] = {{"B", c.overrides->batch_size},
                      {"eta", c.overrides->eta},
                      {"p", c.overrides->p}};
  }
  j["oco"] = {{"L", c.oco.lipschitz}, {"D", c.oco.diameter}};
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  return j.dump(2);
}

AdversarySpec ResolvedAdversary(const RunConfig& config) {
  AdversarySpec spec = config.adversary;
  spec.dimension = config.dimension;
  spec.horizon = config.horizon;
  spec.lipschitz = config.oco.lipschitz;
  return spec;
}

}  // namespace l2p::cli
