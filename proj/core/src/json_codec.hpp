// Copyright 2026 The provrepro Authors
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

// JSON encodings of the persisted records. Private to the core library.

#ifndef PROVREPRO_SRC_JSON_CODEC_HPP
#define PROVREPRO_SRC_JSON_CODEC_HPP

#include <json.hpp>

#include "provrepro/model.hpp"

namespace provrepro {

using Json = nlohmann::json;

inline void to_json(Json& j, const WfId& id) { j = id.value; }
inline void from_json(const Json& j, WfId& id) { id.value = j.get<std::int64_t>(); }

inline void to_json(Json& j, const FileRef& ref) {
    j = Json{{"container", ref.container}, {"filename", ref.filename}};
}
inline void from_json(const Json& j, FileRef& ref) {
    j.at("container").get_to(ref.container);
    j.at("filename").get_to(ref.filename);
}

void to_json(Json& j, const JobDefinition& job);
void from_json(const Json& j, JobDefinition& job);
void to_json(Json& j, const WorkflowDefinition& def);
void from_json(const Json& j, WorkflowDefinition& def);

void to_json(Json& j, const VmInstance& vm);
void from_json(const Json& j, VmInstance& vm);

void to_json(Json& j, const JobRecord& record);
void from_json(const Json& j, JobRecord& record);
void to_json(Json& j, const WorkflowRun& run);
void from_json(const Json& j, WorkflowRun& run);

void to_json(Json& j, const JobResourceMapping& row);
void from_json(const Json& j, JobResourceMapping& row);

}  // namespace provrepro

#endif  // PROVREPRO_SRC_JSON_CODEC_HPP
