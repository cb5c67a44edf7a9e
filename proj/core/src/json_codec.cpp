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

#include "json_codec.hpp"

#include <string>

namespace provrepro {

void to_json(Json& j, const JobDefinition& job) {
    j = Json{{"name", job.name},
             {"kind", std::string(to_string(job.kind))},
             {"inputs", job.inputs},
             {"outputs", job.outputs},
             {"required_ram_mb", job.required_ram_mb},
             {"depends_on", job.depends_on}};
}

void from_json(const Json& j, JobDefinition& job) {
    j.at("name").get_to(job.name);
    const auto kind = parse_job_kind(j.at("kind").get<std::string>());
    if (!kind) {
        throw Json::other_error::create(501, "unknown job kind", &j);
    }
    job.kind = *kind;
    j.at("inputs").get_to(job.inputs);
    j.at("outputs").get_to(job.outputs);
    j.at("required_ram_mb").get_to(job.required_ram_mb);
    j.at("depends_on").get_to(job.depends_on);
}

void to_json(Json& j, const WorkflowDefinition& def) {
    j = Json{{"label", def.label}, {"jobs", def.jobs}};
}

void from_json(const Json& j, WorkflowDefinition& def) {
    j.at("label").get_to(def.label);
    j.at("jobs").get_to(def.jobs);
}

void to_json(Json& j, const VmInstance& vm) {
    j = Json{{"ip", vm.ip},
             {"nodename", vm.nodename},
             {"flavor_id", vm.flavor_id},
             {"image_id", vm.image_id},
             {"state", std::string(to_string(vm.state))},
             {"owner", vm.owner}};
}

void from_json(const Json& j, VmInstance& vm) {
    j.at("ip").get_to(vm.ip);
    j.at("nodename").get_to(vm.nodename);
    j.at("flavor_id").get_to(vm.flavor_id);
    j.at("image_id").get_to(vm.image_id);
    const auto state = j.at("state").get<std::string>();
    if (state != "active" && state != "destroyed") {
        throw Json::other_error::create(501, "unknown vm state", &j);
    }
    vm.state = state == "active" ? VmState::Active : VmState::Destroyed;
    j.at("owner").get_to(vm.owner);
}

void to_json(Json& j, const JobRecord& record) {
    j = Json{{"job", record.job_name},
             {"host_ip", record.host_ip},
             {"status", std::string(to_string(record.status))},
             {"produced", record.produced},
             {"start_seq", record.start_seq}};
}

void from_json(const Json& j, JobRecord& record) {
    j.at("job").get_to(record.job_name);
    j.at("host_ip").get_to(record.host_ip);
    const auto status = j.at("status").get<std::string>();
    if (status != "succeeded" && status != "failed_oom") {
        throw Json::other_error::create(501, "unknown job status", &j);
    }
    record.status = status == "succeeded" ? JobStatus::Succeeded : JobStatus::FailedOom;
    j.at("produced").get_to(record.produced);
    j.at("start_seq").get_to(record.start_seq);
}

void to_json(Json& j, const WorkflowRun& run) {
    j = Json{{"wf_id", run.wf_id},
             {"definition", run.definition},
             {"jobs", run.job_records},
             {"output_container", run.output_container},
             {"repeat_of", run.repeat_of ? Json(run.repeat_of->value) : Json(nullptr)}};
}

void from_json(const Json& j, WorkflowRun& run) {
    j.at("wf_id").get_to(run.wf_id);
    j.at("definition").get_to(run.definition);
    j.at("jobs").get_to(run.job_records);
    j.at("output_container").get_to(run.output_container);
    const auto& link = j.at("repeat_of");
    run.repeat_of = link.is_null() ? std::nullopt : std::optional<WfId>(link.get<WfId>());
}

void to_json(Json& j, const JobResourceMapping& row) {
    j = Json{{"wf_id", row.wf_id},
             {"job", row.job_name},
             {"host_ip", row.host_ip},
             {"nodename", row.nodename},
             {"flavor_id", row.flavor_id},
             {"min_ram_mb", row.min_ram_mb},
             {"min_hd_gb", row.min_hd_gb},
             {"vcpus", row.vcpus},
             {"image_name", row.image_name},
             {"image_id", row.image_id}};
}

void from_json(const Json& j, JobResourceMapping& row) {
    j.at("wf_id").get_to(row.wf_id);
    j.at("job").get_to(row.job_name);
    j.at("host_ip").get_to(row.host_ip);
    j.at("nodename").get_to(row.nodename);
    j.at("flavor_id").get_to(row.flavor_id);
    j.at("min_ram_mb").get_to(row.min_ram_mb);
    j.at("min_hd_gb").get_to(row.min_hd_gb);
    j.at("vcpus").get_to(row.vcpus);
    j.at("image_name").get_to(row.image_name);
    j.at("image_id").get_to(row.image_id);
}

}  // namespace provrepro
