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

#include "provrepro/executor.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json_codec.hpp"
#include "provrepro/error.hpp"
#include "provrepro/jobs.hpp"
#include "provrepro/state.hpp"

namespace provrepro {

namespace fs = std::filesystem;

ClusterSpec ClusterSpec::uniform(std::size_t count, int flavor_id, std::string image_id) {
    ClusterSpec spec;
    for (std::size_t i = 1; i <= count; ++i) {
        spec.nodes.push_back({fmt::format("node{}.novalocal", i), flavor_id, image_id});
    }
    return spec;
}

void check_cluster(const ClusterSpec& spec) {
    if (spec.nodes.empty()) {
        throw Error(ErrorCode::PreconditionViolation, "cluster needs at least one node");
    }
    std::set<std::string> names;
    for (const auto& node : spec.nodes) {
        if (!names.insert(node.nodename).second) {
            throw Error(ErrorCode::PreconditionViolation,
                        fmt::format("duplicate nodename '{}'", node.nodename));
        }
    }
}

std::string output_container_for(WfId id) { return "wfoutput" + to_string(id); }

// --- ExecutionDb -----------------------------------------------------------

namespace {

struct DbContents {
    std::vector<WorkflowRun> runs;
    std::int64_t max_id = 0;
};

DbContents load_db(const fs::path& file) {
    DbContents db;
    const auto text = read_file(file);
    if (!text) {
        return db;
    }
    std::istringstream lines(*text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) {
            continue;
        }
        try {
            const auto record = Json::parse(line);
            const auto type = record.at("type").get<std::string>();
            const auto id = record.at("wf_id").get<std::int64_t>();
            db.max_id = std::max(db.max_id, id);
            if (type == "run") {
                db.runs.push_back(record.get<WorkflowRun>());
            }
        } catch (const Json::exception& e) {
            if (lines.peek() == std::char_traits<char>::eof()) {
                break;  // torn final append
            }
            throw Error(ErrorCode::StoreCorruption,
                        fmt::format("bad record in {}: {}", file.string(), e.what()));
        }
    }
    return db;
}

}  // namespace

ExecutionDb::ExecutionDb(const fs::path& home) : dir_(home / "wms") {}

WfId ExecutionDb::reserve_id() {
    const FileLock lock(dir_ / "lock");
    const WfId id{load_db(dir_ / "runs").max_id + 1};
    append_line(dir_ / "runs", Json{{"type", "reserve"}, {"wf_id", id.value}}.dump());
    return id;
}

void ExecutionDb::append(const WorkflowRun& run) {
    const FileLock lock(dir_ / "lock");
    const auto db = load_db(dir_ / "runs");
    if (run.wf_id.value <= 0 || run.wf_id.value > db.max_id) {
        throw Error(ErrorCode::PreconditionViolation,
                    fmt::format("wf_id {} was not reserved", to_string(run.wf_id)));
    }
    for (const auto& existing : db.runs) {
        if (existing.wf_id == run.wf_id) {
            throw Error(ErrorCode::PreconditionViolation,
                        fmt::format("wf_id {} already recorded", to_string(run.wf_id)));
        }
    }
    if (run.repeat_of) {
        const bool known = std::any_of(db.runs.begin(), db.runs.end(), [&](const auto& r) {
            return r.wf_id == *run.repeat_of;
        });
        if (!known || *run.repeat_of >= run.wf_id) {
            throw Error(ErrorCode::PreconditionViolation,
                        fmt::format("repeat_of {} is not an earlier run",
                                    to_string(*run.repeat_of)));
        }
    }
    auto record = Json(run);
    record["type"] = "run";
    append_line(dir_ / "runs", record.dump());
}

std::vector<WorkflowRun> ExecutionDb::runs() const {
    const FileLock lock(dir_ / "lock");
    auto runs = load_db(dir_ / "runs").runs;
    std::sort(runs.begin(), runs.end(),
              [](const auto& a, const auto& b) { return a.wf_id < b.wf_id; });
    return runs;
}

std::optional<WorkflowRun> ExecutionDb::find(WfId id) const {
    for (auto& run : runs()) {
        if (run.wf_id == id) {
            return std::move(run);
        }
    }
    return std::nullopt;
}

WorkflowRun ExecutionDb::get(WfId id) const {
    auto run = find(id);
    if (!run) {
        throw Error(ErrorCode::UnknownWorkflow, fmt::format("no workflow {}", to_string(id)));
    }
    return std::move(*run);
}

std::vector<JobRecord> ExecutionDb::get_workflow_jobs(WfId id) const {
    const auto run = get(id);
    std::vector<JobRecord> ordered;
    for (const auto& name : topological_order(run.definition)) {
        if (const auto* record = run.record_for(name)) {
            ordered.push_back(*record);
        }
    }
    return ordered;
}

// --- scheduling and execution ----------------------------------------------

std::vector<Assignment> plan_schedule(const WorkflowDefinition& def, std::size_t node_count) {
    std::vector<Assignment> plan;
    if (def.jobs.empty()) {
        return plan;
    }
    if (node_count == 0) {
        throw Error(ErrorCode::PreconditionViolation, "no nodes to schedule on");
    }
    const auto order = topological_order(def);
    plan.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        plan.push_back({order[i], i % node_count});
    }
    return plan;
}

std::vector<VmInstance> Executor::provision_cluster(const ClusterSpec& spec,
                                                    const std::string& owner) {
    check_cluster(spec);
    std::vector<VmInstance> nodes;
    nodes.reserve(spec.nodes.size());
    for (const auto& node : spec.nodes) {
        nodes.push_back(cloud_.provision_vm(node.flavor_id, node.image_id, node.nodename, owner));
    }
    return nodes;
}

void Executor::stage_inputs(std::span<const StagedInput> inputs) {
    for (const auto& input : inputs) {
        try {
            if (cloud_.exists(input.ref)) {
                const auto existing = cloud_.get_cloud_file(input.ref);
                if (existing.content() != input.content) {
                    throw Error(ErrorCode::StagingError,
                                fmt::format("{} already holds different content",
                                            to_string(input.ref)));
                }
                continue;
            }
            cloud_.put_cloud_file(input.ref, input.content);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::StagingError) {
                throw;
            }
            throw Error(ErrorCode::StagingError,
                        fmt::format("cannot stage {}: {}", to_string(input.ref), e.what()));
        }
    }
}

WorkflowRun Executor::submit_workflow(const WorkflowDefinition& def, const ClusterSpec& cluster,
                                      std::span<const StagedInput> inputs,
                                      const SubmitOptions& options) {
    require_valid(def);
    const auto nodes = provision_cluster(cluster);
    return submit_on(def, nodes, inputs, options);
}

WorkflowRun Executor::submit_on(const WorkflowDefinition& def, std::span<const VmInstance> nodes,
                                std::span<const StagedInput> inputs,
                                const SubmitOptions& options) {
    require_valid(def);
    const auto plan = plan_schedule(def, nodes.size());
    for (const auto& node : nodes) {
        if (!cloud_.find_active(node.ip)) {
            throw Error(ErrorCode::PreconditionViolation,
                        fmt::format("node {} ({}) is not active", node.nodename, node.ip));
        }
    }
    stage_inputs(inputs);
    std::vector<std::string> missing;
    for (const auto& ref : external_inputs(def)) {
        if (!cloud_.exists(ref)) {
            missing.push_back(to_string(ref));
        }
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::StagingError,
                    fmt::format("external inputs not in the object store: {}",
                                fmt::join(missing, ", ")));
    }
    if (options.repeat_of && !db_.find(*options.repeat_of)) {
        throw Error(ErrorCode::UnknownWorkflow,
                    fmt::format("repeat_of {} does not exist", to_string(*options.repeat_of)));
    }

    WorkflowRun run;
    run.wf_id = db_.reserve_id();
    run.definition = def;
    run.output_container = output_container_for(run.wf_id);
    run.repeat_of = options.repeat_of;

    std::set<FileRef> produced_refs;
    for (const auto& job : def.jobs) {
        produced_refs.insert(job.outputs.begin(), job.outputs.end());
    }
    const auto resolve = [&](const FileRef& ref) {
        return produced_refs.contains(ref) ? FileRef{run.output_container, ref.filename} : ref;
    };

    std::set<std::string> succeeded;
    int seq = 0;
    for (const auto& step : plan) {
        const auto& job = *def.find(step.job);
        const bool ready = std::all_of(job.depends_on.begin(), job.depends_on.end(),
                                       [&](const auto& dep) { return succeeded.contains(dep); });
        if (!ready) {
            continue;
        }
        std::vector<FileRef> in;
        std::vector<FileRef> out;
        std::transform(job.inputs.begin(), job.inputs.end(), std::back_inserter(in), resolve);
        std::transform(job.outputs.begin(), job.outputs.end(), std::back_inserter(out), resolve);
        auto record = run_job(job, nodes[step.node], in, out, seq++);
        if (record.status == JobStatus::Succeeded) {
            succeeded.insert(job.name);
        }
        run.job_records.push_back(std::move(record));
    }
    db_.append(run);
    return run;
}

JobRecord Executor::run_job(const JobDefinition& job, const VmInstance& node,
                            std::span<const FileRef> inputs, std::span<const FileRef> outputs,
                            int start_seq) {
    const auto arity = arity_of(job.kind);
    if (inputs.size() != arity.inputs || outputs.size() != arity.outputs) {
        throw Error(ErrorCode::PreconditionViolation,
                    fmt::format("job '{}' bound to {} input(s) and {} output(s)", job.name,
                                inputs.size(), outputs.size()));
    }
    if (!cloud_.find_active(node.ip)) {
        throw Error(ErrorCode::PreconditionViolation,
                    fmt::format("node {} is not active", node.ip));
    }
    JobRecord record{job.name, node.ip, JobStatus::Succeeded, {}, start_seq};
    if (!fits_in_memory(job.required_ram_mb, cloud_.flavor(node.flavor_id).ram_mb)) {
        record.status = JobStatus::FailedOom;
        return record;
    }

    std::vector<std::string> contents;
    for (const auto& ref : inputs) {
        try {
            contents.push_back(cloud_.get_cloud_file(ref).content());
        } catch (const Error& e) {
            if (e.code() != ErrorCode::FileNotFound) {
                throw;
            }
            throw Error(ErrorCode::MissingInput,
                        fmt::format("job '{}' input {} is missing", job.name, to_string(ref)));
        }
    }

    std::vector<std::string> results;
    switch (job.kind) {
        case JobKind::Split: {
            auto [left, right] = split_text(contents[0]);
            results = {std::move(left), std::move(right)};
            break;
        }
        case JobKind::WordCount:
            results = {word_count(contents[0])};
            break;
        case JobKind::Merge:
            results = {merge_counts(contents[0], contents[1])};
            break;
        case JobKind::MemHog:
            break;
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        cloud_.put_cloud_file(outputs[i], std::move(results[i]));
        record.produced.push_back(outputs[i]);
    }
    return record;
}

std::vector<std::string> unfinished_jobs(const WorkflowRun& run) {
    std::vector<std::string> names;
    for (const auto& job : run.definition.jobs) {
        const auto* record = run.record_for(job.name);
        if (record == nullptr || record->status != JobStatus::Succeeded) {
            names.push_back(job.name);
        }
    }
    return names;
}

}  // namespace provrepro
