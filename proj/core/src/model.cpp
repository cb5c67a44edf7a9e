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

#include "provrepro/model.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "provrepro/error.hpp"
#include "provrepro/md5.hpp"

namespace provrepro {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ValidationFailed: return "ValidationFailed";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnknownFlavor: return "UnknownFlavor";
        case ErrorCode::UnknownImage: return "UnknownImage";
        case ErrorCode::IpSpaceExhausted: return "IpSpaceExhausted";
        case ErrorCode::NoSuchInstance: return "NoSuchInstance";
        case ErrorCode::InvalidName: return "InvalidName";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::StagingError: return "StagingError";
        case ErrorCode::MissingInput: return "MissingInput";
        case ErrorCode::MalformedInput: return "MalformedInput";
        case ErrorCode::UnknownWorkflow: return "UnknownWorkflow";
        case ErrorCode::UnmappedJob: return "UnmappedJob";
        case ErrorCode::DuplicateCapture: return "DuplicateCapture";
        case ErrorCode::NotCaptured: return "NotCaptured";
        case ErrorCode::PreconditionViolation: return "PreconditionViolation";
        case ErrorCode::StoreCorruption: return "StoreCorruption";
        case ErrorCode::ProvisioningFailed: return "ProvisioningFailed";
        case ErrorCode::InputsMissing: return "InputsMissing";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::string to_string(WfId id) { return std::to_string(id.value); }

std::string to_string(const FileRef& ref) {
    return ref.container + "/" + ref.filename;
}

std::string_view to_string(JobKind kind) noexcept {
    switch (kind) {
        case JobKind::Split: return "split";
        case JobKind::WordCount: return "wordcount";
        case JobKind::Merge: return "merge";
        case JobKind::MemHog: return "memhog";
    }
    return "unknown";
}

std::optional<JobKind> parse_job_kind(std::string_view text) noexcept {
    for (auto kind : {JobKind::Split, JobKind::WordCount, JobKind::Merge,
                      JobKind::MemHog}) {
        if (to_string(kind) == text) {
            return kind;
        }
    }
    return std::nullopt;
}

Arity arity_of(JobKind kind) noexcept {
    switch (kind) {
        case JobKind::Split: return {1, 2};
        case JobKind::WordCount: return {1, 1};
        case JobKind::Merge: return {2, 1};
        case JobKind::MemHog: return {0, 0};
    }
    return {0, 0};
}

std::string_view to_string(IssueKind kind) noexcept {
    switch (kind) {
        case IssueKind::CyclicDependency: return "CyclicDependency";
        case IssueKind::UnknownDependency: return "UnknownDependency";
        case IssueKind::ArityMismatch: return "ArityMismatch";
        case IssueKind::DuplicateJobName: return "DuplicateJobName";
        case IssueKind::UnproducedInput: return "UnproducedInput";
        case IssueKind::DuplicateOutput: return "DuplicateOutput";
        case IssueKind::InvalidField: return "InvalidField";
    }
    return "Unknown";
}

std::string_view to_string(VmState state) noexcept {
    return state == VmState::Active ? "active" : "destroyed";
}

std::string_view to_string(JobStatus status) noexcept {
    return status == JobStatus::Succeeded ? "succeeded" : "failed_oom";
}

const JobDefinition* WorkflowDefinition::find(std::string_view name) const {
    const auto it = std::find_if(jobs.begin(), jobs.end(),
                                 [&](const auto& job) { return job.name == name; });
    return it == jobs.end() ? nullptr : &*it;
}

namespace {

bool valid_ref(const FileRef& ref) {
    return !ref.container.empty() && !ref.filename.empty() &&
           ref.container.find('/') == std::string::npos &&
           ref.filename.find('/') == std::string::npos;
}

// Every job reachable through depends_on edges, excluding `start` unless it
// lies on a cycle through itself.
std::set<std::string> ancestors(
    const std::map<std::string, const JobDefinition*>& by_name,
    const std::string& start) {
    std::set<std::string> seen;
    std::vector<std::string> stack;
    if (auto it = by_name.find(start); it != by_name.end()) {
        stack = it->second->depends_on;
    }
    while (!stack.empty()) {
        auto name = std::move(stack.back());
        stack.pop_back();
        if (!seen.insert(name).second) {
            continue;
        }
        if (auto it = by_name.find(name); it != by_name.end()) {
            for (const auto& dep : it->second->depends_on) {
                stack.push_back(dep);
            }
        }
    }
    return seen;
}

}  // namespace

std::vector<ValidationIssue> validate_workflow(const WorkflowDefinition& def) {
    std::vector<ValidationIssue> issues;
    auto report = [&](IssueKind kind, const std::string& job, std::string msg) {
        issues.push_back({kind, job, std::move(msg)});
    };

    std::map<std::string, const JobDefinition*> by_name;
    for (const auto& job : def.jobs) {
        if (job.name.empty()) {
            report(IssueKind::InvalidField, job.name, "job name is empty");
            continue;
        }
        if (!by_name.emplace(job.name, &job).second) {
            report(IssueKind::DuplicateJobName, job.name,
                   fmt::format("job name '{}' is declared more than once", job.name));
        }
    }

    std::map<std::string, std::string> producer_of_file;  // filename -> job
    std::map<FileRef, std::string> producer_of_ref;
    for (const auto& job : def.jobs) {
        if (job.required_ram_mb <= 0) {
            report(IssueKind::InvalidField, job.name,
                   fmt::format("job '{}': required_ram_mb must be positive, got {}",
                               job.name, job.required_ram_mb));
        }
        const auto arity = arity_of(job.kind);
        if (job.inputs.size() != arity.inputs || job.outputs.size() != arity.outputs) {
            report(IssueKind::ArityMismatch, job.name,
                   fmt::format("job '{}': kind {} takes {} input(s) and {} output(s), "
                               "declared {} and {}",
                               job.name, to_string(job.kind), arity.inputs,
                               arity.outputs, job.inputs.size(), job.outputs.size()));
        }
        for (const auto& ref : job.inputs) {
            if (!valid_ref(ref)) {
                report(IssueKind::InvalidField, job.name,
                       fmt::format("job '{}': invalid input reference '{}'", job.name,
                                   to_string(ref)));
            }
        }
        for (const auto& ref : job.outputs) {
            if (!valid_ref(ref)) {
                report(IssueKind::InvalidField, job.name,
                       fmt::format("job '{}': invalid output reference '{}'", job.name,
                                   to_string(ref)));
                continue;
            }
            producer_of_ref.emplace(ref, job.name);
            auto [it, inserted] = producer_of_file.emplace(ref.filename, job.name);
            if (!inserted) {
                report(IssueKind::DuplicateOutput, job.name,
                       fmt::format("job '{}': output filename '{}' is also produced by '{}'",
                                   job.name, ref.filename, it->second));
            }
        }
        for (const auto& dep : job.depends_on) {
            if (dep == job.name) {
                report(IssueKind::CyclicDependency, job.name,
                       fmt::format("job '{}' depends on itself", job.name));
            } else if (!by_name.contains(dep)) {
                report(IssueKind::UnknownDependency, job.name,
                       fmt::format("job '{}' depends on unknown job '{}'", job.name, dep));
            }
        }
    }

    // Kahn's algorithm over known, non-self edges; leftovers sit on a cycle
    // or downstream of one.
    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> dependents;
    for (const auto& [name, job] : by_name) {
        indegree.emplace(name, 0);
    }
    for (const auto& [name, job] : by_name) {
        for (const auto& dep : std::set<std::string>(job->depends_on.begin(),
                                                     job->depends_on.end())) {
            if (dep != name && by_name.contains(dep)) {
                ++indegree[name];
                dependents[dep].push_back(name);
            }
        }
    }
    std::vector<std::string> ready;
    for (const auto& [name, degree] : indegree) {
        if (degree == 0) {
            ready.push_back(name);
        }
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        auto name = std::move(ready.back());
        ready.pop_back();
        ++visited;
        for (const auto& next : dependents[name]) {
            if (--indegree[next] == 0) {
                ready.push_back(next);
            }
        }
    }
    if (visited != by_name.size()) {
        std::vector<std::string> stuck;
        for (const auto& [name, degree] : indegree) {
            if (degree > 0) {
                stuck.push_back(name);
            }
        }
        // Anchored at the first blocked job so file diagnostics get a line.
        report(IssueKind::CyclicDependency, stuck.front(),
               fmt::format("dependency cycle among jobs: {}", fmt::join(stuck, ", ")));
    }

    for (const auto& job : def.jobs) {
        if (job.name.empty()) {
            continue;
        }
        const auto upstream = ancestors(by_name, job.name);
        for (const auto& ref : job.inputs) {
            const auto it = producer_of_ref.find(ref);
            if (it == producer_of_ref.end()) {
                continue;  // external input
            }
            if (it->second == job.name || !upstream.contains(it->second)) {
                report(IssueKind::UnproducedInput, job.name,
                       fmt::format("job '{}' consumes '{}' produced by '{}', which is "
                                   "not among its dependencies",
                                   job.name, to_string(ref), it->second));
            }
        }
    }
    return issues;
}

void require_valid(const WorkflowDefinition& def) {
    const auto issues = validate_workflow(def);
    if (issues.empty()) {
        return;
    }
    std::vector<std::string> lines;
    lines.reserve(issues.size());
    for (const auto& issue : issues) {
        lines.push_back(fmt::format("{}: {}", to_string(issue.kind), issue.message));
    }
    throw Error(ErrorCode::ValidationFailed, fmt::format("{}", fmt::join(lines, "; ")));
}

std::vector<std::string> topological_order(const WorkflowDefinition& def) {
    std::map<std::string, std::set<std::string>> pending;
    std::map<std::string, std::vector<std::string>> dependents;
    for (const auto& job : def.jobs) {
        if (!pending.emplace(job.name, std::set<std::string>{}).second) {
            throw Error(ErrorCode::ValidationFailed,
                        fmt::format("duplicate job name '{}'", job.name));
        }
    }
    for (const auto& job : def.jobs) {
        for (const auto& dep : job.depends_on) {
            if (!pending.contains(dep)) {
                throw Error(ErrorCode::ValidationFailed,
                            fmt::format("job '{}' depends on unknown job '{}'",
                                        job.name, dep));
            }
            if (pending[job.name].insert(dep).second) {
                dependents[dep].push_back(job.name);
            }
        }
    }
    std::set<std::string> ready;
    for (const auto& [name, deps] : pending) {
        if (deps.empty()) {
            ready.insert(name);
        }
    }
    std::vector<std::string> order;
    order.reserve(def.jobs.size());
    while (!ready.empty()) {
        auto name = *ready.begin();
        ready.erase(ready.begin());
        for (const auto& next : dependents[name]) {
            auto& deps = pending[next];
            deps.erase(name);
            if (deps.empty()) {
                ready.insert(next);
            }
        }
        order.push_back(std::move(name));
    }
    if (order.size() != def.jobs.size()) {
        throw Error(ErrorCode::ValidationFailed, "dependency graph has a cycle");
    }
    return order;
}

std::vector<FileRef> external_inputs(const WorkflowDefinition& def) {
    std::set<FileRef> produced;
    for (const auto& job : def.jobs) {
        produced.insert(job.outputs.begin(), job.outputs.end());
    }
    std::vector<FileRef> external;
    std::set<FileRef> seen;
    for (const auto& job : def.jobs) {
        for (const auto& ref : job.inputs) {
            if (!produced.contains(ref) && seen.insert(ref).second) {
                external.push_back(ref);
            }
        }
    }
    return external;
}

bool WorkflowRun::succeeded() const {
    if (job_records.size() != definition.jobs.size()) {
        return false;
    }
    return std::all_of(job_records.begin(), job_records.end(), [](const auto& r) {
        return r.status == JobStatus::Succeeded;
    });
}

const JobRecord* WorkflowRun::record_for(std::string_view job) const {
    const auto it = std::find_if(job_records.begin(), job_records.end(),
                                 [&](const auto& r) { return r.job_name == job; });
    return it == job_records.end() ? nullptr : &*it;
}

bool JobResourceMapping::agrees_with(const Flavor& flavor) const noexcept {
    return flavor.flavor_id == flavor_id && flavor.ram_mb == min_ram_mb &&
           flavor.disk_gb == min_hd_gb && flavor.vcpus == vcpus;
}

CloudFile::CloudFile(FileRef ref, std::string content)
    : ref_(std::move(ref)), content_(std::move(content)), md5_hex_(provrepro::md5_hex(content_)) {}

}  // namespace provrepro
