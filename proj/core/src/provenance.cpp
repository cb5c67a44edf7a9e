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

#include "provrepro/provenance.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "csv.hpp"
#include "json_codec.hpp"
#include "provrepro/error.hpp"
#include "provrepro/state.hpp"

namespace provrepro {

namespace fs = std::filesystem;

namespace {

void sort_by_job(std::vector<JobResourceMapping>& rows) {
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.job_name < b.job_name; });
}

std::optional<WfId> parse_capture_filename(const fs::path& path) {
    if (path.extension() != ".jsonl") {
        return std::nullopt;
    }
    const auto stem = path.stem().string();
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), value);
    if (ec != std::errc{} || ptr != stem.data() + stem.size() || value <= 0) {
        return std::nullopt;
    }
    return WfId{value};
}

CapturedWorkflow parse_capture(const fs::path& path, const std::string& text) {
    CapturedWorkflow captured;
    std::istringstream lines(text);
    std::string line;
    bool header = false;
    try {
        while (std::getline(lines, line)) {
            if (line.empty()) {
                continue;
            }
            const auto record = Json::parse(line);
            const auto type = record.at("type").get<std::string>();
            if (type == "workflow") {
                record.at("wf_id").get_to(captured.wf_id);
                const auto& link = record.at("repeat_of");
                if (!link.is_null()) {
                    captured.repeat_of = link.get<WfId>();
                }
                record.at("definition").get_to(captured.definition);
                header = true;
            } else if (type == "mapping") {
                captured.rows.push_back(record.get<JobResourceMapping>());
            }
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::StoreCorruption,
                    fmt::format("bad record in {}: {}", path.string(), e.what()));
    }
    if (!header) {
        throw Error(ErrorCode::StoreCorruption,
                    fmt::format("{} has no workflow header", path.string()));
    }
    return captured;
}

}  // namespace

ProvenanceStore::ProvenanceStore(const fs::path& home) : dir_(home / "prov") {}

fs::path ProvenanceStore::file_for(WfId wf_id) const {
    return dir_ / (to_string(wf_id) + ".jsonl");
}

void ProvenanceStore::store_mappings(WfId wf_id, std::span<const JobResourceMapping> rows,
                                     const WorkflowDefinition& definition,
                                     const StoreOptions& options) {
    if (wf_id.value <= 0) {
        throw Error(ErrorCode::PreconditionViolation, "wf_id must be positive");
    }
    std::set<std::string> jobs;
    for (const auto& row : rows) {
        if (row.wf_id != wf_id) {
            throw Error(ErrorCode::PreconditionViolation,
                        fmt::format("row for job '{}' belongs to wf {} not {}", row.job_name,
                                    to_string(row.wf_id), to_string(wf_id)));
        }
        if (!jobs.insert(row.job_name).second) {
            throw Error(ErrorCode::PreconditionViolation,
                        fmt::format("job '{}' mapped twice", row.job_name));
        }
        if (definition.find(row.job_name) == nullptr) {
            throw Error(ErrorCode::PreconditionViolation,
                        fmt::format("job '{}' is not in the definition", row.job_name));
        }
    }
    if (options.repeat_of && *options.repeat_of >= wf_id) {
        throw Error(ErrorCode::PreconditionViolation,
                    fmt::format("repeat_of {} must precede {}", to_string(*options.repeat_of),
                                to_string(wf_id)));
    }

    std::vector<JobResourceMapping> sorted(rows.begin(), rows.end());
    sort_by_job(sorted);
    std::string text =
        Json{{"type", "workflow"},
             {"wf_id", wf_id},
             {"repeat_of", options.repeat_of ? Json(options.repeat_of->value) : Json(nullptr)},
             {"definition", definition}}
            .dump();
    text += '\n';
    for (const auto& row : sorted) {
        auto record = Json(row);
        record["type"] = "mapping";
        text += record.dump();
        text += '\n';
    }

    const FileLock lock(dir_ / "lock");
    const auto path = file_for(wf_id);
    std::error_code ec;
    if (!options.force && fs::exists(path, ec)) {
        throw Error(ErrorCode::DuplicateCapture,
                    fmt::format("wf {} is already captured (use force to replace)",
                                to_string(wf_id)));
    }
    write_file_atomic(path, text);
    rewrite_index();
}

void ProvenanceStore::rewrite_index() const {
    std::string text;
    for (const auto id : captured()) {
        const auto content = read_file(file_for(id));
        if (!content) {
            continue;
        }
        const auto captured = parse_capture(file_for(id), *content);
        text += Json{{"wf_id", id},
                     {"repeat_of", captured.repeat_of ? Json(captured.repeat_of->value)
                                                      : Json(nullptr)},
                     {"label", captured.definition.label},
                     {"rows", captured.rows.size()}}
                    .dump();
        text += '\n';
    }
    write_file_atomic(dir_ / "index", text);
}

bool ProvenanceStore::is_captured(WfId wf_id) const {
    std::error_code ec;
    return fs::is_regular_file(file_for(wf_id), ec);
}

std::vector<WfId> ProvenanceStore::captured() const {
    std::vector<WfId> ids;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir_, ec)) {
        if (auto id = parse_capture_filename(entry.path())) {
            ids.push_back(*id);
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

CapturedWorkflow ProvenanceStore::get_mappings(WfId wf_id) const {
    const auto path = file_for(wf_id);
    const auto content = read_file(path);
    if (!content) {
        throw Error(ErrorCode::NotCaptured,
                    fmt::format("wf {} has no Cloud-aware provenance", to_string(wf_id)));
    }
    auto captured = parse_capture(path, *content);
    if (captured.wf_id != wf_id) {
        throw Error(ErrorCode::StoreCorruption,
                    fmt::format("{} holds wf {}", path.string(), to_string(captured.wf_id)));
    }
    std::set<std::string> seen;
    for (const auto& row : captured.rows) {
        if (row.wf_id != wf_id || !seen.insert(row.job_name).second) {
            throw Error(ErrorCode::StoreCorruption,
                        fmt::format("inconsistent mapping rows in {}", path.string()));
        }
    }
    sort_by_job(captured.rows);
    return captured;
}

std::vector<ResourceSpec> distinct_resource_specs(std::span<const JobResourceMapping> rows,
                                                  std::span<const std::string> job_order) {
    std::map<std::string, const JobResourceMapping*> by_job;
    for (const auto& row : rows) {
        by_job.emplace(row.job_name, &row);
    }
    std::vector<ResourceSpec> specs;
    std::set<std::string> hosts;
    const auto visit = [&](const JobResourceMapping& row) {
        if (hosts.insert(row.host_ip).second) {
            specs.push_back({row.host_ip, row.nodename, row.flavor_id, row.image_id});
        }
    };
    for (const auto& job : job_order) {
        if (auto it = by_job.find(job); it != by_job.end()) {
            visit(*it->second);
        }
    }
    // Rows for jobs outside job_order still count, after the ordered ones.
    for (const auto& row : rows) {
        visit(row);
    }
    return specs;
}

std::vector<ResourceSpec> ProvenanceStore::distinct_resource_specs(WfId wf_id) const {
    const auto captured = get_mappings(wf_id);
    const auto order = topological_order(captured.definition);
    return provrepro::distinct_resource_specs(captured.rows, order);
}

MappingResult ProvenanceAggregator::map_jobs_to_vms(WfId wf_id) const {
    const auto records = db_.get_workflow_jobs(wf_id);
    const auto vms = cloud_.list_vms(owner_);
    MappingResult result;
    for (const auto& record : records) {
        const VmInstance* host = nullptr;
        for (const auto& vm : vms) {
            if (vm.ip != record.host_ip) {
                continue;
            }
            if (host != nullptr) {
                throw Error(ErrorCode::StoreCorruption,
                            fmt::format("two active VMs carry ip {}", vm.ip));
            }
            host = &vm;
        }
        if (host == nullptr) {
            result.unmapped.push_back({record.job_name, record.host_ip});
            continue;
        }
        const auto& flavor = cloud_.flavor(host->flavor_id);
        const auto& image = cloud_.image(host->image_id);
        result.rows.push_back({wf_id, record.job_name, host->ip, host->nodename,
                               flavor.flavor_id, flavor.ram_mb, flavor.disk_gb, flavor.vcpus,
                               image.image_name, image.image_id});
    }
    sort_by_job(result.rows);
    return result;
}

CapturedWorkflow ProvenanceAggregator::capture(WfId wf_id, ProvenanceStore& store,
                                               bool force) const {
    const auto run = db_.get(wf_id);
    auto result = map_jobs_to_vms(wf_id);
    if (!result.complete()) {
        std::vector<std::string> parts;
        for (const auto& u : result.unmapped) {
            parts.push_back(fmt::format("{}@{}", u.job, u.ip));
        }
        throw Error(ErrorCode::UnmappedJob,
                    fmt::format("no active VM for job(s) {} of wf {}", fmt::join(parts, ", "),
                                to_string(wf_id)));
    }
    store.store_mappings(wf_id, result.rows, run.definition, {run.repeat_of, force});
    return CapturedWorkflow{wf_id, run.repeat_of, run.definition, std::move(result.rows)};
}

std::string infrastructure_csv(const CapturedWorkflow& captured, bool per_job) {
    std::string out(kInfrastructureCsvHeader);
    out.push_back('\n');
    const auto emit = [&](const JobResourceMapping& row) {
        const auto id = to_string(row.wf_id);
        const auto flavor = std::to_string(row.flavor_id);
        const auto ram = std::to_string(row.min_ram_mb);
        const auto hd = std::to_string(row.min_hd_gb);
        const auto cpu = std::to_string(row.vcpus);
        out += csv_row({id, row.host_ip, row.nodename, flavor, ram, hd, cpu, row.image_name,
                        row.image_id});
    };
    const auto order = topological_order(captured.definition);
    if (per_job) {
        for (const auto& job : order) {
            for (const auto& row : captured.rows) {
                if (row.job_name == job) {
                    emit(row);
                }
            }
        }
        return out;
    }
    std::set<std::string> hosts;
    for (const auto& job : order) {
        for (const auto& row : captured.rows) {
            if (row.job_name == job && hosts.insert(row.host_ip).second) {
                emit(row);
            }
        }
    }
    return out;
}

}  // namespace provrepro
