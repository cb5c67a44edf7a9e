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

#include "provrepro/reproduce.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "provrepro/error.hpp"

namespace provrepro {

std::string repeat_nodename(std::string_view nodename) {
    const auto dot = nodename.find('.');
    if (dot == std::string_view::npos) {
        return std::string(nodename) + "-rep";
    }
    return fmt::format("{}-rep{}", nodename.substr(0, dot), nodename.substr(dot));
}

RepeatResult RepeatEngine::repeat_workflow(WfId src) {
    // Archived workflow and its resource mapping.
    const auto source = store_.get_mappings(src);
    const auto specs = store_.distinct_resource_specs(src);

    std::vector<std::string> missing;
    for (const auto& ref : external_inputs(source.definition)) {
        if (!cloud_.exists(ref)) {
            missing.push_back(to_string(ref));
        }
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::InputsMissing,
                    fmt::format("inputs of wf {} are gone from the object store: {}",
                                to_string(src), fmt::join(missing, ", ")));
    }

    // Fresh VMs with identical flavor and image.
    RepeatResult result;
    for (const auto& spec : specs) {
        try {
            result.nodes.push_back(cloud_.provision_vm(spec.flavor_id, spec.image_id,
                                                       repeat_nodename(spec.nodename), owner_));
        } catch (const Error& e) {
            throw Error(ErrorCode::ProvisioningFailed,
                        fmt::format("cannot re-provision {} (flavor {}, image {}): {}",
                                    spec.nodename, spec.flavor_id, spec.image_id, e.what()));
        }
    }

    // Submit under a new wf_id, then capture its provenance.
    Executor executor(cloud_, db_);
    result.run = executor.submit_on(source.definition, result.nodes, {}, {src});
    const ProvenanceAggregator aggregator(cloud_, db_, owner_);
    result.capture = aggregator.capture(result.run.wf_id, store_);
    return result;
}

std::string to_string(const HostConfig& c) {
    return fmt::format("flavor {} ({} MB RAM, {} GB disk, {} vCPU) image {}", c.flavor_id,
                       c.ram_mb, c.hd_gb, c.vcpus, c.image_id);
}

namespace {

std::vector<HostConfig> host_configs(const CapturedWorkflow& captured) {
    std::map<std::string, HostConfig> by_host;
    for (const auto& row : captured.rows) {
        by_host.emplace(row.host_ip, HostConfig{row.flavor_id, row.min_ram_mb, row.min_hd_gb,
                                                row.vcpus, row.image_id});
    }
    std::vector<HostConfig> configs;
    for (auto& [ip, config] : by_host) {
        configs.push_back(std::move(config));
    }
    std::sort(configs.begin(), configs.end());
    return configs;
}

}  // namespace

InfrastructureComparison compare_infrastructure(const ProvenanceStore& store, WfId src,
                                                WfId dest) {
    InfrastructureComparison result;
    result.src_hosts = host_configs(store.get_mappings(src));
    result.dest_hosts = host_configs(store.get_mappings(dest));
    result.equal = result.src_hosts == result.dest_hosts;
    if (result.equal) {
        return result;
    }
    std::map<HostConfig, int> balance;
    for (const auto& c : result.src_hosts) {
        ++balance[c];
    }
    for (const auto& c : result.dest_hosts) {
        --balance[c];
    }
    for (const auto& [config, count] : balance) {
        if (count > 0) {
            result.diff.push_back(fmt::format("only in wf {} ({}x): {}", to_string(src), count,
                                              to_string(config)));
        } else if (count < 0) {
            result.diff.push_back(fmt::format("only in wf {} ({}x): {}", to_string(dest),
                                              -count, to_string(config)));
        }
    }
    return result;
}

}  // namespace provrepro
