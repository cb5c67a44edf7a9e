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

#include "provrepro/simcloud.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json_codec.hpp"
#include "provrepro/error.hpp"
#include "provrepro/md5.hpp"
#include "provrepro/state.hpp"

namespace provrepro {

namespace fs = std::filesystem;

namespace {

constexpr int kFirstHostOctet = 2;
constexpr int kLastHostOctet = 254;

// Parses line-delimited JSON; a torn trailing line (crash mid-append) is
// ignored, anything else malformed is corruption.
std::vector<Json> read_records(const fs::path& path) {
    std::vector<Json> records;
    const auto text = read_file(path);
    if (!text) {
        return records;
    }
    std::istringstream lines(*text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) {
            continue;
        }
        try {
            records.push_back(Json::parse(line));
        } catch (const Json::parse_error&) {
            if (lines.peek() == std::char_traits<char>::eof()) {
                break;
            }
            throw Error(ErrorCode::StoreCorruption,
                        fmt::format("malformed record in {}", path.string()));
        }
    }
    return records;
}

}  // namespace

void check_store_name(std::string_view name, std::string_view what) {
    if (name.empty() || name == "." || name == ".." ||
        name.find('/') != std::string_view::npos ||
        name.find('\0') != std::string_view::npos) {
        throw Error(ErrorCode::InvalidName, fmt::format("invalid {} name '{}'", what, name));
    }
}

Catalog Catalog::defaults() {
    return Catalog{
        {
            {1, "m1.tiny", 512, 20, 1},
            {2, "m1.small", 2048, 20, 1},
            {3, "m1.medium", 4096, 20, 1},
        },
        {{std::string(kDefaultImageId), std::string(kDefaultImageName)}},
    };
}

SimCloud::SimCloud(fs::path home, Catalog catalog)
    : root_(std::move(home) / "cloud"), catalog_(std::move(catalog)) {
    std::set<int> flavor_ids;
    for (const auto& f : catalog_.flavors) {
        if (f.ram_mb <= 0 || f.disk_gb < 0 || f.vcpus < 1 ||
            !flavor_ids.insert(f.flavor_id).second) {
            throw Error(ErrorCode::PreconditionViolation,
                        fmt::format("invalid catalog flavor '{}'", f.name));
        }
    }
    std::set<std::string> image_ids;
    for (const auto& i : catalog_.images) {
        if (i.image_id.empty() || i.image_name.empty() ||
            !image_ids.insert(i.image_id).second) {
            throw Error(ErrorCode::PreconditionViolation,
                        fmt::format("invalid catalog image '{}'", i.image_id));
        }
    }
}

const Flavor& SimCloud::flavor(int flavor_id) const {
    for (const auto& f : catalog_.flavors) {
        if (f.flavor_id == flavor_id) {
            return f;
        }
    }
    throw Error(ErrorCode::UnknownFlavor, fmt::format("no flavor with id {}", flavor_id));
}

const Flavor& SimCloud::flavor_by_name(std::string_view name) const {
    for (const auto& f : catalog_.flavors) {
        if (f.name == name) {
            return f;
        }
    }
    throw Error(ErrorCode::UnknownFlavor, fmt::format("no flavor named '{}'", name));
}

const Image& SimCloud::image(std::string_view image_id) const {
    for (const auto& i : catalog_.images) {
        if (i.image_id == image_id) {
            return i;
        }
    }
    throw Error(ErrorCode::UnknownImage, fmt::format("no image with id '{}'", image_id));
}

std::vector<VmInstance> SimCloud::load_instances() const {
    std::vector<VmInstance> instances;
    for (const auto& record : read_records(root_ / "instances")) {
        try {
            instances.push_back(record.get<VmInstance>());
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::StoreCorruption,
                        fmt::format("bad instance record: {}", e.what()));
        }
    }
    return instances;
}

VmInstance SimCloud::provision_vm(int flavor_id, const std::string& image_id,
                                  const std::string& nodename, const std::string& owner) {
    (void)flavor(flavor_id);
    (void)image(image_id);
    if (nodename.empty()) {
        throw Error(ErrorCode::InvalidName, "nodename must not be empty");
    }
    const FileLock lock(root_ / "lock");
    const auto issued = load_instances().size();
    const auto octet = kFirstHostOctet + static_cast<int>(issued);
    if (octet > kLastHostOctet) {
        throw Error(ErrorCode::IpSpaceExhausted,
                    fmt::format("172.16.1.0/24 exhausted after {} instances", issued));
    }
    VmInstance vm{fmt::format("172.16.1.{}", octet), nodename, flavor_id, image_id,
                  VmState::Active, owner};
    append_line(root_ / "instances", Json(vm).dump());
    return vm;
}

std::vector<VmInstance> SimCloud::list_vms(const std::string& owner) const {
    const FileLock lock(root_ / "lock");
    auto instances = load_instances();
    std::erase_if(instances, [&](const VmInstance& vm) {
        return vm.state != VmState::Active || vm.owner != owner;
    });
    return instances;
}

std::vector<VmInstance> SimCloud::all_instances() const {
    const FileLock lock(root_ / "lock");
    return load_instances();
}

std::optional<VmInstance> SimCloud::find_active(std::string_view ip) const {
    const FileLock lock(root_ / "lock");
    std::optional<VmInstance> found;
    for (auto& vm : load_instances()) {
        if (vm.ip == ip && vm.state == VmState::Active) {
            if (found) {
                throw Error(ErrorCode::StoreCorruption,
                            fmt::format("two active instances share ip {}", ip));
            }
            found = std::move(vm);
        }
    }
    return found;
}

void SimCloud::destroy_vm(const std::string& ip) {
    const FileLock lock(root_ / "lock");
    auto instances = load_instances();
    const auto it = std::find_if(instances.begin(), instances.end(), [&](const auto& vm) {
        return vm.ip == ip && vm.state == VmState::Active;
    });
    if (it == instances.end()) {
        throw Error(ErrorCode::NoSuchInstance, fmt::format("no active instance with ip {}", ip));
    }
    it->state = VmState::Destroyed;
    std::string text;
    for (const auto& vm : instances) {
        text += Json(vm).dump();
        text += '\n';
    }
    write_file_atomic(root_ / "instances", text);
}

fs::path SimCloud::object_path(const FileRef& ref) const {
    check_store_name(ref.container, "container");
    check_store_name(ref.filename, "file");
    return root_ / "objects" / ref.container / ref.filename;
}

CloudFile SimCloud::put_cloud_file(const FileRef& ref, std::string content) {
    const auto path = object_path(ref);
    CloudFile file(ref, std::move(content));
    const FileLock lock(root_ / "lock");
    write_file_atomic(path, file.content());
    append_line(root_ / "index",
                Json{{"container", ref.container},
                     {"filename", ref.filename},
                     {"md5", file.md5_hex()}}
                    .dump());
    return file;
}

std::optional<std::string> SimCloud::indexed_digest(const FileRef& ref) const {
    std::optional<std::string> digest;
    for (const auto& record : read_records(root_ / "index")) {
        if (record.value("container", "") == ref.container &&
            record.value("filename", "") == ref.filename) {
            digest = record.value("md5", "");
        }
    }
    return digest;
}

StoredObject SimCloud::fetch(const FileRef& ref) const {
    const auto path = object_path(ref);
    auto content = read_file(path);
    if (!content) {
        throw Error(ErrorCode::FileNotFound, fmt::format("no object {}", to_string(ref)));
    }
    return StoredObject{CloudFile(ref, std::move(*content)), indexed_digest(ref)};
}

CloudFile SimCloud::get_cloud_file(const FileRef& ref) const { return fetch(ref).file; }

bool SimCloud::exists(const FileRef& ref) const {
    std::error_code ec;
    return fs::is_regular_file(object_path(ref), ec);
}

std::vector<std::string> SimCloud::list_container(const std::string& container) const {
    check_store_name(container, "container");
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root_ / "objects" / container, ec)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.find(".tmp.") == std::string::npos) {
            names.push_back(name);
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::vector<FileRef> SimCloud::verify_index() const {
    std::map<FileRef, std::string> latest;
    for (const auto& record : read_records(root_ / "index")) {
        latest[FileRef{record.value("container", ""), record.value("filename", "")}] =
            record.value("md5", "");
    }
    std::vector<FileRef> stale;
    for (const auto& [ref, digest] : latest) {
        const auto content = read_file(root_ / "objects" / ref.container / ref.filename);
        if (!content || md5_hex(*content) != digest) {
            stale.push_back(ref);
        }
    }
    return stale;
}

}  // namespace provrepro
