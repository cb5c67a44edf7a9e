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

#ifndef PROVREPRO_SIMCLOUD_HPP
#define PROVREPRO_SIMCLOUD_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "provrepro/model.hpp"

namespace provrepro {

inline constexpr std::string_view kDefaultOwner = "provrepro";
inline constexpr std::string_view kDefaultImageId = "f102960c-557c-4253-8277-2df5ffe3c169";
inline constexpr std::string_view kDefaultImageName = "wf_peg_repeat";

/// Flavor and image catalogs. Fixed for the lifetime of a SimCloud.
struct Catalog {
    std::vector<Flavor> flavors;
    std::vector<Image> images;

    /// m1.tiny / m1.small / m1.medium (512 / 2048 / 4096 MB, 20 GB, 1 vCPU)
    /// and the single image wf_peg_repeat.
    static Catalog defaults();
};

/// Result of a read that re-checks the content against the digest index.
struct StoredObject {
    CloudFile file;
    std::optional<std::string> indexed_md5;

    [[nodiscard]] bool index_consistent() const {
        return indexed_md5.has_value() && *indexed_md5 == file.md5_hex();
    }
};

/// Deterministic stand-in for an IaaS middleware plus an object store,
/// persisted under `<home>/cloud`:
///
///   cloud/instances            one JSON record per VM ever provisioned
///   cloud/objects/<c>/<f>      object bytes
///   cloud/index                digest records, last entry per object wins
///
/// VMs receive 172.16.1.<k> with k counting up from 2 and never reused, so
/// an IP identifies exactly one VM for the lifetime of the state directory.
/// Every mutation runs under an exclusive file lock.
class SimCloud {
  public:
    explicit SimCloud(std::filesystem::path home, Catalog catalog = Catalog::defaults());

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] const Catalog& catalog() const noexcept { return catalog_; }

    [[nodiscard]] const Flavor& flavor(int flavor_id) const;
    [[nodiscard]] const Flavor& flavor_by_name(std::string_view name) const;
    [[nodiscard]] const Image& image(std::string_view image_id) const;

    VmInstance provision_vm(int flavor_id, const std::string& image_id,
                            const std::string& nodename,
                            const std::string& owner = std::string(kDefaultOwner));

    /// Active instances of owner, in provisioning order.
    [[nodiscard]] std::vector<VmInstance> list_vms(
        const std::string& owner = std::string(kDefaultOwner)) const;

    /// Every instance ever provisioned, destroyed ones included.
    [[nodiscard]] std::vector<VmInstance> all_instances() const;

    [[nodiscard]] std::optional<VmInstance> find_active(std::string_view ip) const;

    void destroy_vm(const std::string& ip);

    CloudFile put_cloud_file(const FileRef& ref, std::string content);
    [[nodiscard]] CloudFile get_cloud_file(const FileRef& ref) const;
    [[nodiscard]] StoredObject fetch(const FileRef& ref) const;
    [[nodiscard]] bool exists(const FileRef& ref) const;
    [[nodiscard]] std::vector<std::string> list_container(const std::string& container) const;

    /// Objects whose bytes no longer match their indexed digest.
    [[nodiscard]] std::vector<FileRef> verify_index() const;

  private:
    [[nodiscard]] std::vector<VmInstance> load_instances() const;
    [[nodiscard]] std::optional<std::string> indexed_digest(const FileRef& ref) const;
    [[nodiscard]] std::filesystem::path object_path(const FileRef& ref) const;

    std::filesystem::path root_;
    Catalog catalog_;
};

/// Throws Error(InvalidName) unless name is usable as a flat store name.
void check_store_name(std::string_view name, std::string_view what);

}  // namespace provrepro

#endif  // PROVREPRO_SIMCLOUD_HPP
