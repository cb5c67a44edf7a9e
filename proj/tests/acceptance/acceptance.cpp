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

// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <stdlib.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "oracles.hpp"
#include "provrepro/executor.hpp"
#include "provrepro/jobs.hpp"
#include "provrepro/provenance.hpp"
#include "provrepro/reproduce.hpp"
#include "provrepro/verify.hpp"
#include "provrepro/workflow_file.hpp"
#include "temp_home.hpp"

using namespace provrepro;
using provrepro::testing::TempHome;

namespace {

const FileRef kCorpus{"wfinput", "corpus.txt"};
const std::string kCorpusText =
    "Cloud-aware provenance links each job of a scientific workflow to the flavor and "
    "image of the virtual machine that ran it so that the workflow can be repeated later "
    "on equivalent resources and its outputs compared by content hash";
const std::vector<std::string> kFiles{"wordlist1", "wordlist2", "analysis1", "analysis2",
                                      "merge_output"};

/// Collects failed expectations for one criterion.
class Check {
  public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 5) {
            failures_.push_back(what);
        }
        failed_ = failed_ || !ok;
    }
    [[nodiscard]] bool ok() const { return !failed_; }
    [[nodiscard]] const std::vector<std::string>& failures() const { return failures_; }

  private:
    bool failed_ = false;
    std::vector<std::string> failures_;
};

struct Env {
    TempHome home;
    SimCloud cloud{home.path()};
    ExecutionDb db{home.path()};
    Executor exec{cloud, db};
    ProvenanceStore store{home.path()};
    ProvenanceAggregator agg{cloud, db};
    RepeatEngine engine{cloud, db, store};
    Verifier verifier{cloud, db, store};

    WfId run_wordcount() {
        const StagedInput input{kCorpus, kCorpusText};
        const auto run = exec.submit_workflow(wordcount_workflow(kCorpus),
                                              ClusterSpec::uniform(2, 2), {&input, 1});
        agg.capture(run.wf_id, store);
        return run.wf_id;
    }

    std::filesystem::path object(WfId id, const std::string& file) const {
        return home.path() / "cloud" / "objects" / output_container_for(id) / file;
    }
};

// Part (a) and (b) of the wordcount criterion for one pair of runs.
void check_pair(Check& c, Env& env, WfId src, WfId dest) {
    const auto tag = fmt::format("{} vs {}: ", to_string(src), to_string(dest));
    const auto infra = compare_infrastructure(env.store, src, dest);
    c.expect(infra.equal, tag + "infrastructure differs");
    for (const auto* hosts : {&infra.src_hosts, &infra.dest_hosts}) {
        c.expect(hosts->size() == 2, tag + "expected exactly 2 distinct host specs");
        for (const auto& h : *hosts) {
            c.expect(h.ram_mb == 2048 && h.hd_gb == 20 && h.vcpus == 1 &&
                         h.image_id == "f102960c-557c-4253-8277-2df5ffe3c169",
                     tag + "host spec is not 2048 MB / 20 GB / 1 vCPU / wf_peg_repeat");
        }
    }
    const auto out = env.verifier.compare_workflow_outputs(src, dest);
    c.expect(out.equal(), tag + "output comparison false");
    c.expect(out.file_counter == 5 && out.comparison_counter == 5,
             tag + fmt::format("counters {}/{}", out.comparison_counter, out.file_counter));
    std::vector<std::string> names;
    for (const auto& f : out.files) {
        names.push_back(f.filename);
    }
    c.expect(names == kFiles, tag + "unexpected compared file set");
}

void ac1(Check& c) {
    Env env;
    const auto src = env.run_wordcount();
    const auto rep = env.engine.repeat_workflow(src);
    check_pair(c, env, src, rep.run.wf_id);
    for (const auto& vm : rep.nodes) {
        c.expect(vm.nodename.find("-rep") != std::string::npos,
                 "repeat node " + vm.nodename + " lacks -rep");
    }
    for (const auto& row : rep.capture.rows) {
        c.expect(row.nodename.find("-rep.") != std::string::npos,
                 "captured nodename " + row.nodename + " lacks -rep");
    }
}

void ac2(Check& c) {
    Env env;
    const auto src = env.run_wordcount();
    const auto a = env.engine.repeat_workflow(src).run;
    const auto b = env.engine.repeat_workflow(src).run;
    c.expect(a.wf_id != b.wf_id, "repeats share an id");
    c.expect(a.repeat_of == src && b.repeat_of == src, "repeat not linked to source");
    check_pair(c, env, src, a.wf_id);
    check_pair(c, env, src, b.wf_id);
    check_pair(c, env, a.wf_id, b.wf_id);
    check_pair(c, env, b.wf_id, a.wf_id);
}

void ac3(Check& c) {
    TempHome home;
    ::setenv("PROVREPRO_HOME", home.path().c_str(), 1);
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run({"memsweep", "--from", "100", "--to", "4096", "--step", "100",
                               "--repeats", "5"},
                              out, err);
    c.expect(code == 0, fmt::format("memsweep exited {}: {}", code, err.str()));

    // flavor -> required -> (trials, successes)
    std::map<std::string, std::map<int, std::pair<int, int>>> table;
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    c.expect(line == "flavor,ram_mb,required_mb,trials,successes,success_rate", "bad header");
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string flavor, ram, required, trials, successes, rate;
        std::getline(fields, flavor, ',');
        std::getline(fields, ram, ',');
        std::getline(fields, required, ',');
        std::getline(fields, trials, ',');
        std::getline(fields, successes, ',');
        std::getline(fields, rate, ',');
        table[flavor][std::stoi(required)] = {std::stoi(trials), std::stoi(successes)};
        c.expect(rate == (successes == "0" ? "0.0" : "1.0"), "non-deterministic rate " + line);
    }
    const std::map<std::string, int> rams{{"m1.tiny", 512}, {"m1.small", 2048}, {"m1.medium", 4096}};
    c.expect(table.size() == 3, "expected three flavors");
    for (const auto& [flavor, ram] : rams) {
        const auto& column = table[flavor];
        c.expect(column.size() == 41, flavor + ": expected 41 rows (100..4000, then 4096)");
        for (const auto& [required, cell] : column) {
            const bool ok = required + 32 <= ram;  // the OOM law, evaluated independently
            c.expect(cell.first == 5, flavor + ": trials != 5");
            c.expect(cell.second == (ok ? 5 : 0),
                     fmt::format("{} at {} MB: {} successes", flavor, required, cell.second));
        }
    }
    // The landmark cells named by the criterion.
    c.expect(table["m1.tiny"][400].second == 5, "m1.tiny 400 should pass");
    c.expect(table["m1.tiny"][500].second == 0, "m1.tiny 500 should fail");
    c.expect(table["m1.small"][2000].second == 5, "m1.small 2000 should pass");
    c.expect(table["m1.small"][2100].second == 0, "m1.small 2100 should fail");
    c.expect(table["m1.medium"][4000].second == 5, "m1.medium 4000 should pass");
    c.expect(table["m1.medium"][4096].second == 0, "m1.medium 4096 should fail");
    c.expect(fits_in_memory(480, 512) && !fits_in_memory(500, 512), "tiny boundary");
    c.expect(fits_in_memory(2016, 2048) && !fits_in_memory(2017, 2048), "small boundary");
    c.expect(fits_in_memory(4064, 4096) && !fits_in_memory(4065, 4096) &&
                 !fits_in_memory(4096, 4096),
             "medium boundary");
    ::unsetenv("PROVREPRO_HOME");
}

void ac4(Check& c) {
    Env env;
    const auto src = env.run_wordcount();
    const auto dest = env.engine.repeat_workflow(src).run.wf_id;
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> pick_file(0, kFiles.size() - 1);
    std::uniform_int_distribution<int> delta(1, 255);
    for (int m = 0; m < 100; ++m) {
        const auto& file = kFiles[pick_file(rng)];
        const auto original =
            env.cloud.get_cloud_file({output_container_for(dest), file}).content();
        auto bytes = original;
        std::uniform_int_distribution<std::size_t> pos(0, bytes.size() - 1);
        const auto at = pos(rng);
        bytes[at] = static_cast<char>(static_cast<unsigned char>(bytes[at]) + delta(rng));
        std::ofstream(env.object(dest, file), std::ios::binary | std::ios::trunc) << bytes;

        const auto cmp = env.verifier.compare_workflow_outputs(src, dest);
        const auto report = env.verifier.build_report(src, dest);
        c.expect(!cmp.equal() && !report.verdict(),
                 fmt::format("mutation {} of {} went unnoticed", m, file));
        std::vector<std::string> mismatched;
        for (const auto& f : cmp.files) {
            if (!f.match) {
                mismatched.push_back(f.filename);
            }
        }
        c.expect(mismatched == std::vector<std::string>{file},
                 fmt::format("mutation {} of {} not named exactly", m, file));
        c.expect(!mismatched.empty() &&
                     cmp.files[static_cast<std::size_t>(
                                   std::find(kFiles.begin(), kFiles.end(), file) - kFiles.begin())]
                             .dest_hash == testing::openssl_md5_hex(bytes),
                 "reported destination digest is not the digest of the mutated bytes");
        std::ofstream(env.object(dest, file), std::ios::binary | std::ios::trunc) << original;
    }
    c.expect(env.verifier.compare_workflow_outputs(src, dest).equal(),
             "restored files should compare equal");
}

void ac5(Check& c) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> jobs(2, 6);
    std::uniform_int_distribution<int> nodes(1, 3);
    std::uniform_int_distribution<int> flavor(1, 3);
    for (int trial = 0; trial < 50; ++trial) {
        Env env;
        ClusterSpec spec;
        const int n = nodes(rng);
        for (int i = 0; i < n; ++i) {
            spec.nodes.push_back(
                {fmt::format("vm{}.novalocal", i), flavor(rng), std::string(kDefaultImageId)});
        }
        const StagedInput input{kCorpus, kCorpusText};
        const auto def = testing::random_workflow(rng, jobs(rng), kCorpus);
        const auto run = env.exec.submit_workflow(def, spec, {&input, 1});
        const auto mapping = env.agg.map_jobs_to_vms(run.wf_id);
        const auto tag = fmt::format("trial {}: ", trial);

        c.expect(mapping.complete(), tag + "unmapped jobs");
        c.expect(mapping.rows.size() == def.jobs.size(), tag + "row count != job count");
        std::set<std::string> names;
        for (const auto& row : mapping.rows) {
            names.insert(row.job_name);
        }
        c.expect(names.size() == def.jobs.size(), tag + "job -> row is not a bijection");

        const auto oracle =
            testing::nested_loop_join(run.job_records, env.cloud.all_instances(),
                                      env.cloud.catalog().flavors, env.cloud.catalog().images);
        c.expect(oracle.size() == mapping.rows.size(), tag + "oracle row count differs");
        for (const auto& o : oracle) {
            const auto it = std::find_if(mapping.rows.begin(), mapping.rows.end(),
                                         [&](const auto& r) { return r.job_name == o.job; });
            c.expect(it != mapping.rows.end() && it->flavor_id == o.flavor_id &&
                         it->image_id == o.image_id && it->min_ram_mb == o.ram_mb &&
                         it->min_hd_gb == o.hd_gb && it->vcpus == o.vcpus &&
                         it->image_name == o.image_name,
                     tag + "row for " + o.job + " disagrees with the join oracle");
        }
    }
}

void ac6(Check& c) {
    // Topological-sort oracle agreement.
    std::mt19937_64 rng(6);
    int topo_cases = 0;
    for (int i = 0; i < 120; ++i) {
        const auto def = testing::random_dag_or_cycle(rng, 1 + i % 6);
        const auto oracle = testing::brute_force_topo_order(def);
        c.expect(validate_workflow(def).empty() == oracle.has_value(),
                 "validation disagrees with the permutation oracle");
        if (oracle) {
            c.expect(topological_order(def) == *oracle, "order disagrees with the oracle");
        }
        ++topo_cases;
    }

    // Store/fetch identity and digest agreement, empty input included.
    int store_cases = 0;
    {
        TempHome home;
        SimCloud cloud(home.path());
        c.expect(cloud.put_cloud_file({"c", "empty"}, "").md5_hex() ==
                     "d41d8cd98f00b204e9800998ecf8427e",
                 "empty-string digest");
        c.expect(testing::openssl_md5_hex("") == "d41d8cd98f00b204e9800998ecf8427e",
                 "reference digest of the empty string");
        std::uniform_int_distribution<int> byte(0, 255);
        std::uniform_int_distribution<int> len(0, 1024);
        for (int i = 0; i < 120; ++i) {
            std::string content(static_cast<std::size_t>(len(rng)), '\0');
            for (auto& ch : content) {
                ch = static_cast<char>(byte(rng));
            }
            const FileRef ref{"c", fmt::format("obj{}", i)};
            cloud.put_cloud_file(ref, content);
            const auto back = cloud.get_cloud_file(ref);
            c.expect(back.content() == content, "fetched bytes differ");
            c.expect(back.md5_hex() == testing::openssl_md5_hex(content),
                     "digest disagrees with the reference MD5");
            ++store_cases;
        }
    }

    // Determinism replay: same definition and bytes, fresh state, same digests.
    int replay_cases = 0;
    std::uniform_int_distribution<int> letter('a', 'f');
    std::uniform_int_distribution<int> words(0, 60);
    for (int i = 0; i < 100; ++i) {
        std::string text;
        const int w = words(rng);
        for (int k = 0; k < w; ++k) {
            text += std::string(1 + static_cast<std::size_t>(k % 4), static_cast<char>(letter(rng)));
            text += (k % 7 == 0) ? "\n" : " ";
        }
        std::vector<std::string> digests[2];
        for (auto& d : digests) {
            Env env;
            const StagedInput input{kCorpus, text};
            const auto run = env.exec.submit_workflow(wordcount_workflow(kCorpus),
                                                      ClusterSpec::uniform(2, 2), {&input, 1});
            for (const auto& rec : run.job_records) {
                d.push_back(rec.host_ip);
                for (const auto& f : rec.produced) {
                    d.push_back(env.cloud.get_cloud_file(f).md5_hex());
                }
            }
        }
        c.expect(digests[0] == digests[1], "replay diverged");
        ++replay_cases;
    }

    // Counter law under random damage.
    int law_cases = 0;
    {
        Env env;
        const auto src = env.run_wordcount();
        const auto dest = env.engine.repeat_workflow(src).run.wf_id;
        std::vector<std::string> originals;
        for (const auto& f : kFiles) {
            originals.push_back(env.cloud.get_cloud_file({output_container_for(dest), f}).content());
        }
        std::bernoulli_distribution damage(0.25);
        for (int i = 0; i < 120; ++i) {
            for (std::size_t k = 0; k < kFiles.size(); ++k) {
                const bool hit = damage(rng);
                std::ofstream(env.object(dest, kFiles[k]), std::ios::binary | std::ios::trunc)
                    << (hit ? originals[k] + "#" : originals[k]);
            }
            const auto cmp = env.verifier.compare_workflow_outputs(src, dest);
            c.expect(cmp.comparison_counter <= cmp.file_counter, "ComparisonCounter > FileCounter");
            const bool all_match = std::all_of(cmp.files.begin(), cmp.files.end(),
                                               [](const auto& f) { return f.match; });
            c.expect((cmp.comparison_counter == cmp.file_counter) == cmp.equal(),
                     "equality of counters does not decide the verdict");
            c.expect(cmp.equal() == all_match, "verdict disagrees with per-file matches");
            ++law_cases;
        }
    }
    c.expect(topo_cases >= 100 && store_cases >= 100 && replay_cases >= 100 && law_cases >= 100,
             "each property suite needs at least 100 cases");
}

struct Criterion {
    const char* id;
    const char* title;
    double budget_s;
    std::function<void(Check&)> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"AC1", "wordcount end-to-end: infrastructure, 5/5 outputs, -rep nodenames", 5, ac1},
        {"AC2", "double repeat: pairwise infrastructure and output equality", 10, ac2},
        {"AC3", "memsweep 100..4096 step 100 x5 follows the OOM law", 10, ac3},
        {"AC4", "100 single-byte tamperings flip the verdict and name the file", 30, ac4},
        {"AC5", "mapping totality and join correctness over 50 random workflows", 30, ac5},
        {"AC6", "property suites: topo order, store/MD5, replay, counter law", 60, ac6},
    };
    int failed = 0;
    for (const auto& criterion : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.body(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        check.expect(elapsed.count() < criterion.budget_s,
                     fmt::format("took {:.2f} s, budget {:.0f} s", elapsed.count(),
                                 criterion.budget_s));
        std::cout << fmt::format("[{}] {} {} ({:.3f} s)\n", check.ok() ? "PASS" : "FAIL",
                                 criterion.id, criterion.title, elapsed.count());
        for (const auto& f : check.failures()) {
            std::cout << "       " << f << '\n';
        }
        failed += check.ok() ? 0 : 1;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed,
                             criteria.size());
    return failed == 0 ? 0 : 1;
}
