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

#include "provrepro/verify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "csv.hpp"
#include "provrepro/error.hpp"
#include "provrepro/reproduce.hpp"
#include "provrepro/state.hpp"

namespace provrepro {

OutputComparison Verifier::compare_workflow_outputs(WfId src, WfId dest) const {
    const auto src_jobs = db_.get_workflow_jobs(src);
    const auto dest_jobs = db_.get_workflow_jobs(dest);
    std::map<std::string, const JobRecord*> dest_by_name;
    for (const auto& record : dest_jobs) {
        dest_by_name.emplace(record.job_name, &record);
    }

    OutputComparison out;
    out.src = src;
    out.dest = dest;
    for (const auto& job : src_jobs) {
        if (job.status != JobStatus::Succeeded) {
            out.warnings.push_back(
                fmt::format("job '{}' did not succeed in wf {}", job.job_name, to_string(src)));
        }
        const auto dest_it = dest_by_name.find(job.job_name);
        if (dest_it == dest_by_name.end()) {
            out.warnings.push_back(fmt::format("wf {} has no job '{}'", to_string(dest),
                                               job.job_name));
        }
        for (std::size_t pos = 0; pos < job.produced.size(); ++pos) {
            const auto& src_ref = job.produced[pos];
            const auto src_file = cloud_.fetch(src_ref);
            if (!src_file.index_consistent()) {
                out.warnings.push_back(fmt::format("{} no longer matches its indexed digest",
                                                   to_string(src_ref)));
            }
            ++out.file_counter;
            FileComparison cmp{job.job_name,        pos, src_ref.filename, src_ref.container,
                               src_file.file.md5_hex(), "",  "",               false};

            if (dest_it != dest_by_name.end() && pos < dest_it->second->produced.size()) {
                const auto& dest_ref = dest_it->second->produced[pos];
                cmp.dest_container = dest_ref.container;
                try {
                    const auto dest_file = cloud_.fetch(dest_ref);
                    cmp.dest_hash = dest_file.file.md5_hex();
                    if (!dest_file.index_consistent()) {
                        out.warnings.push_back(fmt::format(
                            "{} no longer matches its indexed digest", to_string(dest_ref)));
                    }
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::FileNotFound) {
                        throw;
                    }
                    out.warnings.push_back(
                        fmt::format("{} is missing from the object store", to_string(dest_ref)));
                }
            } else if (dest_it != dest_by_name.end()) {
                out.warnings.push_back(fmt::format("wf {} job '{}' has no output #{} ({})",
                                                   to_string(dest), job.job_name, pos + 1,
                                                   src_ref.filename));
            }
            if (!cmp.dest_hash.empty() && cmp.src_hash == cmp.dest_hash) {
                cmp.match = true;
                ++out.comparison_counter;
            }
            out.files.push_back(std::move(cmp));
        }
    }

    // Destination-only files never affect the verdict; they are listed.
    std::map<std::string, std::size_t> src_outputs;
    for (const auto& job : src_jobs) {
        src_outputs[job.job_name] = job.produced.size();
    }
    for (const auto& job : dest_jobs) {
        const auto known = src_outputs.contains(job.job_name) ? src_outputs[job.job_name] : 0;
        for (std::size_t pos = known; pos < job.produced.size(); ++pos) {
            out.warnings.push_back(fmt::format("extra file in wf {}: {} (job '{}')",
                                               to_string(dest), to_string(job.produced[pos]),
                                               job.job_name));
        }
    }
    return out;
}

StructureComparison compare_structures(const WorkflowDefinition& src,
                                       const WorkflowDefinition& dest) {
    StructureComparison out;
    std::map<std::string, JobKind> src_jobs;
    std::map<std::string, JobKind> dest_jobs;
    std::set<std::pair<std::string, std::string>> src_edges;
    std::set<std::pair<std::string, std::string>> dest_edges;
    for (const auto& job : src.jobs) {
        src_jobs.emplace(job.name, job.kind);
        for (const auto& dep : job.depends_on) {
            src_edges.emplace(dep, job.name);
        }
    }
    for (const auto& job : dest.jobs) {
        dest_jobs.emplace(job.name, job.kind);
        for (const auto& dep : job.depends_on) {
            dest_edges.emplace(dep, job.name);
        }
    }
    for (const auto& [name, kind] : src_jobs) {
        const auto it = dest_jobs.find(name);
        if (it == dest_jobs.end()) {
            out.diff.push_back(fmt::format("missing job '{}' ({})", name, to_string(kind)));
        } else if (it->second != kind) {
            out.diff.push_back(fmt::format("job '{}' is {} in source but {} in destination",
                                           name, to_string(kind), to_string(it->second)));
        }
    }
    for (const auto& [name, kind] : dest_jobs) {
        if (!src_jobs.contains(name)) {
            out.diff.push_back(fmt::format("extra job '{}' ({})", name, to_string(kind)));
        }
    }
    for (const auto& [from, to] : src_edges) {
        if (!dest_edges.contains({from, to})) {
            out.diff.push_back(fmt::format("missing edge {} -> {}", from, to));
        }
    }
    for (const auto& [from, to] : dest_edges) {
        if (!src_edges.contains({from, to})) {
            out.diff.push_back(fmt::format("extra edge {} -> {}", from, to));
        }
    }
    out.equal = out.diff.empty();
    return out;
}

StructureComparison Verifier::compare_workflow_structure(WfId src, WfId dest) const {
    return compare_structures(store_.get_mappings(src).definition,
                              store_.get_mappings(dest).definition);
}

ReproReport Verifier::build_report(WfId src, WfId dest) const {
    ReproReport report;
    report.src_wf_id = src;
    report.dest_wf_id = dest;

    auto structure = compare_workflow_structure(src, dest);
    report.structure_equal = structure.equal;
    report.structure_diff = std::move(structure.diff);

    auto infra = compare_infrastructure(store_, src, dest);
    report.infrastructure_equal = infra.equal;
    report.infrastructure_diff = std::move(infra.diff);
    if (infra.src_hosts.size() != infra.dest_hosts.size()) {
        report.warnings.push_back(fmt::format("host counts differ: {} vs {}",
                                              infra.src_hosts.size(), infra.dest_hosts.size()));
    }

    auto outputs = compare_workflow_outputs(src, dest);
    report.outputs_equal = outputs.equal();
    report.per_file = std::move(outputs.files);
    report.warnings.insert(report.warnings.end(), outputs.warnings.begin(),
                           outputs.warnings.end());
    return report;
}

std::string outputs_csv(WfId src, WfId dest, const std::vector<FileComparison>& files) {
    std::string out(kOutputsCsvHeader);
    out.push_back('\n');
    const auto src_id = to_string(src);
    const auto dest_id = to_string(dest);
    for (const auto& f : files) {
        out += csv_row({f.job, src_id, f.src_container, f.filename, f.src_hash});
        out += csv_row({f.job, dest_id, f.dest_container, f.filename, f.dest_hash});
    }
    return out;
}

std::string outputs_verdict_line(const OutputComparison& c) {
    return fmt::format("OUTPUTS {} ({}/{})", c.equal() ? "MATCH" : "DIFFER",
                       c.comparison_counter, c.file_counter);
}

namespace {

std::string file_table(const std::vector<FileComparison>& files) {
    std::string out = fmt::format("{:<12} {:<16} {:<32} {:<32} {}\n", "Job", "FileName",
                                  "Source MD5", "Destination MD5", "Match");
    for (const auto& f : files) {
        out += fmt::format("{:<12} {:<16} {:<32} {:<32} {}\n", f.job, f.filename, f.src_hash,
                           f.dest_hash.empty() ? "(missing)" : f.dest_hash,
                           f.match ? "yes" : "NO");
    }
    return out;
}

void append_list(std::string& out, std::string_view title, const std::vector<std::string>& items) {
    if (items.empty()) {
        return;
    }
    out += fmt::format("\n{}:\n", title);
    for (const auto& item : items) {
        out += fmt::format("  - {}\n", item);
    }
}

}  // namespace

std::string format_outputs_text(const OutputComparison& c) {
    std::string out = fmt::format("Output comparison: wf {} (source) vs wf {} (destination)\n",
                                  to_string(c.src), to_string(c.dest));
    out += fmt::format("FileCounter: {}  ComparisonCounter: {}\n", c.file_counter,
                       c.comparison_counter);
    out += outputs_verdict_line(c) + "\n\n";
    out += file_table(c.files);
    append_list(out, "Warnings", c.warnings);
    return out;
}

std::string format_report_text(const ReproReport& r) {
    const auto matches = std::count_if(r.per_file.begin(), r.per_file.end(),
                                       [](const auto& f) { return f.match; });
    std::string out =
        fmt::format("Reproducibility report: wf {} (source) vs wf {} (destination)\n",
                    to_string(r.src_wf_id), to_string(r.dest_wf_id));
    out += "Note: inputs are not hashed separately; a repeat re-reads the source run's\n"
           "      external input objects, and hosts are compared per distinct host used.\n\n";
    out += fmt::format("Workflow structure:       {}\n", r.structure_equal ? "EQUAL" : "DIFFERENT");
    out += fmt::format("Execution infrastructure: {}\n",
                       r.infrastructure_equal ? "EQUAL" : "DIFFERENT");
    out += fmt::format("Workflow outputs:         {} ({}/{})\n",
                       r.outputs_equal ? "MATCH" : "DIFFER", matches, r.per_file.size());
    out += fmt::format("Verdict:                  {}\n\n",
                       r.verdict() ? "REPRODUCED" : "NOT REPRODUCED");
    out += file_table(r.per_file);
    append_list(out, "Structure differences", r.structure_diff);
    append_list(out, "Infrastructure differences", r.infrastructure_diff);
    append_list(out, "Warnings", r.warnings);
    return out;
}

ReportFiles write_report_files(const std::filesystem::path& home, WfId src, WfId dest,
                               const std::string& text, const std::string& csv) {
    const auto stem = fmt::format("{}_{}", to_string(src), to_string(dest));
    ReportFiles files{home / "reports" / (stem + ".txt"), home / "reports" / (stem + ".csv")};
    write_file_atomic(files.text, text);
    write_file_atomic(files.csv, csv);
    return files;
}

}  // namespace provrepro
