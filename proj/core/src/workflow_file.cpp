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

#include "provrepro/workflow_file.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json_codec.hpp"

namespace provrepro {
namespace {

struct Position {
    int line = 0;
    int column = 0;
};

// Maps each JSON pointer in an already well-formed document to the position
// where its value starts. nlohmann::json keeps no source positions, so the
// document is walked a second time here purely for diagnostics.
class PositionIndex {
  public:
    explicit PositionIndex(std::string_view text) : text_(text) {
        skip_ws();
        value("");
    }

    [[nodiscard]] Position at(const std::string& pointer) const {
        // Fall back to the closest enclosing value.
        std::string key = pointer;
        while (true) {
            if (auto it = positions_.find(key); it != positions_.end()) {
                return it->second;
            }
            if (key.empty()) {
                return {};
            }
            key.erase(key.rfind('/'));
        }
    }

  private:
    [[nodiscard]] bool done() const { return pos_ >= text_.size(); }
    [[nodiscard]] char peek() const { return done() ? '\0' : text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\n' ||
                           peek() == '\r')) {
            advance();
        }
    }

    std::string string_token() {
        std::string out;
        advance();  // opening quote
        while (!done() && peek() != '"') {
            if (peek() == '\\') {
                advance();
                if (done()) {
                    break;
                }
            }
            out.push_back(peek());
            advance();
        }
        if (!done()) {
            advance();
        }
        return out;
    }

    static std::string escape(const std::string& token) {
        std::string out;
        for (char c : token) {
            if (c == '~') {
                out += "~0";
            } else if (c == '/') {
                out += "~1";
            } else {
                out.push_back(c);
            }
        }
        return out;
    }

    void value(const std::string& pointer) {
        positions_[pointer] = {line_, column_};
        if (done()) {
            return;
        }
        const char c = peek();
        if (c == '{') {
            advance();
            skip_ws();
            while (!done() && peek() != '}') {
                const auto key = string_token();
                skip_ws();
                if (peek() == ':') {
                    advance();
                }
                skip_ws();
                value(pointer + "/" + escape(key));
                skip_ws();
                if (peek() == ',') {
                    advance();
                    skip_ws();
                }
            }
            if (!done()) {
                advance();
            }
        } else if (c == '[') {
            advance();
            skip_ws();
            int index = 0;
            while (!done() && peek() != ']') {
                value(pointer + "/" + std::to_string(index++));
                skip_ws();
                if (peek() == ',') {
                    advance();
                    skip_ws();
                }
            }
            if (!done()) {
                advance();
            }
        } else if (c == '"') {
            string_token();
        } else {
            while (!done() && peek() != ',' && peek() != '}' && peek() != ']' &&
                   peek() != ' ' && peek() != '\n' && peek() != '\t' && peek() != '\r') {
                advance();
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    std::map<std::string, Position> positions_;
};

Position position_of_offset(std::string_view text, std::size_t offset) {
    Position p{1, 1};
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++p.line;
            p.column = 1;
        } else {
            ++p.column;
        }
    }
    return p;
}

class Reader {
  public:
    Reader(const PositionIndex& index, std::vector<Diagnostic>& out)
        : index_(index), out_(out) {}

    void error(const std::string& pointer, std::string message) {
        const auto p = index_.at(pointer);
        out_.push_back({p.line, p.column, pointer, std::move(message)});
    }

    void reject_unknown_keys(const Json& object, const std::string& pointer,
                             const std::set<std::string>& allowed) {
        for (const auto& [key, _] : object.items()) {
            if (!allowed.contains(key)) {
                error(pointer + "/" + key, fmt::format("unknown field '{}'", key));
            }
        }
    }

    std::optional<std::string> string_field(const Json& object,
                                            const std::string& pointer,
                                            const std::string& key) {
        const auto field = pointer + "/" + key;
        if (!object.contains(key)) {
            error(pointer, fmt::format("missing required field '{}'", key));
            return std::nullopt;
        }
        if (!object[key].is_string()) {
            error(field, fmt::format("field '{}' must be a string", key));
            return std::nullopt;
        }
        return object[key].get<std::string>();
    }

    std::vector<FileRef> refs(const Json& object, const std::string& pointer,
                              const std::string& key) {
        std::vector<FileRef> result;
        if (!object.contains(key)) {
            return result;
        }
        const auto field = pointer + "/" + key;
        const auto& array = object[key];
        if (!array.is_array()) {
            error(field, fmt::format("field '{}' must be an array", key));
            return result;
        }
        for (std::size_t i = 0; i < array.size(); ++i) {
            const auto item_ptr = fmt::format("{}/{}", field, i);
            const auto& item = array[i];
            if (!item.is_object()) {
                error(item_ptr, "file reference must be an object with "
                                "'container' and 'filename'");
                continue;
            }
            reject_unknown_keys(item, item_ptr, {"container", "filename"});
            auto container = string_field(item, item_ptr, "container");
            auto filename = string_field(item, item_ptr, "filename");
            if (container && filename) {
                result.push_back({std::move(*container), std::move(*filename)});
            }
        }
        return result;
    }

  private:
    const PositionIndex& index_;
    std::vector<Diagnostic>& out_;
};

}  // namespace

std::string to_string(const Diagnostic& d, std::string_view source) {
    if (d.line > 0) {
        return fmt::format("{}:{}:{}: {}{}{}", source, d.line, d.column, d.field,
                           d.field.empty() ? "" : ": ", d.message);
    }
    return fmt::format("{}: {}{}{}", source, d.field, d.field.empty() ? "" : ": ",
                       d.message);
}

WorkflowFileError::WorkflowFileError(ErrorCode code, std::string source,
                                     std::vector<Diagnostic> diagnostics)
    : Error(code,
            [&] {
                std::string text = fmt::format("{} rejected", source);
                for (const auto& d : diagnostics) {
                    text += "\n  " + to_string(d, source);
                }
                return text;
            }()),
      diagnostics_(std::move(diagnostics)) {}

WorkflowDefinition parse_workflow(std::string_view text, std::string_view source) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        const auto p = position_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
        throw WorkflowFileError(ErrorCode::ParseError, std::string(source),
                                {{p.line, p.column, "", e.what()}});
    }

    const PositionIndex index(text);
    std::vector<Diagnostic> diagnostics;
    Reader reader(index, diagnostics);
    WorkflowDefinition def;

    if (!doc.is_object()) {
        reader.error("", "workflow definition must be a JSON object");
        throw WorkflowFileError(ErrorCode::ParseError, std::string(source),
                                std::move(diagnostics));
    }
    reader.reject_unknown_keys(doc, "", {"label", "jobs"});
    if (auto label = reader.string_field(doc, "", "label")) {
        def.label = std::move(*label);
    }
    if (!doc.contains("jobs")) {
        reader.error("", "missing required field 'jobs'");
    } else if (!doc["jobs"].is_array()) {
        reader.error("/jobs", "field 'jobs' must be an array");
    } else {
        const auto& jobs = doc["jobs"];
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const auto ptr = fmt::format("/jobs/{}", i);
            const auto& item = jobs[i];
            if (!item.is_object()) {
                reader.error(ptr, "job must be an object");
                continue;
            }
            reader.reject_unknown_keys(item, ptr,
                                       {"name", "kind", "inputs", "outputs",
                                        "required_ram_mb", "depends_on"});
            JobDefinition job;
            if (auto name = reader.string_field(item, ptr, "name")) {
                job.name = std::move(*name);
            }
            if (auto kind_text = reader.string_field(item, ptr, "kind")) {
                if (auto kind = parse_job_kind(*kind_text)) {
                    job.kind = *kind;
                } else {
                    reader.error(ptr + "/kind",
                                 fmt::format("unknown job kind '{}' (expected split, "
                                             "wordcount, merge or memhog)",
                                             *kind_text));
                }
            }
            job.inputs = reader.refs(item, ptr, "inputs");
            job.outputs = reader.refs(item, ptr, "outputs");
            if (!item.contains("required_ram_mb")) {
                reader.error(ptr, "missing required field 'required_ram_mb'");
            } else if (!item["required_ram_mb"].is_number_integer()) {
                reader.error(ptr + "/required_ram_mb",
                             "field 'required_ram_mb' must be an integer");
            } else {
                job.required_ram_mb = item["required_ram_mb"].get<std::int64_t>();
            }
            if (item.contains("depends_on")) {
                const auto& deps = item["depends_on"];
                if (!deps.is_array()) {
                    reader.error(ptr + "/depends_on", "field 'depends_on' must be an array");
                } else {
                    for (std::size_t d = 0; d < deps.size(); ++d) {
                        if (deps[d].is_string()) {
                            job.depends_on.push_back(deps[d].get<std::string>());
                        } else {
                            reader.error(fmt::format("{}/depends_on/{}", ptr, d),
                                         "dependency must be a job name string");
                        }
                    }
                }
            }
            def.jobs.push_back(std::move(job));
        }
    }
    if (!diagnostics.empty()) {
        throw WorkflowFileError(ErrorCode::ParseError, std::string(source),
                                std::move(diagnostics));
    }

    // Semantic checks, anchored at the offending job where there is one.
    for (const auto& issue : validate_workflow(def)) {
        std::string ptr = "/jobs";
        for (std::size_t i = 0; i < def.jobs.size(); ++i) {
            if (!issue.job.empty() && def.jobs[i].name == issue.job) {
                ptr = fmt::format("/jobs/{}", i);
                break;
            }
        }
        reader.error(ptr, fmt::format("{}: {}", to_string(issue.kind), issue.message));
    }
    if (!diagnostics.empty()) {
        throw WorkflowFileError(ErrorCode::ValidationFailed, std::string(source),
                                std::move(diagnostics));
    }
    return def;
}

WorkflowDefinition load_workflow_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, fmt::format("cannot read workflow file {}", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_workflow(buffer.str(), path.string());
}

std::string format_workflow(const WorkflowDefinition& def) {
    return Json(def).dump(2) + "\n";
}

WorkflowDefinition wordcount_workflow(const FileRef& corpus, std::int64_t required_ram_mb) {
    const auto out = [](const char* name) { return FileRef{"wfoutput", name}; };
    WorkflowDefinition def;
    def.label = "wordcount";
    def.jobs = {
        {"split", JobKind::Split, {corpus}, {out("wordlist1"), out("wordlist2")},
         required_ram_mb, {}},
        {"analysis1", JobKind::WordCount, {out("wordlist1")}, {out("analysis1")},
         required_ram_mb, {"split"}},
        {"analysis2", JobKind::WordCount, {out("wordlist2")}, {out("analysis2")},
         required_ram_mb, {"split"}},
        {"merge", JobKind::Merge, {out("analysis1"), out("analysis2")},
         {out("merge_output")}, required_ram_mb, {"analysis1", "analysis2"}},
    };
    return def;
}

}  // namespace provrepro
