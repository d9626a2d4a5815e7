#include "medpipe/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "detail/csv.hpp"
#include "medpipe/errors.hpp"

namespace fs = std::filesystem;

namespace medpipe {

// Trailing spaces before the embedded line breaks are intentional; the text
// must match the upstream prompt byte for byte.
const std::string kInstruction =
    "Given a sentence generated via a Speech to Text model, \n"
    "clean the sentence grammatically and make it sound natural. Then classify \n"
    "the speaker's medical conditon in the given sentence.";

const std::string kAlpacaTemplate = kInstruction +
    "\n"
    "\n"
    "### Instruction:\n"
    "{}\n"
    "\n"
    "### Input:\n"
    "{}\n"
    "\n"
    "### Response:\n"
    "{}\n"
    "<|endoftext|>";

const char* to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::test: return "test";
        case Split::validate: return "validate";
    }
    return "?";
}

Split split_from_string(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "test") return Split::test;
    if (name == "validate") return Split::validate;
    throw InvalidConfig("unknown split '" + name + "' (expected train, test or validate)");
}

std::string render_alpaca_text(const std::string& instruction, const std::string& input,
                               const std::string& output) {
    const std::string* values[3] = {&instruction, &input, &output};
    std::string out;
    out.reserve(kAlpacaTemplate.size() + instruction.size() + input.size() + output.size());
    std::size_t from = 0;
    for (const std::string* value : values) {
        const std::size_t slot = kAlpacaTemplate.find("{}", from);
        out.append(kAlpacaTemplate, from, slot - from);
        out.append(*value);
        from = slot + 2;
    }
    out.append(kAlpacaTemplate, from, std::string::npos);
    return out;
}

namespace {

constexpr const char* kSplitNames[] = {"train", "test", "validate"};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open '" + path + "' for reading");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoFailure("read error on '" + path + "'");
    }
    return text;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw MissingColumn("manifest is missing required column '" + name + "'");
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

}  // namespace

Manifest parse_manifest(const std::string& csv_path, const std::string& audio_root,
                        const std::string& split_column) {
    const detail::CsvTable table = detail::parse_csv(read_file(csv_path));
    if (table.header.empty()) {
        throw MissingColumn("manifest has no header row");
    }
    const std::size_t file_col = column_index(table.header, "file_name");
    const std::size_t phrase_col = column_index(table.header, "phrase");
    const std::size_t prompt_col = column_index(table.header, "prompt");
    const bool split_from_column = !split_column.empty();
    const std::size_t split_col = split_from_column ? column_index(table.header, split_column) : 0;

    Manifest manifest;
    manifest.records.reserve(table.rows.size());
    std::unordered_set<std::string> seen_ids;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.row_lines[r];
        if (row.size() != table.header.size()) {
            throw MalformedRow(line, "expected " + std::to_string(table.header.size()) +
                                         " fields, got " + std::to_string(row.size()));
        }

        DatasetRecord rec;
        const std::string file_name = trimmed(row[file_col]);
        rec.phrase = trimmed(row[phrase_col]);
        rec.prompt = trimmed(row[prompt_col]);
        if (file_name.empty()) throw MalformedRow(line, "empty file_name");
        if (rec.phrase.empty()) throw MalformedRow(line, "empty phrase");
        if (rec.prompt.empty()) throw MalformedRow(line, "empty prompt");

        if (split_from_column) {
            const std::string value = trimmed(row[split_col]);
            try {
                rec.split = split_from_string(value);
            } catch (const InvalidConfig& e) {
                throw MalformedRow(line, e.what());
            }
        } else {
            int found = 0;
            for (const char* name : kSplitNames) {
                if (fs::exists(fs::path(audio_root) / name / file_name)) {
                    if (found++ == 0) rec.split = split_from_string(name);
                }
            }
            if (found == 0) {
                throw MalformedRow(line, "audio file '" + file_name +
                                             "' not found under any split directory of '" +
                                             audio_root + "'");
            }
            if (found > 1) {
                throw MalformedRow(line,
                                   "audio file '" + file_name + "' exists in several splits");
            }
        }

        rec.id = fs::path(file_name).stem().string();
        if (rec.id.empty()) throw MalformedRow(line, "file_name has an empty stem");
        if (!seen_ids.insert(rec.id).second) {
            throw DuplicateId("duplicate id '" + rec.id + "' at line " + std::to_string(line));
        }
        rec.audio_path = (fs::path(to_string(rec.split)) / file_name).generic_string();

        switch (rec.split) {
            case Split::train: ++manifest.summary.train_count; break;
            case Split::test: ++manifest.summary.test_count; break;
            case Split::validate: ++manifest.summary.validate_count; break;
        }
        ++manifest.summary.total;
        manifest.records.push_back(std::move(rec));
    }
    return manifest;
}

AlpacaRecord to_alpaca(const DatasetRecord& record) {
    AlpacaRecord out;
    out.instruction = kInstruction;
    out.input = record.phrase;
    out.output = record.prompt;
    out.text = render_alpaca_text(kInstruction, record.phrase, record.prompt);
    return out;
}

std::vector<AlpacaRecord> to_alpaca(const std::vector<DatasetRecord>& records) {
    std::vector<AlpacaRecord> out;
    out.reserve(records.size());
    for (const DatasetRecord& r : records) out.push_back(to_alpaca(r));
    return out;
}

std::string asr_manifest_line(const DatasetRecord& record, const std::string& audio_root) {
    nlohmann::ordered_json j;
    j["text"] = record.phrase;
    j["audio"] = audio_root.empty()
                     ? record.audio_path
                     : (fs::path(audio_root) / record.audio_path).generic_string();
    return j.dump();
}

std::string alpaca_line(const DatasetRecord& record) {
    const AlpacaRecord a = to_alpaca(record);
    nlohmann::ordered_json j;
    j["instruction"] = a.instruction;
    j["input"] = a.input;
    j["output"] = a.output;
    j["text"] = a.text;
    return j.dump();
}

namespace {

void write_split_files(const std::vector<DatasetRecord>& records, const std::string& out_dir,
                       const std::string& prefix,
                       const std::function<std::string(const DatasetRecord&)>& line_for) {
    for (const char* name : kSplitNames) {
        const fs::path path = fs::path(out_dir) / (prefix + name + ".jsonl");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoFailure("cannot open '" + path.string() + "' for writing");
        }
        for (const DatasetRecord& r : records) {
            if (std::string(to_string(r.split)) != name) continue;
            out << line_for(r) << '\n';
        }
        out.flush();
        if (!out.good()) {
            throw IoFailure("write error on '" + path.string() + "'");
        }
    }
}

}  // namespace

void write_asr_manifest(const std::vector<DatasetRecord>& records, const std::string& audio_root,
                        const std::string& out_dir) {
    write_split_files(records, out_dir, "asr-",
                      [&](const DatasetRecord& r) { return asr_manifest_line(r, audio_root); });
}

void write_alpaca(const std::vector<DatasetRecord>& records, const std::string& out_dir) {
    write_split_files(records, out_dir, "alpaca-",
                      [](const DatasetRecord& r) { return alpaca_line(r); });
}

std::map<std::string, std::size_t> label_inventory(const std::vector<DatasetRecord>& records) {
    std::map<std::string, std::size_t> counts;
    for (const DatasetRecord& r : records) ++counts[r.prompt];
    return counts;
}

void write_manifest_csv(const std::vector<DatasetRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open '" + path + "' for writing");
    }
    out << "file_name,phrase,prompt,split\n";
    for (const DatasetRecord& r : records) {
        const std::string file_name = fs::path(r.audio_path).filename().string();
        out << detail::csv_escape(file_name) << ',' << detail::csv_escape(r.phrase) << ','
            << detail::csv_escape(r.prompt) << ',' << to_string(r.split) << '\n';
    }
    out.flush();
    if (!out.good()) {
        throw IoFailure("write error on '" + path + "'");
    }
}

}  // namespace medpipe
