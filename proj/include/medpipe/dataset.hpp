#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace medpipe {

enum class Split { train, test, validate };

const char* to_string(Split split);
Split split_from_string(const std::string& name);

struct DatasetRecord {
    std::string id;          // file name stem, unique across the manifest
    std::string phrase;      // spoken text, the ASR reference
    std::string prompt;      // symptom label, the classification target
    std::string audio_path;  // relative to the audio root, e.g. "train/x.wav"
    Split split;
};

struct AlpacaRecord {
    std::string instruction;
    std::string input;
    std::string output;
    std::string text;
};

struct SplitSummary {
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::size_t validate_count = 0;
    std::size_t total = 0;
};

struct Manifest {
    std::vector<DatasetRecord> records;  // manifest order
    SplitSummary summary;
};

// Instruction-tuning text skeleton with three {} slots (instruction, input,
// output). The first paragraph doubles as the fixed instruction, so a rendered
// record repeats it. The "conditon" spelling is part of the upstream prompt
// text that fine-tuned models were trained against; do not correct it.
extern const std::string kAlpacaTemplate;
extern const std::string kInstruction;

// Fills the three {} slots left to right. Braces inside the values are not
// re-scanned.
std::string render_alpaca_text(const std::string& instruction, const std::string& input,
                               const std::string& output);

// Reads a recording manifest CSV. Required columns: file_name, phrase, prompt.
// The split comes from `split_column` when given (values train/test/validate);
// otherwise each file is located by probing
// <audio_root>/{train,test,validate}/<file_name>. Raises MissingColumn,
// MalformedRow (with the line number), DuplicateId, IoFailure.
Manifest parse_manifest(const std::string& csv_path, const std::string& audio_root,
                        const std::string& split_column = "");

AlpacaRecord to_alpaca(const DatasetRecord& record);
std::vector<AlpacaRecord> to_alpaca(const std::vector<DatasetRecord>& records);

// One JSON object per line, keys in a fixed order.
std::string asr_manifest_line(const DatasetRecord& record, const std::string& audio_root);
std::string alpaca_line(const DatasetRecord& record);

// Writes asr-{train,test,validate}.jsonl / alpaca-{train,test,validate}.jsonl
// under out_dir, one file per split (empty splits produce empty files).
// Records keep their manifest order within each split.
void write_asr_manifest(const std::vector<DatasetRecord>& records, const std::string& audio_root,
                        const std::string& out_dir);
void write_alpaca(const std::vector<DatasetRecord>& records, const std::string& out_dir);

// Label -> occurrence count, ordered by label.
std::map<std::string, std::size_t> label_inventory(const std::vector<DatasetRecord>& records);

// Writes file_name,phrase,prompt,split. parse_manifest(path, root, "split")
// reproduces the records exactly.
void write_manifest_csv(const std::vector<DatasetRecord>& records, const std::string& path);

}  // namespace medpipe
