#pragma once

#include "patprune/common.hpp"

#include <map>
#include <string>
#include <vector>

namespace patprune {

constexpr int kPadToken = 0;
constexpr int kUnkToken = 1;

struct Example {
    std::vector<int> tokens;
    int label = 0;
};

struct Dataset {
    std::vector<Example> examples;
    std::map<std::string, int> vocab; // token -> id, PAD=0 and UNK=1 reserved
    int vocab_size = 0;               // covers reserved ids even for synthetic data
    int n_classes = 0;

    size_t size() const { return examples.size(); }
};

enum class SyntheticTask {
    ContainsBigram, // label 1 iff the designated token pair occurs adjacently
    MajorityToken,  // label 1 iff marker A outnumbers marker B
    ParityOfMarker, // label = parity of the designated marker's count
};

struct SyntheticSpec {
    SyntheticTask task = SyntheticTask::ContainsBigram;
    int vocab_size = 32;
    int seq_len = 16;
    int n_train = 4000;
    int n_test = 1000;
    uint64_t seed = 1;
};

// Marker tokens the synthetic rules are defined over.
constexpr int kMarkerA = 2;
constexpr int kMarkerB = 3;

struct SyntheticData {
    Dataset train;
    Dataset test;
};

// Deterministic generation; labels follow the task rule exactly, classes
// are balanced within one example, and train/test sequences are disjoint.
SyntheticData gen_synthetic(const SyntheticSpec& spec);

// Re-derives the label of a token sequence from the task rule. Test oracle
// and feasibility guard.
int synthetic_rule_label(SyntheticTask task, const std::vector<int>& tokens);

struct TsvSchema {
    std::string text_column = "sentence";
    std::string label_column = "label";
};

// Tab-separated file with a header row; whitespace tokenization, lowercased,
// truncated to max_seq_len. Builds the vocab from the file.
Dataset load_tsv(const std::string& path, const TsvSchema& schema, int max_seq_len);
// Same, reusing an existing vocab (test splits); unseen tokens map to UNK.
Dataset load_tsv(const std::string& path, const TsvSchema& schema, int max_seq_len,
                 const std::map<std::string, int>& vocab, int vocab_size, int n_classes);

// Structured-text round trip of a tokenized dataset.
void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

// Padded batch of token sequences. ids is batch x seq_len row-major with
// PAD filling positions beyond each sequence's length.
struct TokenBatch {
    int batch = 0;
    int seq_len = 0;
    std::vector<int> ids;
    std::vector<int> lengths;
    std::vector<int> labels;

    int id_at(int b, int t) const { return ids[static_cast<size_t>(b) * seq_len + t]; }
};

// Seeded shuffle, final partial batch kept, padding to the longest
// sequence of each batch.
std::vector<TokenBatch> batches(const Dataset& d, int batch_size, uint64_t seed, bool shuffle);

} // namespace patprune
