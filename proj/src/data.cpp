#include "patprune/data.hpp"

#include "patprune/rng.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace patprune {

int synthetic_rule_label(SyntheticTask task, const std::vector<int>& tokens) {
    switch (task) {
    case SyntheticTask::ContainsBigram:
        for (size_t i = 0; i + 1 < tokens.size(); ++i) {
            if (tokens[i] == kMarkerA && tokens[i + 1] == kMarkerB) return 1;
        }
        return 0;
    case SyntheticTask::MajorityToken: {
        int a = 0, b = 0;
        for (int t : tokens) {
            a += t == kMarkerA;
            b += t == kMarkerB;
        }
        return a > b ? 1 : 0;
    }
    case SyntheticTask::ParityOfMarker: {
        int a = 0;
        for (int t : tokens) a += t == kMarkerA;
        return a % 2;
    }
    }
    throw config_error("unknown synthetic task");
}

namespace {

uint64_t sequence_fingerprint(const std::vector<int>& tokens) {
    uint64_t h = 1469598103934665603ull;
    for (int t : tokens) {
        h ^= static_cast<uint64_t>(t) + 0x9e3779b97f4a7c15ull;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<int> random_sequence(Rng& rng, const SyntheticSpec& spec) {
    std::vector<int> seq(spec.seq_len);
    for (int& t : seq) t = rng.int_range(2, spec.vocab_size);
    return seq;
}

// Draw a fresh sequence whose rule label equals `want`, distinct from
// everything seen so far.
std::vector<int> sample_labeled(Rng& rng, const SyntheticSpec& spec, int want,
                                std::set<uint64_t>& seen) {
    for (int attempt = 0; attempt < 200000; ++attempt) {
        std::vector<int> seq = random_sequence(rng, spec);
        if (spec.task == SyntheticTask::ContainsBigram && want == 1) {
            const int pos = rng.int_range(0, spec.seq_len - 1);
            seq[pos] = kMarkerA;
            seq[pos + 1] = kMarkerB;
        }
        if (spec.task == SyntheticTask::MajorityToken) {
            // plant controlled marker counts, then label by the rule
            const int ca = rng.int_range(0, spec.seq_len + 1);
            std::vector<int> idx(spec.seq_len);
            for (int i = 0; i < spec.seq_len; ++i) idx[i] = i;
            rng.shuffle(idx);
            for (int i = 0; i < ca; ++i) seq[idx[i]] = kMarkerA;
        }
        if (synthetic_rule_label(spec.task, seq) != want) continue;
        const uint64_t fp = sequence_fingerprint(seq);
        if (seen.count(fp)) continue;
        seen.insert(fp);
        return seq;
    }
    throw config_error("synthetic generation failed; the task rule is infeasible for "
                       "seq_len=" + std::to_string(spec.seq_len));
}

Dataset fill_split(Rng& rng, const SyntheticSpec& spec, int n, std::set<uint64_t>& seen) {
    Dataset d;
    d.vocab_size = spec.vocab_size;
    d.n_classes = 2;
    d.examples.reserve(static_cast<size_t>(n));
    const int n_pos = (n + 1) / 2;
    for (int i = 0; i < n; ++i) {
        const int want = i < n_pos ? 1 : 0;
        d.examples.push_back({sample_labeled(rng, spec, want, seen), want});
    }
    // interleave classes so unshuffled iteration is still balanced
    std::vector<size_t> order(d.examples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<Example> shuffled;
    shuffled.reserve(d.examples.size());
    for (size_t i : order) shuffled.push_back(std::move(d.examples[i]));
    d.examples = std::move(shuffled);
    return d;
}

} // namespace

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
    if (spec.vocab_size < 4) {
        throw config_error("synthetic vocab_size must be at least 4, got " +
                           std::to_string(spec.vocab_size));
    }
    if (spec.seq_len < 2) {
        throw config_error("synthetic seq_len must be at least 2, got " +
                           std::to_string(spec.seq_len));
    }
    Rng rng(spec.seed);
    std::set<uint64_t> seen;
    SyntheticData out;
    out.train = fill_split(rng, spec, spec.n_train, seen);
    out.test = fill_split(rng, spec, spec.n_test, seen);
    return out;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == '\t') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> tokenize_text(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int parse_label(const std::string& s, int line_no) {
    if (s.empty()) throw input_error("line " + std::to_string(line_no) + ": empty label");
    for (char ch : s) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) {
            throw input_error("line " + std::to_string(line_no) + ": unknown label '" + s + "'");
        }
    }
    return std::stoi(s);
}

struct TsvRows {
    std::vector<std::vector<std::string>> token_rows;
    std::vector<int> labels;
};

TsvRows read_tsv_rows(const std::string& path, const TsvSchema& schema, int max_seq_len) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw parse_error(path + ": missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_tabs(line);
    int text_col = -1, label_col = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == schema.text_column) text_col = static_cast<int>(i);
        if (header[i] == schema.label_column) label_col = static_cast<int>(i);
    }
    if (text_col < 0) throw parse_error(path + ": header lacks column '" + schema.text_column + "'");
    if (label_col < 0) throw parse_error(path + ": header lacks column '" + schema.label_column + "'");

    TsvRows rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_tabs(line);
        if (static_cast<int>(cells.size()) <= std::max(text_col, label_col)) {
            throw parse_error(path + ": line " + std::to_string(line_no) + " has " +
                              std::to_string(cells.size()) + " columns, need " +
                              std::to_string(std::max(text_col, label_col) + 1));
        }
        std::vector<std::string> toks = tokenize_text(cells[text_col]);
        if (static_cast<int>(toks.size()) > max_seq_len) toks.resize(max_seq_len);
        rows.token_rows.push_back(std::move(toks));
        rows.labels.push_back(parse_label(cells[label_col], line_no));
    }
    return rows;
}

} // namespace

Dataset load_tsv(const std::string& path, const TsvSchema& schema, int max_seq_len) {
    const TsvRows rows = read_tsv_rows(path, schema, max_seq_len);
    Dataset d;
    d.vocab["<pad>"] = kPadToken;
    d.vocab["<unk>"] = kUnkToken;
    int next_id = 2;
    for (const auto& toks : rows.token_rows) {
        for (const std::string& t : toks) {
            if (!d.vocab.count(t)) d.vocab[t] = next_id++;
        }
    }
    d.vocab_size = next_id;
    int max_label = 0;
    for (int l : rows.labels) max_label = std::max(max_label, l);
    d.n_classes = max_label + 1;
    for (size_t i = 0; i < rows.token_rows.size(); ++i) {
        Example ex;
        ex.label = rows.labels[i];
        for (const std::string& t : rows.token_rows[i]) ex.tokens.push_back(d.vocab.at(t));
        d.examples.push_back(std::move(ex));
    }
    return d;
}

Dataset load_tsv(const std::string& path, const TsvSchema& schema, int max_seq_len,
                 const std::map<std::string, int>& vocab, int vocab_size, int n_classes) {
    const TsvRows rows = read_tsv_rows(path, schema, max_seq_len);
    Dataset d;
    d.vocab = vocab;
    d.vocab_size = vocab_size;
    d.n_classes = n_classes;
    for (size_t i = 0; i < rows.token_rows.size(); ++i) {
        if (rows.labels[i] >= n_classes) {
            throw input_error("unknown label " + std::to_string(rows.labels[i]) +
                              ", expected fewer than " + std::to_string(n_classes));
        }
        Example ex;
        ex.label = rows.labels[i];
        for (const std::string& t : rows.token_rows[i]) {
            auto it = vocab.find(t);
            ex.tokens.push_back(it == vocab.end() ? kUnkToken : it->second);
        }
        d.examples.push_back(std::move(ex));
    }
    return d;
}

void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << "patprune-dataset v1\n";
    out << "vocab_size " << d.vocab_size << "\n";
    out << "n_classes " << d.n_classes << "\n";
    out << "vocab " << d.vocab.size() << "\n";
    for (const auto& [tok, id] : d.vocab) out << id << "\t" << tok << "\n";
    out << "examples " << d.examples.size() << "\n";
    for (const Example& ex : d.examples) {
        out << ex.label;
        for (int t : ex.tokens) out << " " << t;
        out << "\n";
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "patprune-dataset v1") {
        throw parse_error(path + ": not a patprune dataset file");
    }
    Dataset d;
    std::string word;
    size_t n = 0;
    in >> word >> d.vocab_size;
    if (word != "vocab_size") throw parse_error(path + ": expected vocab_size");
    in >> word >> d.n_classes;
    if (word != "n_classes") throw parse_error(path + ": expected n_classes");
    in >> word >> n;
    if (word != "vocab") throw parse_error(path + ": expected vocab");
    std::getline(in, line);
    for (size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw parse_error(path + ": truncated vocab");
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) throw parse_error(path + ": malformed vocab entry");
        d.vocab[line.substr(tab + 1)] = std::stoi(line.substr(0, tab));
    }
    in >> word >> n;
    if (word != "examples") throw parse_error(path + ": expected examples");
    std::getline(in, line);
    for (size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw parse_error(path + ": truncated examples");
        std::istringstream row(line);
        Example ex;
        row >> ex.label;
        int t;
        while (row >> t) ex.tokens.push_back(t);
        d.examples.push_back(std::move(ex));
    }
    return d;
}

std::vector<TokenBatch> batches(const Dataset& d, int batch_size, uint64_t seed, bool shuffle) {
    if (batch_size < 1) {
        throw config_error("batch_size must be at least 1, got " + std::to_string(batch_size));
    }
    std::vector<size_t> order(d.examples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (shuffle) {
        Rng rng(seed);
        rng.shuffle(order);
    }
    std::vector<TokenBatch> out;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(batch_size)) {
        const size_t end = std::min(order.size(), start + static_cast<size_t>(batch_size));
        TokenBatch tb;
        tb.batch = static_cast<int>(end - start);
        int longest = 1;
        for (size_t i = start; i < end; ++i) {
            longest = std::max(longest, static_cast<int>(d.examples[order[i]].tokens.size()));
        }
        tb.seq_len = longest;
        tb.ids.assign(static_cast<size_t>(tb.batch) * longest, kPadToken);
        for (size_t i = start; i < end; ++i) {
            const Example& ex = d.examples[order[i]];
            const int b = static_cast<int>(i - start);
            tb.lengths.push_back(std::max<int>(1, static_cast<int>(ex.tokens.size())));
            tb.labels.push_back(ex.label);
            for (size_t t = 0; t < ex.tokens.size(); ++t) {
                tb.ids[static_cast<size_t>(b) * longest + t] = ex.tokens[t];
            }
        }
        out.push_back(std::move(tb));
    }
    return out;
}

} // namespace patprune
