#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace sinklab::metrics {

// Synthetic stand-in for a segmentation-style annotation: a labelled grid of
// regions plus the objects present. Visual token j of a sample maps to grid
// cell j (row-major).
struct GridAnnotation {
    int width = 0;
    int height = 0;
    std::string background_label = "background";
    std::vector<std::string> labels;  // width*height, row-major

    int cells() const { return width * height; }
    bool is_background(int cell) const {
        return labels[static_cast<std::size_t>(cell)] == background_label;
    }
    void validate() const;
};

struct QaPair {
    std::vector<int> question_ids;
    std::string answer;
};

struct AnnotatedSample {
    std::string sample_id;
    GridAnnotation grid;
    std::set<std::string> present_objects;
    std::vector<QaPair> qa;

    void validate() const;
};

// Objects mentioned by one generated caption. Extraction happens upstream;
// this module only consumes the resolved lists.
struct CaptionRecord {
    std::string sample_id;
    std::vector<std::string> mentioned_objects;  // multiset: duplicates count
};

enum class PopeStrategy { random, popular, adversarial };

std::string pope_strategy_name(PopeStrategy s);
PopeStrategy pope_strategy_from_name(const std::string& name);

struct PopeQuery {
    std::string sample_id;
    std::string object;
    bool present = false;  // label: present|absent
    PopeStrategy strategy = PopeStrategy::random;
};

// Corpus-level statistics shared by the POPE builders: global object
// frequencies and pairwise co-occurrence counts over present-object sets.
struct ObjectStats {
    std::map<std::string, int> frequency;
    std::map<std::pair<std::string, std::string>, int> cooccurrence;  // key ordered (a < b)

    int cooc(const std::string& a, const std::string& b) const;
    static ObjectStats from_corpus(const std::vector<AnnotatedSample>& corpus);
    std::set<std::string> all_objects() const;
};

std::vector<AnnotatedSample> load_annotations(const std::string& path);
void save_annotations(const std::vector<AnnotatedSample>& samples, const std::string& path);

std::vector<CaptionRecord> load_captions(const std::string& path);
void save_captions(const std::vector<CaptionRecord>& captions, const std::string& path);

}  // namespace sinklab::metrics
