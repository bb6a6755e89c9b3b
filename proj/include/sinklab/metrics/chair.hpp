#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sinklab/metrics/annotations.hpp"

namespace sinklab::metrics {

struct ChairScores {
    double chair_i = 0.0;  // hallucinated mentions / generated mentions
    double chair_s = 0.0;  // hallucinated captions / captions
    int hallucinated_mentions = 0;
    int generated_mentions = 0;
    int hallucinated_captions = 0;
    int generated_captions = 0;

    struct PerCaption {
        std::string sample_id;
        int mentions = 0;
        int hallucinated = 0;
    };
    std::vector<PerCaption> per_caption;
};

// Object matching is exact-string on canonical names. Duplicated
// hallucinated mentions count once per mention. Throws when there are no
// captions or no generated mentions at all.
ChairScores chair_scores(const std::vector<CaptionRecord>& captions,
                         const std::map<std::string, std::set<std::string>>& truth);

}  // namespace sinklab::metrics
