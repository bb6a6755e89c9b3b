#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sinklab/metrics/annotations.hpp"

namespace sinklab::metrics {

// Builds the polling queries: questions_per_image per sample, half asking
// about present objects, half about absent ones. Negatives follow the
// strategy: uniform (random), highest corpus frequency (popular), or highest
// co-occurrence with the sample's present objects (adversarial). Ties break
// lexicographically; everything is deterministic given the seed.
std::vector<PopeQuery> pope_build(const std::vector<AnnotatedSample>& corpus, PopeStrategy strategy,
                                  int questions_per_image, std::uint64_t seed);

inline constexpr int kPopeQuestionsPerImage = 6;

struct PopeScores {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int tp = 0, fp = 0, tn = 0, fn = 0;
};

// "yes" predictions count as positive. Ratios with zero denominators come
// out 0. Throws if any query lacks a prediction.
PopeScores pope_score(const std::map<std::string, bool>& predictions,
                      const std::vector<PopeQuery>& queries);

// Key used to match predictions to queries: "<sample_id>/<object>".
std::string pope_query_key(const PopeQuery& query);

void write_pope_csv(const std::vector<PopeQuery>& queries, const std::string& path);

}  // namespace sinklab::metrics
