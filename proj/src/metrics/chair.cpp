#include "sinklab/metrics/chair.hpp"

#include <stdexcept>

namespace sinklab::metrics {

ChairScores chair_scores(const std::vector<CaptionRecord>& captions,
                         const std::map<std::string, std::set<std::string>>& truth) {
    if (captions.empty()) throw std::invalid_argument("chair_scores: no captions");

    ChairScores scores;
    for (const auto& caption : captions) {
        auto it = truth.find(caption.sample_id);
        if (it == truth.end()) {
            throw std::invalid_argument("chair_scores: no ground truth for sample \"" +
                                        caption.sample_id + "\"");
        }
        const auto& present = it->second;
        ChairScores::PerCaption pc;
        pc.sample_id = caption.sample_id;
        pc.mentions = static_cast<int>(caption.mentioned_objects.size());
        for (const auto& obj : caption.mentioned_objects) {
            if (!present.count(obj)) ++pc.hallucinated;
        }
        scores.generated_mentions += pc.mentions;
        scores.hallucinated_mentions += pc.hallucinated;
        if (pc.hallucinated > 0) ++scores.hallucinated_captions;
        scores.per_caption.push_back(std::move(pc));
    }
    scores.generated_captions = static_cast<int>(captions.size());
    if (scores.generated_mentions == 0) {
        throw std::invalid_argument("chair_scores: zero generated objects, CHAIR_I undefined");
    }
    scores.chair_i = static_cast<double>(scores.hallucinated_mentions) /
                     static_cast<double>(scores.generated_mentions);
    scores.chair_s = static_cast<double>(scores.hallucinated_captions) /
                     static_cast<double>(scores.generated_captions);
    return scores;
}

}  // namespace sinklab::metrics
