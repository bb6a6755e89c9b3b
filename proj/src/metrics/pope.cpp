#include "sinklab/metrics/pope.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "sinklab/rng.hpp"

namespace sinklab::metrics {

namespace {

// Deterministic pick of the top-k candidates by (score desc, name asc).
std::vector<std::string> top_by_score(const std::set<std::string>& candidates,
                                      const std::map<std::string, long long>& score, int k) {
    std::vector<std::string> sorted(candidates.begin(), candidates.end());
    std::stable_sort(sorted.begin(), sorted.end(), [&](const std::string& a, const std::string& b) {
        const long long sa = score.count(a) ? score.at(a) : 0;
        const long long sb = score.count(b) ? score.at(b) : 0;
        if (sa != sb) return sa > sb;
        return a < b;
    });
    sorted.resize(static_cast<std::size_t>(k));
    return sorted;
}

}  // namespace

std::vector<PopeQuery> pope_build(const std::vector<AnnotatedSample>& corpus, PopeStrategy strategy,
                                  int questions_per_image, std::uint64_t seed) {
    if (questions_per_image < 2 || questions_per_image % 2 != 0) {
        throw std::invalid_argument("pope_build: questions_per_image must be even and >= 2");
    }
    const int half = questions_per_image / 2;
    const ObjectStats stats = ObjectStats::from_corpus(corpus);
    const std::set<std::string> universe = stats.all_objects();

    std::vector<PopeQuery> queries;
    Rng rng = Rng::substream(seed, "pope");
    for (const auto& sample : corpus) {
        std::set<std::string> absent;
        for (const auto& obj : universe) {
            if (!sample.present_objects.count(obj)) absent.insert(obj);
        }
        if (static_cast<int>(sample.present_objects.size()) < half ||
            static_cast<int>(absent.size()) < half) {
            throw std::runtime_error(
                "pope_build: sample \"" + sample.sample_id + "\" needs " + std::to_string(half) +
                " present and absent candidates, has " + std::to_string(sample.present_objects.size()) +
                " present and " + std::to_string(absent.size()) + " absent");
        }

        // Positives: uniform draw over the present objects.
        std::vector<std::string> present_sorted(sample.present_objects.begin(),
                                                sample.present_objects.end());
        const auto pos_picks =
            rng.sample_without_replacement(static_cast<int>(present_sorted.size()), half);
        for (int idx : pos_picks) {
            queries.push_back({sample.sample_id, present_sorted[static_cast<std::size_t>(idx)], true,
                               strategy});
        }

        // Negatives per strategy.
        std::vector<std::string> negatives;
        switch (strategy) {
            case PopeStrategy::random: {
                std::vector<std::string> absent_sorted(absent.begin(), absent.end());
                const auto picks =
                    rng.sample_without_replacement(static_cast<int>(absent_sorted.size()), half);
                for (int idx : picks) negatives.push_back(absent_sorted[static_cast<std::size_t>(idx)]);
                break;
            }
            case PopeStrategy::popular: {
                std::map<std::string, long long> score;
                for (const auto& [name, freq] : stats.frequency) score[name] = freq;
                negatives = top_by_score(absent, score, half);
                break;
            }
            case PopeStrategy::adversarial: {
                std::map<std::string, long long> score;
                for (const auto& cand : absent) {
                    long long s = 0;
                    for (const auto& present : sample.present_objects) s += stats.cooc(cand, present);
                    score[cand] = s;
                }
                negatives = top_by_score(absent, score, half);
                break;
            }
        }
        for (const auto& obj : negatives) {
            queries.push_back({sample.sample_id, obj, false, strategy});
        }
    }
    return queries;
}

std::string pope_query_key(const PopeQuery& query) { return query.sample_id + "/" + query.object; }

PopeScores pope_score(const std::map<std::string, bool>& predictions,
                      const std::vector<PopeQuery>& queries) {
    PopeScores s;
    for (const auto& q : queries) {
        auto it = predictions.find(pope_query_key(q));
        if (it == predictions.end()) {
            throw std::invalid_argument("pope_score: missing prediction for " + pope_query_key(q));
        }
        const bool yes = it->second;
        if (yes && q.present) ++s.tp;
        if (yes && !q.present) ++s.fp;
        if (!yes && q.present) ++s.fn;
        if (!yes && !q.present) ++s.tn;
    }
    const int total = s.tp + s.fp + s.tn + s.fn;
    if (total == 0) throw std::invalid_argument("pope_score: no queries");
    s.accuracy = static_cast<double>(s.tp + s.tn) / static_cast<double>(total);
    s.precision = (s.tp + s.fp) > 0 ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp) : 0.0;
    s.recall = (s.tp + s.fn) > 0 ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn) : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

void write_pope_csv(const std::vector<PopeQuery>& queries, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_pope_csv: cannot write " + path);
    out << "sample_id,object,label,strategy\n";
    for (const auto& q : queries) {
        out << q.sample_id << ',' << q.object << ',' << (q.present ? "present" : "absent") << ','
            << pope_strategy_name(q.strategy) << '\n';
    }
}

}  // namespace sinklab::metrics
