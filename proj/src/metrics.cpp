// Copyright 2026 The mot3d Authors
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

#include "mot3d/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "mot3d/association.hpp"
#include "mot3d/errors.hpp"

namespace mot3d {

namespace {

struct EvalFrame {
  std::vector<GroundTruthBox> gt;
  std::vector<TrackRecord> tracks;
};

// Per scene, the class's frames in ascending order.
using ClassFrames = std::vector<std::vector<EvalFrame>>;

ClassFrames collect(const TrackSet& tracks, const GroundTruthSet& gt, ObjectClass cls) {
  std::set<std::string> scenes;
  for (const auto& [s, f] : gt) scenes.insert(s);
  for (const auto& [s, f] : tracks) scenes.insert(s);
  ClassFrames out;
  for (const auto& scene : scenes) {
    std::map<FrameIndex, EvalFrame> frames;
    if (const auto it = gt.find(scene); it != gt.end()) {
      for (const auto& [frame, boxes] : it->second) {
        for (const auto& b : boxes) {
          if (b.class_label == cls) frames[frame].gt.push_back(b);
        }
      }
    }
    if (const auto it = tracks.find(scene); it != tracks.end()) {
      for (const auto& [frame, recs] : it->second) {
        for (const auto& r : recs) {
          if (r.class_label == cls) frames[frame].tracks.push_back(r);
        }
      }
    }
    std::vector<EvalFrame> seq;
    seq.reserve(frames.size());
    for (auto& [f, ef] : frames) seq.push_back(std::move(ef));
    out.push_back(std::move(seq));
  }
  return out;
}

FrameCounts counts_at(const ClassFrames& frames, double threshold, double gate) {
  FrameCounts total;
  std::vector<TrackRecord> kept;
  for (const auto& scene : frames) {
    IdAssignment assignment;
    for (const auto& f : scene) {
      kept.clear();
      for (const auto& r : f.tracks) {
        if (r.score >= threshold) kept.push_back(r);
      }
      total += match_frame(f.gt, kept, assignment, gate).counts;
    }
  }
  return total;
}

std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

}  // namespace

FrameMatch match_frame(std::span<const GroundTruthBox> gt, std::span<const TrackRecord> tracks,
                       IdAssignment& assignment, double gate) {
  std::vector<Observation> gt_boxes, track_boxes;
  gt_boxes.reserve(gt.size());
  track_boxes.reserve(tracks.size());
  for (const auto& g : gt) gt_boxes.push_back(g.box);
  for (const auto& t : tracks) track_boxes.push_back(t.box);
  const MatchResult m = match_by_center_distance(gt_boxes, track_boxes, gate);

  FrameMatch out;
  out.counts.tp = static_cast<std::int64_t>(m.pairs.size());
  out.counts.fn = static_cast<std::int64_t>(m.unmatched_predictions.size());
  out.counts.fp = static_cast<std::int64_t>(m.unmatched_detections.size());
  for (const auto& p : m.pairs) {
    out.pairs.emplace_back(p.prediction, p.detection);
    const std::string& instance = gt[static_cast<std::size_t>(p.prediction)].instance_id;
    const std::int64_t track_id = tracks[static_cast<std::size_t>(p.detection)].track_id;
    const auto it = assignment.find(instance);
    if (it != assignment.end() && it->second != track_id) ++out.counts.ids;
    assignment[instance] = track_id;
  }
  return out;
}

std::optional<double> motar(std::int64_t ids, std::int64_t fp, std::int64_t fn,
                            std::int64_t positives, double recall) {
  if (!(recall > 0.0 && recall <= 1.0)) throw DomainError("motar: recall must be in (0, 1]");
  if (positives <= 0) return std::nullopt;
  const double p = static_cast<double>(positives);
  const double errors = static_cast<double>(ids + fp + fn);
  const double value = 1.0 - (errors - (1.0 - recall) * p) / (recall * p);
  return std::clamp(value, 0.0, 1.0);
}

FrameCounts evaluate_at_threshold(const TrackSet& tracks, const GroundTruthSet& ground_truth,
                                  ObjectClass cls, double threshold, double gate) {
  return counts_at(collect(tracks, ground_truth, cls), threshold, gate);
}

EvalReport amota(const TrackSet& tracks, const GroundTruthSet& ground_truth,
                 const EvalOptions& options) {
  if (options.n_samples < 2) throw DomainError("amota: n_samples must be at least 2");
  EvalReport report;
  report.n_samples = options.n_samples;

  std::set<ObjectClass> present;
  for (const auto& [s, frames] : ground_truth) {
    for (const auto& [f, boxes] : frames) {
      for (const auto& b : boxes) present.insert(b.class_label);
    }
  }

  const int grid = options.n_samples - 1;
  for (ObjectClass cls : present) {
    const ClassFrames frames = collect(tracks, ground_truth, cls);
    std::int64_t positives = 0;
    std::vector<double> scores;
    for (const auto& scene : frames) {
      for (const auto& f : scene) {
        positives += static_cast<std::int64_t>(f.gt.size());
        for (const auto& r : f.tracks) scores.push_back(r.score);
      }
    }
    std::sort(scores.begin(), scores.end(), std::greater<>());
    scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
    // Rank-based subsampling keeps the lowest score (the highest recall).
    std::vector<double> candidates;
    if (scores.size() <= options.max_thresholds || options.max_thresholds < 2) {
      candidates = scores;
    } else {
      const std::size_t k = options.max_thresholds;
      for (std::size_t i = 0; i < k; ++i) {
        candidates.push_back(scores[i * (scores.size() - 1) / (k - 1)]);
      }
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    }
    std::vector<FrameCounts> at;
    at.reserve(candidates.size());
    for (double c : candidates) at.push_back(counts_at(frames, c, options.gate));

    ClassReport cr;
    cr.class_label = cls;
    cr.positives = positives;
    double sum = 0.0;
    for (int k = 1; k <= grid; ++k) {
      RecallSample s;
      s.target_recall = static_cast<double>(k) / static_cast<double>(grid);
      s.positives = positives;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double recall = static_cast<double>(at[c].tp) / static_cast<double>(positives);
        // Tolerance absorbs rounding in the k / grid targets.
        if (recall + 1e-12 >= s.target_recall) {
          s.reachable = true;
          s.score_threshold = candidates[c];
          s.achieved_recall = recall;
          s.tp = at[c].tp;
          s.fp = at[c].fp;
          s.fn = at[c].fn;
          s.ids = at[c].ids;
          s.motar = *motar(s.ids, s.fp, s.fn, positives, s.target_recall);
          break;
        }
      }
      if (!s.reachable) {
        s.motar = 0.0;
        if (!candidates.empty()) {
          const FrameCounts& last = at.back();
          s.achieved_recall = static_cast<double>(last.tp) / static_cast<double>(positives);
        }
      }
      sum += s.motar;
      cr.samples.push_back(s);
    }
    cr.amota = sum / static_cast<double>(grid);
    report.classes.push_back(std::move(cr));
  }
  if (!report.classes.empty()) {
    double total = 0.0;
    for (const auto& c : report.classes) total += c.amota;
    report.overall_amota = total / static_cast<double>(report.classes.size());
  }
  return report;
}

const ClassReport* EvalReport::find(ObjectClass cls) const {
  for (const auto& c : classes) {
    if (c.class_label == cls) return &c;
  }
  return nullptr;
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["header"] = {
      {"metric", "AMOTA"},
      {"n_samples", n_samples},
      {"matching", "greedy 2D center distance, gate 2 m, per class"},
      {"note",
       "formula-level MOTAR/AMOTA; no benchmark-tool filtering (distance/point "
       "filters, track interpolation), so values are not bit-comparable with it"},
  };
  nlohmann::ordered_json cls_docs = nlohmann::ordered_json::array();
  for (const auto& c : classes) {
    nlohmann::ordered_json cd;
    cd["class"] = std::string(to_string(c.class_label));
    cd["amota"] = c.amota;
    cd["positives"] = c.positives;
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (const auto& s : c.samples) {
      nlohmann::ordered_json sd;
      sd["target_recall"] = s.target_recall;
      sd["achieved_recall"] = s.achieved_recall;
      sd["motar"] = s.motar;
      sd["reachable"] = s.reachable;
      sd["score_threshold"] = s.score_threshold ? nlohmann::ordered_json(*s.score_threshold)
                                                : nlohmann::ordered_json(nullptr);
      sd["tp"] = s.tp;
      sd["fp"] = s.fp;
      sd["fn"] = s.fn;
      sd["ids"] = s.ids;
      samples.push_back(std::move(sd));
    }
    cd["samples"] = std::move(samples);
    cls_docs.push_back(std::move(cd));
  }
  doc["classes"] = std::move(cls_docs);
  doc["overall"] = {{"amota", overall_amota ? nlohmann::ordered_json(*overall_amota)
                                            : nlohmann::ordered_json(nullptr)}};
  return doc;
}

std::string table_csv_header() {
  std::string h = "Method,Overall";
  for (ObjectClass cls : kAllClasses) {
    h += ',';
    h += to_string(cls);
  }
  return h;
}

std::string table_csv_row(const std::string& method, const EvalReport& report) {
  std::string row = method + ",";
  if (report.overall_amota) row += format_percent(*report.overall_amota);
  for (ObjectClass cls : kAllClasses) {
    row += ',';
    if (const ClassReport* c = report.find(cls)) row += format_percent(c->amota);
  }
  return row;
}

}  // namespace mot3d
