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

#include "mot3d/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "mot3d/errors.hpp"
#include "mot3d/geometry.hpp"

namespace mot3d {

namespace {

std::string fmt(double v, const char* spec = "%.3f") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string track_color(std::int64_t id) {
  // Golden-angle hue steps keep neighbouring ids apart.
  const double hue = std::fmod(static_cast<double>(id) * 137.508, 360.0);
  return "hsl(" + fmt(hue, "%.1f") + ",75%,42%)";
}

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(const Observation& b) {
    for (const auto& p : geometry::footprint(b)) {
      min_x = std::min(min_x, p.x);
      min_y = std::min(min_y, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
  }
  bool empty() const { return !(min_x <= max_x); }
};

class SvgCanvas {
 public:
  SvgCanvas(const Bounds& data, int size) : size_(size) {
    Bounds b = data;
    if (b.empty()) b = Bounds{-10.0, -10.0, 10.0, 10.0};
    const double span = std::max({b.max_x - b.min_x, b.max_y - b.min_y, 1.0});
    const double pad = 0.05 * span;
    min_x_ = b.min_x - pad;
    max_y_ = b.max_y + pad;
    span_ = span + 2.0 * pad;
    scale_ = (size_ - 2 * kMargin) / span_;
  }

  double sx(double x) const { return kMargin + (x - min_x_) * scale_; }
  double sy(double y) const { return kMargin + (max_y_ - y) * scale_; }

  void header(std::ostringstream& os, const std::string& scene) const {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_ << "\" height=\"" << size_
       << "\" viewBox=\"0 0 " << size_ << ' ' << size_ << "\">\n";
    os << "<title>" << escape(scene) << "</title>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << size_ << "\" height=\"" << size_
       << "\" fill=\"white\"/>\n";
  }

  void axes(std::ostringstream& os) const {
    const double lo = kMargin;
    const double hi = size_ - kMargin;
    os << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    os << "<line x1=\"" << fmt(lo) << "\" y1=\"" << fmt(hi) << "\" x2=\"" << fmt(hi) << "\" y2=\""
       << fmt(hi) << "\"/>\n";
    os << "<line x1=\"" << fmt(lo) << "\" y1=\"" << fmt(lo) << "\" x2=\"" << fmt(lo) << "\" y2=\""
       << fmt(hi) << "\"/>\n";
    os << "</g>\n";
    os << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"10\" fill=\"black\">\n";
    const double step = tick_step();
    const double x0 = std::ceil(min_x_ / step) * step;
    for (double x = x0; x <= min_x_ + span_ + 1e-9; x += step) {
      os << "<text x=\"" << fmt(sx(x)) << "\" y=\"" << fmt(hi + 14) << "\" text-anchor=\"middle\">"
         << fmt(x, "%g") << "</text>\n";
    }
    const double y_min = max_y_ - span_;
    const double y0 = std::ceil(y_min / step) * step;
    for (double y = y0; y <= max_y_ + 1e-9; y += step) {
      os << "<text x=\"" << fmt(lo - 4) << "\" y=\"" << fmt(sy(y) + 3)
         << "\" text-anchor=\"end\">" << fmt(y, "%g") << "</text>\n";
    }
    os << "<text x=\"" << fmt(0.5 * size_) << "\" y=\"" << fmt(size_ - 6.0)
       << "\" text-anchor=\"middle\">x [m]</text>\n";
    os << "<text x=\"12\" y=\"" << fmt(0.5 * size_) << "\" text-anchor=\"middle\">y [m]</text>\n";
    os << "</g>\n";
  }

  std::string points(const Observation& b) const {
    std::string out;
    for (const auto& p : geometry::footprint(b)) {
      if (!out.empty()) out += ' ';
      out += fmt(sx(p.x)) + "," + fmt(sy(p.y));
    }
    return out;
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
      }
    }
    return out;
  }

 private:
  static constexpr int kMargin = 40;

  double tick_step() const {
    const double raw = span_ / 8.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
  }

  int size_;
  double min_x_ = 0.0;
  double max_y_ = 0.0;
  double span_ = 1.0;
  double scale_ = 1.0;
};

}  // namespace

std::string AblationCell::label() const {
  std::string out = affinity == AffinityChoice::kMahalanobis
                        ? std::string("mahalanobis")
                        : "iou@" + fmt(iou_threshold, "%g");
  out += "/";
  out += to_string(matcher);
  out += default_covariance ? "/default-covariance" : "/calibrated";
  out += angular_velocity ? "/with-angular-velocity" : "/without-angular-velocity";
  return out;
}

std::vector<AblationCell> AblationGrid::cells() const {
  std::vector<AblationCell> out;
  for (AffinityChoice a : affinities) {
    const std::vector<double> thresholds =
        a == AffinityChoice::kIou ? iou_thresholds : std::vector<double>{0.0};
    for (double t : thresholds) {
      for (Matcher m : matchers) {
        for (bool dc : default_covariance) {
          for (bool av : angular_velocity) {
            AblationCell c;
            c.affinity = a;
            c.iou_threshold = a == AffinityChoice::kIou ? t : 0.01;
            c.matcher = m;
            c.default_covariance = dc;
            c.angular_velocity = av;
            out.push_back(c);
          }
        }
      }
    }
  }
  return out;
}

std::vector<AblationRow> run_ablation(const DetectionSet& detections,
                                      const GroundTruthSet& ground_truth,
                                      const std::optional<NoiseModel>& calibrated,
                                      const AblationGrid& grid, const TrackerConfig& base,
                                      const EvalOptions& eval, unsigned jobs) {
  const std::vector<AblationCell> cells = grid.cells();
  for (const auto& c : cells) {
    if (!c.default_covariance && !calibrated) {
      throw ConfigError("ablation: calibrated cells need a noise model");
    }
  }
  const NoiseModel default_model = NoiseModel::default_covariance();
  std::vector<AblationRow> rows;
  rows.reserve(cells.size());
  for (const auto& c : cells) {
    TrackerConfig cfg = base;
    cfg.affinity = c.affinity;
    cfg.iou_threshold = c.iou_threshold;
    cfg.matcher = c.matcher;
    cfg.angular_velocity = c.angular_velocity;
    const NoiseModel& noise = c.default_covariance ? default_model : *calibrated;
    const TrackingRun run = track_all(detections, noise, cfg, jobs);
    rows.push_back({c, amota(run.tracks, ground_truth, eval)});
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = table_csv_header() + "\n";
  for (const auto& r : rows) out += table_csv_row(r.cell.label(), r.report) + "\n";
  return out;
}

std::string render_bev_svg(const TrackSet* tracks, const GroundTruthSet* ground_truth,
                           const DetectionSet* detections, const std::string& scene) {
  const auto* track_scene = tracks && tracks->contains(scene) ? &tracks->at(scene) : nullptr;
  const auto* gt_scene =
      ground_truth && ground_truth->contains(scene) ? &ground_truth->at(scene) : nullptr;
  const auto* det_scene =
      detections && detections->contains(scene) ? &detections->at(scene) : nullptr;
  if (!track_scene && !gt_scene && !det_scene) {
    throw ConfigError("plot: scene '" + scene + "' not found");
  }

  Bounds bounds;
  if (track_scene) {
    for (const auto& [f, recs] : *track_scene) {
      for (const auto& r : recs) bounds.add(r.box);
    }
  }
  if (gt_scene) {
    for (const auto& [f, boxes] : *gt_scene) {
      for (const auto& b : boxes) bounds.add(b.box);
    }
  }
  if (det_scene) {
    for (const auto& [f, dets] : *det_scene) {
      for (const auto& d : dets) bounds.add(d.observation);
    }
  }

  const SvgCanvas canvas(bounds, 800);
  std::ostringstream os;
  canvas.header(os, scene);
  canvas.axes(os);
  if (det_scene) {
    os << "<g class=\"detections\" fill=\"none\" stroke=\"#9a9a9a\" stroke-width=\"0.8\">\n";
    for (const auto& [f, dets] : *det_scene) {
      for (const auto& d : dets) {
        os << "<polygon class=\"detection\" data-frame=\"" << f << "\" points=\""
           << canvas.points(d.observation) << "\"/>\n";
      }
    }
    os << "</g>\n";
  }
  if (gt_scene) {
    os << "<g class=\"ground-truth\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" "
          "stroke-dasharray=\"4 3\">\n";
    for (const auto& [f, boxes] : *gt_scene) {
      for (const auto& b : boxes) {
        os << "<polygon class=\"gt\" data-frame=\"" << f << "\" data-instance=\""
           << SvgCanvas::escape(b.instance_id) << "\" points=\"" << canvas.points(b.box)
           << "\"/>\n";
      }
    }
    os << "</g>\n";
  }
  if (track_scene) {
    os << "<g class=\"tracks\" fill=\"none\" stroke-width=\"1.5\">\n";
    for (const auto& [f, recs] : *track_scene) {
      for (const auto& r : recs) {
        os << "<polygon class=\"track\" data-frame=\"" << f << "\" data-track-id=\"" << r.track_id
           << "\" stroke=\"" << track_color(r.track_id) << "\" points=\"" << canvas.points(r.box)
           << "\"/>\n";
      }
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace mot3d
