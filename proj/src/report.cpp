// Copyright 2026 The screenrep Authors.
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

#include "screenrep/report.hpp"

#include <sstream>

namespace screenrep {

namespace {

using nlohmann::ordered_json;

ordered_json cell_header(const CellKey& key) {
  ordered_json j;
  j["category"] = to_string(key.first);
  j["gender"] = to_string(key.second);
  return j;
}

ordered_json box_json(const CellKey& key, const BoxStats& b) {
  ordered_json j = cell_header(key);
  j["n"] = b.n;
  j["min"] = b.min;
  j["lower_whisker"] = b.lower_whisker;
  j["q1"] = b.q1;
  j["median"] = b.median;
  j["q3"] = b.q3;
  j["upper_whisker"] = b.upper_whisker;
  j["max"] = b.max;
  return j;
}

ordered_json direction_json(const RepresentationSummary& s,
                            DirectionSource source) {
  ordered_json arr = ordered_json::array();
  for (const auto& [key, d] : direction_proportions(s, source)) {
    ordered_json j = cell_header(key);
    j["up_count"] = d.up;
    j["down_count"] = d.down;
    j["up_pct"] = d.up_pct;
    j["down_pct"] = d.down_pct;
    arr.push_back(std::move(j));
  }
  return arr;
}

ordered_json variability_json(const RepresentationSummary& s,
                              DirectionSource source) {
  ordered_json arr = ordered_json::array();
  for (const auto& [key, b] : variability_summary(s, source)) {
    arr.push_back(box_json(key, b));
  }
  return arr;
}

std::string num(double v) { return ordered_json(v).dump(); }

std::string hex_color(const Rgb& c) {
  static const char* digits = "0123456789abcdef";
  std::string out = "#";
  for (const std::uint8_t ch : {c.r, c.g, c.b}) {
    out += digits[ch >> 4];
    out += digits[ch & 15];
  }
  return out;
}

ordered_json samples_json(const SampleSet& y) {
  ordered_json j;
  if (!y.is_sketch()) {
    j["values"] = y.values();
    return j;
  }
  ordered_json counts = ordered_json::array();
  for (std::size_t b = 0; b < y.bins().size(); ++b) {
    if (y.bins()[b] != 0) counts.push_back({b, y.bins()[b]});
  }
  j["histogram"] = {{"bins", SampleSet::kSketchBins},
                    {"range", {-1.0, 1.0}},
                    {"counts", std::move(counts)}};
  return j;
}

}  // namespace

AnalysisResult analyze(const CorpusIndex& corpus, const EngineConfig& config) {
  config.validate();
  AnalysisResult out{config, corpus.counts(),
                     summarize_corpus(corpus, config.metrics, config.jobs), {}};
  out.clusters = cluster_report(face_colors(out.summary), config.clusters);
  return out;
}

ordered_json to_json(const ClusterCell& cell) {
  ordered_json j = cell_header({cell.category, cell.gender});
  j["n_faces"] = cell.n_faces;
  j["status"] = cell.insufficient_data ? "insufficient_data" : "ok";
  j["selected_k"] = cell.selected_k;
  ordered_json clusters = ordered_json::array();
  for (const ClusterEntry& e : cell.clusters) {
    ordered_json c;
    c["centroid_rgb"] = {e.centroid.r, e.centroid.g, e.centroid.b};
    c["proportion_pct"] = e.proportion_pct;
    c["brightness_pct"] = e.brightness_pct;
    clusters.push_back(std::move(c));
  }
  j["clusters"] = std::move(clusters);
  ordered_json scores = ordered_json::object();
  for (const auto& [k, s] : cell.silhouette_by_k) scores[std::to_string(k)] = s;
  j["silhouette_by_k"] = std::move(scores);
  return j;
}

ordered_json report_json(const AnalysisResult& result) {
  const RepresentationSummary& s = result.summary;
  ordered_json doc;
  doc["config"] = to_json(result.config);

  ordered_json corpus = ordered_json::object();
  for (const auto& [cat, counts] : result.corpus_counts) {
    corpus[std::string(to_string(cat))] = {
        {"videos", counts.videos},
        {"frames", counts.frames},
        {"sampled_seconds", s.category_seconds(cat)}};
  }
  doc["corpus"] = std::move(corpus);

  ordered_json st = ordered_json::array();
  for (const auto& [key, t] : screen_time(s)) {
    ordered_json j = cell_header(key);
    j["seconds"] = t.seconds;
    j["share_pct"] = t.share_pct;
    j["frames_present"] = t.frames_present;
    st.push_back(std::move(j));
  }
  doc["screen_time"] = std::move(st);
  doc["head_pose"] = direction_json(s, DirectionSource::kHead);
  doc["eye_gaze"] = direction_json(s, DirectionSource::kGaze);
  doc["variability"] = {{"head", variability_json(s, DirectionSource::kHead)},
                        {"gaze", variability_json(s, DirectionSource::kGaze)}};

  ordered_json colors = ordered_json::array();
  for (const ClusterCell& cell : result.clusters.cells) {
    colors.push_back(to_json(cell));
  }
  doc["face_color"] = std::move(colors);

  const Diagnostics& d = s.diagnostics();
  doc["diagnostics"] = {{"frames_total", d.frames_total},
                        {"faces_total", d.faces_total},
                        {"faces_unknown_gender", d.faces_unknown_gender},
                        {"faces_below_confidence", d.faces_below_confidence},
                        {"head_pose_failures", d.head_pose_failures},
                        {"head_pose_nonconverged", d.head_pose_nonconverged},
                        {"gaze_missing", d.gaze_missing},
                        {"gaze_invalid", d.gaze_invalid}};
  return doc;
}

std::string report_csv(const AnalysisResult& result) {
  const RepresentationSummary& s = result.summary;
  std::ostringstream out;
  out << "category,gender,metric,value\n";
  auto row = [&](const CellKey& key, const std::string& metric,
                 const std::string& value) {
    out << to_string(key.first) << ',' << to_string(key.second) << ','
        << metric << ',' << value << '\n';
  };

  for (const auto& [key, t] : screen_time(s)) {
    row(key, "screen_time_seconds", num(t.seconds));
    row(key, "screen_time_share_pct", num(t.share_pct));
    row(key, "frames_present", std::to_string(t.frames_present));
  }
  for (const DirectionSource src :
       {DirectionSource::kHead, DirectionSource::kGaze}) {
    const std::string prefix(to_string(src));
    for (const auto& [key, d] : direction_proportions(s, src)) {
      row(key, prefix + "_up_count", std::to_string(d.up));
      row(key, prefix + "_down_count", std::to_string(d.down));
      row(key, prefix + "_up_pct", num(d.up_pct));
      row(key, prefix + "_down_pct", num(d.down_pct));
    }
    for (const auto& [key, b] : variability_summary(s, src)) {
      row(key, prefix + "_y_n", std::to_string(b.n));
      row(key, prefix + "_y_min", num(b.min));
      row(key, prefix + "_y_lower_whisker", num(b.lower_whisker));
      row(key, prefix + "_y_q1", num(b.q1));
      row(key, prefix + "_y_median", num(b.median));
      row(key, prefix + "_y_q3", num(b.q3));
      row(key, prefix + "_y_upper_whisker", num(b.upper_whisker));
      row(key, prefix + "_y_max", num(b.max));
    }
  }
  for (const ClusterCell& cell : result.clusters.cells) {
    const CellKey key{cell.category, cell.gender};
    if (cell.insufficient_data) {
      row(key, "color_status", "insufficient_data");
      continue;
    }
    row(key, "color_selected_k", std::to_string(cell.selected_k));
    for (std::size_t i = 0; i < cell.clusters.size(); ++i) {
      const std::string p = "color_cluster_" + std::to_string(i + 1);
      row(key, p + "_centroid", hex_color(cell.clusters[i].centroid));
      row(key, p + "_proportion_pct", num(cell.clusters[i].proportion_pct));
      row(key, p + "_brightness_pct", num(cell.clusters[i].brightness_pct));
    }
    for (const auto& [k, score] : cell.silhouette_by_k) {
      row(key, "color_silhouette_k" + std::to_string(k), num(score));
    }
  }
  return out.str();
}

std::map<std::string, std::string> plot_data(const AnalysisResult& result) {
  const RepresentationSummary& s = result.summary;
  std::map<std::string, std::string> files;

  ordered_json st = ordered_json::array();
  for (const auto& [key, t] : screen_time(s)) {
    ordered_json j = cell_header(key);
    j["seconds"] = t.seconds;
    j["share_pct"] = t.share_pct;
    st.push_back(std::move(j));
  }
  files["screen_time.json"] = ordered_json{{"cells", std::move(st)}}.dump(1) + "\n";

  for (const DirectionSource src :
       {DirectionSource::kHead, DirectionSource::kGaze}) {
    ordered_json cells = ordered_json::array();
    for (const auto& [key, cell] : s.cells()) {
      const SampleSet& y = cell.source(src).y;
      if (y.empty()) continue;
      ordered_json j = cell_header(key);
      j.update(samples_json(y));
      cells.push_back(std::move(j));
    }
    const std::string name = src == DirectionSource::kHead
                                 ? "head_pose_y.json"
                                 : "eye_gaze_y.json";
    files[name] = ordered_json{{"cells", std::move(cells)}}.dump(1) + "\n";
  }

  ordered_json sil = ordered_json::array();
  for (const ClusterCell& cell : result.clusters.cells) {
    if (cell.insufficient_data) continue;
    ordered_json j = cell_header({cell.category, cell.gender});
    ordered_json ks = ordered_json::array();
    ordered_json scores = ordered_json::array();
    for (const auto& [k, score] : cell.silhouette_by_k) {
      ks.push_back(k);
      scores.push_back(score);
    }
    j["k"] = std::move(ks);
    j["silhouette"] = std::move(scores);
    sil.push_back(std::move(j));
  }
  files["silhouette.json"] = ordered_json{{"cells", std::move(sil)}}.dump(1) + "\n";
  return files;
}

}  // namespace screenrep
