// SPDX-License-Identifier: Apache-2.0
#include "segalign/analysis/export.hpp"

#include <cstdio>
#include <sstream>

#include "segalign/analysis/box_stats.hpp"

namespace segalign {

using nlohmann::json;

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

void box_cells(std::ostringstream& os, const BoxStats& s) {
  os << format_real(s.min) << ',' << format_real(s.q1) << ',' << format_real(s.median) << ','
     << format_real(s.q3) << ',' << format_real(s.max);
}

json box_json(const BoxStats& s) {
  return {{"min", s.min}, {"q1", s.q1}, {"median", s.median},
          {"q3", s.q3},   {"max", s.max}, {"mean", s.mean}};
}

}  // namespace

std::string cka_csv(const CkaReport& report) {
  std::ostringstream os;
  os << "layer,min,q1,median,q3,max";
  if (!report.layers.empty()) {
    for (const auto& label : report.layers.front().labels) os << ',' << label;
  }
  os << '\n';
  for (const auto& layer : report.layers) {
    os << layer.layer << ',';
    box_cells(os, layer.stats);
    for (double v : layer.values) os << ',' << format_real(v);
    os << '\n';
  }
  return os.str();
}

json cka_json(const CkaReport& report) {
  json layers = json::array();
  for (const auto& layer : report.layers) {
    json values = json::object();
    for (std::size_t i = 0; i < layer.values.size(); ++i) values[layer.labels[i]] = layer.values[i];
    layers.push_back({{"layer", layer.layer}, {"values", values}, {"box", box_json(layer.stats)}});
  }
  return {{"layers", layers}};
}

std::string apag_epochs_csv(const std::vector<EpochAlignment>& epochs) {
  std::ostringstream os;
  os << "epoch,apag,cosine\n";
  for (const auto& e : epochs) {
    os << e.epoch << ',' << format_real(e.report.apag) << ',' << format_real(e.report.cosine.scalar)
       << '\n';
  }
  return os.str();
}

std::string layer_proportions_csv(const AlignmentReport& report) {
  std::ostringstream os;
  os << "box,min,q1,median,q3,max";
  std::vector<double> values;
  for (const auto& lp : report.layers) {
    os << ",layer_" << lp.layer;
    values.push_back(lp.proportion);
  }
  os << "\naligned_proportion,";
  if (values.empty()) return os.str() + ",,,,\n";
  box_cells(os, box_stats(values));
  for (double v : values) os << ',' << format_real(v);
  os << '\n';
  return os.str();
}

json alignment_json(const std::vector<EpochAlignment>& epochs) {
  json out = json::array();
  for (const auto& e : epochs) {
    json layers = json::array();
    for (const auto& lp : e.report.layers) {
      layers.push_back({{"layer", lp.layer},
                        {"groups", lp.groups},
                        {"aligned", lp.aligned},
                        {"proportion", lp.proportion}});
    }
    json cos_layers = json::array();
    for (const auto& lc : e.report.cosine.per_layer) {
      cos_layers.push_back({{"layer", lc.layer}, {"mean_cosine", lc.mean_cosine}});
    }
    json groups = json::array();
    for (const auto& g : e.report.groups) {
      groups.push_back({{"group", g.group.label()}, {"dot", g.dot}, {"cosine", g.cosine},
                        {"aligned", g.aligned}});
    }
    out.push_back({{"epoch", e.epoch},
                   {"apag", e.report.apag},
                   {"layer_proportions", layers},
                   {"cosine", {{"scalar", e.report.cosine.scalar},
                               {"positive_fraction", e.report.cosine.positive_fraction},
                               {"per_layer", cos_layers}}},
                   {"groups", groups}});
  }
  return out;
}

}  // namespace segalign
