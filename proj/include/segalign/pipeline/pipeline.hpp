// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "segalign/corpus/motion_segment.hpp"
#include "segalign/corpus/vocab.hpp"
#include "segalign/model/parameters.hpp"
#include "segalign/pipeline/assemble.hpp"

namespace segalign {

struct SegmentPrediction {
  MotionSegment segment = MotionSegment::NoSegment;
  std::vector<std::size_t> classes;                 // per task
  std::vector<std::vector<double>> probabilities;  // per task, sums to 1
};

struct PipelineResult {
  SegmentedReport report;
  std::vector<SegmentPrediction> predictions;  // segment order
  bool no_segments_found() const noexcept { return report.no_segments_found(); }
};

/// Split, tag, assemble and classify one report. The unassigned bucket is
/// never classified. Both models must share `vocab`.
PipelineResult run_pipeline(std::string_view report_text, const ParameterStore& segmenter,
                            const ParameterStore& classifier, const Vocab& vocab);

/// Segment texts of one report through a sequence classifier in one batch.
std::vector<SegmentPrediction> classify_segments(const ParameterStore& classifier,
                                                 const Vocab& vocab,
                                                 const SegmentedReport& report);

/// One JSON record per prediction: {report, segment, <task>: {class, probabilities}}.
nlohmann::json prediction_record(std::string_view report_id, const SegmentPrediction& p,
                                 const MultiTaskSchema& schema);

}  // namespace segalign
