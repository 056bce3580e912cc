// SPDX-License-Identifier: Apache-2.0
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "segalign/corpus/generator.hpp"
#include "segalign/numerics/errors.hpp"

namespace segalign {

namespace {

using Bank = std::vector<std::vector<std::string>>;

const std::map<std::string, Bank, std::less<>>& banks() {
  static const std::map<std::string, Bank, std::less<>> kBanks = {
      {"stenosis",
       {{"No spinal canal stenosis.", "The central canal is patent.",
         "There is no significant central canal narrowing.", "Mild spinal canal narrowing.",
         "The spinal canal is normal in caliber.", "Minimal central canal stenosis.",
         "No central stenosis is seen.", "Mild narrowing of the central canal."},
        {"Moderate spinal canal stenosis.", "There is moderate central canal narrowing.",
         "The central canal is moderately narrowed.", "Moderate central stenosis is present.",
         "Findings result in moderate canal stenosis.", "Moderate narrowing of the spinal canal.",
         "The spinal canal shows moderate stenosis.",
         "There is moderate stenosis of the central canal."},
        {"Severe spinal canal stenosis.", "There is severe central canal narrowing.",
         "The central canal is severely narrowed.", "Severe central stenosis is present.",
         "Findings result in severe canal stenosis.", "Severe narrowing of the spinal canal.",
         "The spinal canal shows severe stenosis.",
         "There is severe stenosis of the central canal."}}},
      {"disc",
       {{"No disc herniation.", "There is no disc bulge or protrusion.",
         "The disc is normal in height and signal.", "Mild disc bulge.",
         "Minimal disc bulging without herniation.", "The intervertebral disc is unremarkable.",
         "Mild disc desiccation without protrusion.", "No focal disc protrusion."},
        {"Moderate disc bulge.", "There is a moderate disc protrusion.",
         "Moderate broad-based disc bulging.", "A moderate central disc herniation is present.",
         "The disc shows a moderate posterior protrusion.", "Moderate disc herniation.",
         "There is moderate disc bulging with annular fissure.",
         "Moderate circumferential disc bulge."},
        {"Severe disc herniation.", "There is a large severe disc extrusion.",
         "Severe broad-based disc bulging.", "A severe central disc extrusion is present.",
         "The disc shows a severe posterior herniation.", "Severe disc protrusion with migration.",
         "There is severe disc bulging with extrusion.",
         "Severe circumferential disc herniation."}}},
      {"nerve",
       {{"No nerve root compression.", "The traversing nerve roots are free.",
         "Nerve roots are intact without impingement.", "The nerve roots appear normal.",
         "No nerve root impingement.", "The exiting nerve root is clear.",
         "Nerve roots are unremarkable.", "No contact with the nerve roots."},
        {"There is compression of the traversing nerve root.", "The exiting nerve root is impinged.",
         "Contact with the descending nerve root.", "Displacement of the traversing nerve root.",
         "The nerve root is compressed.", "Impingement of the exiting nerve root.",
         "Abutment of the traversing nerve root.", "The nerve root is effaced and displaced."}}},
      {"cord",
       {{"No cord compression.", "The spinal cord is normal in signal.",
         "The cord is normal in caliber.", "No abnormal cord signal.",
         "The spinal cord is unremarkable.", "No flattening of the cord.",
         "Cord signal is preserved.", "The cord is free of deformity."},
        {"There is cord compression.", "Flattening of the spinal cord.", "The cord is deformed.",
         "Mass effect on the spinal cord.", "The spinal cord is compressed.",
         "Cord flattening is present.", "Abnormal cord signal is seen.",
         "Effacement of the ventral cord."}}},
      {"foraminal",
       {{"No foraminal narrowing.", "The neural foramina are patent.",
         "Foramina are normal bilaterally.", "No neural foraminal stenosis.",
         "The foramina are clear.", "Neural foramina are preserved.", "No foraminal encroachment.",
         "The foramina are unremarkable."},
        {"Foraminal narrowing is present.", "There is bilateral foraminal stenosis.",
         "The left neural foramen is narrowed.", "The right foramen is encroached.",
         "Uncovertebral spurring narrows the foramina.", "Foraminal stenosis on the right.",
         "Bilateral neural foraminal narrowing.", "The foramina are narrowed by osteophytes."}}},
  };
  return kBanks;
}

}  // namespace

const std::vector<std::string>& template_bank(std::string_view task, int cls) {
  const auto& all = banks();
  auto it = all.find(task);
  if (it == all.end()) throw InvalidInput("no templates for task '" + std::string(task) + "'");
  if (cls < 0 || static_cast<std::size_t>(cls) >= it->second.size()) {
    throw InvalidInput("no templates for class " + std::to_string(cls) + " of '" +
                       std::string(task) + "'");
  }
  return it->second[static_cast<std::size_t>(cls)];
}

}  // namespace segalign
