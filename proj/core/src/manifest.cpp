#include <fstream>

#include "cil/error.hpp"
#include "cil/stream.hpp"
#include "json.hpp"

namespace cil::stream {

std::string manifest_json(std::span<const TaskBatch> tasks) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& task : tasks) {
    nlohmann::ordered_json t;
    t["task_index"] = task.task_index;
    t["major_classes"] = task.major_classes;
    t["example_indices"] = task.example_indices;
    out.push_back(std::move(t));
  }
  return out.dump(2);
}

void write_manifest(const std::filesystem::path& path,
                    std::span<const TaskBatch> tasks) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << manifest_json(tasks) << '\n';
}

}  // namespace cil::stream
