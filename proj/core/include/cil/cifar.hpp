#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cil/dataset.hpp"

namespace cil::cifar {

inline constexpr std::size_t kPixelBytes = 3072;  // 1024 R, 1024 G, 1024 B
inline constexpr std::size_t kRecordBytes = 2 + kPixelBytes;
inline constexpr int kNumClasses = 100;

/// One CIFAR-100 binary record: [coarse][fine][R plane][G plane][B plane].
struct Record {
  std::uint8_t coarse = 0;
  std::uint8_t fine = 0;
  std::array<std::uint8_t, kPixelBytes> pixels{};

  bool operator==(const Record&) const = default;
};

enum class Split { train, test };

/// Throws DataError if the fine label is out of range.
Record parse_record(std::span<const std::uint8_t, kRecordBytes> bytes);
std::array<std::uint8_t, kRecordBytes> encode_record(const Record& record);

/// Features are pixel / 255 in file order; label is the fine label.
LabeledExample to_example(const Record& record);
/// Inverse of to_example; throws DataError if a feature is not k/255.
Record from_example(const LabeledExample& example, std::uint8_t coarse = 0);

/// Reads every record. Throws IoError if the file cannot be opened and
/// DataError if its size is not a multiple of kRecordBytes.
std::vector<Record> read_records(const std::filesystem::path& path);
void write_records(const std::filesystem::path& path,
                   std::span<const Record> records);

/// Loads one split; the other split of the returned Dataset is empty.
Dataset load_cifar100(const std::filesystem::path& path, Split split);
Dataset load_cifar100(const std::filesystem::path& train_path,
                      const std::filesystem::path& test_path);

}  // namespace cil::cifar
