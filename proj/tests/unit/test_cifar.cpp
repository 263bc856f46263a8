#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "cil/cifar.hpp"
#include "cil/error.hpp"

using namespace cil;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cil_test_cifar";
  fs::create_directories(dir);
  return dir / name;
}

cifar::Record random_record(std::mt19937& rng, int fine) {
  cifar::Record r;
  r.coarse = static_cast<std::uint8_t>(fine / 5);
  r.fine = static_cast<std::uint8_t>(fine);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& p : r.pixels) p = static_cast<std::uint8_t>(byte(rng));
  return r;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST(Cifar, RecordLayout) {
  std::array<std::uint8_t, cifar::kRecordBytes> raw{};
  raw[0] = 4;
  raw[1] = 42;
  raw[2] = 7;                       // first red pixel
  raw[2 + 1024] = 8;                // first green pixel
  raw[2 + 2048] = 9;                // first blue pixel
  raw[cifar::kRecordBytes - 1] = 1;  // last blue pixel
  const auto r = cifar::parse_record(raw);
  EXPECT_EQ(r.coarse, 4);
  EXPECT_EQ(r.fine, 42);
  EXPECT_EQ(r.pixels[0], 7);
  EXPECT_EQ(r.pixels[1024], 8);
  EXPECT_EQ(r.pixels[2048], 9);
  EXPECT_EQ(r.pixels[3071], 1);
}

TEST(Cifar, ParseEncodeRoundTrip) {
  std::mt19937 rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto r = random_record(rng, k * 5);
    const auto bytes = cifar::encode_record(r);
    EXPECT_EQ(cifar::encode_record(cifar::parse_record(bytes)), bytes);
    EXPECT_EQ(cifar::parse_record(bytes), r);
  }
}

TEST(Cifar, FullIntensityScalesToOne) {
  cifar::Record r;
  r.fine = 3;
  r.pixels.fill(255);
  const auto ex = cifar::to_example(r);
  ASSERT_EQ(ex.features.size(), cifar::kPixelBytes);
  for (double v : ex.features) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(ex.label, 3);
  EXPECT_EQ(cifar::from_example(ex).pixels, r.pixels);
}

TEST(Cifar, FineLabelOutOfRangeIsCorrupt) {
  std::array<std::uint8_t, cifar::kRecordBytes> raw{};
  raw[1] = 100;
  EXPECT_THROW(cifar::parse_record(raw), DataError);
}

TEST(Cifar, AcceptsOnlyWholeRecords) {
  std::mt19937 rng(6);
  std::vector<cifar::Record> recs;
  for (int k = 0; k < 7; ++k) recs.push_back(random_record(rng, k));
  const auto path = scratch("seven.bin");
  cifar::write_records(path, recs);
  EXPECT_EQ(fs::file_size(path), 7 * cifar::kRecordBytes);
  EXPECT_EQ(cifar::read_records(path), recs);

  const auto ds = cifar::load_cifar100(path, cifar::Split::train);
  EXPECT_EQ(ds.train.size(), 7u);
  EXPECT_TRUE(ds.test.empty());
  EXPECT_EQ(ds.num_classes, cifar::kNumClasses);
  const auto test_ds = cifar::load_cifar100(path, cifar::Split::test);
  EXPECT_EQ(test_ds.test.size(), 7u);

  for (std::size_t size : {std::size_t{3073}, std::size_t{3075}, 2 * cifar::kRecordBytes - 1}) {
    const auto bad = scratch("bad.bin");
    write_bytes(bad, std::vector<std::uint8_t>(size, 0));
    EXPECT_THROW(cifar::read_records(bad), DataError) << size;
  }
}

TEST(Cifar, MissingFileIsIoError) {
  EXPECT_THROW(cifar::read_records(scratch("does_not_exist.bin")), IoError);
}

TEST(Cifar, TrainTestPair) {
  std::mt19937 rng(7);
  std::vector<cifar::Record> train;
  std::vector<cifar::Record> test;
  for (int k = 0; k < 10; ++k) train.push_back(random_record(rng, k % 5));
  for (int k = 0; k < 5; ++k) test.push_back(random_record(rng, k));
  cifar::write_records(scratch("train.bin"), train);
  cifar::write_records(scratch("test.bin"), test);
  const auto ds = cifar::load_cifar100(scratch("train.bin"), scratch("test.bin"));
  EXPECT_EQ(ds.train.size(), 10u);
  EXPECT_EQ(ds.test.size(), 5u);
  EXPECT_EQ(ds.dim, cifar::kPixelBytes);
  EXPECT_EQ(ds.train[3].label, 3);
}
