#include <gtest/gtest.h>

#include <fstream>
#include <limits>
#include <sstream>

#include "reactnet/embeddings.hpp"
#include "test_util.hpp"

using namespace reactnet;
using reactnet::testing::TempDir;

namespace {

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST(Remb, SmallSequenceKeepsExactValues) {
  TempDir dir("remb");
  FrameEmbeddingSequence seq;
  seq.data.resize(2, 3);
  seq.data << 0, 0, 0, 1, 2, 2;
  save_embeddings(seq, dir / "a.remb");
  const auto back = load_embeddings(dir / "a.remb");
  ASSERT_EQ(back.n_frames(), 2);
  ASSERT_EQ(back.dim(), 3);
  EXPECT_EQ(back.data(1, 0), 1.0f);
  EXPECT_EQ(back.data(1, 2), 2.0f);
  EXPECT_FALSE(back.fps.has_value());
  EXPECT_EQ(file_bytes(dir / "a.remb").size(), 16u + 4u * 6u);
}

TEST(Remb, HeaderLayoutIsLittleEndian) {
  TempDir dir("remb");
  FrameEmbeddingSequence seq;
  seq.data = EmbeddingMatrix::Constant(1, 1, 0.0f);
  save_embeddings(seq, dir / "z.remb");
  const std::string b = file_bytes(dir / "z.remb");
  ASSERT_EQ(b.size(), 20u);
  EXPECT_EQ(b.substr(0, 4), "REMB");
  EXPECT_EQ(b[4], 1);  // version
  EXPECT_EQ(b[8], 1);  // n_frames
  EXPECT_EQ(b[12], 1); // dim
  EXPECT_EQ(load_embeddings(dir / "z.remb").data(0, 0), 0.0f);
}

TEST(Remb, RandomSequencesRoundTripBitExactly) {
  TempDir dir("remb");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto seq = reactnet::testing::random_sequence(1 + static_cast<Eigen::Index>(seed * 11), 1 + static_cast<Eigen::Index>(seed * 7), seed);
    if (seed % 2) seq.fps = 25.0f + static_cast<float>(seed);
    save_embeddings(seq, dir / "r.remb");
    EXPECT_EQ(load_embeddings(dir / "r.remb"), seq) << "seed " << seed;
  }
  auto big = reactnet::testing::random_sequence(100, 64, 42);
  save_embeddings(big, dir / "big.remb");
  EXPECT_EQ(load_embeddings(dir / "big.remb"), big);
}

TEST(Remb, TruncatedPayloadIsSizeMismatch) {
  TempDir dir("remb");
  auto seq = reactnet::testing::random_sequence(10, 4, 1);
  save_embeddings(seq, dir / "t.remb");
  std::string b = file_bytes(dir / "t.remb");
  b.resize(b.size() - 4 * 4);  // drop the last row
  write_bytes(dir / "t.remb", b);
  EXPECT_THROW(load_embeddings(dir / "t.remb"), SizeMismatchError);
  write_bytes(dir / "t.remb", b.substr(0, 10));
  EXPECT_THROW(load_embeddings(dir / "t.remb"), SizeMismatchError);
}

TEST(Remb, BadMagicOrVersionIsFormatError) {
  TempDir dir("remb");
  auto seq = reactnet::testing::random_sequence(3, 2, 1);
  save_embeddings(seq, dir / "m.remb");
  std::string b = file_bytes(dir / "m.remb");
  std::string bad = b;
  bad[0] = 'X';
  write_bytes(dir / "m.remb", bad);
  EXPECT_THROW(load_embeddings(dir / "m.remb"), FormatError);
  bad = b;
  bad[4] = 2;
  write_bytes(dir / "m.remb", bad);
  EXPECT_THROW(load_embeddings(dir / "m.remb"), FormatError);
}

TEST(Remb, NonFiniteValuesAreRejected) {
  TempDir dir("remb");
  auto seq = reactnet::testing::random_sequence(3, 2, 1);
  seq.data(1, 1) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(save_embeddings(seq, dir / "n.remb"), DataError);
  EXPECT_FALSE(std::filesystem::exists(dir / "n.remb"));

  seq.data(1, 1) = 0.0f;
  save_embeddings(seq, dir / "n.remb");
  std::string b = file_bytes(dir / "n.remb");
  const std::uint32_t inf_bits = 0x7F800000u;  // +inf, little endian
  for (int i = 0; i < 4; ++i) b[16 + i] = static_cast<char>((inf_bits >> (8 * i)) & 0xFF);
  write_bytes(dir / "n.remb", b);
  EXPECT_THROW(load_embeddings(dir / "n.remb"), DataError);
}

TEST(Remb, UnwritablePathIsIoError) {
  auto seq = reactnet::testing::random_sequence(2, 2, 1);
  EXPECT_THROW(save_embeddings(seq, "/nonexistent-dir/x.remb"), IoError);
  EXPECT_THROW(load_embeddings("/nonexistent-dir/x.remb"), IoError);
}

TEST(Annotation, ParsesCommentsAndBlankLines) {
  std::istringstream in("# header\n\n10 20\n  30 40   # trailing\n");
  const auto ann = parse_annotation(in);
  ASSERT_EQ(ann.segments.size(), 2u);
  EXPECT_EQ(ann.segments[0], (Segment{10, 20}));
  EXPECT_EQ(ann.segments[1], (Segment{30, 40}));
}

TEST(Annotation, MalformedLineNamesTheLine) {
  std::istringstream in("1 2\n5 x\n");
  try {
    parse_annotation(in, "gt.txt");
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("gt.txt:2"), std::string::npos) << e.what();
  }
  std::istringstream reversed("9 3\n");
  EXPECT_THROW(parse_annotation(reversed), FormatError);
  std::istringstream overlap("0 5\n5 9\n");
  EXPECT_THROW(parse_annotation(overlap), FormatError);
}

TEST(Annotation, LabelsAndBounds) {
  SegmentAnnotation ann{{{1, 2}, {4, 4}}};
  EXPECT_EQ(ann.to_labels(6), (FrameLabels{0, 1, 1, 0, 1, 0}));
  EXPECT_THROW(ann.to_labels(4), BoundsError);
}

TEST(Annotation, TextRoundTrip) {
  TempDir dir("ann");
  SegmentAnnotation ann{{{0, 3}, {7, 19}, {25, 25}}};
  save_annotation(ann, dir / "a.txt");
  EXPECT_EQ(load_annotation(dir / "a.txt"), ann);
}
