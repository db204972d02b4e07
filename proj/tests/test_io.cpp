#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <sstream>

#include "convsdf/field_io.hpp"
#include "convsdf/geometry_io.hpp"

using namespace convsdf;

namespace {

ScalarField sample_field() {
  GridSpec g({-0.5, 0.25}, 0.125, {3, 4});
  std::vector<double> v;
  for (std::size_t i = 0; i < g.size(); ++i) v.push_back(0.1 * double(i) - 0.3);
  return ScalarField(g, v);
}

std::string bytes_of(const ScalarField& f, const nlohmann::ordered_json& meta = nlohmann::ordered_json::object()) {
  std::ostringstream out(std::ios::binary);
  write_field(out, f, "S", meta);
  return out.str();
}

std::uint64_t le64(const std::string& s, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(s[at + b]);
  return v;
}

}  // namespace

TEST(FieldFile, RoundTrip) {
  auto f = sample_field();
  std::istringstream in(bytes_of(f, {{"tau", 1e-3}, {"precision", "big:512"}}));
  auto r = read_field(in);
  EXPECT_TRUE(r.field.grid() == f.grid());
  EXPECT_EQ(r.field.values(), f.values());
  EXPECT_EQ(r.header["name"], "S");
  EXPECT_EQ(r.header["dtype"], "float64");
  EXPECT_DOUBLE_EQ(r.header["tau"].get<double>(), 1e-3);
  EXPECT_EQ(r.header["precision"], "big:512");
}

TEST(FieldFile, ByteLayout) {
  auto f = sample_field();
  std::string s = bytes_of(f);
  ASSERT_GE(s.size(), 16u);
  EXPECT_EQ(s.substr(0, 8), "EIKFLD01");
  std::uint64_t n = le64(s, 8);
  EXPECT_EQ(s.size(), 16 + n + 8 * f.size());
  auto header = nlohmann::json::parse(s.substr(16, n));
  EXPECT_EQ(header["grid"]["counts"], (std::vector<std::size_t>{3, 4}));
  EXPECT_EQ(header["grid"]["dim"], 2);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(le64(s, 16 + n + 8 * i), std::bit_cast<std::uint64_t>(f[i]));
}

TEST(FieldFile, RejectsBadMagic) {
  std::string s = bytes_of(sample_field());
  s[3] = 'X';
  std::istringstream in(s);
  EXPECT_THROW(read_field(in), ValidationError);
}

TEST(FieldFile, RejectsTruncatedAndTrailingData) {
  std::string s = bytes_of(sample_field());
  std::istringstream cut(s.substr(0, s.size() - 3));
  EXPECT_THROW(read_field(cut), ValidationError);
  std::istringstream header_cut(s.substr(0, 20));
  EXPECT_THROW(read_field(header_cut), ValidationError);
  std::istringstream extra(s + "x");
  EXPECT_THROW(read_field(extra), ValidationError);
}

TEST(FieldFile, RejectsOtherDtype) {
  auto f = sample_field();
  std::string s = bytes_of(f);
  std::uint64_t n = le64(s, 8);
  std::string h = s.substr(16, n);
  auto pos = h.find("float64");
  ASSERT_NE(pos, std::string::npos);
  h.replace(pos, 7, "float32");
  std::istringstream in(s.substr(0, 16) + h + s.substr(16 + n));
  EXPECT_THROW(read_field(in), ValidationError);
}

TEST(FieldCsv, OneRowPerNode) {
  auto f = sample_field();
  std::ostringstream out;
  write_field_csv(out, f, "S");
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y,S");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, f.size());
}

TEST(FieldCsv, MaskUsesNodeIndices) {
  GridSpec g({0.0, 0.0}, 1.0, {2, 2});
  Field<std::uint8_t> m(g, {0, 1, 1, 0});
  std::ostringstream out;
  write_mask_csv(out, m);
  EXPECT_EQ(out.str(), "i,j,inside\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n");
}

TEST(PointsCsv, HeaderCommentsAndBlankLines) {
  std::istringstream in("x,y\n# note\n0.1, 0.2\n\n-3e-2,+4\n");
  int dim = 0;
  auto p = read_points_csv(in, dim);
  EXPECT_EQ(dim, 2);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p[1][0], -0.03);
  EXPECT_DOUBLE_EQ(p[1][1], 4.0);
  EXPECT_EQ(p[1][2], 0.0);
}

TEST(PointsCsv, Rejections) {
  int dim = 0;
  std::istringstream mixed("0,0\n1,1,1\n");
  EXPECT_THROW(read_points_csv(mixed, dim), ValidationError);
  std::istringstream bad("0,0\n1,abc\n");
  EXPECT_THROW(read_points_csv(bad, dim), ValidationError);
  std::istringstream wide("0,0,0,0\n");
  EXPECT_THROW(read_points_csv(wide, dim), ValidationError);
  std::istringstream nan("0,nan\n");
  EXPECT_THROW(read_points_csv(nan, dim), ValidationError);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(read_points_csv(empty, dim), ValidationError);
}

TEST(MeshCsv, NineFieldsPerRow) {
  std::istringstream in("0,0,0,1,0,0,0,1,0\n");
  auto t = read_mesh_csv(in);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0][1][0], 1.0);
  std::istringstream bad("0,0,0,1,0,0\n");
  EXPECT_THROW(read_mesh_csv(bad), ValidationError);
}

TEST(Obj, FacesSplitAndIndexed) {
  std::istringstream in(
      "# square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\nf -4 -2 -1\n");
  auto t = read_obj(in);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[1][2][1], 1.0);
  EXPECT_EQ(t[2][1][0], 1.0);
  EXPECT_EQ(t[2][2][1], 1.0);
}

TEST(Obj, Rejections) {
  std::istringstream range("v 0 0 0\nv 1 0 0\nf 1 2 3\n");
  EXPECT_THROW(read_obj(range), ValidationError);
  std::istringstream zero("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n");
  EXPECT_THROW(read_obj(zero), ValidationError);
  std::istringstream none("v 0 0 0\n");
  EXPECT_THROW(read_obj(none), ValidationError);
}
