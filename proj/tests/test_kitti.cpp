#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tsd/kitti.hpp"

using namespace tsd;

TEST(LabelFile, ExtractsFieldsByPosition) {
  std::istringstream in("0 2 Car 0 0 -1.79 515.2 178.9 616.3 260.2 1.50 1.62 3.88 -2.7 1.7 13.8 -1.6\n");
  const auto recs = parse_label_file(in);
  ASSERT_EQ(recs.size(), 1u);
  const DetectionRecord& r = recs[0];
  EXPECT_EQ(r.frame_index, 0);
  EXPECT_EQ(r.gt_track_id, 2);
  EXPECT_EQ(r.class_label, ClassLabel::Car);
  EXPECT_EQ(r.bbox, (BBox{515.2, 178.9, 616.3, 260.2}));
  ASSERT_TRUE(r.gt_depth_m);
  EXPECT_EQ(*r.gt_depth_m, 13.8);
  EXPECT_EQ(r.gt_location_camera->x, -2.7);
  EXPECT_FALSE(r.dont_care);
}

TEST(LabelFile, VanKeepsBoxFields) {
  std::istringstream in("4 7 Van 0 1 0.3 10 20 30 40 2 1.8 4.5 1 1.6 20 0.1\n");
  const auto recs = parse_label_file(in);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].class_label, ClassLabel::Van);
  EXPECT_EQ(recs[0].bbox, (BBox{10, 20, 30, 40}));
}

TEST(LabelFile, WrongArityNamesLine) {
  std::istringstream in("0 1 Car 0 0\n");
  try {
    parse_label_file(in);
    FAIL() << "no error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(LabelFile, NonNumericFieldIsParseError) {
  std::istringstream in("0 1 Car 0 0 x 1 2 3 4 1 1 1 0 0 5 0\n");
  EXPECT_THROW(parse_label_file(in), ParseError);
}

TEST(LabelFile, EmptyIsEmpty) {
  std::istringstream in("");
  EXPECT_TRUE(parse_label_file(in).empty());
}

TEST(LabelFile, DontCareKeptAndFlagged) {
  std::istringstream in(
      "0 -1 DontCare -1 -1 -10 100 100 150 150 -1 -1 -1 -1000 -1000 -1000 -10\n"
      "0 1 Cyclist 0 0 0 10 10 20 30 1.7 0.6 1.8 2 1.5 9 0\n");
  const auto recs = parse_label_file(in);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_TRUE(recs[0].dont_care);
  EXPECT_FALSE(recs[0].gt_depth_m);
  EXPECT_EQ(recs[1].class_label, ClassLabel::Cyclist);
}

TEST(LabelFile, UnknownClassBecomesOther) {
  std::istringstream in("0 1 Spaceship 0 0 0 10 10 20 30 1 1 1 0 0 5 0\n");
  EXPECT_EQ(parse_label_file(in)[0].class_label, ClassLabel::Other);
}

TEST(LabelFile, EighteenFieldsCarryScore) {
  std::istringstream in("0 1 Car 0 0 0 10 10 20 30 1 1 1 0 0 5 0 0.75\n");
  EXPECT_DOUBLE_EQ(parse_label_file(in)[0].confidence, 0.75);
}

TEST(LabelFile, OutputOrderedByFrameThenTrack) {
  std::istringstream in(
      "3 1 Car 0 0 0 10 10 20 30 1 1 1 0 0 5 0\n"
      "1 5 Car 0 0 0 10 10 20 30 1 1 1 0 0 5 0\n"
      "1 2 Car 0 0 0 10 10 20 30 1 1 1 0 0 5 0\n"
      "3 0 Car 0 0 0 10 10 20 30 1 1 1 0 0 5 0\n");
  const auto recs = parse_label_file(in);
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto a = std::make_pair(recs[i - 1].frame_index, recs[i - 1].gt_track_id);
    const auto b = std::make_pair(recs[i].frame_index, recs[i].gt_track_id);
    EXPECT_LE(a, b);
  }
  EXPECT_EQ(recs.front().gt_track_id, 2);
}

TEST(DetectionsFile, ParsesWhitespaceAndCommas) {
  std::istringstream in("# comment\n0 car 100 50 180 120 0.91\n1,van,1,2,3,4,0.5\n");
  const auto recs = parse_detections_file(in);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].bbox, (BBox{100, 50, 180, 120}));
  EXPECT_DOUBLE_EQ(recs[0].confidence, 0.91);
  EXPECT_EQ(recs[0].gt_track_id, -1);
  EXPECT_FALSE(recs[0].gt_depth_m);
  EXPECT_EQ(recs[1].class_label, ClassLabel::Van);
}

TEST(DetectionsFile, RejectsInvertedBoxAndBadConfidence) {
  std::istringstream a("0 car 180 50 100 120 0.91\n");
  EXPECT_THROW(parse_detections_file(a), ValidationError);
  std::istringstream b("3 van 10 10 20 30 1.2\n");
  EXPECT_THROW(parse_detections_file(b), ValidationError);
}

TEST(DetectionsFile, RoundTrip) {
  std::vector<DetectionRecord> recs;
  for (int i = 0; i < 20; ++i) {
    DetectionRecord r;
    r.frame_index = i / 3;
    r.class_label = i % 2 ? ClassLabel::Car : ClassLabel::Pedestrian;
    r.bbox = {i * 1.234567, 2.5, i * 1.234567 + 10.0000001, 40.75};
    r.confidence = 0.5 + i * 0.01;
    recs.push_back(r);
  }
  std::stringstream ss;
  write_detections_file(ss, recs);
  const auto back = parse_detections_file(ss);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].frame_index, recs[i].frame_index);
    EXPECT_EQ(back[i].class_label, recs[i].class_label);
    EXPECT_NEAR(back[i].bbox.left, recs[i].bbox.left, 1e-6);
    EXPECT_NEAR(back[i].bbox.right, recs[i].bbox.right, 1e-6);
    EXPECT_NEAR(back[i].confidence, recs[i].confidence, 1e-6);
  }
}

namespace {
std::string oxts_line(double lat, double lon, double alt) {
  std::string s = std::to_string(lat) + " " + std::to_string(lon) + " " + std::to_string(alt);
  for (int i = 3; i < 30; ++i) s += " 0";
  return s + "\n";
}
}  // namespace

TEST(Oxts, DirectoryLayoutAssignsFramesByOrder) {
  std::string line0 = "49.011212 8.422885 112.83";
  for (int i = 3; i < 30; ++i) line0 += " 0";
  std::istringstream f0(line0 + "\n");
  std::istringstream f1(oxts_line(49.0113, 8.4230, 113.0));
  std::vector<std::istream*> streams{&f0, &f1};
  const auto s = parse_oxts_dir(streams);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].frame_index, 0);
  EXPECT_EQ(s[1].frame_index, 1);
  EXPECT_DOUBLE_EQ(s[0].position.latitude_deg, 49.011212);
  EXPECT_DOUBLE_EQ(s[0].position.longitude_deg, 8.422885);
  EXPECT_DOUBLE_EQ(s[0].altitude_m, 112.83);
  EXPECT_EQ(s[0].raw_fields.size(), kOxtsFieldCount);
}

TEST(Oxts, EmptyDirectoryIsEmpty) {
  std::vector<std::istream*> none;
  EXPECT_TRUE(parse_oxts_dir(none).empty());
}

TEST(Oxts, LatitudeOutOfRangeIsValidationError) {
  std::istringstream in(oxts_line(95.0, 8.0, 0.0));
  EXPECT_THROW(parse_oxts_lines(in), ValidationError);
}

TEST(Oxts, ShortLineIsParseError) {
  std::istringstream in("49 8 100 0 0\n");
  EXPECT_THROW(parse_oxts_lines(in), ParseError);
}

TEST(FrameClock, DefaultTenHertzAndExplicitRebased) {
  FrameClock c;
  EXPECT_DOUBLE_EQ(c.time_at(25), 2.5);
  FrameClock e({100.0, 100.1, 100.25});
  EXPECT_DOUBLE_EQ(e.time_at(0), 0.0);
  EXPECT_NEAR(e.time_at(2), 0.25, 1e-12);
  EXPECT_THROW(e.time_at(3), PipelineError);
  EXPECT_THROW(FrameClock({1.0, 1.0}), ValidationError);
  EXPECT_THROW(FrameClock(0.0), ValidationError);
}

TEST(Intrinsics, KittiPreset) {
  const CameraIntrinsics k = CameraIntrinsics::kitti();
  EXPECT_EQ(k.focal_length_px, 721.0);
  EXPECT_EQ(k.image_height_px, 376.0);
  EXPECT_EQ(k.sensor_height_px, 362.0);
  EXPECT_EQ(k.class_height_m.at(ClassLabel::Car), 1.50);
  CameraIntrinsics bad = k;
  bad.sensor_height_px = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

namespace {
std::vector<DetectionRecord> many_records(int n) {
  std::vector<DetectionRecord> out;
  for (int i = 0; i < n; ++i) {
    DetectionRecord r;
    r.frame_index = i;
    r.class_label = ClassLabel::Car;
    r.bbox = {100.0 + i % 7, 50.0, 160.0 + i % 7, 110.0};
    r.gt_track_id = i % 5;
    r.confidence = 0.8;
    out.push_back(r);
  }
  return out;
}
}  // namespace

TEST(Perturb, ZeroNoiseIsIdentity) {
  const auto in = many_records(50);
  const auto out = perturb_ground_truth(in, 0.0, 0.0, 123);
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(out[i].bbox, in[i].bbox);
    EXPECT_EQ(out[i].confidence, in[i].confidence);
    EXPECT_EQ(out[i].gt_track_id, in[i].gt_track_id);
  }
}

TEST(Perturb, DeterministicInSeed) {
  const auto in = many_records(200);
  const auto a = perturb_ground_truth(in, 2.0, 0.3, 9);
  const auto b = perturb_ground_truth(in, 2.0, 0.3, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].bbox, b[i].bbox);
  const auto c = perturb_ground_truth(in, 2.0, 0.3, 10);
  bool differs = c.size() != a.size();
  for (std::size_t i = 0; !differs && i < a.size(); ++i) differs = !(a[i].bbox == c[i].bbox);
  EXPECT_TRUE(differs);
}

TEST(Perturb, JitterBoundsAndConfidence) {
  const auto in = many_records(500);
  const auto out = perturb_ground_truth(in, 2.0, 0.0, 1);
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_TRUE(out[i].bbox.valid());
    EXPECT_LE(std::fabs(out[i].bbox.left - in[i].bbox.left), 2.0);
    EXPECT_LE(std::fabs(out[i].bbox.top - in[i].bbox.top), 2.0);
    EXPECT_LE(std::fabs(out[i].bbox.right - in[i].bbox.right), 2.0);
    EXPECT_LE(std::fabs(out[i].bbox.bottom - in[i].bbox.bottom), 2.0);
    const double mean_abs = (std::fabs(out[i].bbox.left - in[i].bbox.left) +
                             std::fabs(out[i].bbox.top - in[i].bbox.top) +
                             std::fabs(out[i].bbox.right - in[i].bbox.right) +
                             std::fabs(out[i].bbox.bottom - in[i].bbox.bottom)) / 4.0;
    EXPECT_NEAR(out[i].confidence, std::clamp(1.0 - mean_abs / 4.0, 0.5, 1.0), 1e-12);
    EXPECT_EQ(out[i].gt_track_id, in[i].gt_track_id);
  }
}

TEST(Perturb, DropRateSurvivorsWithinBinomialBounds) {
  // Binomial(1000, 0.5): sd = 15.8, so [400, 600] is a +-6.3 sigma band.
  const auto out = perturb_ground_truth(many_records(1000), 2.0, 0.5, 7);
  EXPECT_GE(out.size(), 400u);
  EXPECT_LE(out.size(), 600u);
}

TEST(Perturb, RejectsBadParameters) {
  const auto in = many_records(3);
  EXPECT_THROW(perturb_ground_truth(in, 1.0, 1.0, 0), ValidationError);
  EXPECT_THROW(perturb_ground_truth(in, -1.0, 0.0, 0), ValidationError);
}

TEST(Embeddings, AttachedAndNormalized) {
  auto recs = many_records(3);
  recs[1].frame_index = 0;  // frame 0 now holds records 0 and 1
  std::istringstream in("0 1 2 3 4\n2 0 3 1 0 0\n");
  attach_embeddings(in, recs);
  ASSERT_EQ(recs[1].embedding.size(), 2u);
  EXPECT_NEAR(recs[1].embedding[0], 0.6f, 1e-6);
  EXPECT_NEAR(recs[1].embedding[1], 0.8f, 1e-6);
  EXPECT_TRUE(recs[0].embedding.empty());
  std::istringstream bad("9 0 2 1 1\n");
  EXPECT_THROW(attach_embeddings(bad, recs), ValidationError);
}

TEST(Numbers, LocaleFreeParsing) {
  EXPECT_EQ(parse_real("1.5e2"), 150.0);
  EXPECT_EQ(parse_real("+2.25"), 2.25);
  EXPECT_FALSE(parse_real("1,5"));
  EXPECT_FALSE(parse_real("nan"));
  EXPECT_FALSE(parse_real(""));
  EXPECT_EQ(parse_integer("-12"), -12);
  EXPECT_FALSE(parse_integer("1.0"));
}
