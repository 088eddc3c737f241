#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "entrain/corpus/annotation.hpp"
#include "entrain/corpus/conversation_csv.hpp"
#include "entrain/corpus/feature_cache.hpp"
#include "entrain/corpus/impute.hpp"
#include "entrain/corpus/labels.hpp"
#include "entrain/corpus/load.hpp"
#include "entrain/corpus/manifest.hpp"
#include "entrain/corpus/preprocess.hpp"
#include "entrain/corpus/wav.hpp"
#include "signals.hpp"
#include "tempdir.hpp"

namespace entrain::corpus {
namespace {

using entrain::testing::TempDir;
using entrain::testing::tone;

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

std::vector<unsigned char> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

TEST(Wav, RejectsStereo) {
  const auto bytes = encode_wav(std::vector<double>(200, 0.1), 44100, WavEncoding::Pcm16, 2);
  try {
    decode_wav(bytes_of(bytes));
    FAIL() << "stereo accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("mono required"), std::string::npos);
  }
}

TEST(Wav, RejectsGarbageHeader) {
  EXPECT_THROW(decode_wav(bytes_of("RIFF1234WAVX")), FormatError);
  EXPECT_THROW(decode_wav(bytes_of("hello")), FormatError);
  auto bytes = encode_wav(std::vector<double>(10, 0.1), 16000);
  bytes.resize(30);  // cut inside the fmt chunk
  EXPECT_THROW(decode_wav(bytes_of(bytes)), FormatError);
}

TEST(Wav, Pcm16AndFloatRoundTrip) {
  const auto x = tone(440.0, 0.05, 16000.0, 0.8);
  const auto pcm = decode_wav(bytes_of(encode_wav(x, 16000, WavEncoding::Pcm16)));
  const auto flt = decode_wav(bytes_of(encode_wav(x, 22050, WavEncoding::Float32)));
  ASSERT_EQ(pcm.samples.size(), x.size());
  EXPECT_EQ(pcm.sample_rate, 16000);
  EXPECT_EQ(flt.sample_rate, 22050);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(pcm.samples[i], x[i], 0.5 / 32768.0 + 1e-12);
    EXPECT_NEAR(flt.samples[i], x[i], 1e-7);
  }
}

TEST(Wav, DecodesEightAndTwentyFourBit) {
  // hand-built headers: one sample each of +half scale
  auto make = [](std::uint16_t bits, std::string payload) {
    std::string out = "RIFF";
    detail::put_u32(out, static_cast<std::uint32_t>(36 + payload.size()));
    out += "WAVEfmt ";
    detail::put_u32(out, 16);
    detail::put_u16(out, 1);
    detail::put_u16(out, 1);
    detail::put_u32(out, 16000);
    detail::put_u32(out, 16000u * bits / 8);
    detail::put_u16(out, bits / 8);
    detail::put_u16(out, bits);
    out += "data";
    detail::put_u32(out, static_cast<std::uint32_t>(payload.size()));
    return out + payload;
  };
  const auto eight = decode_wav(bytes_of(make(8, std::string(1, static_cast<char>(192)))));
  EXPECT_DOUBLE_EQ(eight.samples.at(0), 0.5);
  const auto twenty_four = decode_wav(bytes_of(make(24, std::string("\x00\x00\x40", 3))));
  EXPECT_DOUBLE_EQ(twenty_four.samples.at(0), 0.5);
}

TEST(Loudness, PureGainToReference) {
  AudioTrack t{tone(200.0, 1.0, 16000.0, 0.1 * std::sqrt(2.0)), 16000, "A"};
  const auto out = normalize_loudness(t, 0.2);
  EXPECT_FALSE(out.peak_limited);
  EXPECT_NEAR(rms(out.track.samples), 0.2, 1e-9);
}

TEST(Loudness, GainCappedAtFullScale) {
  AudioTrack t{tone(200.0, 1.0, 16000.0, 0.5 * std::sqrt(2.0), 0.3), 16000, "A"};
  ASSERT_NEAR(rms(t.samples), 0.5, 1e-3);
  // 0.9 / 0.5 = 1.8 would lift the 0.707 peak to 1.27
  const auto out = normalize_loudness(t, 0.9);
  EXPECT_TRUE(out.peak_limited);
  EXPECT_EQ(peak(out.track.samples), 1.0);
  EXPECT_NEAR(out.gain, 1.0 / peak(t.samples), 1e-15);
}

TEST(Loudness, AlreadyAtReferenceIsIdentity) {
  auto x = tone(300.0, 0.5, 16000.0, 0.3);
  const double r = rms(x);
  for (auto& v : x) v *= 0.1 / r;
  AudioTrack t{x, 16000, "A"};
  const auto out = normalize_loudness(t, 0.1);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(out.track.samples[i], x[i], 1e-12);
}

TEST(Loudness, SilentTrackRejected) {
  AudioTrack t{std::vector<double>(100, 0.0), 16000, "A"};
  try {
    normalize_loudness(t);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "silent track");
  }
}

// Power of `x` (skipping edges) and DFT-bin location of its spectral peak.
struct SpectrumProbe {
  double power;
  double peak_hz;
};

SpectrumProbe probe(const std::vector<double>& x, double fs) {
  const std::size_t skip = 320;
  std::vector<double> mid(x.begin() + skip, x.end() - skip);
  double p = 0.0;
  for (double v : mid) p += v * v;
  p /= static_cast<double>(mid.size());
  double best = -1.0, best_f = 0.0;
  const double df = fs / static_cast<double>(mid.size());
  for (std::size_t k = 1; k < mid.size() / 2; ++k) {
    std::complex<double> acc = 0.0;
    const double w = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(mid.size());
    for (std::size_t n = 0; n < mid.size(); n += 1) acc += mid[n] * std::polar(1.0, w * static_cast<double>(n));
    if (std::norm(acc) > best) {
      best = std::norm(acc);
      best_f = static_cast<double>(k) * df;
    }
    if (k > 400 && best_f > 0 && static_cast<double>(k) * df > 8000.0) break;
  }
  return {p, best_f};
}

TEST(Resample, SixteenKilohertzIsBitIdentical) {
  AudioTrack t{tone(1000.0, 0.3), 16000, "A"};
  const auto out = resample_to_16k(t);
  EXPECT_EQ(out.samples, t.samples);
  EXPECT_EQ(out.sample_rate, 16000);
}

TEST(Resample, RejectsUpsampling) {
  AudioTrack t{tone(1000.0, 0.3, 8000.0), 8000, "A"};
  try {
    resample_to_16k(t);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "upsampling unsupported");
  }
}

TEST(Resample, ToneKeepsItsFrequency) {
  AudioTrack t{tone(1000.0, 0.25, 48000.0), 48000, "A"};
  const auto out = resample_to_16k(t);
  EXPECT_EQ(out.sample_rate, 16000);
  EXPECT_LE(std::abs(static_cast<double>(out.samples.size()) - t.samples.size() / 3.0), 1.0);
  const auto pr = probe(out.samples, 16000.0);
  const double bin = 16000.0 / (out.samples.size() - 640);
  EXPECT_NEAR(pr.peak_hz, 1000.0, bin + 1e-9);
}

TEST(Resample, PassbandKeptStopbandRejected) {
  AudioTrack pass{tone(7500.0, 0.2, 48000.0), 48000, "A"};
  AudioTrack stop{tone(10000.0, 0.2, 48000.0), 48000, "A"};
  AudioTrack edge{tone(8000.0, 0.2, 48000.0, 0.5, 0.7), 48000, "A"};
  const double in_power = 0.5 * 0.5 / 2.0;
  const auto p = resample_to_16k(pass);
  const auto s = resample_to_16k(stop);
  const auto e = resample_to_16k(edge);
  auto power = [](const std::vector<double>& x) {
    double acc = 0.0;
    for (std::size_t i = 320; i + 320 < x.size(); ++i) acc += x[i] * x[i];
    return acc / static_cast<double>(x.size() - 640);
  };
  EXPECT_NEAR(10.0 * std::log10(power(p.samples) / in_power), 0.0, 0.1);
  EXPECT_LE(10.0 * std::log10(power(s.samples) / in_power), -40.0);
  EXPECT_LE(10.0 * std::log10(power(e.samples) / in_power + 1e-300), -60.0);
}

TEST(Resample, NonIntegerRatio) {
  AudioTrack t{tone(1000.0, 0.25, 44100.0), 44100, "A"};
  const auto out = resample_to_16k(t);
  EXPECT_LE(std::abs(static_cast<double>(out.samples.size()) - t.samples.size() * 16000.0 / 44100.0), 1.0);
  double p = 0.0;
  for (std::size_t i = 320; i + 320 < out.samples.size(); ++i) p += out.samples[i] * out.samples[i];
  p /= static_cast<double>(out.samples.size() - 640);
  EXPECT_NEAR(p, 0.125, 0.125 * 0.01);
}

TEST(Labels, Boundaries) {
  EXPECT_EQ(assign_label(19), SuccessLabel::Low);
  EXPECT_EQ(assign_label(20), SuccessLabel::Excluded);
  EXPECT_EQ(assign_label(21), SuccessLabel::High);
  EXPECT_EQ(assign_label(10), SuccessLabel::Low);
  EXPECT_EQ(assign_label(30), SuccessLabel::High);
  EXPECT_THROW(assign_label(9), ValidationError);
  EXPECT_THROW(assign_label(31), ValidationError);
}

TEST(Labels, PartitionIsExhaustive) {
  int low = 0, high = 0, excluded = 0;
  for (int d = 10; d <= 30; ++d) {
    switch (assign_label(d)) {
      case SuccessLabel::Low: ++low; break;
      case SuccessLabel::High: ++high; break;
      case SuccessLabel::Excluded: ++excluded; break;
    }
  }
  EXPECT_EQ(low, 10);
  EXPECT_EQ(high, 10);
  EXPECT_EQ(excluded, 1);
}

TEST(Impute, ColumnMedian) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd m(3, 2);
  m << 1, 7, nan, 8, 3, 9;
  const auto out = impute_missing(m);
  EXPECT_DOUBLE_EQ(out(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(out(1, 1), 8.0);

  Eigen::MatrixXd odd(5, 1);
  odd << 5, nan, nan, 9, 1;
  EXPECT_DOUBLE_EQ(impute_missing(odd)(1, 0), 5.0);
  EXPECT_DOUBLE_EQ(impute_missing(odd)(2, 0), 5.0);
}

TEST(Impute, NoMissingIsIdentity) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(6, 4);
  EXPECT_EQ(impute_missing(m), m);
}

TEST(Impute, AllMissingColumnNamesIndex) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd m(2, 3);
  m << 1, nan, 2, 3, nan, 4;
  try {
    impute_missing(m);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos);
  }
}

TEST(Annotations, ShortUtterancesDropped) {
  std::istringstream in("speaker_id,start_s,end_s\nA,0.0,0.4\nB,1.0,1.6\nA,2.0,4.0\n");
  const auto utts = prepare_utterances(parse_annotations(in, {"A", "B"}));
  ASSERT_EQ(utts.size(), 2u);
  EXPECT_EQ(utts[0].speaker_id, "B");
  EXPECT_EQ(utts[1].source_row, 1u);
}

TEST(Annotations, ExactlyHalfSecondIsDropped) {
  std::istringstream in("speaker_id,start_s,end_s\nA,1.0,1.5\nB,2.0,2.5001\n");
  EXPECT_EQ(prepare_utterances(parse_annotations(in, {"A", "B"})).size(), 1u);
}

TEST(Annotations, EndBeforeStartReportsRow) {
  std::istringstream in("speaker_id,start_s,end_s\nA,0.0,1.0\nB,3.0,2.0\n");
  try {
    parse_annotations(in, {"A", "B"}, "ann.csv");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(Annotations, UnknownSpeaker) {
  std::istringstream in("speaker_id,start_s,end_s\nC,0.0,1.0\n");
  EXPECT_THROW(parse_annotations(in, {"A", "B"}), ValidationError);
}

TEST(Annotations, BadHeader) {
  std::istringstream in("who,from,to\nA,0,1\n");
  EXPECT_THROW(parse_annotations(in, {"A", "B"}), FormatError);
}

TEST(Ordering, MidpointTiesBreakByStartThenSpeaker) {
  std::vector<Utterance> u{{"B", 1.0, 3.0, 0}, {"A", 1.0, 3.0, 1}, {"A", 0.0, 4.0, 2}, {"C", 0.5, 1.0, 3}};
  sort_by_midpoint(u);
  EXPECT_EQ(u[0].speaker_id, "C");
  EXPECT_EQ(u[1].source_row, 2u);  // same midpoint 2.0, earlier start
  EXPECT_EQ(u[2].speaker_id, "A");
  EXPECT_EQ(u[3].speaker_id, "B");
}

TEST(LoadConversation, EndToEnd) {
  TempDir dir;
  write_wav(dir / "a.wav", tone(1000.0, 5.0, 16000.0, 1.0), 16000);
  write_wav(dir / "b.wav", tone(500.0, 5.0, 48000.0, 0.2), 48000, WavEncoding::Float32);
  write_text(dir / "ann.csv", "speaker_id,start_s,end_s\nA,0.0,0.4\nB,0.5,1.1\nA,1.2,3.2\n");
  LoadRequest req;
  req.dyad_id = "d1";
  req.audio_a = dir / "a.wav";
  req.audio_b = dir / "b.wav";
  req.annotations = dir / "ann.csv";
  const auto conv = load_conversation(req);
  EXPECT_EQ(conv.record.utterances.size(), 2u);
  for (const auto& t : conv.tracks) {
    EXPECT_EQ(t.sample_rate, 16000);
    EXPECT_LE(peak(t.samples), 1.0);
  }
  EXPECT_NEAR(conv.tracks[1].duration_s(), 5.0, 1.0 / 16000.0);
  EXPECT_NEAR(rms(conv.tracks[1].samples), kDefaultReferenceRms, 1e-9);
  EXPECT_NO_THROW(conv.record.validate());
}

TEST(LoadConversation, StereoInputRejected) {
  TempDir dir;
  std::ofstream(dir / "a.wav", std::ios::binary)
      << encode_wav(std::vector<double>(88200, 0.1), 44100, WavEncoding::Pcm16, 2);
  write_wav(dir / "b.wav", tone(500.0, 1.0), 16000);
  write_text(dir / "ann.csv", "speaker_id,start_s,end_s\nA,0.0,0.8\n");
  LoadRequest req;
  req.dyad_id = "d";
  req.audio_a = dir / "a.wav";
  req.audio_b = dir / "b.wav";
  req.annotations = dir / "ann.csv";
  EXPECT_THROW(load_conversation(req), ValidationError);
}

TEST(FeatureCache, BitExactRoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0.0, 1e3);
  FeatureTable t;
  t.names = {"f0", "f1", "f2"};
  t.utterances = {{"A", 0.1, 1.3, 0}, {"B", 1.5, 2.75, 1}};
  t.values.resize(2, 3);
  for (Eigen::Index i = 0; i < t.values.size(); ++i) t.values.data()[i] = nd(rng) / 7.0;
  t.values(0, 0) = std::numeric_limits<double>::denorm_min();
  t.values(1, 2) = -0.0;
  write_feature_cache(dir / "c.csv", t, {"seed=1"});
  EXPECT_FALSE(std::filesystem::exists(dir / "c.csv.tmp"));
  const auto back = read_feature_cache(dir / "c.csv");
  EXPECT_EQ(back.names, t.names);
  ASSERT_EQ(back.values.rows(), 2);
  for (Eigen::Index i = 0; i < t.values.size(); ++i) {
    EXPECT_EQ(std::memcmp(&back.values.data()[i], &t.values.data()[i], sizeof(double)), 0);
  }
  EXPECT_EQ(back.utterances[1].end_s, 2.75);
  EXPECT_EQ(format_feature_cache(back, {"seed=1"}), format_feature_cache(t, {"seed=1"}));
}

TEST(ConversationCsv, RoundTripKeepsShamColumns) {
  ConversationRecord real{"d1", {{"A", 0, 1, 0}, {"B", 1, 2, 1}}, ConversationKind::Real, {}, 12};
  ConversationRecord sham{"d1", {{"B", 0, 1, 1}, {"A", 1, 2, 0}}, ConversationKind::Sham, 2, {}};
  std::istringstream in(format_conversations({real, sham}));
  const auto back = parse_conversations(csv::parse(in, "mem"), "mem");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].kind, ConversationKind::Sham);
  EXPECT_EQ(back[1].sham_index, 2);
  EXPECT_EQ(back[1].utterances, sham.utterances);
  EXPECT_EQ(back[0].utterances, real.utterances);
}

TEST(Manifest, ResolvesRelativePaths) {
  const auto doc = nlohmann::json::parse(R"({"dyads":[{"dyad_id":"x","audio_a":"a.wav","audio_b":"/abs/b.wav",
      "annotations":"ann/x.csv","differences_found":14}]})");
  const auto m = parse_manifest(doc, "/data/corpus");
  ASSERT_EQ(m.dyads.size(), 1u);
  EXPECT_EQ(m.dyads[0].audio_a, "/data/corpus/a.wav");
  EXPECT_EQ(m.dyads[0].audio_b, "/abs/b.wav");
  EXPECT_EQ(m.dyads[0].annotations, "/data/corpus/ann/x.csv");
  EXPECT_EQ(m.dyads[0].differences_found, 14);
  EXPECT_EQ(parse_manifest(to_json(m)).dyads[0].dyad_id, "x");
}

TEST(Manifest, MissingFieldsRejected) {
  EXPECT_THROW(parse_manifest(nlohmann::json::parse(R"({"dyads":[{"dyad_id":"x"}]})")), FormatError);
  EXPECT_THROW(parse_manifest(nlohmann::json::parse(R"({"dyads":[{"dyad_id":"x","differences_found":12}]})")),
               FormatError);
}

}  // namespace
}  // namespace entrain::corpus
