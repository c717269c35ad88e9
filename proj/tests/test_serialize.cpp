#include "desco/serialize.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace desco;

namespace {

SourceStream random_source(std::mt19937_64& g, std::size_t n, unsigned subs, std::uint32_t q) {
  SourceStream s(n);
  for (auto& x : s) {
    x.subs.resize(subs);
    for (auto& v : x.subs) v = static_cast<Symbol>(g() % q);
  }
  return s;
}

std::vector<AnyCodec> sample_codecs() {
  return {ScoCodec(ScoParams{2, 3, 1, Orientation::main_diagonal, FieldSpec::binary(1)}),
          ScoCodec(ScoParams{2, 4, 2, Orientation::off_diagonal, FieldSpec::prime(5)}),
          make_desco(2, 5, 2, 1),
          make_desco(2, 3, 3, 2),
          make_desco(1, 2, 2, 1, FieldSpec::binary(9)),
          ia_sco_build(1, 2, 3)};
}

ChannelStream encode_any(const AnyCodec& c, const SourceStream& s) {
  if (const auto* x = std::get_if<ScoCodec>(&c)) return sco_encode(*x, s);
  return desco_encode(std::get<DeScoCodec>(c), s);
}

}  // namespace

TEST(Serialize, ElementWidth) {
  EXPECT_EQ(element_width(FieldSpec::binary(1)), 1u);
  EXPECT_EQ(element_width(FieldSpec::binary(8)), 1u);
  EXPECT_EQ(element_width(FieldSpec::binary(9)), 2u);
  EXPECT_EQ(element_width(FieldSpec::binary(16)), 2u);
  EXPECT_EQ(element_width(FieldSpec::prime(251)), 1u);
  EXPECT_EQ(element_width(FieldSpec::prime(257)), 2u);
}

TEST(Serialize, ByteOrderIsMostSignificantFirst) {
  std::ostringstream os;
  write_source_stream(os, SourceStream{{{0x1A2, 0x003}}}, FieldSpec::binary(9));
  EXPECT_EQ(os.str(), std::string("\x01\xA2\x00\x03", 4));
}

TEST(Serialize, StreamRoundTrip) {
  std::mt19937_64 g(1);
  for (const auto& c : sample_codecs()) {
    const auto& f = codec_field(c);
    const auto src = random_source(g, 40, codec_sub_symbols(c), f.order());
    const auto tx = encode_any(c, src);
    std::stringstream a, b;
    write_source_stream(a, src, f);
    EXPECT_EQ(read_source_stream(a, f, codec_sub_symbols(c)), src);
    write_channel_stream(b, tx, f);
    EXPECT_EQ(read_channel_stream(b, f, codec_sub_symbols(c), codec_parities(c)), tx);
  }
}

TEST(Serialize, TruncatedRecordIsFormatError) {
  std::istringstream in(std::string("\x01\x00\x01", 3));
  try {
    read_source_stream(in, FieldSpec::binary(1), 2);
    FAIL() << "no throw";
  } catch (const format_error& e) {
    EXPECT_NE(std::string(e.what()).find("truncated record 1"), std::string::npos) << e.what();
  }
}

TEST(Serialize, OutOfRangeValueIsFormatError) {
  std::istringstream in(std::string("\x00\x07", 2));
  EXPECT_THROW(read_source_stream(in, FieldSpec::binary(2), 2), format_error);
}

TEST(Serialize, EmptyInputGivesEmptyStream) {
  std::istringstream in;
  EXPECT_TRUE(read_source_stream(in, FieldSpec::binary(3), 2).empty());
}

TEST(Serialize, DescriptorRoundTripIsBitExact) {
  std::mt19937_64 g(2);
  for (const auto& c : sample_codecs()) {
    const std::string d = descriptor(c);
    std::istringstream in(d);
    const AnyCodec back = parse_descriptor(in);
    EXPECT_EQ(descriptor(back), d);
    EXPECT_EQ(back.index(), c.index());
    const auto src = random_source(g, 30, codec_sub_symbols(c), codec_field(c).order());
    EXPECT_EQ(encode_any(back, src), encode_any(c, src)) << d;
  }
}

TEST(Serialize, DescriptorKeepsExpansion) {
  std::istringstream in(descriptor(make_desco(2, 3, 3, 2)));
  const auto c = std::get<DeScoCodec>(parse_descriptor(in));
  EXPECT_EQ(c.expansion(), 2u);
  EXPECT_EQ(c.deadline2(), 7);
}

TEST(Serialize, DescriptorAcceptsCommentsAndBlankLines) {
  std::istringstream in("# hand written\n\n" + descriptor(make_desco(1, 2, 2, 1)));
  EXPECT_NO_THROW(parse_descriptor(in));
}

TEST(Serialize, MalformedDescriptors) {
  const std::string good = descriptor(make_desco(1, 2, 2, 1));
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  const std::vector<std::string> bad{
      "",
      "kind=desco\n",
      "not a pair\n" + good,
      replace("kind=desco", "kind=wat"),
      replace("t1=2", "t1=two"),
      replace("t1=2", "t1=0"),
      replace("expansion=1", "expansion=3"),
      replace("field_kind=binary", "field_kind=ternary"),
      replace("h_cols=1", "h_cols=2"),
      replace("h0=", "h0=1,"),
      replace("h0=", "h0=zz"),
      replace("field_poly=0x7", "field_poly=0x5"),
  };
  for (const auto& s : bad) {
    std::istringstream in(s);
    EXPECT_THROW(parse_descriptor(in), format_error) << s;
  }
}

TEST(Serialize, NonBurstCorrectingHRejected) {
  // A zero H cannot correct a burst hitting the information positions.
  std::istringstream good(descriptor(make_desco(2, 5, 2, 1)));
  std::string out, line;
  while (std::getline(good, line)) {
    if (line.size() > 1 && line[0] == 'h' && std::isdigit(static_cast<unsigned char>(line[1])))
      for (std::size_t k = line.find('=') + 1; k < line.size(); ++k)
        if (line[k] != ',') line[k] = '0';
    out += line + "\n";
  }
  std::istringstream in(out);
  EXPECT_THROW(parse_descriptor(in), format_error);
}
