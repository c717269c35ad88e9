#pragma once

#include "desco/de_sco.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>

namespace desco {

/// Bytes per field element in binary stream records.
inline unsigned element_width(const FieldSpec& f) {
  std::uint32_t maxv = f.order() - 1;
  unsigned bits = 0;
  while (maxv) {
    ++bits;
    maxv >>= 1;
  }
  return std::max(1u, (bits + 7) / 8);
}

namespace detail {

inline void put(std::ostream& os, Symbol v, unsigned w) {
  for (unsigned i = w; i-- > 0;) os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline bool get(std::istream& is, Symbol& v, unsigned w) {
  v = 0;
  for (unsigned i = 0; i < w; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) return false;
    v = (v << 8) | static_cast<Symbol>(c);
  }
  return true;
}

}  // namespace detail

/// Per slot: sub-symbols then parities, fixed width, most significant byte first.
inline void write_channel_stream(std::ostream& os, const ChannelStream& s, const FieldSpec& f) {
  const unsigned w = element_width(f);
  for (const auto& x : s) {
    for (Symbol v : x.subs) detail::put(os, v, w);
    for (Symbol v : x.parities) detail::put(os, v, w);
  }
}

inline void write_source_stream(std::ostream& os, const SourceStream& s, const FieldSpec& f) {
  const unsigned w = element_width(f);
  for (const auto& x : s)
    for (Symbol v : x.subs) detail::put(os, v, w);
}

namespace detail {

inline std::vector<std::vector<Symbol>> read_records(std::istream& is, const FieldSpec& f, unsigned per_record) {
  const unsigned w = element_width(f);
  std::vector<std::vector<Symbol>> out;
  for (std::size_t rec = 0;; ++rec) {
    std::vector<Symbol> r(per_record);
    for (unsigned i = 0; i < per_record; ++i) {
      if (!get(is, r[i], w)) {
        if (i == 0 && is.eof()) return out;
        throw format_error("truncated record " + std::to_string(rec));
      }
      if (r[i] >= f.order()) throw format_error("record " + std::to_string(rec) + ": value out of field range");
    }
    out.push_back(std::move(r));
  }
}

}  // namespace detail

inline ChannelStream read_channel_stream(std::istream& is, const FieldSpec& f, unsigned subs, unsigned parities) {
  ChannelStream out;
  for (auto& r : detail::read_records(is, f, subs + parities))
    out.push_back({std::vector<Symbol>(r.begin(), r.begin() + subs), std::vector<Symbol>(r.begin() + subs, r.end())});
  return out;
}

inline SourceStream read_source_stream(std::istream& is, const FieldSpec& f, unsigned subs) {
  SourceStream out;
  for (auto& r : detail::read_records(is, f, subs)) out.push_back({std::move(r)});
  return out;
}

// ---- codec descriptor -------------------------------------------------------

using AnyCodec = std::variant<ScoCodec, DeScoCodec>;

namespace detail {

inline std::string hex(Symbol v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%X", v);
  return buf;
}

inline void write_field(std::ostream& os, const FieldSpec& f) {
  if (f.kind == FieldSpec::Kind::prime) {
    os << "field_kind=prime\nfield_prime=" << f.param << "\n";
  } else {
    os << "field_kind=binary\nfield_degree=" << f.param << "\nfield_poly=0x" << hex(f.poly) << "\n";
  }
}

inline void write_h(std::ostream& os, const Matrix& h) {
  os << "h_rows=" << h.rows << "\nh_cols=" << h.cols << "\n";
  for (std::size_t r = 0; r < h.rows; ++r) {
    os << "h" << r << "=";
    for (std::size_t c = 0; c < h.cols; ++c) os << (c ? "," : "") << hex(h(r, c));
    os << "\n";
  }
}

}  // namespace detail

/// key=value text block sufficient to rebuild the codec exactly.
inline std::string descriptor(const AnyCodec& any) {
  std::ostringstream os;
  if (const auto* s = std::get_if<ScoCodec>(&any)) {
    const auto& p = s->params();
    os << "kind=sco\nb=" << p.B << "\nt=" << p.T << "\nstep=" << p.step
       << "\norientation=" << (p.orientation == Orientation::main_diagonal ? "main" : "off") << "\n";
    detail::write_field(os, p.field);
    detail::write_h(os, s->diagonal().code.parity.H);
  } else {
    const auto& c = std::get<DeScoCodec>(any);
    const auto& p = c.params();
    os << "kind=" << (c.scheme() == Scheme::desco ? "desco" : "ia") << "\nb1=" << p.B1 << "\nt1=" << p.T1
       << "\na=" << p.a << "\nb=" << p.b << "\nexpansion=" << c.expansion() << "\n";
    detail::write_field(os, c.field()->spec());
    detail::write_h(os, c.c1().code.parity.H);
  }
  return os.str();
}

inline std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw format_error("line " + std::to_string(lineno) + ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

namespace detail {

inline unsigned need_uint(const std::map<std::string, std::string>& kv, const std::string& k) {
  auto it = kv.find(k);
  if (it == kv.end()) throw format_error("descriptor: missing key '" + k + "'");
  try {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(it->second, &pos, 0);
    if (pos != it->second.size()) throw std::invalid_argument(k);
    return static_cast<unsigned>(v);
  } catch (const std::logic_error&) {
    throw format_error("descriptor: bad value for '" + k + "'");
  }
}

inline FieldSpec read_field(const std::map<std::string, std::string>& kv) {
  auto it = kv.find("field_kind");
  if (it == kv.end()) throw format_error("descriptor: missing key 'field_kind'");
  if (it->second == "prime") return FieldSpec::prime(need_uint(kv, "field_prime"));
  if (it->second == "binary") return FieldSpec::binary(need_uint(kv, "field_degree"), need_uint(kv, "field_poly"));
  throw format_error("descriptor: unknown field_kind '" + it->second + "'");
}

inline Matrix read_h(const std::map<std::string, std::string>& kv) {
  Matrix h(need_uint(kv, "h_rows"), need_uint(kv, "h_cols"));
  for (std::size_t r = 0; r < h.rows; ++r) {
    auto it = kv.find("h" + std::to_string(r));
    if (it == kv.end()) throw format_error("descriptor: missing H row " + std::to_string(r));
    std::istringstream ss(it->second);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= h.cols) throw format_error("descriptor: H row " + std::to_string(r) + " too long");
      try {
        h(r, c++) = static_cast<Symbol>(std::stoul(cell, nullptr, 16));
      } catch (const std::logic_error&) {
        throw format_error("descriptor: bad H entry in row " + std::to_string(r));
      }
    }
    if (c != h.cols) throw format_error("descriptor: H row " + std::to_string(r) + " too short");
  }
  return h;
}

}  // namespace detail

inline AnyCodec parse_descriptor(std::istream& is) {
  const auto kv = parse_key_values(is);
  auto it = kv.find("kind");
  if (it == kv.end()) throw format_error("descriptor: missing key 'kind'");
  try {
    const FieldSpec f = detail::read_field(kv);
    const Matrix h = detail::read_h(kv);
    if (it->second == "sco") {
      auto o = kv.count("orientation") ? kv.at("orientation") : "main";
      if (o != "main" && o != "off") throw format_error("descriptor: orientation must be main or off");
      ScoParams p{detail::need_uint(kv, "b"), detail::need_uint(kv, "t"), detail::need_uint(kv, "step"),
                  o == "main" ? Orientation::main_diagonal : Orientation::off_diagonal, f};
      return ScoCodec(p, h);
    }
    const unsigned b1 = detail::need_uint(kv, "b1"), t1 = detail::need_uint(kv, "t1");
    const unsigned a = detail::need_uint(kv, "a"), b = detail::need_uint(kv, "b");
    DeScoCodec c = it->second == "desco" ? make_desco(b1, t1, a, b, f, h)
                   : it->second == "ia"  ? (b == 1 ? ia_sco_build(b1, t1, a, f, h)
                                                   : throw format_error("descriptor: ia needs b=1"))
                                         : throw format_error("descriptor: unknown kind '" + it->second + "'");
    if (kv.count("expansion") && detail::need_uint(kv, "expansion") != c.expansion())
      throw format_error("descriptor: expansion does not match parameters");
    return c;
  } catch (const usage_error& e) {
    throw format_error(std::string("descriptor: ") + e.what());
  } catch (const construction_error& e) {
    throw format_error(std::string("descriptor: ") + e.what());
  }
}

/// Shape of one slot of the outer stream for any codec.
inline unsigned codec_sub_symbols(const AnyCodec& c) {
  return std::visit([](const auto& x) -> unsigned {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, ScoCodec>) return x.rows();
    else return x.outer_sub_symbols();
  }, c);
}

inline unsigned codec_parities(const AnyCodec& c) {
  return std::visit([](const auto& x) -> unsigned {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, ScoCodec>) return x.parities();
    else return x.outer_parities();
  }, c);
}

inline const FieldSpec& codec_field(const AnyCodec& c) {
  return std::visit([](const auto& x) -> const FieldSpec& { return x.field()->spec(); }, c);
}

}  // namespace desco
