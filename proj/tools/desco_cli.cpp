// Command-line front end: verify, simulate, encode, decode, bounds.

#include "desco.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace desco;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kIo = 3 };

struct io_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) throw io_failure("cannot open '" + path + "' for reading");
  return f;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw io_failure("cannot open '" + path + "' for writing");
  return f;
}

void finish_out(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw io_failure("write to '" + path + "' failed");
}

struct Options {
  ExperimentConfig cfg;
  unsigned alpha_num = 2, alpha_den = 1;
  // verify
  Slot window = 0;
  std::string scheme = "desco";
  // bounds
  unsigned b2 = 2, t2 = 5;
  // encode / decode
  std::string descriptor, in, pattern, log, emit_descriptor;
  int user = 1;
};

void sync_alpha(Options& o) {
  o.cfg.a = o.alpha_num;
  o.cfg.b = o.alpha_den;
  const auto g = std::gcd(o.cfg.a, o.cfg.b);
  if (g > 1) {
    o.cfg.a /= g;
    o.cfg.b /= g;
  }
}

DeScoCodec codec_from_flags(const Options& o, const std::string& scheme) {
  if (scheme == "ia") {
    if (o.cfg.b != 1) throw usage_error("ia needs an integer alpha");
    return ia_sco_build(o.cfg.b1, o.cfg.t1, o.cfg.a);
  }
  if (scheme != "desco") throw usage_error("scheme must be desco or ia");
  return make_desco(o.cfg.b1, o.cfg.t1, o.cfg.a, o.cfg.b);
}

int cmd_verify(const Options& o) {
  const auto c = codec_from_flags(o, o.scheme);
  const Slot window = o.window > 0 ? o.window : 10 * (Slot{o.cfg.t1} + o.cfg.b1);
  const auto r = verify_codec(c, window);
  std::cout << "scheme " << o.scheme << " (B1,T1)=(" << o.cfg.b1 << "," << o.cfg.t1 << ") alpha="
            << to_string(c.params().alpha()) << " field " << c.field()->spec().describe() << "\n"
            << "bursts checked " << r.bursts_checked << " over window " << window << "\n"
            << "user 1 max delay " << r.max_delay1 << " (target " << r.expected1 << ")\n"
            << "user 2 max delay " << r.max_delay2 << " (target " << r.expected2 << ")\n"
            << (r.pass() ? "PASS" : "FAIL") << "\n";
  return r.pass() ? kOk : kVerifyFailed;
}

int cmd_simulate(const Options& o) {
  const auto rows = run_simulation(o.cfg);
  if (o.cfg.out.empty() || o.cfg.out == "-") {
    write_csv(std::cout, rows);
  } else {
    auto f = open_out(o.cfg.out);
    write_csv(f, rows);
    finish_out(f, o.cfg.out);
  }
  // loss should not fall as b_max grows; report, do not fail
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      if (rows[j].scheme == rows[i].scheme && rows[j].user == rows[i].user && rows[j].b_max > rows[i].b_max &&
          rows[j].loss_probability < rows[i].loss_probability)
        std::cerr << "note: " << rows[i].scheme << " user " << rows[i].user << " loss drops from b_max "
                  << rows[i].b_max << " to " << rows[j].b_max << "\n";
  return kOk;
}

AnyCodec load_codec(const Options& o) {
  if (!o.descriptor.empty()) {
    auto f = open_in(o.descriptor);
    return parse_descriptor(f);
  }
  if (o.scheme == "sco") return ScoCodec(ScoParams{o.cfg.b1, o.cfg.t1, 1, Orientation::main_diagonal,
                                                   default_field_for(o.cfg.t1 + o.cfg.b1)});
  return codec_from_flags(o, o.scheme);
}

int cmd_encode(const Options& o) {
  if (o.in.empty() || o.cfg.out.empty()) throw usage_error("encode needs --in and --out");
  const auto codec = load_codec(o);
  if (!o.emit_descriptor.empty()) {
    auto f = open_out(o.emit_descriptor);
    f << descriptor(codec);
    finish_out(f, o.emit_descriptor);
  }
  auto in = open_in(o.in, true);
  const auto src = read_source_stream(in, codec_field(codec), codec_sub_symbols(codec));
  const auto tx = std::visit(
      [&](const auto& c) -> ChannelStream {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, ScoCodec>) return sco_encode(c, src);
        else return desco_encode(c, src);
      },
      codec);
  auto out = open_out(o.cfg.out, true);
  write_channel_stream(out, tx, codec_field(codec));
  finish_out(out, o.cfg.out);
  std::cerr << "encoded " << src.size() << " slots\n";
  return kOk;
}

int cmd_decode(const Options& o) {
  if (o.in.empty() || o.cfg.out.empty()) throw usage_error("decode needs --in and --out");
  if (o.user != 1 && o.user != 2) throw usage_error("--user must be 1 or 2");
  const auto codec = load_codec(o);
  auto in = open_in(o.in, true);
  const auto tx = read_channel_stream(in, codec_field(codec), codec_sub_symbols(codec), codec_parities(codec));
  ErasurePattern pat({}, static_cast<Slot>(tx.size()));
  if (!o.pattern.empty()) {
    auto pf = open_in(o.pattern);
    pat = read_pattern(pf, static_cast<Slot>(tx.size()));
    if (pat.horizon() > static_cast<Slot>(tx.size())) throw format_error("pattern horizon exceeds stream length");
    pat = ErasurePattern(pat.slots(), static_cast<Slot>(tx.size()));
  }
  const auto rx = apply_pattern(pat, tx);
  SourceStream got;
  StreamLog lg;
  std::visit(
      [&](const auto& c) {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, ScoCodec>) {
          auto r = sco_decode(c, rx);
          got = std::move(r.stream);
          lg = std::move(r.log);
        } else {
          auto r = o.user == 1 ? decode_user1(c, rx) : decode_user2(c, rx);
          got = std::move(r.stream);
          lg = std::move(r.log);
        }
      },
      codec);
  auto out = open_out(o.cfg.out, true);
  write_source_stream(out, got, codec_field(codec));
  finish_out(out, o.cfg.out);
  if (!o.log.empty()) {
    auto lf = open_out(o.log);
    lf << "slot,erased,recovery,delay,on_time\n";
    for (Slot s = 0; s < static_cast<Slot>(lg.recovery.size()); ++s) {
      const Slot r = lg.recovery[static_cast<std::size_t>(s)];
      lf << s << "," << (pat.erased(s) ? 1 : 0) << ",";
      if (r == kNever)
        lf << "never,never,0\n";
      else
        lf << r << "," << r - s << "," << (r - s <= lg.deadline ? 1 : 0) << "\n";
    }
    finish_out(lf, o.log);
  }
  std::cerr << "decoded " << tx.size() << " slots, " << pat.count() << " erased, " << lg.misses.size()
            << " past deadline " << lg.deadline << "\n";
  return kOk;
}

int cmd_bounds(const Options& o) {
  const auto r = bounds_report(o.cfg.b1, o.cfg.t1, o.b2, o.t2);
  std::cout << "alpha " << to_string(r.alpha) << "\n"
            << "T2* " << to_string(r.t2_star) << " (optimal integer delay " << r.optimal << ")\n"
            << "capacity user 1 " << to_string(r.capacity1) << "\n"
            << "capacity user 2 " << to_string(r.capacity2) << "\n"
            << "rate upper bound at T2=" << o.t2 << ": " << to_string(r.bound) << "\n"
            << "rate " << to_string(r.rate) << " " << (r.feasible ? "feasible" : "infeasible") << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming burst-erasure codes for two users: verification, simulation and stream tools"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  Options o;
  auto& c = o.cfg;
  app.add_option("--b1", c.b1, "burst length for user 1")->capture_default_str();
  app.add_option("--t1", c.t1, "delay for user 1")->capture_default_str();
  app.add_option("--alpha-num", o.alpha_num, "numerator of alpha = B2/B1")->capture_default_str();
  app.add_option("--alpha-den", o.alpha_den, "denominator of alpha")->capture_default_str();
  app.add_option("--bmax-list", c.bmax_list, "maximum burst lengths to sweep")->delimiter(',');
  app.add_option("--segment-len", c.segment_len, "slots per segment")->capture_default_str();
  app.add_option("--segments", c.segments, "number of segments")->capture_default_str();
  app.add_option("--seed", c.seed, "master seed")->capture_default_str();
  app.add_option("--schemes", c.schemes, "subset of desco,ia,rlc")->delimiter(',');
  app.add_option("--users", c.users, "subset of 1,2")->delimiter(',');
  app.add_option("--out", c.out, "output file (simulate: CSV, '-' for stdout)");

  auto* verify = app.add_subcommand("verify", "exhaustive single-burst sweep for both users");
  verify->add_option("--window", o.window, "burst starts to sweep (default 10(T1+B1))");
  verify->add_option("--scheme", o.scheme, "desco or ia")->capture_default_str();
  auto* simulate = app.add_subcommand("simulate", "loss probability per b_max, scheme and user as CSV");
  auto* encode = app.add_subcommand("encode", "encode a binary source stream");
  auto* decode = app.add_subcommand("decode", "decode a binary channel stream under an erasure pattern");
  for (auto* s : {encode, decode}) {
    s->add_option("--descriptor", o.descriptor, "codec descriptor file");
    s->add_option("--scheme", o.scheme, "desco, ia or sco when no descriptor is given")->capture_default_str();
    s->add_option("--in", o.in, "input stream");
  }
  encode->add_option("--emit-descriptor", o.emit_descriptor, "write the codec descriptor here");
  decode->add_option("--pattern", o.pattern, "erasure pattern file (start:length lines)");
  decode->add_option("--user", o.user, "receiver, 1 or 2")->capture_default_str();
  decode->add_option("--log", o.log, "recovery log CSV");
  auto* bounds = app.add_subcommand("bounds", "rate bound and optimal delay");
  bounds->add_option("--b2", o.b2, "burst length for user 2")->capture_default_str();
  bounds->add_option("--t2", o.t2, "delay for user 2")->capture_default_str();
  for (auto* s : app.get_subcommands({})) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    sync_alpha(o);
    if (verify->parsed()) return cmd_verify(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (encode->parsed()) return cmd_encode(o);
    if (decode->parsed()) return cmd_decode(o);
    if (bounds->parsed()) return cmd_bounds(o);
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const format_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const io_failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerifyFailed;
  }
  return kUsage;
}
