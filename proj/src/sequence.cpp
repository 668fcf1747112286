#include "semm/sequence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include "semm/error.hpp"

namespace semm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Recursive-descent evaluator: expr := term (('+'|'-') term)*,
// term := unary (('*'|'/') unary)*, unary := ('+'|'-')* atom,
// atom := number | 'pi' | '(' expr ')'.
class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  double parse() {
    const double v = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    if (!std::isfinite(v)) fail("value is not finite");
    return v;
  }

  std::size_t error_offset() const { return pos_; }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(1, static_cast<int>(pos_) + 1, msg); }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool eat(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) {
        v += term();
      } else if (eat('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        v /= unary();
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return atom();
  }

  double atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected a number");
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    if (text_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct Token {
  std::string_view text;
  int column;
};

struct Statement {
  int line;
  std::vector<Token> tokens;
};

std::vector<Statement> split_statements(std::string_view text) {
  std::vector<Statement> out;
  int line = 1;
  int column = 1;
  Statement current{1, {}};
  std::size_t i = 0;
  auto flush = [&] {
    if (!current.tokens.empty()) out.push_back(std::move(current));
    current = Statement{line, {}};
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      ++i;
      flush();
    } else if (c == ';') {
      ++column;
      ++i;
      flush();
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      ++column;
      ++i;
    } else {
      if (current.tokens.empty()) current.line = line;
      const std::size_t begin = i;
      const int begin_column = column;
      while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r' && text[i] != '\n' &&
             text[i] != ';' && text[i] != '#') {
        ++i;
        ++column;
      }
      current.tokens.push_back(Token{text.substr(begin, i - begin), begin_column});
    }
  }
  flush();
  return out;
}

bool valid_label(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

class StatementReader {
 public:
  StatementReader(const Statement& st, std::initializer_list<std::string_view> allowed) : st_(st) {
    for (std::size_t i = 1; i < st.tokens.size(); ++i) {
      const Token& tok = st.tokens[i];
      const auto eq = tok.text.find('=');
      if (eq == std::string_view::npos) {
        positional_.push_back(tok);
        continue;
      }
      const std::string key(tok.text.substr(0, eq));
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw SyntaxError(st.line, tok.column, "unknown parameter '" + key + "' for " + std::string(keyword()));
      if (values_.count(key) != 0) throw SyntaxError(st.line, tok.column, "duplicate parameter '" + key + "'");
      values_.emplace(key, Token{tok.text.substr(eq + 1), tok.column + static_cast<int>(eq) + 1});
    }
  }

  std::string_view keyword() const { return st_.tokens.front().text; }
  int line() const { return st_.line; }
  int column() const { return st_.tokens.front().column; }
  const std::vector<Token>& positional() const { return positional_; }

  std::optional<double> number(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    ExprParser p(it->second.text);
    try {
      return p.parse();
    } catch (const SyntaxError& e) {
      throw SyntaxError(st_.line, it->second.column + e.column() - 1,
                        std::string(e.what()).substr(std::string(e.what()).find(": ") + 2) + " in '" + key + "'");
    }
  }

  double required(const std::string& key) const {
    auto v = number(key);
    if (!v) throw SyntaxError(st_.line, column(), std::string(keyword()) + " requires " + key + "=");
    return *v;
  }

  std::optional<std::string_view> text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second.text;
  }

  int column_of(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? column() : it->second.column;
  }

 private:
  const Statement& st_;
  std::vector<Token> positional_;
  std::map<std::string, Token> values_;
};

}  // namespace

std::string describe(const PulseEvent& e) {
  std::string name = std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RfPulse>) return "rf";
        if constexpr (std::is_same_v<T, StarkPulse>) return "stark";
        if constexpr (std::is_same_v<T, Acquire>) return "acquire " + k.label;
        return "wait";
      },
      e.kind);
  return name + " at " + fmt17(e.start);
}

PulseEvent make_rf(double start, double area, double phase, std::optional<double> rabi,
                   std::optional<double> duration) {
  if (!std::isfinite(start)) throw ValidationError("rf.at", "must be finite");
  if (!std::isfinite(area)) throw ValidationError("rf.area", "must be finite");
  if (!std::isfinite(phase)) throw ValidationError("rf.phase", "must be finite");
  if (rabi && !(*rabi > 0.0 && std::isfinite(*rabi))) throw ValidationError("rf.rabi", "must be positive");
  if (duration && !(*duration >= 0.0 && std::isfinite(*duration)))
    throw ValidationError("rf.duration", "must be nonnegative");
  PulseEvent e{start, 0.0, RfPulse{area, phase, std::nullopt}};
  if (!rabi && (!duration || *duration == 0.0)) return e;
  if (area == 0.0) {
    if (duration && *duration > 0.0) throw ValidationError("rf.duration", "zero-area pulse must be ideal");
    return e;
  }
  double length = 0.0;
  if (rabi && duration) {
    const double implied = kTwoPi * *rabi * *duration;
    if (std::abs(implied - std::abs(area)) > 1e-3 * std::abs(area))
      throw ValidationError("rf.area", "inconsistent with 2*pi*rabi*duration = " + fmt17(implied));
    length = *duration;
  } else if (rabi) {
    length = std::abs(area) / (kTwoPi * *rabi);
  } else {
    length = *duration;
    if (length == 0.0) throw ValidationError("rf.duration", "a finite pulse needs a positive duration");
  }
  e.duration = length;
  std::get<RfPulse>(e.kind).rabi = std::abs(area) / (kTwoPi * length);
  return e;
}

PulseEvent make_stark(double start, double ts, double amplitude, int sign) {
  if (!std::isfinite(start)) throw ValidationError("stark.at", "must be finite");
  if (!(ts >= 0.0) || !std::isfinite(ts)) throw ValidationError("stark.Ts", "must be nonnegative");
  if (!std::isfinite(amplitude)) throw ValidationError("stark.E", "must be finite");
  if (sign != 1 && sign != -1) throw ValidationError("stark.sign", "must be +1 or -1");
  return PulseEvent{start, ts, StarkPulse{amplitude, sign}};
}

PulseEvent make_acquire(std::string label, double from, double to) {
  if (!valid_label(label)) throw ValidationError("acquire.label", "invalid label '" + label + "'");
  if (!std::isfinite(from) || !std::isfinite(to)) throw ValidationError("acquire.from", "must be finite");
  if (!(to >= from)) throw ValidationError("acquire.to", "must not precede from");
  return PulseEvent{from, to - from, Acquire{std::move(label)}};
}

PulseEvent make_wait(double start, double duration) {
  if (!std::isfinite(start)) throw ValidationError("wait.at", "must be finite");
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw ValidationError("wait.duration", "must be nonnegative");
  return PulseEvent{start, duration, Wait{}};
}

void validate(const Sequence& seq) {
  if (!(seq.sample_rate > 0.0) || !std::isfinite(seq.sample_rate))
    throw ValidationError("sample_rate", "must be positive");
  const auto& ev = seq.events;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const PulseEvent& e = ev[i];
    if (!std::isfinite(e.start) || !(e.duration >= 0.0) || !std::isfinite(e.duration))
      throw ValidationError("events[" + std::to_string(i) + "]", "invalid timing");
    if (i > 0) {
      const PulseEvent& prev = ev[i - 1];
      if (e.start < prev.start) throw ValidationError("events", "start times must be nondecreasing");
      // An acquisition may open exactly when another event starts.
      if (e.start == prev.start && !std::holds_alternative<Acquire>(e.kind) &&
          !std::holds_alternative<Acquire>(prev.kind))
        throw OverlapError(describe(prev), describe(e));
    }
    if (const auto* rf = std::get_if<RfPulse>(&e.kind)) {
      if (!rf->rabi && e.duration != 0.0) throw ValidationError("rf.duration", "ideal pulse must have zero duration");
      if (rf->rabi && std::abs(kTwoPi * *rf->rabi * e.duration - std::abs(rf->area)) > 1e-9 * std::abs(rf->area))
        throw ValidationError("rf.rabi", "area, rabi and duration are inconsistent");
    }
    if (const auto* acq = std::get_if<Acquire>(&e.kind)) {
      if (!valid_label(acq->label)) throw ValidationError("acquire.label", "invalid label '" + acq->label + "'");
      if (std::find(labels.begin(), labels.end(), acq->label) != labels.end())
        throw ValidationError("acquire.label", "duplicate label '" + acq->label + "'");
      labels.push_back(acq->label);
    }
  }
  // Non-acquire events must be disjoint (touching ends are fine).
  const PulseEvent* last = nullptr;
  for (const PulseEvent& e : ev) {
    if (std::holds_alternative<Acquire>(e.kind)) continue;
    if (last != nullptr && e.start < last->end()) throw OverlapError(describe(*last), describe(e));
    if (last == nullptr || e.end() >= last->end()) last = &e;
  }
  // Acquisition windows may not contain an rf pulse.
  for (const PulseEvent& a : ev) {
    if (!std::holds_alternative<Acquire>(a.kind)) continue;
    for (const PulseEvent& r : ev) {
      if (!std::holds_alternative<RfPulse>(r.kind)) continue;
      const bool inside = r.duration == 0.0 ? (r.start > a.start && r.start < a.end())
                                            : (r.start < a.end() && a.start < r.end());
      if (inside) throw OverlapError(describe(a), describe(r));
    }
  }
}

Sequence validated(Sequence seq) {
  std::stable_sort(seq.events.begin(), seq.events.end(),
                   [](const PulseEvent& a, const PulseEvent& b) { return a.start < b.start; });
  validate(seq);
  return seq;
}

double parse_number(std::string_view text) { return ExprParser(text).parse(); }

Sequence parse_sequence(std::string_view text) {
  Sequence seq;
  std::optional<double> rate;
  int rate_line = 1;
  for (const Statement& st : split_statements(text)) {
    const std::string_view kw = st.tokens.front().text;
    auto wrap = [&](auto&& build, int column) {
      try {
        return build();
      } catch (const ValidationError& e) {
        throw SyntaxError(st.line, column, e.what());
      }
    };
    if (kw == "rf") {
      StatementReader r(st, {"area", "phase", "at", "rabi", "duration"});
      if (!r.positional().empty()) throw SyntaxError(st.line, r.positional()[0].column, "expected key=value");
      const double area = r.required("area");
      const double phase = r.number("phase").value_or(0.0);
      const double at = r.number("at").value_or(0.0);
      const auto rabi = r.number("rabi");
      const auto duration = r.number("duration");
      seq.events.push_back(wrap([&] { return make_rf(at, area, phase, rabi, duration); }, r.column()));
    } else if (kw == "stark") {
      StatementReader r(st, {"E", "Ts", "at", "sign"});
      if (!r.positional().empty()) throw SyntaxError(st.line, r.positional()[0].column, "expected key=value");
      const double amplitude = r.required("E");
      const double ts = r.required("Ts");
      const double at = r.number("at").value_or(0.0);
      const double sign = r.number("sign").value_or(1.0);
      if (sign != 1.0 && sign != -1.0) throw SyntaxError(st.line, r.column_of("sign"), "sign must be +1 or -1");
      seq.events.push_back(wrap([&] { return make_stark(at, ts, amplitude, static_cast<int>(sign)); }, r.column()));
    } else if (kw == "acquire") {
      StatementReader r(st, {"label", "from", "to", "rate"});
      std::string label;
      if (auto named = r.text("label")) label = std::string(*named);
      if (r.positional().size() > 1 || (!r.positional().empty() && !label.empty()))
        throw SyntaxError(st.line, r.positional().back().column, "acquire takes a single label");
      if (!r.positional().empty()) label = std::string(r.positional()[0].text);
      if (label.empty()) throw SyntaxError(st.line, r.column(), "acquire requires a label");
      if (!valid_label(label)) throw SyntaxError(st.line, r.column(), "invalid label '" + label + "'");
      const double from = r.required("from");
      const double to = r.required("to");
      if (auto rr = r.number("rate")) {
        if (rate && *rate != *rr)
          throw SyntaxError(st.line, r.column_of("rate"), "conflicting sample rate (first set on line " +
                                                              std::to_string(rate_line) + ")");
        rate = *rr;
        rate_line = st.line;
      }
      seq.events.push_back(wrap([&] { return make_acquire(label, from, to); }, r.column()));
    } else if (kw == "wait") {
      StatementReader r(st, {"at", "duration"});
      if (!r.positional().empty()) throw SyntaxError(st.line, r.positional()[0].column, "expected key=value");
      const double at = r.number("at").value_or(0.0);
      const double duration = r.required("duration");
      seq.events.push_back(wrap([&] { return make_wait(at, duration); }, r.column()));
    } else {
      throw SyntaxError(st.line, st.tokens.front().column, "unknown event '" + std::string(kw) + "'");
    }
  }
  if (rate) seq.sample_rate = *rate;
  return validated(std::move(seq));
}

std::string render(const Sequence& seq) {
  std::ostringstream out;
  for (const PulseEvent& e : seq.events) {
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, RfPulse>) {
            out << "rf area=" << fmt17(k.area) << " phase=" << fmt17(k.phase) << " at=" << fmt17(e.start);
            if (k.rabi) out << " duration=" << fmt17(e.duration) << " rabi=" << fmt17(*k.rabi);
          } else if constexpr (std::is_same_v<T, StarkPulse>) {
            out << "stark E=" << fmt17(k.amplitude) << " Ts=" << fmt17(e.duration) << " at=" << fmt17(e.start)
                << " sign=" << k.sign;
          } else if constexpr (std::is_same_v<T, Acquire>) {
            out << "acquire " << k.label << " from=" << fmt17(e.start) << " to=" << fmt17(e.end())
                << " rate=" << fmt17(seq.sample_rate);
          } else {
            out << "wait at=" << fmt17(e.start) << " duration=" << fmt17(e.duration);
          }
        },
        e.kind);
    out << '\n';
  }
  return out.str();
}

double field_time(const Sequence& seq, double t) {
  double total = 0.0;
  for (const PulseEvent& e : seq.events) {
    const auto* s = std::get_if<StarkPulse>(&e.kind);
    if (s == nullptr || t <= e.start) continue;
    total += s->field() * (std::min(t, e.end()) - e.start);
  }
  return total;
}

std::vector<double> sample_times(const PulseEvent& acquire, double sample_rate) {
  const double step = 1.0 / sample_rate;
  const auto count = static_cast<std::size_t>(std::floor(acquire.duration * sample_rate + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = acquire.start + static_cast<double>(i) * step;
  return out;
}

SemmSequence make_semm(double t1, double t2, double t3, double t5_offset, const StarkSpec& stark,
                       const RfSpec& pi_pulse, const RfSpec& input, const SemmOptions& options) {
  if (!(t1 < t2 && t2 < t3)) throw ConstraintError("times must satisfy t1 < t2 < t3");
  SemmTimes t;
  t.t1 = t1;
  t.t2 = t2;
  t.t3 = t3;
  t.t4 = 2.0 * t3 - t1;
  if (!(t2 - t1 < 0.5 * (t.t4 - t2)))
    throw ConstraintError("stimulated echo overlaps the output: choosing t2−t1 < (t4−t2)/2 is required (t2−t1 = " +
                          fmt17(t2 - t1) + ", (t4−t2)/2 = " + fmt17(0.5 * (t.t4 - t2)) + ")");
  if (!(t5_offset >= 0.0)) throw ConstraintError("t5_offset must be nonnegative");
  t.t5 = t.t4 + t5_offset;
  t.t6 = t.t5 + (t3 - t2);
  t.t7 = 2.0 * t.t6 - t.t4;
  t.stimulated = t.t6 + (t3 - t1);

  const double h = options.half_window;
  if (!(h >= 0.0)) throw ValidationError("half_window", "must be nonnegative");
  if (options.acquire_stimulated && options.acquire_echo2 && std::abs(t.stimulated - t.t7) <= 2.0 * h)
    throw ConstraintError("stimulated echo at " + fmt17(t.stimulated) + " is not separated from the output at " +
                          fmt17(t.t7) + "; choosing t2−t1 < (t4−t2)/2 with a different t5 offset separates them");

  auto centered_rf = [](double center, const RfSpec& spec) {
    PulseEvent e = make_rf(center, spec.area, spec.phase, spec.rabi);
    e.start = center - 0.5 * e.duration;
    return e;
  };

  Sequence seq;
  seq.sample_rate = options.sample_rate;
  if (input.area != 0.0) seq.events.push_back(centered_rf(t1, input));
  seq.events.push_back(make_stark(t2, stark.ts, stark.amplitude, stark.sign));
  seq.events.push_back(centered_rf(t3, pi_pulse));
  seq.events.push_back(make_stark(t.t5, stark.ts, stark.amplitude, options.flip_second_stark ? -stark.sign : stark.sign));
  seq.events.push_back(centered_rf(t.t6, pi_pulse));
  const double pi_half = 0.5 * seq.events.back().duration;
  if (options.acquire_echo1) seq.events.push_back(make_acquire("echo1", t.t4 - h, t.t4 + h));
  if (options.acquire_stimulated) seq.events.push_back(make_acquire("stimulated", t.stimulated - h, t.stimulated + h));
  if (options.acquire_echo2) seq.events.push_back(make_acquire("echo2", t.t7 - h, t.t7 + h));
  if (options.acquire_output) seq.events.push_back(make_acquire("output", t.t6 + pi_half, t.t7 + h));
  return SemmSequence{validated(std::move(seq)), t};
}

SemmSequence make_semm(const SemmParams& p) {
  return make_semm(p.t1, p.t2, p.t3, p.t5_offset, p.stark, p.pi_pulse, p.input, p.options);
}

}  // namespace semm
