#include "fluxq/xml.hpp"

#include <cstring>
#include <sstream>

#include "fluxq/error.hpp"

namespace fluxq {

bool operator==(const Event& a, const Event& b) {
  return a.kind == b.kind && a.name == b.name && a.owner == b.owner && a.set_id == b.set_id &&
         a.position == b.position;
}

std::string to_string(const Event& e) {
  switch (e.kind) {
    case Event::Kind::Start: return "start(" + e.name + ")";
    case Event::Kind::End: return "end(" + e.name + ")";
    case Event::Kind::Text: return "text(" + e.name + ")";
    case Event::Kind::FirstPast:
      return "first-past(" + e.owner + "#" + std::to_string(e.set_id) + "@" +
             std::to_string(e.position) + ")";
  }
  return "?";
}

namespace {

constexpr std::size_t kChunk = 1 << 16;

bool is_space(int c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_name_start(int c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}
bool is_name_char(int c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace

XmlReader::XmlReader(std::istream& in) : in_(&in) {}

XmlReader::XmlReader(std::string_view text) : buf_(text) {}

bool XmlReader::fill() {
  if (in_ == nullptr || !*in_) return false;
  consumed_ += pos_;
  buf_.erase(0, pos_);
  pos_ = 0;
  std::size_t old = buf_.size();
  buf_.resize(old + kChunk);
  in_->read(buf_.data() + old, kChunk);
  buf_.resize(old + static_cast<std::size_t>(in_->gcount()));
  return buf_.size() > old;
}

int XmlReader::peek() {
  if (pos_ == buf_.size() && !fill()) return -1;
  return static_cast<unsigned char>(buf_[pos_]);
}

int XmlReader::get() {
  int c = peek();
  if (c >= 0) ++pos_;
  return c;
}

bool XmlReader::starts_with(std::string_view s) {
  while (buf_.size() - pos_ < s.size()) {
    if (!fill()) break;
  }
  return buf_.compare(pos_, s.size(), s) == 0;
}

void XmlReader::fail(const std::string& msg) const { throw ParseError("XML: " + msg, offset()); }

void XmlReader::skip_until(std::string_view terminator) {
  while (!starts_with(terminator)) {
    if (get() < 0) fail("unterminated markup, expected '" + std::string(terminator) + "'");
  }
  pos_ += terminator.size();
}

void XmlReader::skip_space() {
  while (is_space(peek())) ++pos_;
}

std::string XmlReader::name() {
  std::string n;
  if (!is_name_start(peek())) fail("expected a name");
  while (is_name_char(peek())) n += static_cast<char>(get());
  return n;
}

void XmlReader::decode_entity(std::string& out) {
  std::string ent;
  for (int c = get(); c != ';'; c = get()) {
    if (c < 0 || ent.size() > 10) fail("unterminated entity reference");
    ent += static_cast<char>(c);
  }
  if (ent == "lt") out += '<';
  else if (ent == "gt") out += '>';
  else if (ent == "amp") out += '&';
  else if (ent == "quot") out += '"';
  else if (ent == "apos") out += '\'';
  else if (ent.size() > 1 && ent[0] == '#') {
    bool hex = ent[1] == 'x';
    char* endp = nullptr;
    unsigned long cp = std::strtoul(ent.c_str() + (hex ? 2 : 1), &endp, hex ? 16 : 10);
    if (*endp != '\0' || cp == 0 || cp > 0x10FFFF) fail("bad character reference &" + ent + ";");
    append_utf8(out, cp);
  } else {
    fail("unknown entity &" + ent + ";");
  }
}

bool XmlReader::next(Event& e) {
  if (pending_end_) {
    pending_end_ = false;
    e = Event::end(std::move(pending_tag_));
    ++events_;
    return true;
  }
  std::string text;
  for (;;) {
    int c = peek();
    if (c < 0) {
      if (!open_.empty()) fail("document ends inside <" + open_.back() + ">");
      if (!seen_root_) fail("no root element");
      return false;
    }
    if (c != '<') {
      if (c == '&') {
        ++pos_;
        decode_entity(text);
      } else {
        text += static_cast<char>(get());
      }
      continue;
    }
    if (starts_with("<![CDATA[")) {
      pos_ += 9;
      while (!starts_with("]]>")) {
        int d = get();
        if (d < 0) fail("unterminated CDATA section");
        text += static_cast<char>(d);
      }
      pos_ += 3;
      continue;
    }
    // markup ends the pending character data
    bool blank = true;
    for (char ch : text) blank = blank && is_space(static_cast<unsigned char>(ch));
    if (!blank) {
      if (open_.empty()) fail("character data outside the root element");
      e = Event::text(std::move(text));
      ++events_;
      return true;
    }
    text.clear();
    if (starts_with("<!--")) {
      skip_until("-->");
      continue;
    }
    if (starts_with("<?")) {
      skip_until("?>");
      continue;
    }
    if (starts_with("<!")) {
      // DOCTYPE, possibly with an internal subset
      int depth = 0;
      for (int d = get(); ; d = get()) {
        if (d < 0) fail("unterminated declaration");
        if (d == '[') ++depth;
        if (d == ']') --depth;
        if (d == '>' && depth <= 0) break;
      }
      continue;
    }
    ++pos_;
    if (peek() == '/') {
      ++pos_;
      std::string tag = name();
      skip_space();
      if (get() != '>') fail("expected '>' after </" + tag);
      if (open_.empty() || open_.back() != tag) {
        fail("mismatched end tag </" + tag + ">" +
             (open_.empty() ? std::string() : ", expected </" + open_.back() + ">"));
      }
      open_.pop_back();
      e = Event::end(std::move(tag));
      ++events_;
      return true;
    }
    std::string tag = name();
    skip_space();
    bool empty = false;
    if (peek() == '/') {
      ++pos_;
      empty = true;
    }
    int d = get();
    if (d != '>') {
      if (is_name_start(d)) {
        fail("attributes are not supported (data model has elements and text only) in <" + tag +
             ">");
      }
      fail("expected '>' in <" + tag + ">");
    }
    if (open_.empty()) {
      if (seen_root_) fail("more than one root element");
      seen_root_ = true;
    }
    if (empty) {
      pending_end_ = true;
      pending_tag_ = tag;
    } else {
      open_.push_back(tag);
    }
    e = Event::start(std::move(tag));
    ++events_;
    return true;
  }
}

std::vector<Event> tokenize(std::string_view text) {
  XmlReader r(text);
  std::vector<Event> out;
  Event e;
  while (r.next(e)) out.push_back(std::move(e));
  return out;
}

void append_escaped(std::string& out, std::string_view text) {
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
}

std::string escape_xml(std::string_view text) {
  std::string out;
  append_escaped(out, text);
  return out;
}

std::string serialize(const std::vector<Event>& events) {
  std::string out;
  for (const auto& e : events) {
    switch (e.kind) {
      case Event::Kind::Start: out += "<" + e.name + ">"; break;
      case Event::Kind::End: out += "</" + e.name + ">"; break;
      case Event::Kind::Text: append_escaped(out, e.name); break;
      case Event::Kind::FirstPast: break;
    }
  }
  return out;
}

// ---- validation -------------------------------------------------------------

StreamValidator::StreamValidator(const Schema& schema) : schema_(schema) {
  stack_.push_back({&schema.document(), 0});
}

void StreamValidator::fail(const std::string& msg) const {
  std::string where;
  for (const auto& p : path_) where += "/" + p;
  throw ValidationError(msg + " (at " + (where.empty() ? "/" : where) + ")");
}

void StreamValidator::start(const std::string& tag) {
  Frame& top = stack_.back();
  if (top.model->text_only) fail("element <" + tag + "> inside text-only <" + top.model->element + ">");
  auto next = top.model->automaton.next(top.state, tag);
  if (!next) {
    const auto& g = top.model->automaton;
    fail("unexpected child <" + tag + ">" +
         (top.state == 0 ? std::string(" at first position") : " after <" + g.symbol_of(top.state) + ">"));
  }
  top.state = *next;
  const ContentModel* m = schema_.find(tag);
  if (m == nullptr) fail("undeclared element <" + tag + ">");
  stack_.push_back({m, 0});
  path_.push_back(tag);
}

void StreamValidator::text(std::string_view) {
  const Frame& top = stack_.back();
  if (!top.model->text_only) {
    fail("character data inside element-only <" + top.model->element + ">");
  }
}

void StreamValidator::end(const std::string& tag) {
  const Frame& top = stack_.back();
  if (!top.model->automaton.is_final(top.state)) {
    fail("content of <" + tag + "> ends early" +
         (top.state == 0 ? std::string() : " after <" + top.model->automaton.symbol_of(top.state) + ">"));
  }
  stack_.pop_back();
  path_.pop_back();
}

void StreamValidator::finish() {
  if (stack_.size() != 1) fail("document ends inside an element");
  const Frame& top = stack_.back();
  if (!top.model->automaton.is_final(top.state)) fail("document has no root element");
}

// ---- punctuation ------------------------------------------------------------

namespace {

struct PunctFrame {
  const ContentModel* model = nullptr;
  const std::vector<std::pair<std::string, std::set<std::string>>>* regs = nullptr;
  std::vector<PastTable> tables;
  ValidatorState state;
  int position = 0;
};

void emit(std::vector<Event>& out, const PunctFrame& f, const std::vector<int>& fired, int position) {
  for (int i : fired) {
    Event e;
    e.kind = Event::Kind::FirstPast;
    e.name = f.model->element;
    e.owner = (*f.regs)[i].first;
    e.set_id = i;
    e.position = position;
    out.push_back(std::move(e));
  }
}

PunctFrame open_frame(const ContentModel* m, const PunctuationRegistry& registrations,
                      std::vector<Event>& out) {
  static const std::vector<std::pair<std::string, std::set<std::string>>> kNone;
  PunctFrame f;
  f.model = m;
  auto it = registrations.find(m->element);
  f.regs = it == registrations.end() ? &kNone : &it->second;
  for (const auto& [owner, set] : *f.regs) f.tables.push_back(make_past_table(m->automaton, set));
  std::vector<int> fired;
  f.state = validator_start(m->automaton, f.tables, fired);
  emit(out, f, fired, 0);
  return f;
}

void close_frame(PunctFrame& f, std::vector<Event>& out) {
  validator_finish(f.state, f.model->automaton);
  std::vector<int> rest;
  for (std::size_t i = 0; i < f.tables.size(); ++i) {
    if (!f.state.fired[i]) rest.push_back(static_cast<int>(i));
  }
  emit(out, f, rest, f.position + 1);
}

}  // namespace

std::vector<Event> validate_and_punctuate(const std::vector<Event>& events, const Schema& schema,
                                          const PunctuationRegistry& registrations) {
  StreamValidator validator(schema);
  std::vector<Event> out;
  std::vector<PunctFrame> stack;
  stack.push_back(open_frame(&schema.document(), registrations, out));
  for (const auto& e : events) {
    switch (e.kind) {
      case Event::Kind::Start: {
        validator.start(e.name);
        PunctFrame& parent = stack.back();
        auto fired = validator_step(parent.state, parent.model->automaton, parent.tables, e.name);
        ++parent.position;
        out.push_back(e);
        emit(out, parent, fired, parent.position);
        stack.push_back(open_frame(&schema.model(e.name), registrations, out));
        break;
      }
      case Event::Kind::End:
        validator.end(e.name);
        close_frame(stack.back(), out);
        stack.pop_back();
        out.push_back(e);
        break;
      case Event::Kind::Text:
        validator.text(e.name);
        out.push_back(e);
        break;
      case Event::Kind::FirstPast:
        break;
    }
  }
  validator.finish();
  close_frame(stack.back(), out);
  return out;
}

}  // namespace fluxq
