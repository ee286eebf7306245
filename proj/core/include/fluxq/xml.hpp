#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fluxq/glushkov.hpp"
#include "fluxq/schema.hpp"

namespace fluxq {

/// Parse event. FirstPast is punctuation and never serialized.
struct Event {
  enum class Kind : unsigned char { Start, End, Text, FirstPast };
  Kind kind = Kind::Start;
  /// Tag for Start/End, character data for Text, element for FirstPast.
  std::string name;
  /// FirstPast only: registered owner, set index, and child position
  /// (0 before the first child, n+1 for the end-of-children fallback).
  std::string owner;
  int set_id = -1;
  int position = -1;

  static Event start(std::string tag) { return {Kind::Start, std::move(tag), {}, -1, -1}; }
  static Event end(std::string tag) { return {Kind::End, std::move(tag), {}, -1, -1}; }
  static Event text(std::string s) { return {Kind::Text, std::move(s), {}, -1, -1}; }
};

bool operator==(const Event& a, const Event& b);
std::string to_string(const Event& e);

/// Forward-only event stream.
class EventSource {
 public:
  virtual ~EventSource() = default;
  virtual bool next(Event& e) = 0;
};

/// Pull tokenizer for the attribute-free XML subset: elements, character
/// data, CDATA sections, the five predefined entities and character
/// references. Declarations, comments and processing instructions are
/// skipped. Whitespace-only character data is dropped.
class XmlReader : public EventSource {
 public:
  explicit XmlReader(std::istream& in);
  explicit XmlReader(std::string_view text);

  bool next(Event& e) override;
  /// Bytes consumed so far.
  std::size_t offset() const { return consumed_ + pos_; }
  /// Events produced so far.
  std::size_t events() const { return events_; }

 private:
  bool fill();
  int peek();
  int get();
  bool starts_with(std::string_view s);
  [[noreturn]] void fail(const std::string& msg) const;
  void skip_until(std::string_view terminator);
  std::string name();
  void skip_space();
  void decode_entity(std::string& out);

  std::istream* in_ = nullptr;
  std::string buf_;
  std::size_t pos_ = 0;
  std::size_t consumed_ = 0;
  std::vector<std::string> open_;
  bool seen_root_ = false;
  bool pending_end_ = false;
  std::string pending_tag_;
  std::size_t events_ = 0;
};

/// All events of a complete document.
std::vector<Event> tokenize(std::string_view text);

class VectorSource : public EventSource {
 public:
  explicit VectorSource(const std::vector<Event>& events) : events_(events) {}
  bool next(Event& e) override {
    if (i_ == events_.size()) return false;
    e = events_[i_++];
    return true;
  }
  std::size_t consumed() const { return i_; }

 private:
  const std::vector<Event>& events_;
  std::size_t i_ = 0;
};

void append_escaped(std::string& out, std::string_view text);
std::string escape_xml(std::string_view text);
/// Start/End/Text events to markup; FirstPast is skipped.
std::string serialize(const std::vector<Event>& events);

/// Checks a stream against a schema, one automaton per open element.
class StreamValidator {
 public:
  explicit StreamValidator(const Schema& schema);

  void start(const std::string& tag);
  void text(std::string_view s);
  void end(const std::string& tag);
  /// Throws unless the whole document has been read.
  void finish();

 private:
  [[noreturn]] void fail(const std::string& msg) const;

  struct Frame {
    const ContentModel* model;
    State state;
  };
  const Schema& schema_;
  std::vector<Frame> stack_;
  std::vector<std::string> path_;
};

/// On-first sets registered for an element: (owner, S) in registration order.
using PunctuationRegistry = std::map<std::string, std::vector<std::pair<std::string, std::set<std::string>>>>;

/// Validates the events and injects FirstPast events. Punctuation of
/// position 0 follows the element's Start event, that of child position
/// i follows the i-th child's Start event (ahead of the child's own
/// position-0 punctuation), and sets that never became past are reported
/// just before the element's End event with position n+1. Registrations
/// under Schema::kDocument apply to the document node.
std::vector<Event> validate_and_punctuate(const std::vector<Event>& events, const Schema& schema,
                                          const PunctuationRegistry& registrations);

}  // namespace fluxq
