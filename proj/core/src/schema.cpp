#include "fluxq/schema.hpp"

#include "fluxq/error.hpp"

namespace fluxq {

namespace {

std::shared_ptr<const ContentModel> compile_model(const std::string& element, const RegExpr& expr,
                                                  bool text_only) {
  auto m = std::make_shared<ContentModel>();
  m->element = element;
  m->expr = expr;
  m->text_only = text_only;
  try {
    m->automaton = GlushkovAutomaton::build(expr);
  } catch (const NotOneUnambiguous& e) {
    throw NotOneUnambiguous("element '" + element + "': " + e.what());
  }
  m->ord = OrdRelation(m->automaton);
  return m;
}

}  // namespace

Schema::Schema(Dtd dtd) : dtd_(std::move(dtd)) {
  for (const auto& name : dtd_.order) {
    const auto& decl = dtd_.elements.at(name);
    models_.emplace(name, compile_model(name, decl.model, decl.text_only));
  }
  document_ = compile_model(kDocument, RegExpr::atom(dtd_.root), false);
}

const ContentModel* Schema::find(const std::string& element) const {
  if (element == kDocument) return document_.get();
  auto it = models_.find(element);
  return it == models_.end() ? nullptr : it->second.get();
}

const ContentModel& Schema::model(const std::string& element) const {
  const ContentModel* m = find(element);
  if (!m) throw UnknownElement("element '" + element + "' is not declared in the DTD");
  return *m;
}

Schema load_schema(const std::string& dtd_text, const DtdOptions& options) {
  return Schema(parse_dtd(dtd_text, options));
}

}  // namespace fluxq
