#pragma once

// Schemas, queries and expected FluX forms of the bibliography examples.
// Expected FluX is written in the handler form the rewriter produces:
// literal output before or after a stream block appears as its own
// on-first handler.

namespace fluxq::fixtures {

// ---- DTDs ------------------------------------------------------------------

inline constexpr const char* kWeakBibDtd = R"(
<!ELEMENT bib (book)*>
<!ELEMENT book (title|author)*>
<!ELEMENT title (#PCDATA)>
<!ELEMENT author (#PCDATA)>
)";

inline constexpr const char* kOrderedBibDtd = R"(
<!ELEMENT bib (book)*>
<!ELEMENT book (title,(author+|editor+),publisher,price)>
<!ELEMENT title (#PCDATA)>
<!ELEMENT author (#PCDATA)>
<!ELEMENT editor (#PCDATA)>
<!ELEMENT publisher (#PCDATA)>
<!ELEMENT price (#PCDATA)>
)";

inline constexpr const char* kPriceBibDtd = R"(
<!ELEMENT bib (book)*>
<!ELEMENT book ((title|author)*,price)>
<!ELEMENT title (#PCDATA)>
<!ELEMENT author (#PCDATA)>
<!ELEMENT price (#PCDATA)>
)";

inline constexpr const char* kAuthorsFirstDtd = R"(
<!ELEMENT bib (book)*>
<!ELEMENT book (author*,title*)>
<!ELEMENT title (#PCDATA)>
<!ELEMENT author (#PCDATA)>
)";

inline constexpr const char* kUnorderedQ1Dtd = R"(
<!ELEMENT bib (book)*>
<!ELEMENT book (title|publisher|year)*>
<!ELEMENT title (#PCDATA)>
<!ELEMENT publisher (#PCDATA)>
<!ELEMENT year (#PCDATA)>
)";

// Publisher and year precede every title.
inline constexpr const char* kOrderedQ1Dtd = R"(
<!ELEMENT bib (book)*>
<!ELEMENT book ((publisher|year)*,title*)>
<!ELEMENT title (#PCDATA)>
<!ELEMENT publisher (#PCDATA)>
<!ELEMENT year (#PCDATA)>
)";

inline constexpr const char* kUnorderedJoinDtd = R"(
<!ELEMENT bib (book|article)*>
<!ELEMENT book (title,(author+|editor+),publisher)>
<!ELEMENT article (title,author+,journal)>
<!ELEMENT title (#PCDATA)>
<!ELEMENT author (#PCDATA)>
<!ELEMENT editor (#PCDATA)>
<!ELEMENT publisher (#PCDATA)>
<!ELEMENT journal (#PCDATA)>
)";

inline constexpr const char* kOrderedJoinDtd = R"(
<!ELEMENT bib (book*,article*)>
<!ELEMENT book (title,(author+|editor+),publisher)>
<!ELEMENT article (title,author+,journal)>
<!ELEMENT title (#PCDATA)>
<!ELEMENT author (#PCDATA)>
<!ELEMENT editor (#PCDATA)>
<!ELEMENT publisher (#PCDATA)>
<!ELEMENT journal (#PCDATA)>
)";

// ---- queries ---------------------------------------------------------------

// Titles and authors per book.
inline constexpr const char* kXmpQ3 = R"(
<results>
{ for $b in $ROOT/bib/book return
  <result> { $b/title } { $b/author } </result> }
</results>
)";

// Addison-Wesley books after 1991.
inline constexpr const char* kXmpQ1 = R"(
<bib>
{ for $b in $ROOT/bib/book
  where $b/publisher = "Addison-Wesley" and $b/year > 1991
  return <book> {$b/year} {$b/title} </book> }
</bib>
)";

inline constexpr const char* kXmpQ1Normal = R"(
<bib>
{ for $bib in $ROOT/bib return
  { for $b in $bib/book return
    { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then <book> }
    { for $year in $b/year return
      { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then {$year} } }
    { for $title in $b/title return
      { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then {$title} } }
    { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then </book> } } }
</bib>
)";

// Title/author pairs (already normal).
inline constexpr const char* kXmpQ2Normal = R"(
<results>
{ for $bib in $ROOT/bib return
  { for $b in $bib/book return
    { for $t in $b/title return
      { for $a in $b/author return
        <result> {$t} {$a} </result> } } } }
</results>
)";

// Authors of articles coauthored by book editors.
inline constexpr const char* kJoinQ3 = R"(
<results>
{ for $bib in $ROOT/bib return
  { for $article in $bib/article return
    { for $book in $bib/book
      where $article/author = $book/editor return
        { <result> {$article/author} </result> } } } }
</results>
)";

// ---- expected FluX ---------------------------------------------------------

inline constexpr const char* kXmpQ3WeakFlux = R"(
{ps $ROOT:
  on-first past() return <results>;
  on bib as $bib return
    {ps $bib: on book as $b return
      {ps $b:
        on-first past() return <result>;
        on title as $t return {$t};
        on-first past(title,author) return
          { for $a in $b/author return {$a} };
        on-first past(title,author) return </result> } };
  on-first past(bib) return </results> }
)";

inline constexpr const char* kXmpQ3OrderedFlux = R"(
{ps $ROOT:
  on-first past() return <results>;
  on bib as $bib return
    {ps $bib: on book as $b return
      {ps $b:
        on-first past() return <result>;
        on title as $t return {$t};
        on author as $a return {$a};
        on-first past(title,author) return </result> } };
  on-first past(bib) return </results> }
)";

// Listings with literal text around the stream block, as a person would
// write them.
inline constexpr const char* kXmpQ3WeakSugared = R"(
<results>
{ process-stream $ROOT: on bib as $bib return
  { process-stream $bib: on book as $book return
    <result>
    { process-stream $book:
      on title as $t return {$t};
      on-first past(title,author) return
        { for $a in $book/author return {$a} } }
    </result> } }
</results>
)";

inline constexpr const char* kXmpQ3OrderedSugared = R"(
<results>
{ process-stream $ROOT: on bib as $bib return
  { process-stream $bib: on book as $book return
    <result>
    { process-stream $book:
      on title as $t return {$t};
      on author as $a return {$a} }
    </result> } }
</results>
)";

// The weak-DTD listing with $book/author replaced by $book/price.
inline constexpr const char* kPriceVariantSugared = R"(
<results>
{ process-stream $ROOT: on bib as $bib return
  { process-stream $bib: on book as $book return
    <result>
    { process-stream $book:
      on title as $t return {$t};
      on-first past(title,author) return
        { for $a in $book/price return {$a} } }
    </result> } }
</results>
)";

inline constexpr const char* kF2 = R"(
{ps $ROOT:
  on-first past() return <results>;
  on bib as $bib return
    {ps $bib: on book as $b return
      {ps $b: on-first past(author,title) return
        { for $t in $b/title return
          { for $a in $b/author return
            <result> {$t} {$a} </result> } } } };
  on-first past(bib) return </results> }
)";

inline constexpr const char* kF2Prime = R"(
{ps $ROOT:
  on-first past() return <results>;
  on bib as $bib return
    {ps $bib: on book as $b return
      {ps $b: on title as $t return
        {ps $t: on-first past(*) return
          { for $a in $b/author return
            <result> {$t} {$a} </result> } } } };
  on-first past(bib) return </results> }
)";

inline constexpr const char* kF1 = R"(
{ps $ROOT:
  on-first past() return <bib>;
  on bib as $bib return
    {ps $bib: on book as $b return
      {ps $b:
        on-first past(publisher,year) return
          { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then <book> };
        on-first past(publisher,year) return
          { for $year in $b/year return
            { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then {$year} } };
        on-first past(publisher,year,title) return
          { for $title in $b/title return
            { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then {$title} } };
        on-first past(publisher,year,title) return
          { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then </book> } } };
  on-first past(bib) return </bib> }
)";

inline constexpr const char* kF1Prime = R"(
{ps $ROOT:
  on-first past() return <bib>;
  on bib as $bib return
    {ps $bib: on book as $b return
      {ps $b:
        on-first past(publisher,year) return
          { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then <book> };
        on-first past(publisher,year) return
          { for $year in $b/year return
            { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then {$year} } };
        on title as $title return
          { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then {$title} };
        on-first past(publisher,year,title) return
          { if $b/publisher = "Addison-Wesley" and $b/year > 1991 then </book> } } };
  on-first past(bib) return </bib> }
)";

inline constexpr const char* kF3 = R"(
{ps $ROOT:
  on-first past() return <results>;
  on bib as $bib return
    {ps $bib: on-first past(book,article) return
      { for $article in $bib/article return
        { for $book in $bib/book return
          { if $article/author = $book/editor then <result> }
          { for $author in $article/author return
            { if $article/author = $book/editor then {$author} } }
          { if $article/author = $book/editor then </result> } } } };
  on-first past(bib) return </results> }
)";

inline constexpr const char* kF3Prime = R"(
{ps $ROOT:
  on-first past() return <results>;
  on bib as $bib return
    {ps $bib: on article as $article return
      {ps $article: on-first past(author) return
        { for $book in $bib/book return
          { if $article/author = $book/editor then <result> }
          { for $author in $article/author return
            { if $article/author = $book/editor then {$author} } }
          { if $article/author = $book/editor then </result> } } } };
  on-first past(bib) return </results> }
)";

// Publishers whose CEO has written articles.
inline constexpr const char* kCeoFlux = R"(
{ ps $ROOT: on bib as $bib return
  { ps $bib: on article as $article return
    { ps $article: on-first past(author) return
      { for $book in $bib/book return
        { for $p in $book/publisher return
          { if $article/author = $book/publisher/ceo
            then {$p} } } } } } }
)";

inline constexpr const char* kCeoDtd = R"(
<!ELEMENT bib (book*,article*)>
<!ELEMENT book (title,publisher)>
<!ELEMENT publisher (name,ceo)>
<!ELEMENT article (title,author+)>
<!ELEMENT title (#PCDATA)>
<!ELEMENT name (#PCDATA)>
<!ELEMENT ceo (#PCDATA)>
<!ELEMENT author (#PCDATA)>
)";

}  // namespace fluxq::fixtures
