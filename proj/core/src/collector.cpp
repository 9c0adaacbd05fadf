#include "wbfuzz/collector.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "wbfuzz/common.hpp"

namespace wbfuzz {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Control-flow keywords that look like `name (...) {` but are not functions.
bool is_reserved_head(std::string_view word) {
  static const std::set<std::string_view> reserved = {
      "if", "for", "while", "switch", "catch", "return", "sizeof", "alignof", "assert", "defined",
  };
  return reserved.count(word) > 0;
}

std::vector<std::size_t> line_starts(std::string_view text) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') starts.push_back(i + 1);
  }
  return starts;
}

int line_of(const std::vector<std::size_t>& starts, std::size_t offset) {
  auto it = std::upper_bound(starts.begin(), starts.end(), offset);
  return static_cast<int>(it - starts.begin());
}

// Walks back from `line` over contiguous '//' comment lines and returns the
// first line of that doc block. Doc comments belong to the function they
// precede, both for prompting and for keyword attribution.
int attach_doc_comment(const std::vector<std::string_view>& lines, int line /*1-based*/) {
  int first = line;
  for (int l = line - 1; l >= 1; --l) {
    std::string_view txt = trim(lines[static_cast<std::size_t>(l - 1)]);
    if (txt.rfind("//", 0) == 0) {
      first = l;
    } else {
      break;
    }
  }
  return first;
}

// Same for '#' comment lines above an indent-language def.
int attach_hash_comment(const std::vector<std::string_view>& lines, int line /*1-based*/) {
  int first = line;
  for (int l = line - 1; l >= 1; --l) {
    std::string_view txt = trim(lines[static_cast<std::size_t>(l - 1)]);
    if (txt.rfind("#", 0) == 0 && txt.rfind("#!", 0) != 0) {
      first = l;
    } else {
      break;
    }
  }
  return first;
}

struct BraceScanner {
  std::string_view text;
  std::vector<std::size_t> starts;
  std::vector<std::string_view> lines;

  std::vector<FunctionSpan> run() {
    std::vector<FunctionSpan> spans;

    enum class State { Code, LineComment, BlockComment, Str, Chr, RawStr };
    State state = State::Code;

    struct Opener {
      bool is_function = false;
      std::string name;
      std::size_t sig_offset = 0;  // start of the signature line
    };
    std::vector<Opener> stack;

    // Candidate tracking for `ident ( ... ) trailer {`.
    std::string last_ident;
    std::size_t last_ident_offset = 0;
    std::string candidate_name;
    std::size_t candidate_offset = 0;
    int paren_depth = 0;
    bool after_params = false;     // saw `ident (...)`, waiting for '{'
    bool in_init_list = false;     // saw ':' after the parameter list (ctor)
    bool in_trailer_parens = false;
    int trailer_paren_depth = 0;
    char prev_nonspace = '\0';
    std::string raw_delim;

    auto reset_candidate = [&] {
      candidate_name.clear();
      after_params = false;
      in_init_list = false;
      in_trailer_parens = false;
      trailer_paren_depth = 0;
    };

    std::size_t i = 0;
    while (i < text.size()) {
      char c = text[i];
      char next = i + 1 < text.size() ? text[i + 1] : '\0';

      switch (state) {
        case State::LineComment:
          if (c == '\n') state = State::Code;
          ++i;
          continue;
        case State::BlockComment:
          if (c == '*' && next == '/') {
            state = State::Code;
            i += 2;
            continue;
          }
          ++i;
          continue;
        case State::Str:
          if (c == '\\') { i += 2; continue; }
          if (c == '"') state = State::Code;
          ++i;
          continue;
        case State::Chr:
          if (c == '\\') { i += 2; continue; }
          if (c == '\'') state = State::Code;
          ++i;
          continue;
        case State::RawStr: {
          std::string closer = ")" + raw_delim + "\"";
          if (text.compare(i, closer.size(), closer) == 0) {
            state = State::Code;
            i += closer.size();
            continue;
          }
          ++i;
          continue;
        }
        case State::Code:
          break;
      }

      if (c == '/' && next == '/') { state = State::LineComment; i += 2; continue; }
      if (c == '/' && next == '*') { state = State::BlockComment; i += 2; continue; }
      if (c == 'R' && next == '"' && !is_ident_char(prev_nonspace)) {
        std::size_t delim_start = i + 2;
        std::size_t paren = text.find('(', delim_start);
        if (paren != std::string_view::npos && paren - delim_start <= 16) {
          raw_delim = std::string(text.substr(delim_start, paren - delim_start));
          state = State::RawStr;
          i = paren + 1;
          continue;
        }
      }
      if (c == '"') { state = State::Str; ++i; prev_nonspace = c; continue; }
      if (c == '\'') { state = State::Chr; ++i; prev_nonspace = c; continue; }

      if (is_ident_char(c)) {
        std::size_t start = i;
        while (i < text.size() && is_ident_char(text[i])) ++i;
        std::string_view word = text.substr(start, i - start);
        if (paren_depth == 0 && !after_params) {
          last_ident = std::string(word);
          last_ident_offset = start;
        }
        // Trailer keywords between ')' and '{' are fine; anything else after
        // the parameter list that is not a trailer cancels the candidate.
        if (after_params && !in_trailer_parens && !in_init_list) {
          static const std::set<std::string_view> trailers = {
              "const", "noexcept", "override", "final", "mutable", "try", "requires",
          };
          if (!trailers.count(word) && prev_nonspace != '>' && prev_nonspace != ':') {
            // allow return types after '->' (prev '>')
            reset_candidate();
            last_ident = std::string(word);
            last_ident_offset = start;
          }
        }
        prev_nonspace = text[i - 1];
        continue;
      }

      if (c == '(') {
        if (after_params) {
          in_trailer_parens = true;
          ++trailer_paren_depth;
        } else {
          if (paren_depth == 0) {
            if (!last_ident.empty() && !is_reserved_head(last_ident)) {
              candidate_name = last_ident;
              candidate_offset = last_ident_offset;
            } else {
              candidate_name.clear();
            }
          }
          ++paren_depth;
        }
        prev_nonspace = c;
        ++i;
        continue;
      }
      if (c == ')') {
        if (in_trailer_parens) {
          if (--trailer_paren_depth == 0) in_trailer_parens = false;
        } else if (paren_depth > 0) {
          if (--paren_depth == 0 && !candidate_name.empty()) {
            after_params = true;
          }
        }
        prev_nonspace = c;
        ++i;
        continue;
      }

      if (c == '{') {
        Opener opener;
        if (after_params && !in_trailer_parens && !candidate_name.empty()) {
          opener.is_function = true;
          opener.name = candidate_name;
          opener.sig_offset = starts[static_cast<std::size_t>(line_of(starts, candidate_offset) - 1)];
        }
        stack.push_back(std::move(opener));
        reset_candidate();
        last_ident.clear();
        prev_nonspace = c;
        ++i;
        continue;
      }
      if (c == '}') {
        if (!stack.empty()) {
          Opener opener = std::move(stack.back());
          stack.pop_back();
          if (opener.is_function) {
            FunctionSpan span;
            span.name = opener.name;
            int sig_line = line_of(starts, opener.sig_offset);
            int first_line = attach_doc_comment(lines, sig_line);
            span.offset_start = starts[static_cast<std::size_t>(first_line - 1)];
            span.offset_end = i + 1;
            span.line_start = first_line;
            span.line_end = line_of(starts, i);
            span.source = std::string(text.substr(span.offset_start, span.offset_end - span.offset_start));
            spans.push_back(std::move(span));
          }
        }
        reset_candidate();
        last_ident.clear();
        prev_nonspace = c;
        ++i;
        continue;
      }

      if (c == ';') {
        reset_candidate();
        last_ident.clear();
      }
      if (!std::isspace(static_cast<unsigned char>(c))) {
        if (c == ':' && after_params) in_init_list = true;
        if (c != '*' && c != '&' && c != ':' && c != '>' && c != '-' && c != '[' && c != ']' &&
            c != ',') {
          // '-' and '>' keep `-> type` trailers alive; others are common in
          // signatures. Anything exotic cancels a pending candidate.
          if (after_params && !in_trailer_parens && !in_init_list) reset_candidate();
        }
        prev_nonspace = c;
      }
      ++i;
    }

    std::stable_sort(spans.begin(), spans.end(), [](const FunctionSpan& a, const FunctionSpan& b) {
      return a.offset_start < b.offset_start;
    });
    return spans;
  }
};

std::vector<FunctionSpan> scan_brace(std::string_view source) {
  BraceScanner scanner{source, line_starts(source), split_lines(source)};
  return scanner.run();
}

std::size_t indent_of(std::string_view line) {
  std::size_t n = 0;
  for (char c : line) {
    if (c == ' ') ++n;
    else if (c == '\t') n += 8;
    else break;
  }
  return n;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::vector<FunctionSpan> scan_indent(std::string_view source) {
  std::vector<FunctionSpan> spans;
  auto lines = split_lines(source);
  auto starts = line_starts(source);

  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    std::string_view line = lines[idx];
    std::string_view body = trim(line);
    std::string_view head = body;
    if (head.rfind("async ", 0) == 0) head.remove_prefix(6);
    if (head.rfind("def ", 0) != 0) continue;
    head.remove_prefix(4);
    std::size_t name_end = 0;
    while (name_end < head.size() && is_ident_char(head[name_end])) ++name_end;
    if (name_end == 0 || name_end >= head.size() || head[name_end] != '(') continue;

    std::size_t def_indent = indent_of(line);
    std::size_t last = idx;
    for (std::size_t j = idx + 1; j < lines.size(); ++j) {
      if (is_blank(lines[j])) continue;
      if (indent_of(lines[j]) <= def_indent) break;
      last = j;
    }

    int first_line = attach_hash_comment(lines, static_cast<int>(idx + 1));
    FunctionSpan span;
    span.name = std::string(head.substr(0, name_end));
    span.line_start = first_line;
    span.line_end = static_cast<int>(last + 1);
    span.offset_start = starts[static_cast<std::size_t>(first_line - 1)];
    std::size_t end_line_start = starts[last];
    span.offset_end = end_line_start + lines[last].size();
    if (span.offset_end < source.size() && source[span.offset_end] == '\n') ++span.offset_end;
    span.source = std::string(source.substr(span.offset_start, span.offset_end - span.offset_start));
    spans.push_back(std::move(span));
  }
  return spans;
}

LanguageFamily family_for_file(const std::filesystem::path& path, const CollectOptions& options) {
  if (options.force_family.has_value()) return *options.force_family;
  auto ext = ascii_lower(path.extension().string());
  if (ext == ".py" || ext == ".pyi") return LanguageFamily::IndentDelimited;
  return LanguageFamily::BraceDelimited;
}

std::vector<std::size_t> keyword_match_offsets(std::string_view text,
                                               const std::vector<std::string>& keywords) {
  std::string lower = ascii_lower(text);
  std::set<std::size_t> offsets;
  for (const auto& kw : keywords) {
    if (kw.empty()) continue;
    std::string needle = ascii_lower(kw);
    std::size_t pos = lower.find(needle);
    while (pos != std::string::npos) {
      offsets.insert(pos);
      pos = lower.find(needle, pos + 1);
    }
  }
  return {offsets.begin(), offsets.end()};
}

OptKind classify_kind(const SutDescriptor& descriptor, std::string_view source) {
  for (const auto& kw : descriptor.pattern_keywords) {
    if (contains_ci(source, kw)) return OptKind::PatternMatcher;
  }
  for (const auto& kw : descriptor.check_keywords) {
    if (contains_ci(source, kw)) return OptKind::CheckFunction;
  }
  return OptKind::Generic;
}

int count_lines(std::string_view s) {
  if (s.empty()) return 0;
  int n = 1;
  for (char c : s) {
    if (c == '\n') ++n;
  }
  if (s.back() == '\n') --n;
  return n;
}

// Callee names referenced as `name(` in the source.
std::vector<std::string> callee_names(std::string_view source) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  std::size_t i = 0;
  while (i < source.size()) {
    if (!is_ident_char(source[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < source.size() && is_ident_char(source[i])) ++i;
    std::size_t j = i;
    while (j < source.size() && (source[j] == ' ' || source[j] == '\t')) ++j;
    if (j < source.size() && source[j] == '(') {
      std::string name(source.substr(start, i - start));
      if (!is_reserved_head(name) && seen.insert(name).second) {
        names.push_back(std::move(name));
      }
    }
  }
  return names;
}

struct RawHit {
  std::string file_label;
  std::optional<FunctionSpan> span;  // nullopt => file-level window
  int window_line = 0;               // match line for file-level reports
  std::string window_source;
};

void append_hits(std::string_view file_label, std::string_view text, LanguageFamily family,
                 const SutDescriptor& descriptor, const std::vector<FunctionSpan>& spans,
                 std::vector<RawHit>& hits) {
  auto offsets = keyword_match_offsets(text, descriptor.opt_keywords);
  if (offsets.empty()) return;

  auto starts = line_starts(text);
  auto lines = split_lines(text);

  std::set<std::pair<std::size_t, std::size_t>> seen_spans;
  std::set<int> seen_windows;

  for (std::size_t off : offsets) {
    // Innermost span containing the offset.
    const FunctionSpan* best = nullptr;
    for (const auto& span : spans) {
      if (off < span.offset_start || off >= span.offset_end) continue;
      if (best == nullptr || span.offset_start > best->offset_start) best = &span;
    }
    if (best != nullptr) {
      if (seen_spans.insert({best->offset_start, best->offset_end}).second) {
        RawHit hit;
        hit.file_label = std::string(file_label);
        hit.span = *best;
        hits.push_back(std::move(hit));
      }
      continue;
    }
    // NoEnclosingFunction: report a 40-line window around the match.
    int match_line = line_of(starts, off);
    int first = std::max(1, match_line - 19);
    if (seen_windows.insert(first).second) {
      RawHit hit;
      hit.file_label = std::string(file_label);
      hit.window_line = first;
      int last = std::min<int>(static_cast<int>(lines.size()), first + 39);
      std::string window;
      for (int l = first; l <= last; ++l) {
        window.append(lines[static_cast<std::size_t>(l - 1)]);
        window.push_back('\n');
      }
      hit.window_source = std::move(window);
      hits.push_back(std::move(hit));
    }
  }
}

std::vector<Optimization> finalize(std::vector<RawHit> hits,
                                   const std::vector<FunctionSpan>& corpus,
                                   const SutDescriptor& descriptor,
                                   const CollectOptions& options) {
  std::vector<Optimization> catalog;
  std::set<std::string> used_ids;
  for (auto& hit : hits) {
    Optimization opt;
    opt.file_path = hit.file_label;
    if (hit.span.has_value()) {
      opt.name = hit.span->name;
      opt.main_source = hit.span->source;
      opt.line_start = hit.span->line_start;
      opt.line_end = hit.span->line_end;
    } else {
      std::filesystem::path p(hit.file_label);
      opt.name = p.stem().string() + ":L" + std::to_string(hit.window_line);
      opt.main_source = hit.window_source;
      opt.line_start = hit.window_line;
      opt.line_end = hit.window_line + count_lines(hit.window_source) - 1;
    }
    opt.kind = classify_kind(descriptor, opt.main_source);
    opt.id = to_hex(fnv1a64(opt.file_path + ":" + opt.name));
    int ordinal = 2;
    while (!used_ids.insert(opt.id).second) {
      opt.id = to_hex(fnv1a64(opt.file_path + ":" + opt.name + "#" + std::to_string(ordinal++)));
    }
    attach_auxiliaries(opt, corpus, hit.span.has_value() ? options.aux_depth : 0);
    catalog.push_back(std::move(opt));
  }

  if (descriptor.max_source_lines.has_value()) {
    std::erase_if(catalog, [&](const Optimization& opt) {
      return opt.total_lines > *descriptor.max_source_lines;
    });
  }

  std::sort(catalog.begin(), catalog.end(), [](const Optimization& a, const Optimization& b) {
    if (a.file_path != b.file_path) return a.file_path < b.file_path;
    return a.line_start < b.line_start;
  });
  return catalog;
}

}  // namespace

std::string_view to_string(OptKind kind) {
  switch (kind) {
    case OptKind::CheckFunction: return "check_function";
    case OptKind::PatternMatcher: return "pattern_matcher";
    case OptKind::Generic: return "generic";
  }
  return "generic";
}

OptKind opt_kind_from_string(std::string_view s) {
  if (s == "check_function") return OptKind::CheckFunction;
  if (s == "pattern_matcher") return OptKind::PatternMatcher;
  return OptKind::Generic;
}

std::vector<FunctionSpan> scan_functions(std::string_view source, LanguageFamily family) {
  if (family == LanguageFamily::BraceDelimited) return scan_brace(source);
  return scan_indent(source);
}

std::optional<FunctionSpan> extract_function(std::string_view source, LanguageFamily family,
                                             std::size_t match_offset) {
  if (match_offset >= source.size()) {
    throw std::out_of_range("extract_function: match_offset outside source");
  }
  auto spans = scan_functions(source, family);
  const FunctionSpan* best = nullptr;
  for (const auto& span : spans) {
    if (match_offset < span.offset_start || match_offset >= span.offset_end) continue;
    if (best == nullptr || span.offset_start > best->offset_start) best = &span;
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

Optimization& attach_auxiliaries(Optimization& opt, const std::vector<FunctionSpan>& corpus,
                                 int depth) {
  opt.aux_sources.clear();

  std::map<std::string, const FunctionSpan*> by_name;
  for (const auto& span : corpus) {
    by_name.emplace(span.name, &span);  // first definition wins
  }

  std::set<std::string> included{opt.name};
  std::vector<std::string> frontier{opt.main_source};
  for (int hop = 0; hop < depth && !frontier.empty(); ++hop) {
    std::vector<std::string> next;
    for (const auto& body : frontier) {
      for (const auto& callee : callee_names(body)) {
        if (included.count(callee)) continue;
        auto it = by_name.find(callee);
        if (it == by_name.end()) continue;
        included.insert(callee);
        opt.aux_sources.push_back({callee, it->second->source});
        next.push_back(it->second->source);
      }
    }
    frontier = std::move(next);
  }

  opt.total_lines = count_lines(opt.main_source);
  for (const auto& aux : opt.aux_sources) {
    opt.total_lines += count_lines(aux.source);
  }
  return opt;
}

std::vector<Optimization> collect_text(std::string_view file_label, std::string_view text,
                                       const SutDescriptor& descriptor, CollectOptions options) {
  LanguageFamily family = options.force_family.value_or(LanguageFamily::BraceDelimited);
  auto spans = scan_functions(text, family);
  std::vector<RawHit> hits;
  append_hits(file_label, text, family, descriptor, spans, hits);
  return finalize(std::move(hits), spans, descriptor, options);
}

std::vector<Optimization> collect(const SutDescriptor& descriptor, CollectOptions options,
                                  std::vector<std::string>* warnings) {
  descriptor.validate();

  auto warn = [&](std::string msg) {
    if (warnings != nullptr) warnings->push_back(std::move(msg));
  };

  struct FileEntry {
    std::string label;
    std::string text;
    LanguageFamily family;
  };
  std::vector<FileEntry> files;

  for (const auto& root : descriptor.source_roots) {
    std::error_code ec;
    auto status = std::filesystem::status(root, ec);
    if (ec || !std::filesystem::is_directory(status)) {
      throw CollectError("unreadable source root: " + root.string());
    }
    std::vector<std::filesystem::path> paths;
    for (auto it = std::filesystem::recursive_directory_iterator(root, ec);
         !ec && it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
      if (it->is_regular_file(ec)) paths.push_back(it->path());
    }
    if (ec) {
      throw CollectError("error walking source root " + root.string() + ": " + ec.message());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
      std::string text;
      try {
        text = read_text_file(path);
      } catch (const std::exception& e) {
        warn(std::string("skipping unreadable file: ") + e.what());
        continue;
      }
      if (text.find('\0') != std::string::npos) {
        warn("skipping binary file: " + path.string());
        continue;
      }
      std::error_code rel_ec;
      auto rel = std::filesystem::relative(path, root, rel_ec);
      FileEntry entry;
      entry.label = (rel_ec || rel.empty()) ? path.string() : rel.generic_string();
      entry.text = std::move(text);
      entry.family = family_for_file(path, options);
      files.push_back(std::move(entry));
    }
  }

  // Global auxiliary corpus across every scanned file.
  std::vector<FunctionSpan> corpus;
  std::vector<std::pair<const FileEntry*, std::vector<FunctionSpan>>> per_file_spans;
  for (const auto& entry : files) {
    auto spans = scan_functions(entry.text, entry.family);
    corpus.insert(corpus.end(), spans.begin(), spans.end());
    per_file_spans.emplace_back(&entry, std::move(spans));
  }

  std::vector<RawHit> hits;
  for (const auto& [entry, spans] : per_file_spans) {
    append_hits(entry->label, entry->text, entry->family, descriptor, spans, hits);
  }
  return finalize(std::move(hits), corpus, descriptor, options);
}

void write_catalog(const std::filesystem::path& path, const std::vector<Optimization>& catalog) {
  std::string out;
  for (const auto& opt : catalog) {
    ordered_json rec;
    rec["id"] = opt.id;
    rec["name"] = opt.name;
    rec["kind"] = std::string(to_string(opt.kind));
    rec["file"] = opt.file_path;
    rec["line_start"] = opt.line_start;
    rec["line_end"] = opt.line_end;
    rec["total_lines"] = opt.total_lines;
    rec["main_source"] = opt.main_source;
    ordered_json aux = ordered_json::array();
    for (const auto& a : opt.aux_sources) {
      aux.push_back(ordered_json{{"name", a.name}, {"source", a.source}});
    }
    rec["aux"] = std::move(aux);
    out += rec.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<Optimization> read_catalog(const std::filesystem::path& path) {
  std::vector<Optimization> catalog;
  std::string text = read_text_file(path);
  for (auto line : split_lines(text)) {
    if (trim(line).empty()) continue;
    ordered_json rec = ordered_json::parse(line);
    Optimization opt;
    opt.id = rec.at("id").get<std::string>();
    opt.name = rec.at("name").get<std::string>();
    opt.kind = opt_kind_from_string(rec.at("kind").get<std::string>());
    opt.file_path = rec.at("file").get<std::string>();
    opt.line_start = rec.at("line_start").get<int>();
    opt.line_end = rec.at("line_end").get<int>();
    opt.total_lines = rec.at("total_lines").get<int>();
    opt.main_source = rec.at("main_source").get<std::string>();
    for (const auto& a : rec.at("aux")) {
      opt.aux_sources.push_back({a.at("name").get<std::string>(), a.at("source").get<std::string>()});
    }
    catalog.push_back(std::move(opt));
  }
  return catalog;
}

}  // namespace wbfuzz
