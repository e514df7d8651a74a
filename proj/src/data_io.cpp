#include "rdfidx/data_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rdfidx/bytes.hpp"
#include "rdfidx/rng.hpp"

namespace rdfidx {

namespace {

constexpr char kRunMagic[8] = {'R', 'D', 'F', 'R', 'U', 'N', '0', '1'};
constexpr std::size_t kRunHeader = 20;

std::uint64_t icbrt_floor(std::uint64_t n) {
  std::uint64_t c = 0;
  while ((c + 1) * (c + 1) * (c + 1) <= n) ++c;
  return c;
}

std::string pool_atom(std::uint64_t i, std::uint64_t pool) {
  const std::size_t digits = std::to_string(pool > 1 ? pool - 1 : 0).size();
  std::string num = std::to_string(i);
  return "a" + std::string(digits - num.size(), '0') + num;
}

void append_utf8(std::string& out, std::uint32_t cp) {
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

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Cursor over one N-Triples line. Every read returns false on malformed input.
struct LineReader {
  std::string_view s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && is_space(s[i])) ++i;
  }

  bool hex_escape(std::size_t digits, std::string& out) {
    if (i + digits > s.size()) return false;
    std::uint32_t cp = 0;
    for (std::size_t k = 0; k < digits; ++k) {
      const char c = s[i + k];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') cp |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') cp |= static_cast<std::uint32_t>(c - 'A' + 10);
      else return false;
    }
    if (cp > 0x10FFFF) return false;
    i += digits;
    append_utf8(out, cp);
    return true;
  }

  bool iri(std::string& out) {
    ++i;  // '<'
    while (i < s.size() && s[i] != '>') {
      if (s[i] == '\\') {
        ++i;
        if (i >= s.size()) return false;
        const char e = s[i++];
        if (e == 'u' ? !hex_escape(4, out) : e == 'U' ? !hex_escape(8, out) : true) return false;
      } else {
        out += s[i++];
      }
    }
    if (i >= s.size()) return false;
    ++i;
    return !out.empty();
  }

  bool blank(std::string& out) {
    const std::size_t start = i;
    i += 2;  // "_:"
    while (i < s.size() && !is_space(s[i])) ++i;
    // A label directly followed by the terminating dot.
    if (i > start + 2 && s[i - 1] == '.' && i == s.size()) --i;
    if (i == start + 2) return false;
    out.assign(s.substr(start, i - start));
    return true;
  }

  bool literal(std::string& out) {
    ++i;  // '"'
    while (i < s.size() && s[i] != '"') {
      if (s[i] != '\\') {
        out += s[i++];
        continue;
      }
      ++i;
      if (i >= s.size()) return false;
      const char e = s[i++];
      switch (e) {
        case 't': out += '\t'; break;
        case 'b': out += '\b'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\'': out += '\''; break;
        case '\\': out += '\\'; break;
        case 'u': if (!hex_escape(4, out)) return false; break;
        case 'U': if (!hex_escape(8, out)) return false; break;
        default: return false;
      }
    }
    if (i >= s.size()) return false;
    ++i;
    if (out.empty()) out = "\"\"";
    if (i < s.size() && s[i] == '@') {
      const std::size_t start = i++;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-')) ++i;
      if (i == start + 1) return false;
      out.append(s.substr(start, i - start));
    } else if (i + 1 < s.size() && s[i] == '^' && s[i + 1] == '^') {
      i += 2;
      if (i >= s.size() || s[i] != '<') return false;
      std::string dt;
      if (!iri(dt)) return false;
      out += "^^" + dt;
    }
    return true;
  }

  enum class Kind { Iri, Blank, Literal };

  bool term(std::string& out, Kind& kind) {
    skip_ws();
    if (i >= s.size()) return false;
    if (s[i] == '<') {
      kind = Kind::Iri;
      return iri(out);
    }
    if (s[i] == '"') {
      kind = Kind::Literal;
      return literal(out);
    }
    if (s.substr(i, 2) == "_:") {
      kind = Kind::Blank;
      return blank(out);
    }
    return false;
  }
};

std::optional<Triple> parse_line(std::string_view line, bool& blank_line) {
  LineReader r{line};
  r.skip_ws();
  blank_line = r.i >= line.size() || line[r.i] == '#';
  if (blank_line) return std::nullopt;
  std::string s, p, o;
  LineReader::Kind ks, kp, ko;
  if (!r.term(s, ks) || ks == LineReader::Kind::Literal) return std::nullopt;
  if (!r.term(p, kp) || kp != LineReader::Kind::Iri) return std::nullopt;
  if (!r.term(o, ko)) return std::nullopt;
  r.skip_ws();
  if (r.i >= line.size() || line[r.i] != '.') return std::nullopt;
  ++r.i;
  r.skip_ws();
  if (r.i < line.size() && line[r.i] != '#') return std::nullopt;
  return Triple{Atom(std::move(s)), Atom(std::move(p)), Atom(std::move(o))};
}

std::string clean_atom(const Atom& a, std::size_t max_len, std::size_t& truncated) {
  std::string bytes = a.bytes();
  std::replace(bytes.begin(), bytes.end(), '\0', '\x01');
  if (bytes.size() > max_len) {
    ++truncated;
    return truncate_utf8(bytes, max_len);
  }
  return bytes;
}

}  // namespace

std::uint64_t synthetic_pool_size(std::uint64_t n, int variant) {
  if (variant == 1) {
    // round(cbrt n) without floating point: c with (2c-1)^3 <= 8n < (2c+1)^3.
    std::uint64_t c = icbrt_floor(n);
    const std::uint64_t up = 2 * c + 1;
    if (up * up * up <= 8 * n) ++c;
    return c;
  }
  if (variant == 2) {
    std::uint64_t c = icbrt_floor(n);
    if (c * c * c < n) ++c;
    return c + 2;
  }
  throw std::invalid_argument("synthetic variant must be 1 or 2");
}

std::uint64_t synthetic_space(std::uint64_t pool, int variant) {
  if (variant == 1) return pool * pool * pool;
  return pool < 3 ? 0 : pool * (pool - 1) * (pool - 2);
}

bool synthetic_feasible(std::uint64_t n, int variant) {
  return n >= 1 && synthetic_space(synthetic_pool_size(n, variant), variant) >= n;
}

Graph gen_synthetic(const GenSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("n must be at least 1");
  const std::uint64_t pool = synthetic_pool_size(spec.n, spec.variant);
  const std::uint64_t space = synthetic_space(pool, spec.variant);
  if (pool < 1 || space < spec.n) {
    throw std::invalid_argument("atom pool of " + std::to_string(pool) + " cannot supply " +
                                std::to_string(spec.n) + " distinct triples");
  }

  Rng rng(spec.seed);
  std::vector<bool> seen(pool * pool * pool, false);
  std::vector<std::uint64_t> ids;
  ids.reserve(spec.n);
  while (ids.size() < spec.n) {
    const std::uint64_t s = rng.uniform_index(pool);
    const std::uint64_t p = rng.uniform_index(pool);
    const std::uint64_t o = rng.uniform_index(pool);
    if (spec.variant == 2 && (s == p || s == o || p == o)) continue;
    const std::uint64_t id = (s * pool + p) * pool + o;
    if (seen[id]) continue;
    seen[id] = true;
    ids.push_back(id);
  }

  std::vector<std::string> names;
  names.reserve(pool);
  for (std::uint64_t i = 0; i < pool; ++i) names.push_back(pool_atom(i, pool));
  std::sort(ids.begin(), ids.end());
  std::vector<Triple> triples;
  triples.reserve(ids.size());
  for (std::uint64_t id : ids) {
    const std::uint64_t o = id % pool;
    const std::uint64_t p = (id / pool) % pool;
    const std::uint64_t s = id / pool / pool;
    triples.push_back(Triple{Atom(names[s]), Atom(names[p]), Atom(names[o])});
  }
  return Graph(std::move(triples));
}

ParseResult parse_ntriples(std::istream& in) {
  ParseResult out;
  std::string line;
  while (std::getline(in, line)) {
    bool blank_line = false;
    auto t = parse_line(line, blank_line);
    if (t) {
      out.triples.push_back(std::move(*t));
    } else if (!blank_line) {
      ++out.skipped;
    }
  }
  return out;
}

std::string truncate_utf8(std::string_view bytes, std::size_t max_len) {
  if (bytes.size() <= max_len) return std::string(bytes);
  std::size_t cut = max_len;
  while (cut > 0 && (static_cast<unsigned char>(bytes[cut]) & 0xC0) == 0x80) --cut;
  // A budget smaller than the first code point falls back to a byte cut.
  if (cut == 0) cut = max_len;
  return std::string(bytes.substr(0, cut));
}

CleanResult clean(const std::vector<Triple>& triples, const IngestConfig& cfg) {
  if (cfg.max_atom_len < 1) throw std::invalid_argument("max_atom_len must be at least 1");
  CleanResult out;
  out.report.input = triples.size();
  std::vector<Triple> cleaned;
  cleaned.reserve(triples.size());
  for (const auto& t : triples) {
    cleaned.push_back(Triple{Atom(clean_atom(t.s, cfg.max_atom_len, out.report.truncated)),
                             Atom(clean_atom(t.p, cfg.max_atom_len, out.report.truncated)),
                             Atom(clean_atom(t.o, cfg.max_atom_len, out.report.truncated))});
  }
  out.graph = Graph(std::move(cleaned));
  out.report.output = out.graph.size();
  return out;
}

Graph sample(const std::vector<Triple>& triples, std::size_t k, std::uint64_t seed) {
  if (k >= triples.size()) return Graph(triples);
  Rng rng(seed);
  std::vector<Triple> reservoir;
  reservoir.reserve(k);
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (i < k) {
      reservoir.push_back(triples[i]);
    } else {
      const std::uint64_t j = rng.uniform_index(i + 1);
      if (j < k) reservoir[j] = triples[i];
    }
  }
  return Graph(std::move(reservoir));
}

IngestResult ingest(std::istream& in, const IngestConfig& cfg) {
  IngestResult out;
  ParseResult parsed = parse_ntriples(in);
  out.skipped = parsed.skipped;
  if (cfg.sample_size) {
    Graph picked = sample(parsed.triples, *cfg.sample_size, cfg.seed);
    out.cleaned = clean(picked.triples(), cfg);
    out.cleaned.report.input = parsed.triples.size();
  } else {
    out.cleaned = clean(parsed.triples, cfg);
  }
  return out;
}

void write_run(const std::filesystem::path& path, const Graph& g, std::uint32_t atom_width) {
  const std::size_t longest = g.max_atom_len();
  if (atom_width == 0) atom_width = static_cast<std::uint32_t>(std::max<std::size_t>(longest, 1));
  if (longest > atom_width) {
    throw std::invalid_argument("atom of " + std::to_string(longest) + " bytes exceeds atom width " +
                                std::to_string(atom_width));
  }
  std::vector<std::uint8_t> header(kRunHeader, 0);
  std::memcpy(header.data(), kRunMagic, sizeof kRunMagic);
  bytes::put_u32(header, 8, atom_width);
  bytes::put_u64(header, 12, g.size());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  std::string record(3 * static_cast<std::size_t>(atom_width), '\0');
  for (const auto& t : g) {
    std::fill(record.begin(), record.end(), '\0');
    for (Role r : kRoles) {
      const auto& a = t.at(r).bytes();
      std::memcpy(record.data() + static_cast<std::size_t>(r) * atom_width, a.data(), a.size());
    }
    out.write(record.data(), static_cast<std::streamsize>(record.size()));
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

bool is_run_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[sizeof kRunMagic] = {};
  in.read(magic, sizeof magic);
  return in && std::memcmp(magic, kRunMagic, sizeof magic) == 0;
}

Graph read_run(const std::filesystem::path& path, std::uint32_t* atom_width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> header(kRunHeader);
  in.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(header.size()));
  if (!in || std::memcmp(header.data(), kRunMagic, sizeof kRunMagic) != 0) {
    throw std::runtime_error(path.string() + " is not a run file");
  }
  const std::uint32_t width = bytes::get_u32(header, 8);
  const std::uint64_t count = bytes::get_u64(header, 12);
  if (width == 0) throw std::runtime_error(path.string() + ": zero atom width");
  if (atom_width) *atom_width = width;

  std::vector<Triple> triples;
  std::string record(3 * static_cast<std::size_t>(width), '\0');
  for (std::uint64_t k = 0; k < count; ++k) {
    in.read(record.data(), static_cast<std::streamsize>(record.size()));
    if (!in) throw std::runtime_error(path.string() + ": truncated run file");
    auto field = [&](Role r) {
      const char* base = record.data() + static_cast<std::size_t>(r) * width;
      return Atom(std::string(base, strnlen(base, width)));
    };
    triples.push_back(Triple{field(Role::Subject), field(Role::Predicate), field(Role::Object)});
  }
  return Graph(std::move(triples));
}

Graph load_graph(const std::filesystem::path& path, const IngestConfig& cfg) {
  if (is_run_file(path)) return read_run(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ingest(in, cfg).cleaned.graph;
}

// ---- query text ----

QuerySyntaxError::QuerySyntaxError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  enum Kind { Word, Var, Iri, Literal, LBrace, RBrace, Dot, Star, End } kind;
  std::string text;
  std::size_t line, column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  Token next() {
    skip();
    Token t{Token::End, "", line_, col_};
    if (i_ >= s_.size()) return t;
    const char c = s_[i_];
    if (c == '{' || c == '}' || c == '*') {
      t.kind = c == '{' ? Token::LBrace : c == '}' ? Token::RBrace : Token::Star;
      advance();
      return t;
    }
    if (c == '.' && (i_ + 1 >= s_.size() || is_space(s_[i_ + 1]) || s_[i_ + 1] == '}')) {
      t.kind = Token::Dot;
      advance();
      return t;
    }
    if (c == '<') {
      advance();
      while (i_ < s_.size() && s_[i_] != '>') t.text += advance();
      if (i_ >= s_.size()) throw QuerySyntaxError("unterminated <iri>", t.line, t.column);
      advance();
      if (t.text.empty()) throw QuerySyntaxError("empty <iri>", t.line, t.column);
      t.kind = Token::Iri;
      return t;
    }
    if (c == '"') {
      advance();
      while (i_ < s_.size() && s_[i_] != '"') {
        char ch = advance();
        if (ch == '\\') {
          if (i_ >= s_.size()) break;
          const char e = advance();
          ch = e == 'n' ? '\n' : e == 't' ? '\t' : e == 'r' ? '\r' : e;
        }
        t.text += ch;
      }
      if (i_ >= s_.size()) throw QuerySyntaxError("unterminated string", t.line, t.column);
      advance();
      if (t.text.empty()) throw QuerySyntaxError("empty string atom", t.line, t.column);
      t.kind = Token::Literal;
      return t;
    }
    while (i_ < s_.size() && !is_space(s_[i_]) && s_[i_] != '{' && s_[i_] != '}') t.text += advance();
    // "x." at the end of a pattern: the dot terminates the pattern.
    if (t.text.size() > 1 && t.text.back() == '.') {
      t.text.pop_back();
      --i_;
      --col_;
    }
    if (t.text[0] == '?') {
      t.text.erase(0, 1);
      if (t.text.empty()) throw QuerySyntaxError("variable without a name", t.line, t.column);
      t.kind = Token::Var;
    } else {
      t.kind = Token::Word;
    }
    return t;
  }

 private:
  char advance() {
    const char c = s_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip() {
    while (i_ < s_.size()) {
      if (is_space(s_[i_])) {
        advance();
      } else if (s_[i_] == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

bool keyword(const Token& t, std::string_view kw) {
  if (t.kind != Token::Word || t.text.size() != kw.size()) return false;
  for (std::size_t k = 0; k < kw.size(); ++k) {
    if (std::toupper(static_cast<unsigned char>(t.text[k])) != kw[k]) return false;
  }
  return true;
}

[[noreturn]] void fail(const Token& t, const std::string& what) {
  throw QuerySyntaxError(what, t.line, t.column);
}

bool bare_safe(const std::string& a) {
  if (a.empty() || a[0] == '?' || a[0] == '<' || a[0] == '"' || a[0] == '#' || a.back() == '.') return false;
  if (a == "*" || a == ".") return false;
  for (char c : a) {
    if (is_space(c) || c == '{' || c == '}' || c == '"') return false;
  }
  return true;
}

std::string render_term(const Term& t) {
  if (t.is_variable()) return "?" + t.var_name();
  const std::string& a = t.constant().bytes();
  if (bare_safe(a)) return a;
  std::string out = "\"";
  for (char c : a) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else if (c == '\r') {
      out += "\\r";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

}  // namespace

ParsedQuery parse_bgp(std::string_view text) {
  Lexer lex(text);
  Token t = lex.next();
  if (!keyword(t, "SELECT")) fail(t, "expected SELECT");
  std::vector<std::string> select;
  bool star = false;
  t = lex.next();
  if (t.kind == Token::Star) {
    star = true;
    t = lex.next();
  } else {
    while (t.kind == Token::Var) {
      if (std::find(select.begin(), select.end(), t.text) == select.end()) select.push_back(t.text);
      t = lex.next();
    }
    if (select.empty()) fail(t, "expected ?variable or * after SELECT");
  }
  if (!keyword(t, "WHERE")) fail(t, "expected WHERE");
  t = lex.next();
  if (t.kind != Token::LBrace) fail(t, "expected {");

  std::vector<Sap> saps;
  t = lex.next();
  while (t.kind != Token::RBrace) {
    std::vector<Term> terms;
    for (int k = 0; k < 3; ++k) {
      switch (t.kind) {
        case Token::Var: terms.push_back(Term::var(t.text)); break;
        case Token::Word:
        case Token::Iri:
        case Token::Literal: terms.push_back(Term(Atom(t.text))); break;
        default: fail(t, "expected a term");
      }
      t = lex.next();
    }
    saps.push_back(Sap{terms[0], terms[1], terms[2]});
    if (t.kind == Token::Dot) {
      t = lex.next();
    } else if (t.kind != Token::RBrace) {
      fail(t, "expected . or }");
    }
  }
  if (saps.empty()) fail(t, "empty WHERE block");
  t = lex.next();
  if (t.kind != Token::End) fail(t, "unexpected text after }");

  Bgp bgp(std::move(saps));
  const auto vars = bgp.variables();
  if (star) {
    select = vars;
  } else {
    for (const auto& v : select) {
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
        throw QuerySyntaxError("?" + v + " is selected but not used in WHERE", 1, 1);
      }
    }
  }
  return ParsedQuery{std::move(bgp), std::move(select)};
}

std::string render_bgp(const Bgp& bgp, const std::vector<std::string>& select) {
  std::ostringstream os;
  os << "SELECT";
  if (select.empty()) os << " *";
  for (const auto& v : select) os << " ?" << v;
  os << "\nWHERE {\n";
  for (std::size_t i = 0; i < bgp.size(); ++i) {
    const Sap& s = bgp[i];
    os << "  " << render_term(s.s) << ' ' << render_term(s.p) << ' ' << render_term(s.o)
       << (i + 1 < bgp.size() ? " .\n" : "\n");
  }
  os << "}\n";
  return os.str();
}

}  // namespace rdfidx
