#include <algorithm>
#include <cctype>
#include <charconv>

#include "vapep/mipgen.hpp"

namespace vapep {

namespace {

constexpr std::size_t kLineWidth = 100;

/// Accumulates space-separated pieces, breaking lines before kLineWidth.
class LineWriter {
 public:
  explicit LineWriter(std::string& out) : out_(out) {}

  void start(const std::string& head) {
    out_ += head;
    col_ = head.size();
  }
  void piece(const std::string& p) {
    if (col_ + 1 + p.size() > kLineWidth && col_ > 4) {
      out_ += "\n   ";
      col_ = 3;
    }
    out_ += ' ';
    out_ += p;
    col_ += 1 + p.size();
  }
  void end() { out_ += '\n'; }

 private:
  std::string& out_;
  std::size_t col_ = 0;
};

void write_terms(LineWriter& w, const Formulation& f, const std::vector<Term>& terms) {
  bool first = true;
  for (const Term& t : terms) {
    const std::string& name = f.variables()[t.var].name;
    const Weight mag = t.coef < 0 ? -t.coef : t.coef;
    std::string p;
    if (t.coef < 0) {
      p = "- ";
    } else if (!first) {
      p = "+ ";
    }
    if (mag != 1) p += std::to_string(mag) + " ";
    p += name;
    w.piece(p);
    first = false;
  }
}

const char* sense_text(Sense s) { return s == Sense::le ? "<=" : s == Sense::eq ? "=" : ">="; }

std::vector<std::size_t> sorted_by_name(const Formulation& f, VarKind kind) {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < f.variables().size(); ++i) {
    if (f.variables()[i].kind == kind) ids.push_back(i);
  }
  std::sort(ids.begin(), ids.end(),
            [&](std::size_t a, std::size_t b) { return f.variables()[a].name < f.variables()[b].name; });
  return ids;
}

}  // namespace

std::string export_lp(const Formulation& f) {
  std::string out;
  LineWriter w(out);
  out += "Minimize\n";
  w.start(" obj:");
  write_terms(w, f, f.objective());
  w.end();

  out += "Subject To\n";
  for (const auto& row : f.constraints()) {
    w.start(" " + row.name + ":");
    write_terms(w, f, row.terms);
    w.piece(sense_text(row.sense));
    w.piece(std::to_string(row.rhs));
    w.end();
  }

  out += "Bounds\n";
  for (std::size_t id : sorted_by_name(f, VarKind::continuous)) {
    const Variable& v = f.variables()[id];
    if (v.upper) {
      out += " " + std::to_string(v.lower) + " <= " + v.name + " <= " + std::to_string(*v.upper) + "\n";
    } else {
      out += " " + v.name + " >= " + std::to_string(v.lower) + "\n";
    }
  }

  const auto binaries = sorted_by_name(f, VarKind::binary);
  if (!binaries.empty()) {
    out += "Binary\n";
    w.start("");
    for (std::size_t id : binaries) w.piece(f.variables()[id].name);
    w.end();
  }
  out += "End\n";
  return out;
}

namespace {

enum class Section { none, objective, rows, bounds, binary, done };

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

std::optional<Section> section_of(const std::string& trimmed) {
  const std::string l = lower(trimmed);
  if (l == "minimize" || l == "minimum" || l == "min") return Section::objective;
  if (l == "maximize" || l == "maximum" || l == "max") throw DomainError("lp: only minimisation models are supported");
  if (l == "subject to" || l == "such that" || l == "st" || l == "s.t.") return Section::rows;
  if (l == "bounds" || l == "bound") return Section::bounds;
  if (l == "binary" || l == "binaries" || l == "bin") return Section::binary;
  if (l == "general" || l == "generals" || l == "gen") throw DomainError("lp: general integer sections are not supported");
  if (l == "end") return Section::done;
  return std::nullopt;
}

bool is_name_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || std::string_view("_.[]{}!\"#$%&()/,;?@'`|~^").find(ch) !=
                                                             std::string_view::npos;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char ch = line[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (ch == ':' || ch == '+' || ch == '-') {
      out.emplace_back(1, ch);
      ++i;
    } else if (ch == '<' || ch == '>' || ch == '=') {
      std::size_t j = i;
      while (j < line.size() && (line[j] == '<' || line[j] == '>' || line[j] == '=')) ++j;
      std::string op(line.substr(i, j - i));
      if (op == "=<" || op == "<") op = "<=";
      if (op == "=>" || op == ">") op = ">=";
      if (op != "<=" && op != ">=" && op != "=") throw DomainError("lp: bad operator '" + op + "'");
      out.push_back(op);
      i = j;
    } else if (is_name_char(ch)) {
      std::size_t j = i;
      while (j < line.size() && is_name_char(line[j])) ++j;
      out.emplace_back(line.substr(i, j - i));
      i = j;
    } else {
      throw DomainError(std::string("lp: unexpected character '") + ch + "'");
    }
  }
  return out;
}

bool is_number(const std::string& t) { return !t.empty() && std::all_of(t.begin(), t.end(), ::isdigit); }

bool is_sense(const std::string& t) { return t == "<=" || t == ">=" || t == "="; }

bool is_infinity(const std::string& t) {
  const std::string l = lower(t);
  return l == "inf" || l == "infinity";
}

Weight to_weight(const std::string& t) {
  Weight v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) throw DomainError("lp: bad integer '" + t + "'");
  return v;
}

class Parser {
 public:
  Formulation run(std::string_view text) {
    Section section = Section::none;
    std::size_t pos = 0;
    while (pos <= text.size() && section != Section::done) {
      const std::size_t nl = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (const auto bs = line.find('\\'); bs != std::string_view::npos) line = line.substr(0, bs);
      std::string trimmed(line);
      trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
      trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
      if (trimmed.empty()) continue;
      if (const auto s = section_of(trimmed)) {
        flush(section);
        section = *s;
        continue;
      }
      auto toks = tokenize(trimmed);
      switch (section) {
        case Section::none:
          throw DomainError("lp: content before the objective section");
        case Section::objective:
        case Section::rows:
          stream_.insert(stream_.end(), toks.begin(), toks.end());
          break;
        case Section::bounds:
          bound_line(toks);
          break;
        case Section::binary:
          for (const auto& name : toks) make_binary(name);
          break;
        case Section::done:
          break;
      }
      if (pos > text.size()) break;
    }
    flush(section);
    if (section != Section::done) throw DomainError("lp: missing End");
    return std::move(f_);
  }

 private:
  std::size_t var(const std::string& name) {
    if (is_number(name) || is_sense(name)) throw DomainError("lp: expected a variable, got '" + name + "'");
    if (auto id = f_.find(name)) return *id;
    return f_.add_variable(name, VarKind::continuous, 0);
  }

  void make_binary(const std::string& name) {
    const std::size_t id = var(name);
    auto& v = f_.variables()[id];
    v.kind = VarKind::binary;
    v.lower = 0;
    v.upper = 1;
  }

  /// Reads "[+|-]* [coef] name" terms from stream_ starting at i.
  std::vector<Term> terms(std::size_t& i, bool stop_at_sense) {
    std::vector<Term> out;
    while (i < stream_.size()) {
      if (stop_at_sense && is_sense(stream_[i])) break;
      Weight sign = 1;
      bool had_sign = false;
      while (i < stream_.size() && (stream_[i] == "+" || stream_[i] == "-")) {
        if (stream_[i] == "-") sign = -sign;
        had_sign = true;
        ++i;
      }
      if (i >= stream_.size()) throw DomainError("lp: dangling sign");
      Weight coef = 1;
      if (is_number(stream_[i])) {
        coef = to_weight(stream_[i]);
        ++i;
      }
      if (i >= stream_.size()) throw DomainError("lp: coefficient without variable");
      if (!had_sign && !out.empty()) throw DomainError("lp: missing operator before '" + stream_[i] + "'");
      out.push_back(Term{var(stream_[i]), sign * coef});
      ++i;
    }
    return out;
  }

  void flush(Section section) {
    if (section == Section::objective) {
      std::size_t i = 0;
      if (stream_.size() >= 2 && stream_[1] == ":") i = 2;
      for (Term t : terms(i, false)) f_.add_objective(t.var, t.coef);
    } else if (section == Section::rows) {
      std::size_t i = 0;
      while (i < stream_.size()) {
        LinearConstraint row;
        if (i + 1 < stream_.size() && stream_[i + 1] == ":") {
          row.name = stream_[i];
          i += 2;
        } else {
          row.name = "R" + std::to_string(f_.constraints().size() + 1);
        }
        row.terms = terms(i, true);
        if (i >= stream_.size()) throw DomainError("lp: row " + row.name + " has no sense");
        const std::string s = stream_[i++];
        row.sense = s == "<=" ? Sense::le : s == "=" ? Sense::eq : Sense::ge;
        Weight sign = 1;
        while (i < stream_.size() && (stream_[i] == "+" || stream_[i] == "-")) {
          if (stream_[i] == "-") sign = -sign;
          ++i;
        }
        if (i >= stream_.size() || !is_number(stream_[i])) throw DomainError("lp: row " + row.name + " has no rhs");
        row.rhs = sign * to_weight(stream_[i++]);
        f_.add_constraint(std::move(row));
      }
    }
    stream_.clear();
  }

  /// One bound value: "[+|-] number" or "[+|-] inf". Returns nullopt for +inf.
  std::optional<Weight> bound_value(const std::vector<std::string>& t, std::size_t& i) {
    Weight sign = 1;
    while (i < t.size() && (t[i] == "+" || t[i] == "-")) {
      if (t[i] == "-") sign = -sign;
      ++i;
    }
    if (i >= t.size()) throw DomainError("lp: truncated bound");
    if (is_infinity(t[i])) {
      ++i;
      if (sign < 0) throw DomainError("lp: negative infinite bounds are not supported");
      return std::nullopt;
    }
    if (!is_number(t[i])) throw DomainError("lp: bad bound value '" + t[i] + "'");
    return sign * to_weight(t[i++]);
  }

  void set_bound(std::size_t id, const std::string& sense, std::optional<Weight> value, bool var_on_left) {
    auto& v = f_.variables()[id];
    const bool lower_bound = (sense == ">=") == var_on_left;
    if (sense == "=") {
      if (!value) throw DomainError("lp: variable fixed at infinity");
      v.lower = *value;
      v.upper = value;
    } else if (lower_bound) {
      if (!value) throw DomainError("lp: infinite lower bound");
      v.lower = *value;
    } else {
      v.upper = value;
    }
  }

  void bound_line(const std::vector<std::string>& t) {
    std::size_t i = 0;
    const bool starts_with_value = t[0] == "+" || t[0] == "-" || is_number(t[0]) || is_infinity(t[0]);
    if (starts_with_value) {
      const auto left = bound_value(t, i);
      if (i + 1 >= t.size() || !is_sense(t[i])) throw DomainError("lp: malformed bound");
      const std::string s1 = t[i++];
      const std::size_t id = var(t[i++]);
      set_bound(id, s1, left, false);
      if (i < t.size()) {
        if (!is_sense(t[i])) throw DomainError("lp: malformed bound");
        const std::string s2 = t[i++];
        set_bound(id, s2, bound_value(t, i), true);
      }
    } else {
      const std::size_t id = var(t[i++]);
      if (i < t.size() && lower(t[i]) == "free") throw DomainError("lp: free variables are not supported");
      if (i >= t.size() || !is_sense(t[i])) throw DomainError("lp: malformed bound");
      const std::string s = t[i++];
      set_bound(id, s, bound_value(t, i), true);
    }
    if (i != t.size()) throw DomainError("lp: trailing tokens in bound");
  }

  Formulation f_;
  std::vector<std::string> stream_;
};

}  // namespace

Formulation parse_lp(std::string_view text) { return Parser().run(text); }

}  // namespace vapep
