#include "hjt/certificate.hpp"

#include <cstdio>

#include "hjt/error.hpp"

namespace hjt {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Witness:
      return "WITNESS";
    case Outcome::Exhausted:
      return "EXHAUSTED";
    case Outcome::Unresolved:
      return "UNRESOLVED";
  }
  return "UNRESOLVED";
}

Outcome parse_outcome(std::string_view text) {
  if (text == "WITNESS") return Outcome::Witness;
  if (text == "EXHAUSTED") return Outcome::Exhausted;
  if (text == "UNRESOLVED") return Outcome::Unresolved;
  throw InputError("unknown outcome `" + std::string(text) + "`");
}

std::string serialize_certificate(const Certificate& cert) {
  for (const auto* field : {&cert.command, &cert.config_hash}) {
    if (field->find('\n') != std::string::npos) throw PreconditionError("certificate field contains a newline");
  }
  std::string out = "BEGIN CERT\n";
  out += "command " + cert.command + "\n";
  out += "config-hash " + cert.config_hash + "\n";
  out += "outcome " + to_string(cert.outcome) + "\n";
  out += std::string("validated ") + (cert.validated ? "yes" : "no") + "\n";
  for (const auto& [name, value] : cert.stats) out += "stat " + name + " " + value + "\n";
  for (const auto& n : cert.notes) out += "note " + n + "\n";
  out += "BEGIN PAYLOAD\n";
  for (const auto& line : cert.payload) {
    if (line == "END PAYLOAD" || line.find('\n') != std::string::npos) {
      throw PreconditionError("payload line would break the certificate framing");
    }
    out += line + "\n";
  }
  out += "END PAYLOAD\n";
  out += "END CERT\n";
  return out;
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) throw ParseError("certificate does not end with a newline", line_no_ + 1);
    line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_no_;
    return true;
  }
  int line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

std::string_view field(std::string_view line, std::string_view key, int line_no) {
  if (line.size() <= key.size() || line.substr(0, key.size()) != key || line[key.size()] != ' ') {
    throw ParseError("expected `" + std::string(key) + " ...`", line_no, 1);
  }
  return line.substr(key.size() + 1);
}

}  // namespace

Certificate parse_certificate(std::string_view text) {
  LineReader in(text);
  std::string_view line;
  auto need = [&](const char* what) {
    if (!in.next(line)) throw ParseError(std::string("missing ") + what, in.line_no() + 1);
  };
  need("`BEGIN CERT`");
  if (line != "BEGIN CERT") throw ParseError("expected `BEGIN CERT`", in.line_no(), 1);
  Certificate cert;
  need("command");
  cert.command = std::string(field(line, "command", in.line_no()));
  need("config-hash");
  cert.config_hash = std::string(field(line, "config-hash", in.line_no()));
  need("outcome");
  try {
    cert.outcome = parse_outcome(field(line, "outcome", in.line_no()));
  } catch (const InputError& e) {
    throw ParseError(e.what(), in.line_no(), 9);
  }
  need("validated");
  const auto v = field(line, "validated", in.line_no());
  if (v != "yes" && v != "no") throw ParseError("validated must be yes or no", in.line_no(), 11);
  cert.validated = v == "yes";
  while (true) {
    need("`BEGIN PAYLOAD`");
    if (line == "BEGIN PAYLOAD") break;
    if (line.rfind("stat ", 0) == 0) {
      const auto rest = line.substr(5);
      const auto gap = rest.rfind(' ');
      if (gap == std::string_view::npos || gap == 0) throw ParseError("stat needs a name and a value", in.line_no(), 6);
      cert.stats.emplace_back(std::string(rest.substr(0, gap)), std::string(rest.substr(gap + 1)));
    } else if (line.rfind("note ", 0) == 0) {
      cert.notes.emplace_back(line.substr(5));
    } else {
      throw ParseError("unexpected header line", in.line_no(), 1);
    }
  }
  while (true) {
    need("`END PAYLOAD`");
    if (line == "END PAYLOAD") break;
    cert.payload.emplace_back(line);
  }
  need("`END CERT`");
  if (line != "END CERT") throw ParseError("expected `END CERT`", in.line_no(), 1);
  if (in.next(line)) throw ParseError("text after `END CERT`", in.line_no(), 1);
  return cert;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace hjt
