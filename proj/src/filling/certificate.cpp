#include <istream>
#include <ostream>
#include <sstream>

#include "dehn/error.hpp"
#include "dehn/filling.hpp"

namespace dehn {

std::size_t FillingCertificate::letters() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.conjugator.size();
  return n;
}

bool verify_certificate(const GroupSpec& spec, const FillingCertificate& cert) {
  const auto& rel = spec.relators();
  Word acc;
  for (const auto& s : cert.steps) {
    if (s.relator < 0 || s.relator >= static_cast<int>(rel.size())) return false;
    if (s.sign != 1 && s.sign != -1) return false;
    for (Letter l : s.conjugator)
      if (!l.is_lazy() && !spec.valid(l)) return false;
    append_reduced(acc, inverse_word(s.conjugator));
    if (s.sign > 0) {
      append_reduced(acc, rel[s.relator]);
    } else {
      append_reduced(acc, inverse_word(rel[s.relator]));
    }
    append_reduced(acc, s.conjugator);
  }
  for (Letter l : cert.target)
    if (!spec.valid(l)) return false;
  return acc == free_reduce(cert.target);
}

void write_certificate(std::ostream& out, const GroupSpec& spec, const FillingCertificate& cert) {
  out << "# dehnlab-certificate group=" << spec.id() << " steps=" << cert.steps.size() << '\n';
  for (const auto& s : cert.steps)
    out << format_word(s.conjugator) << '\t' << s.relator << '\t' << (s.sign > 0 ? "+1" : "-1") << '\n';
}

FillingCertificate read_certificate(std::istream& in) {
  FillingCertificate cert;
  std::string line;
  long long declared = -1;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const bool terminated = !in.eof();
    if (!terminated) throw InvalidWord("line " + std::to_string(lineno) + ": missing final newline (truncated?)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("steps=");
      if (pos != std::string::npos) {
        try {
          declared = std::stoll(line.substr(pos + 6));
        } catch (const std::exception&) {
          throw InvalidWord("line " + std::to_string(lineno) + ": bad steps= header");
        }
      }
      continue;
    }
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw InvalidWord("line " + std::to_string(lineno) + ": expected conjugator<TAB>relator<TAB>sign");
    CertificateStep s;
    s.conjugator = parse_word(line.substr(0, t1));
    for (Letter l : s.conjugator)
      if (l.is_lazy()) throw InvalidWord("line " + std::to_string(lineno) + ": lazy letter in conjugator");
    const std::string idx = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string sign = line.substr(t2 + 1);
    std::size_t used = 0;
    try {
      s.relator = std::stoi(idx, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != idx.size() || s.relator < 0)
      throw InvalidWord("line " + std::to_string(lineno) + ": bad relator index '" + idx + "'");
    if (sign == "+1" || sign == "1") {
      s.sign = 1;
    } else if (sign == "-1") {
      s.sign = -1;
    } else {
      throw InvalidWord("line " + std::to_string(lineno) + ": bad sign '" + sign + "'");
    }
    cert.steps.push_back(std::move(s));
  }
  if (declared >= 0 && declared != static_cast<long long>(cert.steps.size()))
    throw InvalidWord("certificate declares " + std::to_string(declared) + " steps but holds " +
                      std::to_string(cert.steps.size()));
  return cert;
}

}  // namespace dehn
