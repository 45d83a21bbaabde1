#include "spreadlab/cache.hpp"

#include <boost/crc.hpp>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spreadlab/errors.hpp"

namespace spreadlab {

namespace fs = std::filesystem;

namespace {

std::uint32_t crc_of(const std::string& s) {
  boost::crc_32_type crc;
  crc.process_bytes(s.data(), s.size());
  return crc.checksum();
}

std::string header() { return "spreadlab-cache " + std::to_string(ClassCache::kFormatVersion); }

}  // namespace

ClassCache::ClassCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path ClassCache::default_dir() {
  if (const char* d = std::getenv("SPREADLAB_CACHE"); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return fs::path(x) / "spreadlab";
  if (const char* h = std::getenv("HOME"); h && *h) return fs::path(h) / ".cache" / "spreadlab";
  return fs::path(".spreadlab-cache");
}

fs::path ClassCache::path_for(const Group& G) const {
  return dir_ / ("v" + std::to_string(kFormatVersion) + "-" + G.digest() + ".classes");
}

std::string ClassCache::serialize(const Group& G) {
  std::ostringstream os;
  os << header() << "\n";
  os << "digest " << G.digest() << "\n";
  os << "degree " << G.degree() << "\n";
  os << "order " << G.order() << "\n";
  const auto& ch = G.chain();
  os << "base";
  for (auto b : ch.base()) os << " " << b + 1;
  os << "\norbits";
  for (auto l : ch.orbit_lengths()) os << " " << l;
  os << "\nclasses " << G.classes().size() << "\n";
  for (const auto& c : G.classes())
    os << c.order << " " << c.size << " " << c.centralizer_order << " " << c.rep.cycles() << "\n";
  std::string body = os.str();
  return body + "crc " + std::to_string(crc_of(body)) + "\n";
}

std::optional<std::string> ClassCache::load(const Group& G) const {
  fs::path p = path_for(G);
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.rfind(header() + "\n", 0) != 0) throw VersionMismatch(p.string() + ": unknown format");
  auto pos = text.rfind("crc ");
  if (pos == std::string::npos || text.back() != '\n') throw VersionMismatch(p.string() + ": missing checksum");
  std::string body = text.substr(0, pos);
  std::string stored = text.substr(pos + 4, text.size() - pos - 5);
  if (stored != std::to_string(crc_of(body))) throw VersionMismatch(p.string() + ": checksum mismatch");
  if (body.find("\ndigest " + G.digest() + "\n") == std::string::npos)
    throw VersionMismatch(p.string() + ": digest mismatch");
  return text;
}

std::string ClassCache::save(const Group& G) const {
  std::string text = serialize(G);
  fs::create_directories(dir_);
  fs::path p = path_for(G);
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
  return text;
}

ClassCache::Fetch ClassCache::fetch(const Group& G) const {
  Fetch f;
  try {
    if (auto t = load(G)) {
      f.text = *t;
      f.hit = true;
      return f;
    }
  } catch (const VersionMismatch&) {
    f.recomputed_after_mismatch = true;
  }
  f.text = save(G);
  return f;
}

std::size_t ClassCache::clear() const {
  std::size_t n = 0;
  if (!fs::exists(dir_)) return 0;
  for (const auto& e : fs::directory_iterator(dir_))
    if (e.path().extension() == ".classes") n += fs::remove(e.path()) ? 1 : 0;
  return n;
}

}  // namespace spreadlab
