#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "spreadlab/cache.hpp"
#include "spreadlab/errors.hpp"

using namespace spreadlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(SPREADLAB_BIN) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("spreadlab-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("uspread --group A5 --k 2 --seed 7").code == 0);
  CHECK(run("uspread --group S6 --k 1").code == 1);
  auto d = scratch("bad");
  std::ofstream(d / "bad.grp") << "perm 5\n(1,2,3\n";
  CHECK(run("uspread --group " + (d / "bad.grp").string() + " --k 1").code == 64);
  CHECK(run("uspread --group NoSuchGroup --k 1").code == 64);
  CHECK(run("uspread --group A5").code == 64);
  CHECK(run("frobnicate").code == 64);
  CHECK(run("spread --exact --group S6").code == 0);
  CHECK(run("spread --exact --group A5 --budget 5").code == 2);
  CHECK(run("bound --id no-such-bound").code == 64);
  fs::remove_all(d);
}

TEST_CASE("group files load like corpus names") {
  auto d = scratch("grp");
  std::ofstream(d / "a5.grp") << "perm 5\n(1,2,3,4,5)\n(3,4,5)\n";
  auto a = run("spread --exact --uniform --group " + (d / "a5.grp").string());
  CHECK(a.code == 0);
  CHECK(a.out.find("exact 2\n") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("reports are deterministic across workers") {
  auto a = run("spread --exact --group S6 --workers 1");
  auto b = run("spread --exact --group S6 --workers 4");
  CHECK(a.out == b.out);
  auto c = run("uspread --group A6 --k 2 --seed 11");
  auto e = run("uspread --group A6 --k 2 --seed 11");
  CHECK(c.out == e.out);
  CHECK(c.out.find("seed 11\n") != std::string::npos);
}

TEST_CASE("shintani verb emits the class table") {
  auto r = run("shintani verify --n 2 --q0 2 --e 2 --twist none --fix 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("coset_class charpoly(N) |C_big| matched_small_class |C_small| checks_passed\n") != std::string::npos);
  CHECK(r.out.find("violation") == std::string::npos);
  CHECK(run("shintani verify --n 2 --q0 2 --e 2 --twist gu").code == 0);
  CHECK(run("shintani verify --n 2 --q0 2 --e 2 --twist triality").code == 64);
}

TEST_CASE("other verbs") {
  auto p = run("ppd --a 2 --b 6");
  CHECK(p.out == "ppd\nexpected_nonempty 0\n");
  auto b = run("bound --id lie-type-universal --params q=3");
  CHECK(b.out.rfind("bound lie-type-universal 0.444", 0) == 0);
  CHECK(run("elt make --type \"(2m)-\" --m 2 --q 3").code == 0);
  CHECK(run("elt make --type \"(2m)+\" --m 2 --q 3").code == 64);
  auto g = run("graph --stats --group D8");
  CHECK(g.out.find("isolated 1\n") != std::string::npos);
  auto m = run("maxover --group A5 --s \"(1,2,3,4,5)\"");
  CHECK(m.out.find("order 10 multiplicity 1") != std::string::npos);
  auto f = run("fpr --group A5 --sub \"(1,2,3);(1,2)(3,4)\" --x \"(1,2)(3,4)\"");
  CHECK(f.out.find("fpr 1/5\n") != std::string::npos);
}

TEST_CASE("class cache round trip") {
  auto d = scratch("cache");
  ClassCache cache(d);
  auto G = parse_grp(corpus_grp("M11"));
  CHECK_FALSE(cache.load(*G).has_value());
  auto first = cache.fetch(*G);
  CHECK_FALSE(first.hit);
  // A fresh handle reads the stored table without computing classes.
  auto G2 = parse_grp(corpus_grp("M11"));
  auto again = cache.fetch(*G2);
  CHECK(again.hit);
  CHECK(again.text == first.text);
  CHECK(again.text == ClassCache::serialize(*G));
  CHECK(again.text.find("classes 10\n") != std::string::npos);

  // corrupted file
  {
    std::string t = again.text;
    t[t.find("order 7920")] = 'O';
    std::ofstream(cache.path_for(*G), std::ios::trunc) << t;
  }
  CHECK_THROWS_AS(cache.load(*G), VersionMismatch);
  auto fixed = cache.fetch(*G);
  CHECK(fixed.recomputed_after_mismatch);
  CHECK(fixed.text == first.text);

  // foreign version
  std::ofstream(cache.path_for(*G), std::ios::trunc) << "spreadlab-cache 0\n";
  CHECK_THROWS_AS(cache.load(*G), VersionMismatch);
  CHECK(cache.clear() == 1);
  fs::remove_all(d);
}

TEST_CASE("cache directory from the environment") {
  auto d = scratch("env");
  ::setenv("SPREADLAB_CACHE", d.c_str(), 1);
  CHECK(ClassCache::default_dir() == d);
  auto r = run("cache fetch --group A5");
  CHECK(r.code == 0);
  CHECK(fs::exists(ClassCache(d).path_for(*parse_grp(corpus_grp("A5")))));
  ::unsetenv("SPREADLAB_CACHE");
  fs::remove_all(d);
}
