#include <doctest.h>

#include <json.hpp>

#include "mcgeo/json_io.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(MCGEO_BIN) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / "mcgeo_cli_test") {
    std::filesystem::create_directories(path_);
  }
  std::string write(const std::string& name, const json& doc) const {
    const auto file = path_ / name;
    std::ofstream(file) << doc.dump();
    return file.string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST_CASE("cli: divergence round trip and determinism") {
  TempDir dir;
  const auto pi = dir.write("pi.json", {{"factors", {2}}, {"pi", {0.5, 0.5}}});
  const auto m = dir.write("m.json", {{"factors", {2}}, {"P", {{0.9, 0.1}, {0.1, 0.9}}}});
  const auto l = dir.write("l.json", {{"factors", {2}}, {"P", {{0.5, 0.5}, {0.5, 0.5}}}});

  const auto same = run_cli("divergence --f kl --pi " + pi + " --m " + m + " --l " + m);
  CHECK(same.exit_code == 0);
  CHECK(json::parse(same.out)["value"].get<double>() == doctest::Approx(0.0));

  const auto r1 = run_cli("divergence --f kl --pi " + pi + " --m " + m + " --l " + l);
  const auto r2 = run_cli("divergence --f kl --pi " + pi + " --m " + m + " --l " + l);
  CHECK(r1.exit_code == 0);
  CHECK(r1.out == r2.out);  // byte-identical stdout
  CHECK(json::parse(r1.out)["value"].get<double>() == doctest::Approx(0.368064).epsilon(1e-5));

  // infinity serializes as the string "inf"
  const auto point = dir.write("point.json", {{"factors", {2}}, {"P", {{1.0, 0.0}, {1.0, 0.0}}}});
  const auto inf = run_cli("divergence --f kl --pi " + pi + " --m " + m + " --l " + point);
  CHECK(inf.exit_code == 0);
  CHECK(json::parse(inf.out)["value"] == "inf");
}

TEST_CASE("cli: spectral on the symmetric two-state chain") {
  TempDir dir;
  const auto p = dir.write("p.json", {{"factors", {2}}, {"P", {{0.5, 0.5}, {0.5, 0.5}}}});
  const auto res = run_cli("spectral --p " + p);
  CHECK(res.exit_code == 0);
  const auto doc = json::parse(res.out);
  CHECK(doc["gamma"].get<double>() == doctest::Approx(1.0));
  CHECK(doc["alpha"]["upper"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("cli: marginal and project") {
  TempDir dir;
  const auto pi =
      dir.write("pi4.json", {{"factors", {2, 2}}, {"pi", {0.25, 0.25, 0.25, 0.25}}});
  const auto p = dir.write("p4.json", {{"factors", {2, 2}},
                                       {"P",
                                        {{0.85, 0.05, 0.05, 0.05},
                                         {0.05, 0.85, 0.05, 0.05},
                                         {0.05, 0.05, 0.85, 0.05},
                                         {0.05, 0.05, 0.05, 0.85}}}});
  const auto mrg = run_cli("marginal --s 1 --pi " + pi + " --p " + p);
  CHECK(mrg.exit_code == 0);
  const auto mdoc = json::parse(mrg.out);
  CHECK(mdoc["factors"] == json::array({2}));
  CHECK(mdoc["P"][0][0].get<double>() == doctest::Approx(0.9));

  const auto prj = run_cli("project --method kl --pi " + pi + " --p " + p);
  CHECK(prj.exit_code == 0);
  const auto pdoc = json::parse(prj.out);
  CHECK(pdoc["factors"].size() == 2);
  CHECK(pdoc["divergence"].get<double>() >= 0.0);

  // emitted chain documents re-parse as inputs
  const auto file = std::filesystem::temp_directory_path() / "mcgeo_cli_test" / "roundtrip.json";
  std::ofstream(file) << mrg.out;
  const auto spc = run_cli("spectral --p " + file.string());
  CHECK(spc.exit_code == 0);
  CHECK(json::parse(spc.out)["gamma"].get<double>() > 0.0);
}

TEST_CASE("cli: error paths") {
  TempDir dir;
  // row not summing to 1: domain error with the offending row named
  const auto bad = dir.write("bad.json", {{"factors", {2}}, {"P", {{0.5, 0.4}, {0.5, 0.5}}}});
  const auto pi = dir.write("pi.json", {{"factors", {2}}, {"pi", {0.5, 0.5}}});
  const auto res = run_cli("spectral --p " + bad);
  CHECK(res.exit_code == 1);
  const auto doc = json::parse(res.out);
  CHECK(doc["error"] == "argument");
  CHECK(doc["detail"].get<std::string>().find("row 0") != std::string::npos);

  // factors/matrix mismatch
  const auto mism = dir.write("mism.json", {{"factors", {2, 2}}, {"P", {{0.5, 0.5}, {0.5, 0.5}}}});
  const auto res2 = run_cli("spectral --p " + mism);
  CHECK(res2.exit_code == 1);
  CHECK(json::parse(res2.out)["error"] == "schema");

  // reducible chain
  const auto red = dir.write("red.json", {{"factors", {2}}, {"P", {{1.0, 0.0}, {0.0, 1.0}}}});
  const auto res3 = run_cli("spectral --p " + red);
  CHECK(res3.exit_code == 1);
  CHECK(json::parse(res3.out)["error"] == "reducible");

  // unknown flag: usage error
  const auto res4 = run_cli("divergence --bogus 1");
  CHECK(res4.exit_code == 2);

  // missing subcommand
  const auto res5 = run_cli("");
  CHECK(res5.exit_code == 2);
}

TEST_CASE("cli: swap build, compare and sample") {
  TempDir dir;
  const auto h = dir.write("h.json", json::array({0.0, 0.7, 1.1, 0.4, 1.9, 0.2, 0.8, 1.5}));
  const std::string common = " --N 3 --d 2 --betas 0,1 --hamiltonian " + h;

  const auto build = run_cli("swap build" + common);
  CHECK(build.exit_code == 0);
  const auto bdoc = json::parse(build.out);
  CHECK(bdoc["factors"] == json::array({8, 8}));
  CHECK(bdoc["stationarity_residual"].get<double>() <= 1e-10);
  CHECK(bdoc["reversibility_residual"].get<double>() <= 1e-10);

  const auto cmp = run_cli("swap compare" + common);
  CHECK(cmp.exit_code == 0);
  const auto cdoc = json::parse(cmp.out);
  CHECK(cdoc["escape"].get<double>() == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(cdoc["asserted"]["all_hold"].get<bool>());
  CHECK(cdoc["discrepancies"].contains("gamma_p0_display"));

  const auto smp = run_cli("swap sample --steps 20000 --seed 42 --coordinate last" + common);
  CHECK(smp.exit_code == 0);
  const auto sdoc = json::parse(smp.out);
  CHECK(sdoc["tv_to_exact"].get<double>() <= 0.1);
  const auto smp2 = run_cli("swap sample --steps 20000 --seed 42 --coordinate last" + common);
  CHECK(smp.out == smp2.out);  // determinism

  // --seed is mandatory for the randomized subcommand
  const auto noseed = run_cli("swap sample --steps 10" + common);
  CHECK(noseed.exit_code == 2);
}

TEST_CASE("cli: document loaders accept the flat matrix form") {
  TempDir dir;
  const auto flat = dir.write("flat.json", {{"factors", {2}}, {"P", {0.5, 0.5, 0.5, 0.5}}});
  const auto doc = mcgeo::load_chain(flat);
  CHECK(doc.matrix(0, 1) == doctest::Approx(0.5));
  CHECK(!doc.pi.has_value());

  const auto h = dir.write("h.json", json::array({0.0, 1.0, 2.0, 3.0}));
  CHECK(mcgeo::load_energy(h).size() == 4);

  const auto g = dir.write("g.json", {{"d", 3}, {"edges", {{1, 2}, {2, 3}}}});
  const auto adj = mcgeo::load_graph(g);
  CHECK(adj(0, 1));
  CHECK(adj(1, 0));
  CHECK(!adj(0, 2));

  CHECK_THROWS_AS(mcgeo::load_chain(dir.write("short.json", {{"factors", {2}}, {"P", {0.5, 0.5}}})),
                  mcgeo::Error);
  CHECK_THROWS_AS(mcgeo::load_graph(dir.write("badg.json", {{"d", 2}, {"edges", {{1, 5}}}})),
                  mcgeo::Error);
}

TEST_CASE("cli: factor, clique and sanov subcommands") {
  TempDir dir;
  json prows = json::array();
  for (int x = 0; x < 8; ++x) {
    json row = json::array();
    double sum = 0;
    for (int y = 0; y < 8; ++y) sum += 1.0 + ((x * 5 + y * 2) % 7);
    for (int y = 0; y < 8; ++y) row.push_back((1.0 + ((x * 5 + y * 2) % 7)) / sum);
    prows.push_back(row);
  }
  const auto p = dir.write("fc_p.json", {{"factors", {2, 2, 2}}, {"P", prows}});
  json pimass = json::array();
  for (int i = 0; i < 8; ++i) pimass.push_back(0.125);
  const auto pi = dir.write("fc_pi.json", {{"factors", {2, 2, 2}}, {"pi", pimass}});

  const auto fct = run_cli("factor --blocks '1,2|3' --pi " + pi + " --p " + p);
  CHECK(fct.exit_code == 0);
  const auto fdoc = json::parse(fct.out);
  const double total = fdoc["decomposition"]["total"].get<double>();
  double sum = fdoc["decomposition"]["to_factorizability"].get<double>();
  for (const auto& v : fdoc["decomposition"]["per_block"]) sum += v.get<double>();
  CHECK(total == doctest::Approx(sum).epsilon(1e-9));

  const auto g = dir.write("fc_g.json", {{"d", 3}, {"edges", {{1, 2}, {2, 3}}}});
  const auto clq = run_cli("clique --graph " + g + " --cliques '1,2|2,3' --pi " + pi + " --p " + p);
  CHECK(clq.exit_code == 0);
  CHECK(json::parse(clq.out)["normalizers"].size() == 8);

  // sanov on a 2x2 product-form setting
  const auto pi2 = dir.write("fc_pi2.json", {{"factors", {2, 2}}, {"pi", {0.25, 0.25, 0.25, 0.25}}});
  const auto p2 = dir.write("fc_p2.json", {{"factors", {2, 2}},
                                           {"P",
                                            {{0.4, 0.2, 0.2, 0.2},
                                             {0.2, 0.4, 0.2, 0.2},
                                             {0.2, 0.2, 0.4, 0.2},
                                             {0.2, 0.2, 0.2, 0.4}}}});
  const auto l = dir.write("fc_l.json", {{"factors", {2}}, {"P", {{0.6, 0.4}, {0.4, 0.6}}}});
  const auto snv = run_cli("sanov --pi " + pi2 + " --p " + p2 + " --i 1 --l-factor " + l);
  CHECK(snv.exit_code == 0);
  CHECK(json::parse(snv.out)["rate"].get<double>() >= 0.0);

  // reverse-KL coordinate descent through the CLI
  const auto prj = run_cli("project --method rkl --pi " + pi2 + " --p " + p2);
  CHECK(prj.exit_code == 0);
  const auto pdoc = json::parse(prj.out);
  CHECK(pdoc["converged"].get<bool>());
  const auto& trace = pdoc["trace"];
  for (std::size_t i = 1; i < trace.size(); ++i)
    CHECK(trace[i].get<double>() <= trace[i - 1].get<double>() + 1e-12);
}

TEST_CASE("cli: swap compare at three temperatures") {
  TempDir dir;
  const auto h = dir.write("h3.json", json::array({0.3, 1.4, 0.8, 0.1}));
  const auto res = run_cli("swap compare --N 2 --d 3 --betas 0,0.5,1 --hamiltonian " + h);
  CHECK(res.exit_code == 0);
  const auto doc = json::parse(res.out);
  CHECK(doc["asserted"]["all_hold"].get<bool>());
  CHECK(doc["escape"].get<double>() >= doc["escape_formula_bound"].get<double>() - 1e-12);
  CHECK(doc["recorded"].contains("relaxation_lower_display"));
}

TEST_CASE("cli: check and scan") {
  TempDir dir;
  json prows = json::array();
  // positive 8x8 chain from fixed numbers
  for (int x = 0; x < 8; ++x) {
    json row = json::array();
    double sum = 0;
    for (int y = 0; y < 8; ++y) sum += 1.0 + ((x * 7 + y * 3) % 5);
    for (int y = 0; y < 8; ++y) row.push_back((1.0 + ((x * 7 + y * 3) % 5)) / sum);
    prows.push_back(row);
  }
  const auto p = dir.write("p8.json", {{"factors", {2, 2, 2}}, {"P", prows}});
  json pimass = json::array();
  for (int i = 0; i < 8; ++i) pimass.push_back(0.125);
  const auto pi = dir.write("pi8.json", {{"factors", {2, 2, 2}}, {"pi", pimass}});
  const auto l = dir.write("l2.json", {{"factors", {2}}, {"P", {{0.6, 0.4}, {0.3, 0.7}}}});

  const auto part = run_cli("check partition --pi " + pi + " --p " + p + " --l " + p + " --s 2");
  CHECK(part.exit_code == 0);
  CHECK(json::parse(part.out)["holds"].get<bool>());

  const auto han = run_cli("check han --pi " + pi + " --p " + p + " --l-factor " + l +
                           " --l-factor " + l + " --l-factor " + l);
  CHECK(han.exit_code == 0);
  CHECK(json::parse(han.out)["holds"].get<bool>());

  const auto sh = run_cli("check shearer-ind --pi " + pi + " --p " + p +
                          " --subsets '1,2|2,3|1,3' --r 2");
  CHECK(sh.exit_code == 0);
  CHECK(json::parse(sh.out)["holds"].get<bool>());

  const auto scan = run_cli("scan --functional ind --p " + p);
  CHECK(scan.exit_code == 0);
  const auto sdoc = json::parse(scan.out);
  CHECK(sdoc["holds"].get<bool>());
  CHECK(sdoc["min_modularity_slack"].get<double>() >= -1e-10);
}
