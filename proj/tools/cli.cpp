#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "rateq/binning.hpp"
#include "rateq/hillclimb.hpp"
#include "rateq/io.hpp"
#include "rateq/multiletter.hpp"
#include "rateq/region.hpp"

namespace rateq::cli {
namespace {

std::vector<double> parseDoubleList(const std::vector<std::string>& raw) {
  std::vector<double> out;
  for (const std::string& item : raw) {
    size_t pos = 0;
    while (pos < item.size()) {
      size_t comma = item.find(',', pos);
      std::string tok = item.substr(pos, comma == std::string::npos ? std::string::npos
                                                                    : comma - pos);
      if (!tok.empty()) out.push_back(std::stod(tok));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  return out;
}

std::vector<int> parseIntList(const std::vector<std::string>& raw) {
  std::vector<int> out;
  for (double d : parseDoubleList(raw)) out.push_back(static_cast<int>(d));
  return out;
}

std::vector<std::uint64_t> parseU64List(const std::vector<std::string>& raw) {
  std::vector<std::uint64_t> out;
  for (double d : parseDoubleList(raw)) out.push_back(static_cast<std::uint64_t>(d));
  return out;
}

int runInfo(const std::string& sourcePath, const std::string& outPath) {
  JointDist src = loadSource(sourcePath);
  requireSourceAxes(src);
  std::vector<std::pair<std::string, double>> table;
  auto add = [&](const std::string& name, double v) { table.emplace_back(name, v); };
  add("H(X)", entropyBits(src, {"x"}));
  add("H(Y)", entropyBits(src, {"y"}));
  add("H(Z)", entropyBits(src, {"z"}));
  add("H(E)", entropyBits(src, {"e"}));
  add("H(X,Y)", entropyBits(src, {"x", "y"}));
  add("H(X|Y)", condEntropyBits(src, {"x"}, {"y"}));
  add("H(Y|X)", condEntropyBits(src, {"y"}, {"x"}));
  add("H(Y|Z)", condEntropyBits(src, {"y"}, {"z"}));
  add("H(X|E)", condEntropyBits(src, {"x"}, {"e"}));
  add("H(Y|E)", condEntropyBits(src, {"y"}, {"e"}));
  add("H(X|Y,E)", condEntropyBits(src, {"x"}, {"y", "e"}));
  add("I(X;Y)", mutualInfoBits(src, {"x"}, {"y"}));
  add("I(Y;Z)", mutualInfoBits(src, {"y"}, {"z"}));
  add("I(Y;E)", mutualInfoBits(src, {"y"}, {"e"}));
  add("I(Z;E)", mutualInfoBits(src, {"z"}, {"e"}));
  add("I(X,Y;Z)", mutualInfoBits(src, {"x", "y"}, {"z"}));
  add("I(X;Z|Y)", condMutualInfoBits(src, {"x"}, {"z"}, {"y"}));
  add("I(X;E|Y)", condMutualInfoBits(src, {"x"}, {"e"}, {"y"}));
  SwEquivocation sw = swEquivocation(src);
  add("SW_equivocation_raw", sw.raw);
  add("SW_equivocation_clamped", sw.clamped);

  std::vector<CsvRow> rows;
  for (const auto& [name, v] : table) rows.push_back({name, v});
  if (!outPath.empty()) {
    emitCsv(outPath, {"name", "value"}, rows);
  } else {
    std::cout << "name,value\n";
    for (const auto& [name, v] : table) std::cout << name << ',' << fmt9(v) << '\n';
  }
  return 0;
}

int runRegion(const std::string& sourcePath, const std::string& modeStr,
              std::vector<double> ras, std::vector<double> rcs, int resolution,
              std::uint64_t seed, int jobs, bool timeShare, bool oracleCheck,
              const std::string& outPath, const std::string& witnessPath) {
  JointDist src = loadSource(sourcePath);
  Mode mode = parseMode(modeStr);
  if (ras.empty() || rcs.empty()) {
    double lo = condEntropyBits(src, {"y"}, {"z"});
    double hiA = entropyBits(src, {"y"});
    double hz = entropyBits(src, {"z"});
    if (ras.empty())
      for (int i = 0; i < 5; ++i) ras.push_back(lo + (hiA - lo) * i / 4.0);
    if (rcs.empty())
      for (int i = 0; i < 5; ++i) rcs.push_back(hz * i / 4.0);
    if (mode == Mode::kThm3 || mode == Mode::kSwBaseline) rcs = {hz};
  }
  std::sort(ras.begin(), ras.end());
  std::sort(rcs.begin(), rcs.end());
  std::vector<std::pair<double, double>> budgets;
  for (double ra : ras)
    for (double rc : rcs) budgets.emplace_back(ra, rc);

  FrontierOptions opts;
  opts.resolution = resolution;
  opts.jobs = jobs;
  opts.keep_witnesses = !witnessPath.empty();
  opts.time_share = timeShare;
  std::vector<RegionPoint> points = regionFrontier(src, mode, budgets, opts);

  std::vector<CsvRow> rows;
  for (const RegionPoint& p : points)
    rows.push_back({std::string(modeName(p.mode)), p.r_a, p.r_c, p.delta_raw, p.delta_clamped});
  const std::vector<std::string> header{"mode", "r_a", "r_c", "delta_raw", "delta_clamped"};
  if (!outPath.empty()) {
    emitCsv(outPath, header, rows);
  } else {
    std::cout << "mode,r_a,r_c,delta_raw,delta_clamped\n";
    for (const RegionPoint& p : points)
      std::cout << modeName(p.mode) << ',' << fmt9(p.r_a) << ',' << fmt9(p.r_c) << ','
                << fmt9(p.delta_raw) << ',' << fmt9(p.delta_clamped) << '\n';
  }
  if (!witnessPath.empty()) {
    Json arr = Json::array();
    for (const RegionPoint& p : points) {
      Json jp;
      jp["r_a"] = p.r_a;
      jp["r_c"] = p.r_c;
      jp["feasible"] = p.feasible;
      jp["delta_raw"] = p.delta_raw;
      jp["delta_clamped"] = p.delta_clamped;
      if (p.u_witness) jp["u_channel"] = channelToJson(*p.u_witness);
      if (p.v_witness) jp["v_channel"] = channelToJson(*p.v_witness);
      arr.push_back(std::move(jp));
    }
    std::ofstream out(witnessPath);
    if (!out) throw Error("cannot write '" + witnessPath + "'");
    out << arr.dump(2) << '\n';
  }
  if (oracleCheck && mode != Mode::kSwBaseline) {
    OptimizeUResult lp = optimizeU(src, mode, resolution);
    double hc = hillClimbUGain(src, mode, seed);
    std::cerr << "oracle-check mode=" << modeName(mode) << " lp=" << fmt9(lp.value)
              << " hillclimb=" << fmt9(hc) << " diff=" << fmt9(std::abs(lp.value - hc))
              << '\n';
  }
  return 0;
}

int runVerify(std::vector<int> ns, std::vector<int> js, int xSize, int ySize, int eSize,
              int seeds, double tolerance, std::int64_t guard, const std::string& outPath) {
  if (ns.empty()) ns = {2, 3};
  if (js.empty()) js = {1, 2, 3};
  std::vector<CsvRow> rows;
  double worst = 0.0;
  for (int n : ns) {
    for (int j : js) {
      for (int s = 0; s < seeds; ++s) {
        std::uint64_t seed = static_cast<std::uint64_t>(s);
        MultiLetterSizes noE{j, xSize, ySize, 1};
        MultiLetterSizes withE{j, xSize, ySize, eSize};
        double r3 = identity3Residual(randomMultiLetter(n, noE, seed, guard), guard);
        double r1 = lemma1Residual(randomMultiLetter(n, withE, seed + 1000003, guard), guard);
        worst = std::max(worst, std::max(r3, r1));
        rows.push_back({static_cast<std::int64_t>(seed), static_cast<std::int64_t>(n),
                        static_cast<std::int64_t>(j), r3, r1});
      }
    }
  }
  const std::vector<std::string> header{"seed", "n", "j_size", "eq3_residual",
                                        "lemma1_residual"};
  if (!outPath.empty())
    emitCsv(outPath, header, rows);
  else {
    std::cout << "seed,n,j_size,eq3_residual,lemma1_residual\n";
    for (const CsvRow& r : rows)
      std::cout << std::get<std::int64_t>(r[0]) << ',' << std::get<std::int64_t>(r[1]) << ','
                << std::get<std::int64_t>(r[2]) << ',' << fmt9(std::get<double>(r[3])) << ','
                << fmt9(std::get<double>(r[4])) << '\n';
  }
  std::cerr << "worst residual " << fmt9(worst) << " (tolerance " << fmt9(tolerance) << ")\n";
  return worst <= tolerance ? 0 : 2;
}

int runSimulate(const std::string& sourcePath, const std::string& uChannelPath,
                std::vector<int> ns, std::vector<double> epss,
                std::vector<std::uint64_t> seeds, double delta, int trials,
                bool exactEquiv, std::int64_t guard, int jobs,
                const std::string& outPath, const std::string& codebookPath) {
  JointDist src = loadSource(sourcePath);
  requireSourceAxes(src);
  Channel uch = uChannelPath.empty() ? constantUChannel(src.axes[1].size)
                                     : loadChannel(uChannelPath, src);
  if (ns.empty()) ns = {8};
  if (epss.empty()) epss = {defaults::kEps};
  if (seeds.empty()) seeds = {1};

  std::vector<CsvRow> rows;
  bool dumped = false;
  for (std::uint64_t seed : seeds) {
    for (int n : ns) {
      for (double eps : epss) {
        SimConfig cfg;
        cfg.source = src;
        cfg.u_channel = uch;
        cfg.n = n;
        cfg.eps = eps;
        cfg.delta_typ = delta;
        cfg.seed = seed;
        cfg.trials = trials;
        cfg.state_guard = guard;
        SchemeStats stats = buildSchemeStats(cfg);
        Codebook cb = buildCodebook(cfg, stats);
        BinMap bm = buildBinMaps(cfg, stats, cb);
        TrialReport rep = runTrials(cfg, stats, cb, bm, jobs);
        if (exactEquiv) rep.equivocation = exactEquivocation(cfg, stats, cb, bm);
        rows.push_back({static_cast<std::int64_t>(seed), static_cast<std::int64_t>(n), eps,
                        rep.delta, static_cast<std::int64_t>(rep.trials), rep.error_rate,
                        rep.encode_failure_rate, rep.equivocation,
                        static_cast<std::int64_t>(rep.codebook_count),
                        static_cast<std::int64_t>(rep.b_bins),
                        static_cast<std::int64_t>(rep.c_bins)});
        if (!codebookPath.empty() && !dumped) {
          Json j;
          j["count"] = cb.count;
          Json words = Json::array();
          for (Eigen::Index w = 0; w < cb.count; ++w) {
            Json word = Json::array();
            for (int i = 0; i < cfg.n; ++i) word.push_back(cb.words(w, i));
            words.push_back(std::move(word));
          }
          j["words"] = std::move(words);
          j["codeword_bins"] = bm.codeword_bin;
          j["b_bins"] = bm.b_bins;
          j["c_bins"] = bm.c_bins;
          std::ofstream out(codebookPath);
          if (!out) throw Error("cannot write '" + codebookPath + "'");
          out << j.dump(2) << '\n';
          dumped = true;
        }
      }
    }
  }
  const std::vector<std::string> header{"seed",       "n",
                                        "eps",        "delta_typ",
                                        "trials",     "error_rate",
                                        "encode_failure_rate", "equivocation_bits",
                                        "codebook_count", "b_bins", "c_bins"};
  if (!outPath.empty())
    emitCsv(outPath, header, rows);
  else {
    for (size_t i = 0; i < header.size(); ++i)
      std::cout << (i ? "," : "") << header[i];
    std::cout << '\n';
    for (const CsvRow& r : rows) {
      for (size_t i = 0; i < r.size(); ++i) {
        if (i) std::cout << ',';
        if (const auto* s = std::get_if<std::string>(&r[i]))
          std::cout << *s;
        else if (const auto* d = std::get_if<double>(&r[i]))
          std::cout << fmt9(*d);
        else
          std::cout << std::get<std::int64_t>(r[i]);
      }
      std::cout << '\n';
    }
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"rate-equivocation regions, exact identity checks, and a "
               "random-binning simulator for secure lossless source coding"};
  app.require_subcommand(1);

  // ---- info ----
  std::string infoSource, infoOut;
  CLI::App* info = app.add_subcommand("info", "entropy / mutual-information table");
  info->add_option("--source", infoSource, "source JSON file")->required();
  info->add_option("--out", infoOut, "CSV output path (default: stdout)");

  // ---- region ----
  std::string regSource, regMode = "THM1", regOut, regWitness;
  std::vector<std::string> regRa, regRc;
  int regRes = -1, regJobs = 0;
  std::uint64_t regSeed = 1;
  bool regTimeShare = false, regOracle = false;
  CLI::App* region = app.add_subcommand("region", "rate-equivocation frontier");
  region->add_option("--source", regSource, "source JSON file")->required();
  region->add_option("--mode", regMode, "THM1|COR1|THM2|THM3|SW_BASELINE");
  region->add_option("--ra", regRa, "R_A budget list (comma separated)");
  region->add_option("--rc", regRc, "R_C budget list (comma separated)");
  region->add_option("--resolution", regRes, "posterior grid denominator");
  region->add_option("--seed", regSeed, "seed for --oracle-check");
  region->add_option("--jobs", regJobs, "worker threads (default: RATEQ_JOBS or all cores)");
  region->add_flag("--time-share", regTimeShare, "convexify the frontier by time sharing");
  region->add_flag("--oracle-check", regOracle,
                   "cross-check the U optimizer against the hill-climb oracle");
  region->add_option("--out", regOut, "CSV output path (default: stdout)");
  region->add_option("--witness", regWitness, "JSON witness dump path");

  // ---- verify ----
  std::vector<std::string> verN, verJ;
  int verX = 2, verY = 2, verE = 2, verSeeds = defaults::kVerifySeeds;
  double verTol = defaults::kVerifyTolerance;
  std::int64_t verGuard = defaults::kStateGuard;
  std::string verOut;
  CLI::App* verify = app.add_subcommand("verify", "brute-force multi-letter identity check");
  verify->add_option("--n", verN, "blocklengths (default 2,3)");
  verify->add_option("--j", verJ, "|J| list (default 1,2,3)");
  verify->add_option("--x-size", verX, "|X|");
  verify->add_option("--y-size", verY, "|Y|");
  verify->add_option("--e-size", verE, "|E| for the lemma check");
  verify->add_option("--seeds", verSeeds, "seeds per (n,|J|) combination");
  verify->add_option("--tolerance", verTol, "residual tolerance");
  verify->add_option("--guard", verGuard, "state-count guard");
  verify->add_option("--out", verOut, "CSV output path (default: stdout)");

  // ---- simulate ----
  std::string simSource, simUChannel, simOut, simCodebook;
  std::vector<std::string> simN, simEps, simSeed;
  double simDelta = -1;
  int simTrials = 1000, simJobs = 0;
  bool simExact = false;
  std::int64_t simGuard = defaults::kStateGuard;
  CLI::App* simulate = app.add_subcommand("simulate", "finite-blocklength binning simulator");
  simulate->add_option("--source", simSource, "source JSON file")->required();
  simulate->add_option("--u-channel", simUChannel, "P(u|y) JSON file (absent = constant U)");
  simulate->add_option("--n", simN, "blocklength list");
  simulate->add_option("--eps", simEps, "rate slack list");
  simulate->add_option("--seed", simSeed, "seed list");
  simulate->add_option("--delta", simDelta, "typicality slack (default 0.1 for n<=8, else 0.05)");
  simulate->add_option("--trials", simTrials, "Monte Carlo trials per row");
  simulate->add_flag("--exact-equivocation", simExact,
                     "exhaustively compute (1/n)H(X^n|J1,J2,E^n)");
  simulate->add_option("--guard", simGuard, "state-count guard for exact equivocation");
  simulate->add_option("--jobs", simJobs, "worker threads");
  simulate->add_option("--out", simOut, "CSV output path (default: stdout)");
  simulate->add_option("--dump-codebook", simCodebook, "JSON dump of the realized codebook");

  std::vector<std::string> argv = args;
  std::vector<char*> cargv;
  cargv.push_back(const_cast<char*>("rateq"));
  for (std::string& s : argv) cargv.push_back(s.data());

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*info) return runInfo(infoSource, infoOut);
    if (*region)
      return runRegion(regSource, regMode, parseDoubleList(regRa), parseDoubleList(regRc),
                       regRes, regSeed, regJobs, regTimeShare, regOracle, regOut, regWitness);
    if (*verify)
      return runVerify(parseIntList(verN), parseIntList(verJ), verX, verY, verE, verSeeds,
                       verTol, verGuard, verOut);
    if (*simulate)
      return runSimulate(simSource, simUChannel, parseIntList(simN), parseDoubleList(simEps),
                         parseU64List(simSeed), simDelta, simTrials, simExact, simGuard,
                         simJobs, simOut, simCodebook);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace rateq::cli
