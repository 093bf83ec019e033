#include "wsds/cli_commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include "wsds/archive.hpp"
#include "wsds/tables.hpp"
#include "wsds/verify.hpp"

namespace wsds {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + path + "'");
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(f), {});
}

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw UsageError("cannot write '" + path + "'");
}

std::vector<uint64_t> decode_symbols(std::span<const uint8_t> bytes, unsigned width) {
  const unsigned w = width / 8;
  if (bytes.size() % w != 0)
    throw UsageError("input length " + std::to_string(bytes.size()) + " is not a multiple of " + std::to_string(w));
  std::vector<uint64_t> s(bytes.size() / w);
  for (size_t i = 0; i < s.size(); ++i) {
    uint64_t v = 0;
    for (unsigned k = 0; k < w; ++k) v |= uint64_t{bytes[i * w + k]} << (8 * k);
    s[i] = v;
  }
  return s;
}

// Integer, or a single character standing for its byte value.
uint64_t parse_symbol(const std::string& s) {
  if (s.empty()) throw UsageError("empty symbol");
  if (std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return std::stoull(s);
  if (s.size() == 1) return static_cast<unsigned char>(s[0]);
  throw UsageError("bad symbol '" + s + "'");
}

uint64_t parse_number(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw UsageError("bad number '" + s + "'");
  return std::stoull(s);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct BuildOpts {
  std::string input, output;
  unsigned width = 8;
  bool text = false;
  std::string variant = "tree";
  std::string algo;
  unsigned tau = 0;
  uint64_t parts = 0;
  unsigned degree = 0;
};

StructureSpec make_spec(const std::string& variant, const std::string& algo, unsigned tau, uint64_t parts,
                        unsigned degree) {
  StructureSpec spec;
  spec.variant = parse_variant(variant);
  const bool tree_like = spec.variant == Variant::kTree || spec.variant == Variant::kShaped;
  if (!algo.empty()) {
    if (!tree_like) throw UsageError("--algo applies to tree and shaped variants only");
    spec.algo = parse_algo(algo);
  }
  if (degree != 0) {
    if (spec.variant != Variant::kMultiary) throw UsageError("--degree needs --variant multiary");
    spec.degree = degree;
  }
  if (parts != 0) {
    if (spec.algo != BuildAlgo::kDomain) throw UsageError("--parts needs --algo domain");
    spec.params.parts = parts;
  } else if (spec.algo == BuildAlgo::kDomain) {
    spec.params.parts = 2;
  }
  spec.params.tau = tau;
  return spec;
}

int cmd_build(const BuildOpts& o, std::ostream& out) {
  const StructureSpec spec = make_spec(o.variant, o.algo, o.tau, o.parts, o.degree);
  const std::vector<uint8_t> bytes = read_file(o.input);
  const std::vector<uint64_t> raw = decode_symbols(bytes, o.text ? 8 : o.width);
  CostMeter meter;
  const auto t0 = std::chrono::steady_clock::now();
  Structure s = build_structure(meter, raw, spec);
  const double ms = ms_since(t0);
  const std::vector<uint8_t> archive = serialize(s);
  write_file(o.output, archive);
  out << "n=" << s.size() << " sigma=" << s.sigma() << " bytes=" << archive.size() << " work=" << meter.work
      << " span=" << meter.span << " wall_ms=" << std::fixed << std::setprecision(3) << ms << "\n";
  return kExitOk;
}

int cmd_query(const std::string& path, const std::string& op, const std::vector<std::string>& args, std::ostream& out) {
  const std::vector<uint8_t> bytes = read_file(path);
  const Structure s = deserialize(bytes);
  if (op == "access") {
    if (args.size() != 1) throw UsageError("access takes one position");
    out << s.access(parse_number(args[0])) << "\n";
    return kExitOk;
  }
  if (args.size() != 2) throw UsageError(op + " takes a symbol and a number");
  const uint64_t c = parse_symbol(args[0]);
  const uint64_t x = parse_number(args[1]);
  if (op == "rank") {
    out << s.rank(c, x) << "\n";
  } else if (op == "rankle") {
    out << s.rank_le(c, x) << "\n";
  } else if (op == "select") {
    out << s.select(c, x) << "\n";
  } else {
    throw UsageError("unknown query '" + op + "'");
  }
  return kExitOk;
}

struct VerifyOpts {
  uint64_t n = 1000;
  uint64_t sigma = 16;
  std::string variant = "all";
  uint64_t seeds = 20;
  uint64_t seed_start = 1;
  std::string algo_set = "naive,packed,sorted,domain";
  unsigned tau = 0;
  uint64_t parts = 3;
  unsigned degree = 4;
  bool inject_fault = false;
};

int cmd_verify(const VerifyOpts& o, std::ostream& out) {
  std::vector<Variant> variants;
  if (o.variant == "all") {
    variants = {Variant::kTree, Variant::kShaped, Variant::kMultiary, Variant::kMatrix};
  } else {
    for (const auto& v : split(o.variant, ',')) variants.push_back(parse_variant(v));
  }
  std::vector<BuildAlgo> algos;
  for (const auto& a : split(o.algo_set, ',')) algos.push_back(parse_algo(a));
  if (algos.empty()) throw UsageError("empty --algo-set");
  if (o.inject_fault)
    for (Variant v : variants)
      if (v != Variant::kTree && v != Variant::kShaped) throw UsageError("--inject-fault needs tree or shaped variants");

  uint64_t checked = 0;
  for (Variant v : variants) {
    VerifyConfig cfg;
    cfg.n = o.n;
    cfg.sigma = o.sigma;
    cfg.variant = v;
    cfg.algos = algos;
    cfg.tau = o.tau;
    cfg.parts = o.parts;
    cfg.degree = o.degree;
    cfg.inject_fault = o.inject_fault;
    for (uint64_t seed = o.seed_start; seed < o.seed_start + o.seeds; ++seed) {
      std::optional<std::string> fail;
      try {
        fail = verify_instance(cfg, seed);
      } catch (const std::exception& e) {
        fail = std::string("exception: ") + e.what();
      }
      if (!fail) {
        ++checked;
        continue;
      }
      // Shrink n while the same seed still fails.
      uint64_t n_min = o.n;
      for (uint64_t m = o.n / 2; m > 0; m /= 2) {
        VerifyConfig small = cfg;
        small.n = m;
        bool fails;
        try {
          fails = verify_instance(small, seed).has_value();
        } catch (const std::exception&) {
          fails = true;
        }
        if (!fails) break;
        n_min = m;
      }
      out << "FAIL variant=" << variant_name(v) << " n=" << o.n << " sigma=" << o.sigma << " seed=" << seed << ": "
          << *fail << "\n";
      out << "reproduce: wsds verify --variant " << variant_name(v) << " --n " << n_min << " --sigma " << o.sigma
          << " --seed-start " << seed << " --seeds 1" << (o.inject_fault ? " --inject-fault" : "") << "\n";
      return kExitVerify;
    }
  }
  out << "PASS " << checked << " instances\n";
  return kExitOk;
}

struct BenchOpts {
  std::string n = "65536";
  std::string sigma = "256";
  std::string tau = "0";
  std::string parts = "2";
  std::string threads;
  std::string algos = "naive,packed,sorted,domain";
  unsigned degree = 4;
  unsigned reps = 3;
  uint64_t seed = 1;
  std::string csv;
};

std::vector<uint64_t> numbers(const std::string& s) {
  std::vector<uint64_t> v;
  for (const auto& x : split(s, ',')) v.push_back(parse_number(x));
  if (v.empty()) throw UsageError("empty grid axis");
  return v;
}

int cmd_bench(const BenchOpts& o, unsigned default_threads, std::ostream& out) {
  if (o.reps < 3) throw UsageError("--reps must be at least 3");
  const auto ns = numbers(o.n), sigmas = numbers(o.sigma), taus = numbers(o.tau), parts = numbers(o.parts);
  const auto threads = o.threads.empty() ? std::vector<uint64_t>{default_threads} : numbers(o.threads);
  const auto algos = split(o.algos, ',');

  std::ofstream file;
  std::ostream* dst = &out;
  if (!o.csv.empty()) {
    file.open(o.csv);
    if (!file) throw UsageError("cannot write '" + o.csv + "'");
    dst = &file;
  }
  *dst << kBenchHeader << "\n";
  for (uint64_t n : ns) {
    for (uint64_t sigma : sigmas) {
      std::mt19937_64 rng(o.seed);
      std::vector<uint64_t> raw(n);
      for (auto& x : raw) x = rng() % std::max<uint64_t>(sigma, 1);
      for (const auto& a : algos) {
        StructureSpec spec;
        unsigned d = 2;
        if (a == "multiary") {
          spec.variant = Variant::kMultiary;
          spec.degree = d = o.degree;
        } else if (a == "matrix") {
          spec.variant = Variant::kMatrix;
        } else if (a == "shaped") {
          spec.variant = Variant::kShaped;
        } else {
          spec.algo = parse_algo(a);
        }
        const bool uses_parts = spec.variant == Variant::kTree && spec.algo == BuildAlgo::kDomain;
        for (uint64_t tau : taus) {
          for (uint64_t p : uses_parts ? parts : std::vector<uint64_t>{1}) {
            for (uint64_t t : threads) {
              set_num_threads(static_cast<unsigned>(t));
              spec.params.tau = static_cast<unsigned>(tau);
              spec.params.parts = p;
              std::vector<double> wall;
              CostMeter meter;
              Structure s;
              for (unsigned r = 0; r < o.reps; ++r) {
                meter = CostMeter{};
                const auto t0 = std::chrono::steady_clock::now();
                s = build_structure(meter, raw, spec);
                wall.push_back(std::max(ms_since(t0), 1e-3));
              }
              std::sort(wall.begin(), wall.end());
              *dst << a << "," << n << "," << sigma << "," << d << "," << s.tau() << "," << p << "," << t << ","
                   << std::fixed << std::setprecision(3) << wall[wall.size() / 2] << std::defaultfloat << ","
                   << meter.work << "," << meter.span << "," << TableRegistry::instance().total_bytes() << ","
                   << s.structure_bytes() << "\n";
            }
          }
        }
      }
    }
  }
  set_num_threads(default_threads);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"wsds: wavelet trees, wavelet matrices and rank/select"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads")->envname("WSDS_THREADS");

  BuildOpts bo;
  auto* build = app.add_subcommand("build", "build a structure from raw symbols");
  build->add_option("input", bo.input, "input file")->required();
  build->add_option("output", bo.output, "archive path")->required();
  auto* width = build->add_option("--width", bo.width, "symbol width in bits")->check(CLI::IsMember({8, 16, 32}));
  build->add_flag("--text", bo.text, "bytes as 8-bit symbols")->excludes(width);
  build->add_option("--variant", bo.variant, "tree|shaped|multiary|matrix");
  build->add_option("--algo", bo.algo, "naive|packed|sorted|domain");
  build->add_option("--tau", bo.tau, "levels per chunk");
  build->add_option("--parts", bo.parts, "domain parts")->check(CLI::PositiveNumber);
  build->add_option("--degree", bo.degree, "multiary degree")->check(CLI::IsMember({2, 4, 8, 16}));
  build->add_option("--threads", threads, "worker threads")->envname("WSDS_THREADS");

  std::string qpath, qop;
  std::vector<std::string> qargs;
  auto* query = app.add_subcommand("query", "answer one query");
  query->add_option("archive", qpath, "archive path")->required();
  query->add_option("op", qop, "access|rank|select|rankle")->required();
  query->add_option("args", qargs, "symbol and position/occurrence");

  VerifyOpts vo;
  auto* verify = app.add_subcommand("verify", "random cross-checks against the oracle");
  verify->add_option("--n", vo.n);
  verify->add_option("--sigma", vo.sigma);
  verify->add_option("--variant", vo.variant, "all or a comma list");
  verify->add_option("--seeds", vo.seeds);
  verify->add_option("--seed-start", vo.seed_start);
  verify->add_option("--algo-set", vo.algo_set);
  verify->add_option("--tau", vo.tau);
  verify->add_option("--parts", vo.parts)->check(CLI::PositiveNumber);
  verify->add_option("--degree", vo.degree)->check(CLI::IsMember({2, 4, 8, 16}));
  verify->add_flag("--inject-fault", vo.inject_fault, "flip one bitmap bit before checking");
  verify->add_option("--threads", threads, "worker threads")->envname("WSDS_THREADS");

  BenchOpts bn;
  auto* bench = app.add_subcommand("bench", "meter and timing grid as CSV");
  bench->add_option("--n", bn.n, "comma list");
  bench->add_option("--sigma", bn.sigma, "comma list");
  bench->add_option("--tau", bn.tau, "comma list, 0 for default");
  bench->add_option("--parts", bn.parts, "comma list");
  bench->add_option("--threads", bn.threads, "comma list");
  bench->add_option("--algo", bn.algos, "naive,packed,sorted,domain,shaped,multiary,matrix");
  bench->add_option("--degree", bn.degree)->check(CLI::IsMember({2, 4, 8, 16}));
  bench->add_option("--reps", bn.reps);
  bench->add_option("--seed", bn.seed);
  bench->add_option("--csv", bn.csv, "output path");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const unsigned default_threads = num_threads();
  try {
    if (threads != 0) set_num_threads(threads);
    int rc = kExitOk;
    if (*build) {
      rc = cmd_build(bo, out);
    } else if (*query) {
      rc = cmd_query(qpath, qop, qargs, out);
    } else if (*verify) {
      rc = cmd_verify(vo, out);
    } else if (*bench) {
      rc = cmd_bench(bn, threads != 0 ? threads : default_threads, out);
    }
    set_num_threads(default_threads);
    return rc;
  } catch (const IndexOutOfRange&) {
    set_num_threads(default_threads);
    err << "index out of range\n";
    return kExitRange;
  } catch (const OccurrenceOutOfRange&) {
    set_num_threads(default_threads);
    err << "occurrence out of range\n";
    return kExitRange;
  } catch (const CorruptArchive& e) {
    set_num_threads(default_threads);
    err << "corrupt archive: " << e.what() << "\n";
    return kExitCorrupt;
  } catch (const std::exception& e) {
    set_num_threads(default_threads);
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace wsds
