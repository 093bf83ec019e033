#pragma once

// The wsds command line. Exit codes: 0 ok, 1 usage, 2 query out of range,
// 3 corrupt archive, 4 verification failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace wsds {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRange = 2;
inline constexpr int kExitCorrupt = 3;
inline constexpr int kExitVerify = 4;

inline constexpr const char* kBenchHeader =
    "algorithm,n,sigma,d,tau,P,threads,wall_ms,work_ops,span_ops,table_bytes,structure_bytes";

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsds
