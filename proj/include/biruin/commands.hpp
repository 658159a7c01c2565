#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "biruin/config.hpp"

namespace biruin {

struct CliOptions {
    std::string out_dir;  // empty: use the config's output.dir
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<double>> levels;
    bool rescale_axes = false;
    std::string tail_csv;           // quantile: reuse an inverted grid
    std::vector<std::string> with;  // compare: extra grids from CSV files
};

int cmd_check(const Config& c, std::ostream& out);
int cmd_kernel_roots(const Config& c, Complex s1, std::ostream& out);
int cmd_transform_eval(const Config& c, Complex s1, Complex s2, std::ostream& out);
int cmd_invert(const Config& c, const CliOptions& o, std::ostream& out);
int cmd_simulate(const Config& c, const CliOptions& o, std::ostream& out);
int cmd_quantile(const Config& c, const CliOptions& o, std::ostream& out);
int cmd_compare(const Config& c, const CliOptions& o, std::ostream& out);

// "re,im" or "re"
Complex parse_complex(const std::string& s);

// Full command line; returns the process exit code (0 ok, 1 model/math failure, 2 config failure).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace biruin
