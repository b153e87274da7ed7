#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lvbcli {

// Null, flag, integer, real or text.
using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Report {
    std::string command;
    std::vector<std::pair<std::string, Cell>> meta;
    Table table;
    std::vector<std::string> warnings;
};

// Reals use %.17e (or %.6g with pretty); non-finite reals become null / empty.
std::string format_real(double v, bool pretty);

void write_json(std::ostream& os, const Report& r, bool pretty);
// Header row plus one line per table row; metadata is not written.
void write_csv(std::ostream& os, const Report& r, bool pretty);

} // namespace lvbcli
