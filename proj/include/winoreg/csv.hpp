#ifndef WINOREG_CSV_HPP
#define WINOREG_CSV_HPP

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace winoreg::csv {

// RFC-4180 style records: fields containing comma, quote or newline are
// quoted, embedded quotes doubled. read_records returns one vector<string>
// per record; empty trailing line is ignored.
std::vector<std::vector<std::string>> read_records(std::istream& in);
std::vector<std::vector<std::string>> read_file(const std::string& path);

std::string escape_field(const std::string& field);
void write_record(std::ostream& out, const std::vector<std::string>& fields);

} // namespace winoreg::csv

#endif
