#include "winoreg/csv.hpp"

#include <fstream>

#include "winoreg/error.hpp"

namespace winoreg::csv {

std::vector<std::vector<std::string>> read_records(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    int c;
    while ((c = in.get()) != EOF) {
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
        case '"':
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            fields.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            if (field_started || !field.empty() || !fields.empty()) {
                fields.push_back(std::move(field));
                records.push_back(std::move(fields));
            }
            field.clear();
            fields.clear();
            field_started = false;
            break;
        default:
            field.push_back(ch);
            field_started = true;
            break;
        }
    }
    if (in_quotes)
        throw ParseError("csv: unterminated quoted field");
    if (field_started || !field.empty() || !fields.empty()) {
        fields.push_back(std::move(field));
        records.push_back(std::move(fields));
    }
    return records;
}

std::vector<std::vector<std::string>> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("csv: cannot open " + path);
    return read_records(in);
}

std::string escape_field(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes)
        return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"')
            out += "\"\"";
        else
            out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

void write_record(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out.put(',');
        out << escape_field(fields[i]);
    }
    out.put('\n');
}

} // namespace winoreg::csv
