#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "todi/dist.hpp"
#include "todi/matrix.hpp"

namespace todi::io {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
// Strict: the whole field must be consumed. Accepts "inf"/"-inf".
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

// A distribution sequence with its mask, as exchanged on disk:
// {"probs": [[...], ...], "mask": [true, ...]} in row-major T x V layout.
// A missing mask means every row is active.
struct MaskedDistSeq {
  DistSeq rows;
  Mask mask;
};

std::string to_json(const MaskedDistSeq& seq);
MaskedDistSeq dist_seq_from_json(std::string_view text);

// One "t,i,value" line per entry after a "t,i,value" header.
void write_triples_csv(std::ostream& out, const Matrix& values);
void write_triples_csv(std::ostream& out, const DistSeq& seq);

std::string read_file(const std::string& path);
// Writes with LF line endings, replacing any existing file.
void write_file(const std::string& path, std::string_view contents);

}  // namespace todi::io
