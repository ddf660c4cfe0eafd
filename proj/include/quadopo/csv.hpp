#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace quadopo {

// 17 significant digits: enough for the shortest decimal that round-trips
// any double exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Comma-separated emission with one '#' comment line for provenance
// (resolved parameters and tool version; never timestamps, so identical
// inputs give byte-identical files).
class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void comment(const std::string& text) { os_ << "# " << text << '\n'; }

    void header(const std::vector<std::string>& cols) { line(cols); }

    void row(const std::vector<std::string>& cells) { line(cells); }

    void row_values(const std::vector<double>& vals) {
        std::vector<std::string> cells;
        cells.reserve(vals.size());
        for (double v : vals) cells.push_back(fmt17(v));
        line(cells);
    }

  private:
    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

    std::ostream& os_;
};

} // namespace quadopo
