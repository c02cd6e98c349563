#include "descent/trace.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "descent/errors.hpp"

namespace descent {

std::string trace_header() { return "t,loss,grad_norm,update_norm,effective_lr,extra_evals"; }

std::string format_trace_row(const TraceRecord& r) {
    char buf[256];
    // 17 significant digits round-trip an IEEE double exactly
    std::snprintf(buf, sizeof(buf), "%" PRId64 ",%.17g,%.17g,%.17g,%.17g,%" PRId64, r.t,
                  r.loss, r.grad_norm, r.update_norm, r.effective_lr, r.extra_evals);
    return std::string(buf);
}

std::vector<TraceRecord> parse_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("trace: cannot open '" + path + "'");
    std::vector<TraceRecord> records;
    std::string line;
    bool first = true;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line != trace_header())
                throw ConfigError("trace: unexpected header in '" + path + "'");
            continue;
        }
        TraceRecord r;
        std::stringstream ss(line);
        std::string cell;
        try {
            std::getline(ss, cell, ',');
            r.t = std::stoll(cell);
            std::getline(ss, cell, ',');
            r.loss = std::stod(cell);
            std::getline(ss, cell, ',');
            r.grad_norm = std::stod(cell);
            std::getline(ss, cell, ',');
            r.update_norm = std::stod(cell);
            std::getline(ss, cell, ',');
            r.effective_lr = std::stod(cell);
            std::getline(ss, cell, ',');
            r.extra_evals = std::stoll(cell);
        } catch (const std::exception&) {
            throw ConfigError("trace: malformed row " + std::to_string(line_no) + " in '" +
                              path + "'");
        }
        records.push_back(r);
    }
    return records;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
        out << content;
    }
    fs::rename(tmp, target);
}

}  // namespace descent
