#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "playbook/common.hpp"

namespace playbook {

// Append-only structured run log. Every record is one JSON line carrying a
// monotonically increasing logical sequence number "seq" and a record "type".
// Logical sequencing (instead of wall-clock timestamps) keeps logged runs
// byte-reproducible.
class RunLog {
  public:
    RunLog() = default;                   // in-memory only
    explicit RunLog(const fs::path& path);  // also mirrored to a JSONL file

    void append(const std::string& type, Json fields);

    std::int64_t seq() const { return seq_; }
    const std::vector<Json>& records() const { return records_; }

    // Exact bytes written (or that would be written) to the JSONL file.
    const std::string& bytes() const { return bytes_; }

    void flush();

  private:
    std::ofstream out_;
    bool to_file_ = false;
    std::vector<Json> records_;
    std::string bytes_;
    std::int64_t seq_ = 0;
};

// Parses a JSONL byte stream back into records (used by score/replay).
std::vector<Json> parse_jsonl(const std::string& bytes);
std::vector<Json> load_jsonl(const fs::path& path);

}  // namespace playbook
