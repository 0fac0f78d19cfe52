#include "playbook/logging.hpp"

#include <sstream>

namespace playbook {

RunLog::RunLog(const fs::path& path) : to_file_(true) {
    fs::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open run log for writing: " + path.string());
}

void RunLog::append(const std::string& type, Json fields) {
    Json record;
    record["seq"] = ++seq_;
    record["type"] = type;
    for (auto& [key, value] : fields.items()) {
        record[key] = std::move(value);
    }
    const std::string line = record.dump() + "\n";
    bytes_ += line;
    if (to_file_) out_ << line;
    records_.push_back(std::move(record));
}

void RunLog::flush() {
    if (to_file_) out_.flush();
}

std::vector<Json> parse_jsonl(const std::string& bytes) {
    std::vector<Json> records;
    std::istringstream in(bytes);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("bad JSONL record at line " + std::to_string(lineno));
        }
        records.push_back(std::move(j));
    }
    return records;
}

std::vector<Json> load_jsonl(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open log file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_jsonl(buf.str());
}

}  // namespace playbook
