#include "spotter/snapshot_store.hpp"

#include <zlib.h>

#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "spotter/serialize.hpp"

namespace spotter {

namespace {

std::uint32_t crc_update(std::uint32_t crc, const std::string& bytes) {
  crc = static_cast<std::uint32_t>(
      ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
  const char nl = '\n';
  return static_cast<std::uint32_t>(::crc32(crc, reinterpret_cast<const Bytef*>(&nl), 1));
}

Json parse_line(const std::string& line, std::size_t line_no) {
  try {
    Json j = Json::parse(line);
    if (!j.is_object() || !j.contains("k") || !j["k"].is_string())
      throw SnapshotError(SnapshotErrorKind::malformed_record, "record has no kind tag", line_no);
    return j;
  } catch (const Json::parse_error& e) {
    throw SnapshotError(SnapshotErrorKind::malformed_record,
                        "line " + std::to_string(line_no) + ": " + e.what(), line_no);
  }
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw SnapshotError(SnapshotErrorKind::malformed_record,
                      "line " + std::to_string(line_no) + ": " + what, line_no);
}

}  // namespace

bool MemoryEventStream::next(EventRecord& out) {
  if (pos_ >= snapshot_.events.size()) return false;
  out = snapshot_.events[pos_++];
  return true;
}

SnapshotWriter::SnapshotWriter(std::ostream& out, const SessionInfo& session,
                               const std::vector<AgentDescriptor>& agents)
    : out_(out) {
  Json manifest = Json::object();
  manifest["k"] = "manifest";
  manifest.update(json_of(session));
  write_line(canonical_dump(manifest));
  for (const auto& agent : agents) {
    Json j = Json::object();
    j["k"] = "agent";
    j.update(json_of(agent));
    write_line(canonical_dump(j));
  }
}

void SnapshotWriter::write_line(const std::string& line) {
  out_ << line << '\n';
  crc_ = crc_update(crc_, line);
  ++records_;
}

void SnapshotWriter::append(const EventRecord& record) {
  if (sealed_) throw std::logic_error("append to a sealed snapshot");
  if (last_ && !record_less(*last_, record)) {
    throw SnapshotError(SnapshotErrorKind::unordered_events,
                        "event seq " + std::to_string(record.seq) + " at t=" +
                            std::to_string(timestamp_of(record.event)) +
                            " does not follow seq " + std::to_string(last_->seq));
  }
  write_line(canonical_dump(json_of(record)));
  last_ = record;
}

void SnapshotWriter::seal() {
  if (sealed_) return;
  Json seal = Json::object();
  seal["k"] = "seal";
  seal["records"] = records_;
  seal["crc32"] = crc_;
  out_ << canonical_dump(seal) << '\n';
  out_.flush();
  sealed_ = true;
  if (!out_) throw SnapshotError(SnapshotErrorKind::io_failure, "failed writing snapshot");
}

SnapshotReader::SnapshotReader(std::istream& in) : in_(&in) { open(); }

SnapshotReader::SnapshotReader(const std::filesystem::path& path)
    : owned_(std::make_unique<std::ifstream>(path, std::ios::binary)), in_(owned_.get()) {
  if (!*owned_)
    throw SnapshotError(SnapshotErrorKind::io_failure, "cannot open " + path.string());
  open();
}

bool SnapshotReader::read_line(std::string& line) {
  if (!std::getline(*in_, line)) return false;
  ++line_no_;
  if (in_->eof()) {
    throw SnapshotError(SnapshotErrorKind::corrupt_snapshot,
                        "truncated record at line " + std::to_string(line_no_), line_no_);
  }
  return true;
}

void SnapshotReader::open() {
  std::string line;
  if (!read_line(line))
    throw SnapshotError(SnapshotErrorKind::corrupt_snapshot, "empty snapshot file");
  Json manifest = parse_line(line, line_no_);
  if (manifest["k"] != "manifest") malformed(line_no_, "first record must be the manifest");
  if (!manifest.contains("format_version") || !manifest["format_version"].is_number_integer())
    malformed(line_no_, "manifest has no format_version");
  const auto version = manifest["format_version"].get<std::int64_t>();
  if (version != kFormatVersion) {
    throw SnapshotError(SnapshotErrorKind::unsupported_version,
                        "unsupported format_version " + std::to_string(version), line_no_);
  }
  try {
    session_ = session_from_json(manifest);
  } catch (const DecodeError& e) {
    malformed(line_no_, e.what());
  }
  crc_ = crc_update(crc_, line);

  while (read_line(line)) {
    Json j = parse_line(line, line_no_);
    if (j["k"] != "agent") {
      pending_ = std::move(line);
      return;
    }
    try {
      agents_.push_back(agent_from_json(j));
    } catch (const DecodeError& e) {
      malformed(line_no_, e.what());
    }
    crc_ = crc_update(crc_, line);
  }
  throw SnapshotError(SnapshotErrorKind::corrupt_snapshot, "snapshot has no seal record");
}

bool SnapshotReader::next(EventRecord& out) {
  if (done_) return false;
  std::string line;
  if (pending_) {
    line = std::move(*pending_);
    pending_.reset();
  } else if (!read_line(line)) {
    throw SnapshotError(SnapshotErrorKind::corrupt_snapshot, "snapshot has no seal record");
  }
  Json j = parse_line(line, line_no_);
  const auto kind = j["k"].get<std::string>();

  if (kind == "seal") {
    const std::uint64_t expected_records = line_no_ - 1;
    const bool counts_ok = j.contains("records") && j["records"].is_number_integer() &&
                           j["records"].get<std::uint64_t>() == expected_records;
    const bool crc_ok = j.contains("crc32") && j["crc32"].is_number_integer() &&
                        j["crc32"].get<std::uint64_t>() == crc_;
    if (!counts_ok || !crc_ok)
      throw SnapshotError(SnapshotErrorKind::corrupt_snapshot, "integrity check failed", line_no_);
    std::string trailing;
    if (std::getline(*in_, trailing)) malformed(line_no_ + 1, "data after seal record");
    done_ = true;
    return false;
  }
  if (kind == "manifest" || kind == "agent") malformed(line_no_, kind + " record among events");

  EventRecord record;
  try {
    record = record_from_json(j);
  } catch (const DecodeError& e) {
    malformed(line_no_, e.what());
  }
  if (last_ && !record_less(*last_, record)) malformed(line_no_, "events out of order");
  crc_ = crc_update(crc_, line);
  last_ = record;
  out = std::move(record);
  return true;
}

std::string encode_snapshot(const Snapshot& snapshot) {
  std::ostringstream out;
  SnapshotWriter writer(out, snapshot.session, snapshot.agents);
  for (const auto& record : snapshot.events) writer.append(record);
  writer.seal();
  return std::move(out).str();
}

Snapshot decode_snapshot(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_snapshot(in);
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot) {
  const std::string bytes = encode_snapshot(snapshot);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError(SnapshotErrorKind::io_failure, "cannot create " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw SnapshotError(SnapshotErrorKind::io_failure, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw SnapshotError(SnapshotErrorKind::io_failure, "cannot move snapshot to " + path.string());
  }
}

Snapshot read_snapshot(std::istream& in) {
  SnapshotReader reader(in);
  Snapshot snapshot{reader.session(), reader.agents(), {}};
  EventRecord record;
  while (reader.next(record)) snapshot.events.push_back(std::move(record));
  return snapshot;
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  SnapshotReader reader(path);
  Snapshot snapshot{reader.session(), reader.agents(), {}};
  EventRecord record;
  while (reader.next(record)) snapshot.events.push_back(std::move(record));
  return snapshot;
}

}  // namespace spotter
