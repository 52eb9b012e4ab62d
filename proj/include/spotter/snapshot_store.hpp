#pragma once

// Single-file snapshot format (.aspot): UTF-8, one JSON record per line.
//
//   line 1      manifest record
//   then        agent records
//   then        event records, sorted by (timestamp, seq)
//   last line   seal record {"k":"seal","records":N,"crc32":C}
//
// N counts every line before the seal; C is the CRC-32 of those lines'
// bytes, newlines included. See docs/snapshot-format.md.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spotter/trace_model.hpp"

namespace spotter {

inline constexpr const char* kSnapshotExtension = ".aspot";

enum class SnapshotErrorKind {
  io_failure,
  unordered_events,
  corrupt_snapshot,
  unsupported_version,
  malformed_record,
};

class SnapshotError : public std::runtime_error {
 public:
  SnapshotError(SnapshotErrorKind kind, const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  SnapshotErrorKind kind() const { return kind_; }
  /// 1-based line the problem was found on, 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  SnapshotErrorKind kind_;
  std::size_t line_;
};

/// Sequential access to a snapshot's events. Aggregates that only need one
/// pass consume this so a file never has to be fully loaded.
class EventStream {
 public:
  virtual ~EventStream() = default;
  virtual const SessionInfo& session() const = 0;
  virtual const std::vector<AgentDescriptor>& agents() const = 0;
  /// Fills `out` and returns true, or returns false at the end.
  virtual bool next(EventRecord& out) = 0;
};

class MemoryEventStream final : public EventStream {
 public:
  explicit MemoryEventStream(const Snapshot& snapshot) : snapshot_(snapshot) {}

  const SessionInfo& session() const override { return snapshot_.session; }
  const std::vector<AgentDescriptor>& agents() const override { return snapshot_.agents; }
  bool next(EventRecord& out) override;

 private:
  const Snapshot& snapshot_;
  std::size_t pos_ = 0;
};

/// Streaming writer. Enforces (timestamp, seq) order and appends the seal on
/// seal(). Nothing may be appended afterwards.
class SnapshotWriter {
 public:
  SnapshotWriter(std::ostream& out, const SessionInfo& session,
                 const std::vector<AgentDescriptor>& agents);

  void append(const EventRecord& record);
  void seal();

  std::uint64_t records_written() const { return records_; }

 private:
  void write_line(const std::string& line);

  std::ostream& out_;
  std::uint64_t records_ = 0;
  std::uint32_t crc_ = 0;
  std::optional<EventRecord> last_;
  bool sealed_ = false;
};

/// Streaming reader. The manifest and agent table are read on construction;
/// events are decoded one line at a time and the seal is verified when the
/// stream reaches its end.
class SnapshotReader final : public EventStream {
 public:
  explicit SnapshotReader(std::istream& in);
  explicit SnapshotReader(const std::filesystem::path& path);

  const SessionInfo& session() const override { return session_; }
  const std::vector<AgentDescriptor>& agents() const override { return agents_; }
  bool next(EventRecord& out) override;

 private:
  void open();
  bool read_line(std::string& line);

  std::unique_ptr<std::ifstream> owned_;
  std::istream* in_;
  SessionInfo session_;
  std::vector<AgentDescriptor> agents_;
  std::optional<std::string> pending_;
  std::optional<EventRecord> last_;
  std::size_t line_no_ = 0;
  std::uint32_t crc_ = 0;
  bool done_ = false;
};

std::string encode_snapshot(const Snapshot& snapshot);
Snapshot decode_snapshot(const std::string& bytes);

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot);
Snapshot read_snapshot(const std::filesystem::path& path);
Snapshot read_snapshot(std::istream& in);

}  // namespace spotter
