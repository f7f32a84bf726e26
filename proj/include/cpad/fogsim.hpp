#pragma once

// Deterministic message-driven simulation of an attribute authority, smart
// objects, fog nodes, clouds and data users.
//
// Script format, one directive per line; a line whose first word starts
// with '#' is a comment:
//
//   PARTY <name> <authority|object|fog|cloud|user> [<peer>]
//   STEP  <party> <action> <args...>
//
// The optional peer names the fog an object or user talks to, or the cloud a
// fog forwards to; it defaults to the only declared party of that role.
//
//   authority: setup <attr,...>            keygen <party> <attr,...>
//   object:    upload <label> <data> <policy...>
//              delete <label>              verify <label>
//   user:      fetch <label>
//   fog:       behave <honest|skip-update|inconsistent-gamma>
//   fog/cloud: restart                     (reload the store from disk)
//
// <data> is text:<word>, hex:<bytes> or random:<n>. Every STEP is executed by
// enqueueing the party's outgoing messages and delivering the queue in FIFO
// order until it drains.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpad/bytes.hpp"
#include "cpad/kernels.hpp"

namespace cpad::fogsim {

enum class MessageKind : std::uint8_t {
  KeyIssue = 0x01,
  Upload = 0x02,
  CloudUpload = 0x03,
  FetchCT = 0x04,
  CTReply = 0x05,
  FetchPayload = 0x06,
  PayloadReply = 0x07,
  NotFound = 0x08,
  DelRequest = 0x09,
  CloudDelete = 0x0A,
  CloudDeleteAck = 0x0B,
  DelResponse = 0x0C,
};

std::string_view kind_name(MessageKind kind) noexcept;
/// Throws Error(InvalidEncoding) for codes outside the table.
MessageKind kind_from_code(std::uint8_t code);

using PartyId = std::string;

struct Message {
  PartyId sender;
  PartyId receiver;
  MessageKind kind;
  Bytes body;  // TLV stream whose schema is fixed by kind

  friend bool operator==(const Message&, const Message&) = default;
};

using Digest = std::array<std::uint8_t, 32>;

struct TraceEntry {
  std::size_t step;                // 1-based STEP index
  std::optional<Message> message;  // empty for the entry recording the action itself
  Digest state;                    // digest of every party's state after this entry
  std::string note;                // action text, or an outcome such as "verify=true"
  bool flagged = false;            // verification failure or refused access
};

struct TraceLog {
  std::vector<TraceEntry> entries;

  /// One tab-separated line per entry:
  /// step, kind, sender, receiver, body length, SHA-256(body), state digest, flag, note.
  std::string export_text() const;
  Digest digest() const;
  /// Notes starting with prefix, in order.
  std::vector<std::string> notes(std::string_view prefix) const;
  std::vector<const Message*> messages(MessageKind kind) const;
};

struct ScenarioOptions {
  /// When set, fog and cloud parties persist to <store_root>/<party name>.
  std::optional<std::filesystem::path> store_root;
  Exec exec = Exec::Parallel;
};

/// Throws ScenarioError carrying the 1-based STEP index (or the line number
/// for malformed directives) on any protocol violation.
TraceLog run_scenario(std::string_view script, std::uint64_t seed, const ScenarioOptions& options = {});

}  // namespace cpad::fogsim
