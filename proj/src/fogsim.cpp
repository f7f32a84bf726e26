#include "cpad/fogsim.hpp"

#include <charconv>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "cpad/abe.hpp"
#include "cpad/codec.hpp"
#include "cpad/deletion.hpp"
#include "cpad/error.hpp"
#include "cpad/payload.hpp"
#include "cpad/policy.hpp"
#include "cpad/random.hpp"
#include "cpad/store.hpp"
#include "cpad/tlv.hpp"

namespace cpad::fogsim {

std::string_view kind_name(MessageKind kind) noexcept {
  switch (kind) {
    case MessageKind::KeyIssue: return "KeyIssue";
    case MessageKind::Upload: return "Upload";
    case MessageKind::CloudUpload: return "CloudUpload";
    case MessageKind::FetchCT: return "FetchCT";
    case MessageKind::CTReply: return "CTReply";
    case MessageKind::FetchPayload: return "FetchPayload";
    case MessageKind::PayloadReply: return "PayloadReply";
    case MessageKind::NotFound: return "NotFound";
    case MessageKind::DelRequest: return "DelRequest";
    case MessageKind::CloudDelete: return "CloudDelete";
    case MessageKind::CloudDeleteAck: return "CloudDeleteAck";
    case MessageKind::DelResponse: return "DelResponse";
  }
  return "?";
}

MessageKind kind_from_code(std::uint8_t code) {
  if (code < static_cast<std::uint8_t>(MessageKind::KeyIssue) ||
      code > static_cast<std::uint8_t>(MessageKind::DelResponse)) {
    throw Error(ErrorCode::InvalidEncoding, "unknown message kind " + std::to_string(code));
  }
  return static_cast<MessageKind>(code);
}

std::string TraceLog::export_text() const {
  std::ostringstream out;
  for (const auto& e : entries) {
    out << e.step << '\t';
    if (e.message) {
      const auto body_hash = sha256(e.message->body);
      out << kind_name(e.message->kind) << '\t' << e.message->sender << '\t' << e.message->receiver << '\t'
          << e.message->body.size() << '\t' << to_hex(body_hash);
    } else {
      out << "action\t-\t-\t0\t-";
    }
    out << '\t' << to_hex(e.state) << '\t' << (e.flagged ? 1 : 0) << '\t' << e.note << '\n';
  }
  return out.str();
}

Digest TraceLog::digest() const { return sha256(as_bytes(export_text())); }

std::vector<std::string> TraceLog::notes(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (std::string_view(e.note).starts_with(prefix)) out.push_back(e.note);
  }
  return out;
}

std::vector<const Message*> TraceLog::messages(MessageKind kind) const {
  std::vector<const Message*> out;
  for (const auto& e : entries) {
    if (e.message && e.message->kind == kind) out.push_back(&*e.message);
  }
  return out;
}

namespace {

enum class Role { Authority, Object, Fog, Cloud, User };

std::string_view role_name(Role r) {
  switch (r) {
    case Role::Authority: return "authority";
    case Role::Object: return "object";
    case Role::Fog: return "fog";
    case Role::Cloud: return "cloud";
    case Role::User: return "user";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view s) {
  for (Role r : {Role::Authority, Role::Object, Role::Fog, Role::Cloud, Role::User}) {
    if (s == role_name(r)) return r;
  }
  return std::nullopt;
}

using Args = std::vector<std::string>;

void need_args(const Args& args, std::size_t n, std::string_view usage) {
  if (args.size() < n) throw Error(ErrorCode::ScenarioError, "usage: " + std::string(usage));
}

AttributeSet parse_attr_list(std::string_view list) {
  AttributeSet out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::string_view item = list.substr(start, comma == std::string_view::npos ? comma : comma - start);
    if (!item.empty()) out.emplace(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Bytes parse_data_spec(std::string_view spec, RandomSource& rng) {
  if (spec.starts_with("text:")) return Bytes(spec.begin() + 5, spec.end());
  if (spec.starts_with("hex:")) return from_hex(spec.substr(4));
  if (spec.starts_with("random:")) {
    std::size_t n = 0;
    const auto digits = spec.substr(7);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || n > (1u << 24)) {
      throw Error(ErrorCode::ScenarioError, "bad random data length '" + std::string(digits) + "'");
    }
    Bytes out(n);
    rng.fill(out);
    return out;
  }
  throw Error(ErrorCode::ScenarioError, "data must be text:, hex: or random: (got '" + std::string(spec) + "')");
}

std::string join(const Args& args, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < args.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += args[i];
  }
  return out;
}

class Simulation;

class Party {
 public:
  Party(PartyId name, std::optional<PartyId> peer) : name_(std::move(name)), peer_(std::move(peer)) {}
  virtual ~Party() = default;

  virtual Role role() const = 0;
  virtual void act(Simulation& sim, const std::string& action, const Args& args) = 0;
  virtual void handle(Simulation& sim, const Message& msg) = 0;
  virtual void append_state(tlv::Writer& w) const = 0;
  virtual void check_hygiene() const {}

  const PartyId& name() const { return name_; }
  const std::optional<PartyId>& peer() const { return peer_; }

 protected:
  [[noreturn]] void unexpected(const Message& msg) const {
    throw Error(ErrorCode::InvalidEncoding,
                name_ + " (" + std::string(role_name(role())) + ") cannot accept " +
                    std::string(kind_name(msg.kind)));
  }
  [[noreturn]] void unknown_action(const std::string& action) const {
    throw Error(ErrorCode::ScenarioError,
                "unknown action '" + action + "' for " + std::string(role_name(role())) + " " + name_);
  }

 private:
  PartyId name_;
  std::optional<PartyId> peer_;
};

struct LabelInfo {
  Scalar fname;
  PartyId owner;
  PartyId fog;
  Bytes data;      // simulation-side oracle for end-to-end comparisons
  TargetElem key;  // likewise
};

class Simulation {
 public:
  Simulation(std::uint64_t seed, const ScenarioOptions& options) : rng_(seed), options_(options) {}

  RandomSource& rng() { return rng_; }
  Exec exec() const { return options_.exec; }
  const ScenarioOptions& options() const { return options_; }

  void declare(PartyId name, Role role, std::optional<PartyId> peer);

  Party& party(const PartyId& name) {
    const auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorCode::ScenarioError, "undeclared party '" + name + "'");
    return *parties_[it->second];
  }

  Party& party_with_role(const PartyId& name, Role role) {
    Party& p = party(name);
    if (p.role() != role) {
      throw Error(ErrorCode::ScenarioError, "'" + name + "' is not a " + std::string(role_name(role)));
    }
    return p;
  }

  /// The party p names as its peer, or the only declared party of that role.
  PartyId resolve_peer(const Party& p, Role wanted) {
    if (p.peer()) {
      party_with_role(*p.peer(), wanted);
      return *p.peer();
    }
    std::optional<PartyId> found;
    for (const auto& q : parties_) {
      if (q->role() != wanted) continue;
      if (found) {
        throw Error(ErrorCode::ScenarioError,
                    p.name() + " must name its " + std::string(role_name(wanted)) + " explicitly");
      }
      found = q->name();
    }
    if (!found) throw Error(ErrorCode::ScenarioError, "no " + std::string(role_name(wanted)) + " declared");
    return *found;
  }

  const GroupElem& verify_key(const PartyId& name) const {
    const auto it = verify_keys_.find(name);
    if (it == verify_keys_.end()) throw Error(ErrorCode::ScenarioError, name + " has no signing key");
    return it->second;
  }
  void register_verify_key(const PartyId& name, GroupElem v) { verify_keys_.insert_or_assign(name, std::move(v)); }

  void send(const Party& from, const PartyId& to, MessageKind kind, Bytes body) {
    party(to);
    queue_.push_back(Message{from.name(), to, kind, std::move(body)});
  }

  void note(std::string text, bool flagged = false) {
    if (!note_.empty()) note_ += ' ';
    note_ += text;
    flagged_ = flagged_ || flagged;
  }

  std::map<std::string, LabelInfo>& labels() { return labels_; }
  const LabelInfo& label(const std::string& name) const {
    const auto it = labels_.find(name);
    if (it == labels_.end()) throw Error(ErrorCode::ScenarioError, "unknown file label '" + name + "'");
    return it->second;
  }

  void run_step(std::size_t step, const PartyId& who, const std::string& action, const Args& args);

  TraceLog take_trace() { return std::move(trace_); }

 private:
  void record(std::size_t step, std::optional<Message> msg);
  Digest state_digest() const;

  SeededRandom rng_;
  ScenarioOptions options_;
  std::vector<std::unique_ptr<Party>> parties_;
  std::map<PartyId, std::size_t> index_;
  std::map<PartyId, GroupElem> verify_keys_;
  std::map<std::string, LabelInfo> labels_;
  std::deque<Message> queue_;
  std::string note_;
  bool flagged_ = false;
  TraceLog trace_;
};

Bytes stream_of(const tlv::Writer& w) { return w.stream(); }

tlv::Reader body_reader(const Message& msg) { return tlv::Reader::from_stream(msg.body); }

// ---- attribute authority -------------------------------------------------

class Authority final : public Party {
 public:
  using Party::Party;
  Role role() const override { return Role::Authority; }

  void act(Simulation& sim, const std::string& action, const Args& args) override {
    if (action == "setup") {
      need_args(args, 1, "setup <attr,...>");
      const AttributeSet attrs = parse_attr_list(args[0]);
      const std::vector<std::string> universe(attrs.begin(), attrs.end());
      auto result = setup(universe, sim.rng());
      pp_ = std::move(result.pp);
      msk_ = std::move(result.msk);
      sim.note("setup universe=" + std::to_string(universe.size()));
    } else if (action == "keygen") {
      need_args(args, 2, "keygen <party> <attr,...>");
      if (!pp_) throw Error(ErrorCode::ScenarioError, "keygen before setup");
      const Party& target = sim.party(args[0]);
      if (target.role() != Role::Object && target.role() != Role::User) {
        throw Error(ErrorCode::ScenarioError, "keys are issued to objects and users only");
      }
      const UserSecretKey sk = keygen(*msk_, *pp_, parse_attr_list(args[1]), sim.rng());
      tlv::Writer w;
      codec::put(w, *pp_);
      codec::put(w, sk);
      sim.send(*this, target.name(), MessageKind::KeyIssue, stream_of(w));
    } else {
      unknown_action(action);
    }
  }

  void handle(Simulation&, const Message& msg) override { unexpected(msg); }

  void append_state(tlv::Writer& w) const override {
    if (!pp_) return;
    codec::put(w, *pp_);
    codec::put(w, *msk_);
  }

 private:
  std::optional<PublicParams> pp_;
  std::optional<MasterSecretKey> msk_;
};

// Objects and users both receive keys from the authority.
struct IssuedKey {
  std::optional<PublicParams> pp;
  std::optional<UserSecretKey> sk;

  void accept(const Message& msg) {
    tlv::Reader r = body_reader(msg);
    PublicParams p = codec::get<PublicParams>(r);
    UserSecretKey k = codec::get<UserSecretKey>(r);
    r.expect_end();
    pp = std::move(p);
    sk = std::move(k);
  }

  void require(const std::string& who) const {
    if (!sk) throw Error(ErrorCode::ScenarioError, who + " has not been issued a key");
  }

  void append(tlv::Writer& w) const {
    if (sk) codec::put(w, *sk);
  }
};

// ---- smart object --------------------------------------------------------

class SmartObject final : public Party {
 public:
  SmartObject(PartyId name, std::optional<PartyId> peer, RandomSource& rng)
      : Party(std::move(name), std::move(peer)), ssk_(SigningKeypair::generate(rng)) {}

  Role role() const override { return Role::Object; }
  const SigningKeypair& ssk() const { return ssk_; }

  void act(Simulation& sim, const std::string& action, const Args& args) override {
    if (action == "upload") {
      need_args(args, 3, "upload <label> <data> <policy...>");
      upload(sim, args[0], parse_data_spec(args[1], sim.rng()), join(args, 2));
    } else if (action == "delete") {
      need_args(args, 1, "delete <label>");
      const FileState& file = own_file(args[0]);
      const DeletionRequest req = pending_.begin(file.fname, file.tau, ssk_, sim.rng());
      tlv::Writer w;
      codec::put(w, req);
      sim.send(*this, sim.label(args[0]).fog, MessageKind::DelRequest, stream_of(w));
    } else if (action == "verify") {
      need_args(args, 1, "verify <label>");
      const FileState& file = own_file(args[0]);
      pending_.get(file.fname);
      if (!responses_.count(file.fname.encode())) {
        throw Error(ErrorCode::NoPendingRequest, "no deletion response received for '" + args[0] + "'");
      }
      awaiting_verify_.insert(file.fname.encode());
      tlv::Writer w;
      w.scalar(file.fname);
      sim.send(*this, sim.label(args[0]).fog, MessageKind::FetchCT, stream_of(w));
    } else {
      unknown_action(action);
    }
  }

  void handle(Simulation& sim, const Message& msg) override {
    switch (msg.kind) {
      case MessageKind::KeyIssue:
        key_.accept(msg);
        return;
      case MessageKind::DelResponse: {
        tlv::Reader r = body_reader(msg);
        const Scalar fname = r.scalar();
        DeletionResponse resp = codec::get<DeletionResponse>(r);
        r.expect_end();
        pending_.get(fname);
        responses_.insert_or_assign(fname.encode(), std::move(resp));
        sim.note("response-received");
        return;
      }
      case MessageKind::CTReply: {
        tlv::Reader r = body_reader(msg);
        const Scalar fname = r.scalar();
        const KeyCiphertext ct = codec::get<KeyCiphertext>(r);
        r.expect_end();
        finish_verify(sim, msg.sender, fname, &ct);
        return;
      }
      case MessageKind::NotFound: {
        tlv::Reader r = body_reader(msg);
        const Scalar fname = r.scalar();
        r.text();
        r.expect_end();
        finish_verify(sim, msg.sender, fname, nullptr);
        return;
      }
      default:
        unexpected(msg);
    }
  }

  void append_state(tlv::Writer& w) const override {
    codec::put(w, ssk_);
    key_.append(w);
    for (const auto& [label, file] : files_) {
      w.text(label).scalar(file.fname);
      codec::put(w, file.tau);
    }
    for (const auto& [fname, state] : pending_.entries()) {
      w.bytes(fname);
      codec::put(w, state);
    }
    for (const auto& [fname, resp] : responses_) {
      w.bytes(fname);
      codec::put(w, resp);
    }
  }

 private:
  struct FileState {
    Scalar fname;
    DeletionTag tau;
  };

  const FileState& own_file(const std::string& label) const {
    const auto it = files_.find(label);
    if (it == files_.end()) throw Error(ErrorCode::UnknownFname, "object did not upload '" + label + "'");
    return it->second;
  }

  void upload(Simulation& sim, const std::string& label, Bytes data, const std::string& policy_text) {
    key_.require(name());
    if (sim.labels().count(label)) throw Error(ErrorCode::ScenarioError, "label '" + label + "' already used");
    const AccessPolicy policy = parse_policy(policy_text);
    const Scalar fname = Scalar::random(sim.rng());
    Encapsulation enc = encapsulate(*key_.pp, policy, sim.rng(), sim.exec());
    const SealedPayload sealed = seal(data, enc.key, fname, sim.rng());
    files_.emplace(label, FileState{fname, make_tag(fname, enc.key)});

    const PartyId fog = sim.resolve_peer(*this, Role::Fog);
    sim.labels().emplace(label, LabelInfo{fname, name(), fog, std::move(data), enc.key});

    tlv::Writer w;
    w.scalar(fname);
    codec::put_verify_key(w, ssk_.v);
    codec::put(w, enc.ct);
    codec::put(w, sealed);
    sim.send(*this, fog, MessageKind::Upload, stream_of(w));
  }

  void finish_verify(Simulation& sim, const PartyId& fog, const Scalar& fname, const KeyCiphertext* ct) {
    const auto key = fname.encode();
    if (!awaiting_verify_.erase(key)) throw Error(ErrorCode::ScenarioError, "unsolicited ciphertext reply");
    const DeletionResponse resp = responses_.at(key);
    responses_.erase(key);
    const ObjectDeletionState state = pending_.resolve(fname);
    bool ok = false;
    if (ct) ok = verify_deletion(resp, *ct, *key_.sk, state, *key_.pp, sim.verify_key(fog), fname, sim.exec());
    sim.note(ok ? "verify=true" : "verify=false", !ok);
  }

  SigningKeypair ssk_;
  IssuedKey key_;
  std::map<std::string, FileState> files_;
  PendingDeletions pending_;
  std::map<Scalar::Encoding, DeletionResponse> responses_;
  std::set<Scalar::Encoding> awaiting_verify_;
};

// ---- fog node and cloud --------------------------------------------------

template <class Store>
void restart_store(Store& store, const Simulation& sim, const PartyId& name) {
  if (!sim.options().store_root) throw Error(ErrorCode::ScenarioError, "restart needs a persistent store");
  store = Store();
  store = Store(*sim.options().store_root / name);
}

template <class Store>
Store open_store(const ScenarioOptions& options, const PartyId& name) {
  return options.store_root ? Store(*options.store_root / name) : Store();
}

Bytes not_found_body(const Scalar& fname, std::string_view what) {
  tlv::Writer w;
  w.scalar(fname).text(what);
  return w.stream();
}

class FogNode final : public Party {
 public:
  FogNode(PartyId name, std::optional<PartyId> peer, RandomSource& rng, const ScenarioOptions& options)
      : Party(std::move(name), std::move(peer)),
        fsk_(SigningKeypair::generate(rng)),
        store_(open_store<FogStore>(options, this->name())) {}

  Role role() const override { return Role::Fog; }
  const SigningKeypair& fsk() const { return fsk_; }

  void act(Simulation& sim, const std::string& action, const Args& args) override {
    if (action == "behave") {
      need_args(args, 1, "behave <honest|skip-update|inconsistent-gamma>");
      if (args[0] == "honest") {
        behavior_ = FogBehavior::Honest;
      } else if (args[0] == "skip-update") {
        behavior_ = FogBehavior::SkipUpdate;
      } else if (args[0] == "inconsistent-gamma") {
        behavior_ = FogBehavior::InconsistentGamma;
      } else {
        throw Error(ErrorCode::ScenarioError, "unknown fog behavior '" + args[0] + "'");
      }
    } else if (action == "restart") {
      restart_store(store_, sim, name());
    } else {
      unknown_action(action);
    }
  }

  void handle(Simulation& sim, const Message& msg) override {
    switch (msg.kind) {
      case MessageKind::Upload: {
        tlv::Reader r = body_reader(msg);
        FogRecord rec;
        rec.fname = r.scalar();
        rec.spk = codec::get_verify_key(r);
        rec.ct = codec::get<KeyCiphertext>(r);
        const SealedPayload sealed = codec::get<SealedPayload>(r);
        r.expect_end();
        if (!(sealed.fname == rec.fname)) throw Error(ErrorCode::InvalidEncoding, "payload fname mismatch");
        if (store_.contains(rec.fname)) throw Error(ErrorCode::InvalidEncoding, "fname already stored");
        store_.put(rec);
        tlv::Writer w;
        w.scalar(rec.fname);
        codec::put_verify_key(w, rec.spk);
        codec::put(w, sealed);
        sim.send(*this, sim.resolve_peer(*this, Role::Cloud), MessageKind::CloudUpload, stream_of(w));
        return;
      }
      case MessageKind::FetchCT: {
        tlv::Reader r = body_reader(msg);
        const Scalar fname = r.scalar();
        r.expect_end();
        const auto rec = store_.get(fname);
        if (!rec) {
          sim.send(*this, msg.sender, MessageKind::NotFound, not_found_body(fname, "ct"));
          return;
        }
        tlv::Writer w;
        w.scalar(fname);
        codec::put(w, rec->ct);
        sim.send(*this, msg.sender, MessageKind::CTReply, stream_of(w));
        return;
      }
      case MessageKind::DelRequest: {
        tlv::Reader r = body_reader(msg);
        const DeletionRequest req = codec::get<DeletionRequest>(r);
        r.expect_end();
        const auto rec = store_.get(req.fname);
        if (!rec) throw Error(ErrorCode::UnknownFname, "fog holds no ciphertext for this fname");
        check_del_request(req, rec->spk);
        // Forwarded verbatim, before the ciphertext update.
        sim.send(*this, sim.resolve_peer(*this, Role::Cloud), MessageKind::CloudDelete, msg.body);
        const ReencryptResult res = fog_reencrypt(*rec, req, fsk_, sim.rng(), behavior_);
        store_.put(FogRecord{rec->fname, rec->spk, res.ct});
        tlv::Writer w;
        w.scalar(req.fname);
        codec::put(w, res.response);
        sim.send(*this, msg.sender, MessageKind::DelResponse, stream_of(w));
        return;
      }
      case MessageKind::CloudDeleteAck: {
        tlv::Reader r = body_reader(msg);
        r.scalar();
        r.expect_end();
        sim.note("cloud-deleted");
        return;
      }
      default:
        unexpected(msg);
    }
  }

  void append_state(tlv::Writer& w) const override {
    codec::put(w, fsk_);
    w.u32(static_cast<std::uint32_t>(behavior_));
    for (const auto& [fname, stream] : store_.raw()) w.bytes(stream);
  }

  void check_hygiene() const override { store_.check_hygiene(); }

 private:
  SigningKeypair fsk_;
  FogStore store_;
  FogBehavior behavior_ = FogBehavior::Honest;
};

class Cloud final : public Party {
 public:
  Cloud(PartyId name, const ScenarioOptions& options)
      : Party(std::move(name), std::nullopt), store_(open_store<CloudStore>(options, this->name())) {}

  Role role() const override { return Role::Cloud; }

  void act(Simulation& sim, const std::string& action, const Args&) override {
    if (action == "restart") {
      restart_store(store_, sim, name());
    } else {
      unknown_action(action);
    }
  }

  void handle(Simulation& sim, const Message& msg) override {
    switch (msg.kind) {
      case MessageKind::CloudUpload: {
        tlv::Reader r = body_reader(msg);
        CloudRecord rec;
        rec.fname = r.scalar();
        rec.spk = codec::get_verify_key(r);
        rec.payload = codec::get<SealedPayload>(r);
        r.expect_end();
        if (store_.contains(rec.fname)) throw Error(ErrorCode::InvalidEncoding, "fname already stored");
        store_.put(rec);
        return;
      }
      case MessageKind::FetchPayload: {
        tlv::Reader r = body_reader(msg);
        const Scalar fname = r.scalar();
        r.expect_end();
        const auto rec = store_.get(fname);
        if (!rec) {
          sim.send(*this, msg.sender, MessageKind::NotFound, not_found_body(fname, "payload"));
          return;
        }
        tlv::Writer w;
        codec::put(w, rec->payload);
        sim.send(*this, msg.sender, MessageKind::PayloadReply, stream_of(w));
        return;
      }
      case MessageKind::CloudDelete: {
        tlv::Reader r = body_reader(msg);
        const DeletionRequest req = codec::get<DeletionRequest>(r);
        r.expect_end();
        cloud_delete(store_, req.fname, req);
        tlv::Writer w;
        w.scalar(req.fname);
        sim.send(*this, msg.sender, MessageKind::CloudDeleteAck, stream_of(w));
        return;
      }
      default:
        unexpected(msg);
    }
  }

  void append_state(tlv::Writer& w) const override {
    for (const auto& [fname, stream] : store_.raw()) w.bytes(stream);
  }

  void check_hygiene() const override { store_.check_hygiene(); }

 private:
  CloudStore store_;
};

// ---- data user -----------------------------------------------------------

class User final : public Party {
 public:
  using Party::Party;
  Role role() const override { return Role::User; }

  void act(Simulation& sim, const std::string& action, const Args& args) override {
    if (action != "fetch") unknown_action(action);
    need_args(args, 1, "fetch <label>");
    key_.require(name());
    const LabelInfo& info = sim.label(args[0]);
    if (fetches_.count(info.fname.encode())) throw Error(ErrorCode::ScenarioError, "fetch already in flight");
    Fetch pending;
    pending.label = args[0];
    fetches_.emplace(info.fname.encode(), std::move(pending));
    tlv::Writer w;
    w.scalar(info.fname);
    sim.send(*this, info.fog, MessageKind::FetchCT, stream_of(w));
    sim.send(*this, sim.resolve_peer(sim.party(info.fog), Role::Cloud), MessageKind::FetchPayload, stream_of(w));
  }

  void handle(Simulation& sim, const Message& msg) override {
    tlv::Reader r = body_reader(msg);
    switch (msg.kind) {
      case MessageKind::KeyIssue:
        key_.accept(msg);
        return;
      case MessageKind::CTReply: {
        const Scalar fname = r.scalar();
        KeyCiphertext ct = codec::get<KeyCiphertext>(r);
        r.expect_end();
        Fetch& f = fetch(fname);
        f.ct = std::move(ct);
        f.ct_done = true;
        maybe_finish(sim, fname);
        return;
      }
      case MessageKind::PayloadReply: {
        SealedPayload p = codec::get<SealedPayload>(r);
        r.expect_end();
        const Scalar fname = p.fname;
        Fetch& f = fetch(fname);
        f.payload = std::move(p);
        f.payload_done = true;
        maybe_finish(sim, fname);
        return;
      }
      case MessageKind::NotFound: {
        const Scalar fname = r.scalar();
        const std::string what = r.text();
        r.expect_end();
        Fetch& f = fetch(fname);
        if (what == "ct") {
          f.ct_done = true;
        } else if (what == "payload") {
          f.payload_done = true;
        } else {
          throw Error(ErrorCode::InvalidEncoding, "NotFound names unknown artifact '" + what + "'");
        }
        maybe_finish(sim, fname);
        return;
      }
      default:
        unexpected(msg);
    }
  }

  void append_state(tlv::Writer& w) const override {
    key_.append(w);
    w.u32(static_cast<std::uint32_t>(fetches_.size()));
  }

 private:
  struct Fetch {
    std::string label;
    std::optional<KeyCiphertext> ct;
    std::optional<SealedPayload> payload;
    bool ct_done = false;
    bool payload_done = false;
  };

  Fetch& fetch(const Scalar& fname) {
    const auto it = fetches_.find(fname.encode());
    if (it == fetches_.end()) throw Error(ErrorCode::ScenarioError, "unsolicited fetch reply");
    return it->second;
  }

  void maybe_finish(Simulation& sim, const Scalar& fname) {
    const auto it = fetches_.find(fname.encode());
    if (!it->second.ct_done || !it->second.payload_done) return;
    const Fetch f = std::move(it->second);
    fetches_.erase(it);
    const LabelInfo& info = sim.label(f.label);

    if (!f.ct) {
      sim.note("fetch=ct-not-found", true);
      return;
    }
    TargetElem k;
    try {
      k = decapsulate(*f.ct, *key_.sk, *key_.pp, sim.exec());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotAuthorized) throw;
      sim.note("fetch=not-authorized", true);
      return;
    }
    const bool key_current = k == info.key;
    if (!f.payload) {
      sim.note(std::string("fetch=payload-not-found key=") + (key_current ? "current" : "stale"), true);
      return;
    }
    try {
      const Bytes data = unseal(*f.payload, k, fname);
      sim.note(std::string("fetch=ok match=") + (data == info.data ? "true" : "false"), data != info.data);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AuthenticationFailure) throw;
      sim.note("fetch=auth-failure", true);
    }
  }

  IssuedKey key_;
  std::map<Scalar::Encoding, Fetch> fetches_;
};

// ---- simulation loop -----------------------------------------------------

void Simulation::declare(PartyId name, Role role, std::optional<PartyId> peer) {
  if (index_.count(name)) throw Error(ErrorCode::ScenarioError, "party '" + name + "' declared twice");
  std::unique_ptr<Party> p;
  switch (role) {
    case Role::Authority:
      p = std::make_unique<Authority>(name, std::move(peer));
      break;
    case Role::Object: {
      auto obj = std::make_unique<SmartObject>(name, std::move(peer), rng_);
      register_verify_key(name, obj->ssk().v);
      p = std::move(obj);
      break;
    }
    case Role::Fog: {
      auto fog = std::make_unique<FogNode>(name, std::move(peer), rng_, options_);
      register_verify_key(name, fog->fsk().v);
      p = std::move(fog);
      break;
    }
    case Role::Cloud:
      p = std::make_unique<Cloud>(name, options_);
      break;
    case Role::User:
      p = std::make_unique<User>(name, std::move(peer));
      break;
  }
  index_.emplace(name, parties_.size());
  parties_.push_back(std::move(p));
}

Digest Simulation::state_digest() const {
  tlv::Writer w;
  for (const auto& p : parties_) {
    w.text(p->name());
    tlv::Writer inner;
    p->append_state(inner);
    w.bytes(inner.records());
  }
  return sha256(w.records());
}

void Simulation::record(std::size_t step, std::optional<Message> msg) {
  for (const auto& p : parties_) p->check_hygiene();
  trace_.entries.push_back(TraceEntry{step, std::move(msg), state_digest(), std::move(note_), flagged_});
  note_.clear();
  flagged_ = false;
}

constexpr std::size_t kMaxDeliveriesPerStep = 10000;

void Simulation::run_step(std::size_t step, const PartyId& who, const std::string& action, const Args& args) {
  note_ = action;
  for (const auto& a : args) note_ += ' ' + a;
  party(who).act(*this, action, args);
  record(step, std::nullopt);

  std::size_t delivered = 0;
  while (!queue_.empty()) {
    if (++delivered > kMaxDeliveriesPerStep) throw Error(ErrorCode::ScenarioError, "message storm");
    Message msg = std::move(queue_.front());
    queue_.pop_front();
    party(msg.receiver).handle(*this, msg);
    record(step, std::move(msg));
  }
}

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

TraceLog run_scenario(std::string_view script, std::uint64_t seed, const ScenarioOptions& options) {
  Simulation sim(seed, options);
  std::size_t line_no = 0;
  std::size_t step = 0;
  std::size_t start = 0;
  while (start < script.size()) {
    std::size_t end = script.find('\n', start);
    if (end == std::string_view::npos) end = script.size();
    const std::string_view line = script.substr(start, end - start);
    start = end + 1;
    ++line_no;

    const auto words = split_words(line);
    if (words.empty() || words[0].starts_with('#')) continue;

    if (words[0] == "PARTY") {
      if (words.size() < 3 || words.size() > 4) {
        throw ScenarioError(line_no, "expected PARTY <name> <role> [<peer>]");
      }
      const auto role = parse_role(words[2]);
      if (!role) throw ScenarioError(line_no, "unknown role '" + words[2] + "'");
      try {
        sim.declare(words[1], *role, words.size() == 4 ? std::optional<PartyId>(words[3]) : std::nullopt);
      } catch (const ScenarioError&) {
        throw;
      } catch (const std::exception& e) {
        throw ScenarioError(line_no, e.what());
      }
      continue;
    }
    if (words[0] != "STEP") throw ScenarioError(line_no, "expected PARTY or STEP, got '" + words[0] + "'");
    if (words.size() < 3) throw ScenarioError(line_no, "expected STEP <party> <action> <args...>");
    ++step;
    const Args args(words.begin() + 3, words.end());
    try {
      sim.run_step(step, words[1], words[2], args);
    } catch (const std::exception& e) {
      throw ScenarioError(step, e.what());
    }
  }
  return sim.take_trace();
}

}  // namespace cpad::fogsim
