#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainfis/forecast.hpp"

namespace chainfis::ledger {

using Hash = std::array<std::uint8_t, 32>;
using Bytes = std::vector<std::uint8_t>;

Hash sha256(const Bytes& bytes);
std::string to_hex(const Bytes& bytes);
std::string to_hex(const Hash& hash);
Bytes from_hex(const std::string& hex);  // throws on malformed input

/// Canonical byte encoding used for every hash in the chain:
///   u32/u64/i64   little-endian fixed width
///   string/bytes  u32 length prefix + raw bytes
///   list          u32 count + elements
///   map           u32 count + (key, value) pairs in ascending key order
/// Event    = string(kind) + map(payload) + i64(timestamp)
/// Tx id    = sha256(list(events) + list(sorted signer ids) + u32(threshold))
/// Tx root  = sha256(u32 count + each 32-byte tx id in order)
/// Block id = sha256(u64 height + previous_hash + tx root + i64 timestamp)
class CanonicalWriter {
  public:
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i64(std::int64_t v);
    void str(const std::string& s);
    void bytes(const Bytes& b);
    void raw(const std::uint8_t* data, std::size_t len);
    const Bytes& data() const { return buffer_; }

  private:
    Bytes buffer_;
};

enum class Role { supplier, producer, distributor, retailer, auditor };
const char* role_name(Role role);
Role role_from_name(const std::string& name);

struct Stakeholder {
    std::string id;
    Role role = Role::supplier;
    Bytes key;  // opaque signing key handle
};

enum class EventKind {
    FarmRegistration,
    Hatch,
    Measurement,
    Processing,
    Distribution,
    RetailDelivery,
    Reorder,
};
const char* event_kind_name(EventKind kind);
EventKind event_kind_from_name(const std::string& name);

struct SupplyChainEvent {
    EventKind kind = EventKind::Measurement;
    std::map<std::string, std::string> payload;
    std::int64_t timestamp = 0;
};

/// Throws std::invalid_argument when required payload keys are missing or
/// malformed (Reorder needs an integer quantity > 0, FarmRegistration
/// needs id and role).
void validate_event(const SupplyChainEvent& event);

struct PendingTransaction {
    Hash id{};
    std::vector<SupplyChainEvent> events;
    std::vector<std::string> required_signers;  // kept sorted
    int threshold = 1;
    std::map<std::string, Bytes> signatures;
};

Hash transaction_id(const std::vector<SupplyChainEvent>& events,
                    const std::vector<std::string>& sorted_required,
                    int threshold);

struct Block {
    std::uint64_t height = 0;
    Hash previous_hash{};
    Hash transactions_root{};
    std::int64_t timestamp = 0;
    std::vector<PendingTransaction> transactions;
};

Hash block_hash(const Block& block);
Hash transactions_root(const std::vector<PendingTransaction>& txs);

/// Signature seam. The default scheme simulates signing with a keyed hash
/// (sign = sha256(key || message)); a real asymmetric scheme can be
/// plugged in behind the same interface.
class SignatureScheme {
  public:
    virtual ~SignatureScheme() = default;
    virtual Bytes sign(const Bytes& key, const Bytes& message) const = 0;
    virtual bool verify(const Bytes& key, const Bytes& message,
                        const Bytes& signature) const = 0;
};

class KeyedHashScheme final : public SignatureScheme {
  public:
    Bytes sign(const Bytes& key, const Bytes& message) const override;
    bool verify(const Bytes& key, const Bytes& message,
                const Bytes& signature) const override;
};

const SignatureScheme& default_scheme();

struct VerifyReport {
    bool ok = true;
    std::int64_t bad_height = -1;  // -1 marks registry-level violations
    std::string reason = "ok";
};

/// Hash-linked chain plus the signer registry. Registrations are recorded
/// as FarmRegistration system events that travel with the chain file.
class LedgerChain {
  public:
    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<Stakeholder>& registry() const { return registry_; }
    const std::vector<SupplyChainEvent>& registration_events() const {
        return registration_events_;
    }
    const Stakeholder* find_signer(const std::string& id) const;

    /// Monitoring log: one line per recorded event, walk order.
    std::vector<std::string> monitor_log() const;

    std::size_t count_events(EventKind kind) const;

    // declared anchors carried by an imported file; empty for chains
    // built in process
    std::optional<Hash> declared_head;
    std::optional<Hash> declared_registry_root;

    friend LedgerChain register_signer(LedgerChain chain, Stakeholder signer,
                                       std::int64_t timestamp);
    friend LedgerChain seal_block(LedgerChain chain,
                                  std::vector<PendingTransaction> txs,
                                  std::int64_t timestamp,
                                  const SignatureScheme& scheme);
    friend LedgerChain import_chain(std::istream& in);

  private:
    std::vector<Block> blocks_;
    std::vector<Stakeholder> registry_;
    std::vector<SupplyChainEvent> registration_events_;
};

Hash registry_root(const LedgerChain& chain);
Hash head_hash(const LedgerChain& chain);  // zero hash for an empty chain

LedgerChain register_signer(LedgerChain chain, Stakeholder signer,
                            std::int64_t timestamp = 0);

/// Content-addressed proposal; never mutates the chain. All required
/// signers must already be registered and 1 <= threshold <= |required|.
PendingTransaction propose_transaction(const LedgerChain& chain,
                                       std::vector<SupplyChainEvent> events,
                                       const std::set<std::string>& required,
                                       int threshold);

PendingTransaction add_signature(PendingTransaction tx,
                                 const Stakeholder& signer,
                                 const SignatureScheme& scheme = default_scheme());

/// Signatures that are required, attributable to a registered signer, and
/// verify against the transaction's recomputed content hash.
int count_valid_signatures(const LedgerChain& chain,
                           const PendingTransaction& tx,
                           const SignatureScheme& scheme = default_scheme());

/// Appends one block containing the given transactions. Every transaction
/// must carry at least `threshold` valid signatures; the error message
/// names the first deficient transaction.
LedgerChain seal_block(LedgerChain chain, std::vector<PendingTransaction> txs,
                       std::int64_t timestamp,
                       const SignatureScheme& scheme = default_scheme());

/// Walks genesis to tip recomputing hashes, roots, and signatures, and
/// checks the declared anchors when present. Violations are report values.
VerifyReport verify_chain(const LedgerChain& chain,
                          const SignatureScheme& scheme = default_scheme());

/// JSONL: line 1 is a header object (format, version, head, registry,
/// registry_root), then one block object per line. Keys are sorted and
/// hashes are lowercase hex, so export is byte-reproducible.
void export_chain(const LedgerChain& chain, std::ostream& out);
LedgerChain import_chain(std::istream& in);  // throws on parse errors

struct ReorderParams {
    double safety_stock = 0.0;
    int horizon_periods = 1;
    std::int64_t timestamp = 0;
    forecast::SbaVariant variant = forecast::SbaVariant::paper;
};

/// Order-up-to contract: when on-hand inventory falls below
/// forecast * horizon + safety_stock, propose a Reorder event topping the
/// position back up (quantity = ceil(deficit)).
std::optional<SupplyChainEvent> evaluate_reorder_contract(
    double inventory_on_hand, const forecast::DemandForecastState& state,
    const ReorderParams& params);

}  // namespace chainfis::ledger
