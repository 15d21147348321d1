#include "chainfis/ledger.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace chainfis::ledger {

namespace {

using nlohmann::json;

const Hash kZeroHash{};

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

Bytes hash_to_bytes(const Hash& h) { return Bytes(h.begin(), h.end()); }

void append_event(CanonicalWriter& w, const SupplyChainEvent& event) {
    w.str(event_kind_name(event.kind));
    w.u32(static_cast<std::uint32_t>(event.payload.size()));
    for (const auto& [key, value] : event.payload) {  // std::map: sorted keys
        w.str(key);
        w.str(value);
    }
    w.i64(event.timestamp);
}

bool parse_positive_integer(const std::string& text, long long& value) {
    if (text.empty()) return false;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
    }
    try {
        value = std::stoll(text);
    } catch (const std::exception&) {
        return false;
    }
    return value > 0;
}

json event_to_json(const SupplyChainEvent& event) {
    json payload = json::object();
    for (const auto& [key, value] : event.payload) payload[key] = value;
    return json{{"kind", event_kind_name(event.kind)},
                {"payload", payload},
                {"timestamp", event.timestamp}};
}

SupplyChainEvent event_from_json(const json& j) {
    SupplyChainEvent event;
    event.kind = event_kind_from_name(j.at("kind").get<std::string>());
    event.timestamp = j.at("timestamp").get<std::int64_t>();
    for (const auto& [key, value] : j.at("payload").items()) {
        event.payload[key] = value.get<std::string>();
    }
    return event;
}

void check_event_order(const std::vector<SupplyChainEvent>& events) {
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].timestamp < events[i - 1].timestamp) {
            throw std::invalid_argument(
                "ledger: event timestamps must be non-decreasing");
        }
    }
}

}  // namespace

Hash sha256(const Bytes& bytes) {
    Hash out{};
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(),
               nullptr);
    return out;
}

std::string to_hex(const Bytes& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string hex;
    hex.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        hex.push_back(digits[b >> 4]);
        hex.push_back(digits[b & 0x0f]);
    }
    return hex;
}

std::string to_hex(const Hash& hash) {
    return to_hex(Bytes(hash.begin(), hash.end()));
}

Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) {
        throw std::invalid_argument("ledger: odd-length hex string");
    }
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = hex_nibble(hex[i]);
        const int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            throw std::invalid_argument("ledger: non-hex character");
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

void CanonicalWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        buffer_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void CanonicalWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        buffer_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void CanonicalWriter::i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }

void CanonicalWriter::str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buffer_.insert(buffer_.end(), s.begin(), s.end());
}

void CanonicalWriter::bytes(const Bytes& b) {
    u32(static_cast<std::uint32_t>(b.size()));
    buffer_.insert(buffer_.end(), b.begin(), b.end());
}

void CanonicalWriter::raw(const std::uint8_t* data, std::size_t len) {
    buffer_.insert(buffer_.end(), data, data + len);
}

const char* role_name(Role role) {
    switch (role) {
        case Role::supplier: return "supplier";
        case Role::producer: return "producer";
        case Role::distributor: return "distributor";
        case Role::retailer: return "retailer";
        case Role::auditor: return "auditor";
    }
    return "supplier";
}

Role role_from_name(const std::string& name) {
    for (Role r : {Role::supplier, Role::producer, Role::distributor,
                   Role::retailer, Role::auditor}) {
        if (name == role_name(r)) return r;
    }
    throw std::invalid_argument("ledger: unknown role " + name);
}

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::FarmRegistration: return "FarmRegistration";
        case EventKind::Hatch: return "Hatch";
        case EventKind::Measurement: return "Measurement";
        case EventKind::Processing: return "Processing";
        case EventKind::Distribution: return "Distribution";
        case EventKind::RetailDelivery: return "RetailDelivery";
        case EventKind::Reorder: return "Reorder";
    }
    return "Measurement";
}

EventKind event_kind_from_name(const std::string& name) {
    for (EventKind k :
         {EventKind::FarmRegistration, EventKind::Hatch, EventKind::Measurement,
          EventKind::Processing, EventKind::Distribution,
          EventKind::RetailDelivery, EventKind::Reorder}) {
        if (name == event_kind_name(k)) return k;
    }
    throw std::invalid_argument("ledger: unknown event kind " + name);
}

void validate_event(const SupplyChainEvent& event) {
    if (event.kind == EventKind::Reorder) {
        const auto it = event.payload.find("quantity");
        long long quantity = 0;
        if (it == event.payload.end() ||
            !parse_positive_integer(it->second, quantity)) {
            throw std::invalid_argument(
                "ledger: Reorder event requires integer quantity > 0");
        }
    }
    if (event.kind == EventKind::FarmRegistration) {
        if (!event.payload.contains("id") || !event.payload.contains("role")) {
            throw std::invalid_argument(
                "ledger: FarmRegistration event requires id and role");
        }
    }
}

Hash transaction_id(const std::vector<SupplyChainEvent>& events,
                    const std::vector<std::string>& sorted_required,
                    int threshold) {
    CanonicalWriter w;
    w.u32(static_cast<std::uint32_t>(events.size()));
    for (const SupplyChainEvent& event : events) append_event(w, event);
    w.u32(static_cast<std::uint32_t>(sorted_required.size()));
    for (const std::string& id : sorted_required) w.str(id);
    w.u32(static_cast<std::uint32_t>(threshold));
    return sha256(w.data());
}

Hash transactions_root(const std::vector<PendingTransaction>& txs) {
    CanonicalWriter w;
    w.u32(static_cast<std::uint32_t>(txs.size()));
    for (const PendingTransaction& tx : txs) {
        const Hash id =
            transaction_id(tx.events, tx.required_signers, tx.threshold);
        w.raw(id.data(), id.size());
    }
    return sha256(w.data());
}

Hash block_hash(const Block& block) {
    CanonicalWriter w;
    w.u64(block.height);
    w.raw(block.previous_hash.data(), block.previous_hash.size());
    w.raw(block.transactions_root.data(), block.transactions_root.size());
    w.i64(block.timestamp);
    return sha256(w.data());
}

Bytes KeyedHashScheme::sign(const Bytes& key, const Bytes& message) const {
    Bytes buf;
    buf.reserve(key.size() + message.size());
    buf.insert(buf.end(), key.begin(), key.end());
    buf.insert(buf.end(), message.begin(), message.end());
    return hash_to_bytes(sha256(buf));
}

bool KeyedHashScheme::verify(const Bytes& key, const Bytes& message,
                             const Bytes& signature) const {
    return sign(key, message) == signature;
}

const SignatureScheme& default_scheme() {
    static const KeyedHashScheme scheme;
    return scheme;
}

const Stakeholder* LedgerChain::find_signer(const std::string& id) const {
    for (const Stakeholder& s : registry_) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

std::vector<std::string> LedgerChain::monitor_log() const {
    auto describe = [](const SupplyChainEvent& event, const std::string& where) {
        std::ostringstream line;
        line << where << " " << event_kind_name(event.kind)
             << " t=" << event.timestamp;
        for (const auto& [key, value] : event.payload) {
            line << " " << key << "=" << value;
        }
        return line.str();
    };
    std::vector<std::string> log;
    for (const SupplyChainEvent& event : registration_events_) {
        log.push_back(describe(event, "registry"));
    }
    for (const Block& block : blocks_) {
        for (const PendingTransaction& tx : block.transactions) {
            for (const SupplyChainEvent& event : tx.events) {
                log.push_back(
                    describe(event, "block " + std::to_string(block.height)));
            }
        }
    }
    return log;
}

std::size_t LedgerChain::count_events(EventKind kind) const {
    std::size_t count = 0;
    for (const Block& block : blocks_) {
        for (const PendingTransaction& tx : block.transactions) {
            for (const SupplyChainEvent& event : tx.events) {
                if (event.kind == kind) ++count;
            }
        }
    }
    return count;
}

Hash registry_root(const LedgerChain& chain) {
    CanonicalWriter w;
    w.u32(static_cast<std::uint32_t>(chain.registration_events().size()));
    for (const SupplyChainEvent& event : chain.registration_events()) {
        append_event(w, event);
    }
    return sha256(w.data());
}

Hash head_hash(const LedgerChain& chain) {
    if (chain.blocks().empty()) return kZeroHash;
    return block_hash(chain.blocks().back());
}

LedgerChain register_signer(LedgerChain chain, Stakeholder signer,
                            std::int64_t timestamp) {
    if (signer.id.empty()) {
        throw std::invalid_argument("ledger: empty stakeholder id");
    }
    if (chain.find_signer(signer.id) != nullptr) {
        throw std::invalid_argument("ledger: duplicate stakeholder id " +
                                    signer.id);
    }
    SupplyChainEvent event;
    event.kind = EventKind::FarmRegistration;
    event.payload["id"] = signer.id;
    event.payload["role"] = role_name(signer.role);
    event.payload["key"] = to_hex(signer.key);
    event.timestamp = timestamp;
    chain.registration_events_.push_back(std::move(event));
    chain.registry_.push_back(std::move(signer));
    return chain;
}

PendingTransaction propose_transaction(const LedgerChain& chain,
                                       std::vector<SupplyChainEvent> events,
                                       const std::set<std::string>& required,
                                       int threshold) {
    if (events.empty()) {
        throw std::invalid_argument("ledger: transaction has no events");
    }
    for (const SupplyChainEvent& event : events) validate_event(event);
    check_event_order(events);
    if (required.empty()) {
        throw std::invalid_argument("ledger: empty required signer set");
    }
    if (threshold < 1 || threshold > static_cast<int>(required.size())) {
        throw std::invalid_argument("ledger: threshold outside [1, |signers|]");
    }
    for (const std::string& id : required) {
        if (chain.find_signer(id) == nullptr) {
            throw std::invalid_argument("ledger: unknown signer " + id);
        }
    }
    PendingTransaction tx;
    tx.events = std::move(events);
    tx.required_signers.assign(required.begin(), required.end());  // sorted
    tx.threshold = threshold;
    tx.id = transaction_id(tx.events, tx.required_signers, tx.threshold);
    return tx;
}

PendingTransaction add_signature(PendingTransaction tx,
                                 const Stakeholder& signer,
                                 const SignatureScheme& scheme) {
    const bool required =
        std::binary_search(tx.required_signers.begin(),
                           tx.required_signers.end(), signer.id);
    if (!required) {
        throw std::invalid_argument("ledger: " + signer.id +
                                    " is not a required signer");
    }
    if (tx.signatures.contains(signer.id)) {
        throw std::invalid_argument("ledger: " + signer.id + " already signed");
    }
    tx.signatures[signer.id] = scheme.sign(signer.key, hash_to_bytes(tx.id));
    return tx;
}

int count_valid_signatures(const LedgerChain& chain,
                           const PendingTransaction& tx,
                           const SignatureScheme& scheme) {
    const Hash id = transaction_id(tx.events, tx.required_signers, tx.threshold);
    const Bytes message = hash_to_bytes(id);
    int valid = 0;
    for (const auto& [signer_id, signature] : tx.signatures) {
        if (!std::binary_search(tx.required_signers.begin(),
                                tx.required_signers.end(), signer_id)) {
            continue;
        }
        const Stakeholder* signer = chain.find_signer(signer_id);
        if (signer == nullptr) continue;
        if (scheme.verify(signer->key, message, signature)) ++valid;
    }
    return valid;
}

LedgerChain seal_block(LedgerChain chain, std::vector<PendingTransaction> txs,
                       std::int64_t timestamp, const SignatureScheme& scheme) {
    if (txs.empty()) {
        throw std::invalid_argument("ledger: cannot seal an empty block");
    }
    std::vector<SupplyChainEvent> all_events;
    for (const PendingTransaction& tx : txs) {
        const int valid = count_valid_signatures(chain, tx, scheme);
        if (valid < tx.threshold) {
            throw std::runtime_error(
                "ledger: transaction " + to_hex(tx.id) + " has " +
                std::to_string(valid) + " of " + std::to_string(tx.threshold) +
                " required signatures");
        }
        for (const SupplyChainEvent& event : tx.events) {
            validate_event(event);
            all_events.push_back(event);
        }
    }
    check_event_order(all_events);

    Block block;
    block.height = chain.blocks_.size();
    block.previous_hash = head_hash(chain);
    block.transactions_root = transactions_root(txs);
    block.timestamp = timestamp;
    block.transactions = std::move(txs);
    chain.blocks_.push_back(std::move(block));
    return chain;
}

VerifyReport verify_chain(const LedgerChain& chain,
                          const SignatureScheme& scheme) {
    auto violation = [](std::int64_t height, const std::string& reason) {
        return VerifyReport{false, height, reason};
    };

    if (chain.declared_registry_root &&
        *chain.declared_registry_root != registry_root(chain)) {
        return violation(-1, "registry_root mismatch");
    }

    Hash expected_previous = kZeroHash;
    for (std::size_t i = 0; i < chain.blocks().size(); ++i) {
        const Block& block = chain.blocks()[i];
        const auto height = static_cast<std::int64_t>(i);
        if (block.height != i) {
            return violation(height, "height mismatch");
        }
        if (block.previous_hash != expected_previous) {
            return violation(height, "previous_hash mismatch");
        }
        if (block.transactions_root != transactions_root(block.transactions)) {
            return violation(height, "transactions_root mismatch");
        }
        for (const PendingTransaction& tx : block.transactions) {
            if (tx.threshold < 1 ||
                tx.threshold > static_cast<int>(tx.required_signers.size())) {
                return violation(height, "invalid threshold");
            }
            const Bytes message = hash_to_bytes(transaction_id(
                tx.events, tx.required_signers, tx.threshold));
            int valid = 0;
            for (const auto& [signer_id, signature] : tx.signatures) {
                if (!std::binary_search(tx.required_signers.begin(),
                                        tx.required_signers.end(), signer_id)) {
                    return violation(height, "unexpected signer " + signer_id);
                }
                const Stakeholder* signer = chain.find_signer(signer_id);
                if (signer == nullptr) {
                    return violation(height, "unknown signer " + signer_id);
                }
                if (!scheme.verify(signer->key, message, signature)) {
                    return violation(height, "invalid signature by " + signer_id);
                }
                ++valid;
            }
            if (valid < tx.threshold) {
                return violation(height, "signature threshold not met");
            }
            for (const SupplyChainEvent& event : tx.events) {
                try {
                    validate_event(event);
                } catch (const std::exception& e) {
                    return violation(height, std::string("malformed event: ") +
                                                 e.what());
                }
            }
        }
        expected_previous = block_hash(block);
    }

    if (chain.declared_head && *chain.declared_head != head_hash(chain)) {
        const auto tip = chain.blocks().empty()
                             ? std::int64_t{-1}
                             : static_cast<std::int64_t>(
                                   chain.blocks().size() - 1);
        return violation(tip, "head mismatch");
    }
    return VerifyReport{};
}

void export_chain(const LedgerChain& chain, std::ostream& out) {
    json registry = json::array();
    for (const SupplyChainEvent& event : chain.registration_events()) {
        registry.push_back(event_to_json(event));
    }
    const json header{{"format", "chainfis-chain"},
                      {"head", to_hex(head_hash(chain))},
                      {"registry", registry},
                      {"registry_root", to_hex(registry_root(chain))},
                      {"version", 1}};
    out << header.dump() << "\n";

    for (const Block& block : chain.blocks()) {
        json txs = json::array();
        for (const PendingTransaction& tx : block.transactions) {
            json events = json::array();
            for (const SupplyChainEvent& event : tx.events) {
                events.push_back(event_to_json(event));
            }
            json signatures = json::object();
            for (const auto& [id, sig] : tx.signatures) {
                signatures[id] = to_hex(sig);
            }
            txs.push_back(json{{"events", events},
                               {"required", tx.required_signers},
                               {"signatures", signatures},
                               {"threshold", tx.threshold}});
        }
        const json line{{"height", block.height},
                        {"previous_hash", to_hex(block.previous_hash)},
                        {"timestamp", block.timestamp},
                        {"transactions", txs},
                        {"transactions_root", to_hex(block.transactions_root)}};
        out << line.dump() << "\n";
    }
}

LedgerChain import_chain(std::istream& in) {
    auto parse_hash = [](const std::string& hex) {
        const Bytes raw = from_hex(hex);
        if (raw.size() != 32) {
            throw std::invalid_argument("ledger: hash must be 32 bytes");
        }
        Hash h{};
        std::copy(raw.begin(), raw.end(), h.begin());
        return h;
    };

    LedgerChain chain;
    std::string line;
    std::size_t line_number = 0;
    bool have_header = false;
    try {
        while (std::getline(in, line)) {
            ++line_number;
            if (line.empty()) continue;
            const json j = json::parse(line);
            if (!have_header) {
                if (j.at("format").get<std::string>() != "chainfis-chain") {
                    throw std::invalid_argument("ledger: bad format marker");
                }
                if (j.at("version").get<int>() != 1) {
                    throw std::invalid_argument("ledger: unsupported version");
                }
                for (const json& entry : j.at("registry")) {
                    const SupplyChainEvent event = event_from_json(entry);
                    Stakeholder signer;
                    signer.id = event.payload.at("id");
                    signer.role = role_from_name(event.payload.at("role"));
                    signer.key = from_hex(event.payload.at("key"));
                    chain.registration_events_.push_back(event);
                    chain.registry_.push_back(std::move(signer));
                }
                chain.declared_head = parse_hash(j.at("head").get<std::string>());
                chain.declared_registry_root =
                    parse_hash(j.at("registry_root").get<std::string>());
                have_header = true;
                continue;
            }
            Block block;
            block.height = j.at("height").get<std::uint64_t>();
            block.previous_hash =
                parse_hash(j.at("previous_hash").get<std::string>());
            block.transactions_root =
                parse_hash(j.at("transactions_root").get<std::string>());
            block.timestamp = j.at("timestamp").get<std::int64_t>();
            for (const json& tj : j.at("transactions")) {
                PendingTransaction tx;
                for (const json& ej : tj.at("events")) {
                    tx.events.push_back(event_from_json(ej));
                }
                tx.required_signers =
                    tj.at("required").get<std::vector<std::string>>();
                std::sort(tx.required_signers.begin(),
                          tx.required_signers.end());
                tx.threshold = tj.at("threshold").get<int>();
                for (const auto& [id, sig] : tj.at("signatures").items()) {
                    tx.signatures[id] = from_hex(sig.get<std::string>());
                }
                tx.id = transaction_id(tx.events, tx.required_signers,
                                       tx.threshold);
                block.transactions.push_back(std::move(tx));
            }
            chain.blocks_.push_back(std::move(block));
        }
    } catch (const std::exception& e) {
        throw std::runtime_error("chain parse error at line " +
                                 std::to_string(line_number) + ": " + e.what());
    }
    if (!have_header) {
        throw std::runtime_error("chain parse error at line 1: missing header");
    }
    return chain;
}

std::optional<SupplyChainEvent> evaluate_reorder_contract(
    double inventory_on_hand, const forecast::DemandForecastState& state,
    const ReorderParams& params) {
    if (params.safety_stock < 0.0 || params.horizon_periods < 0) {
        throw std::invalid_argument("ledger: reorder params must be non-negative");
    }
    const double rate = forecast::sba_forecast(state, params.variant);
    const double target =
        rate * static_cast<double>(params.horizon_periods) + params.safety_stock;
    if (!(inventory_on_hand < target)) {
        return std::nullopt;
    }
    const auto quantity =
        static_cast<long long>(std::ceil(target - inventory_on_hand));
    if (quantity <= 0) {
        return std::nullopt;
    }
    SupplyChainEvent event;
    event.kind = EventKind::Reorder;
    event.payload["quantity"] = std::to_string(quantity);
    event.timestamp = params.timestamp;
    return event;
}

}  // namespace chainfis::ledger
