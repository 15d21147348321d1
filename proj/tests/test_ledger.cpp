#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chainfis/ledger.hpp"

using namespace chainfis;

namespace {

ledger::Stakeholder make_signer(const std::string& id, ledger::Role role) {
    ledger::Stakeholder s;
    s.id = id;
    s.role = role;
    s.key.assign(id.begin(), id.end());
    s.key.push_back(0x7f);
    return s;
}

ledger::SupplyChainEvent measurement(std::int64_t t, const std::string& note) {
    ledger::SupplyChainEvent e;
    e.kind = ledger::EventKind::Measurement;
    e.payload["period"] = std::to_string(t);
    e.payload["note"] = note;
    e.timestamp = t;
    return e;
}

ledger::SupplyChainEvent reorder(std::int64_t t, long long quantity) {
    ledger::SupplyChainEvent e;
    e.kind = ledger::EventKind::Reorder;
    e.payload["quantity"] = std::to_string(quantity);
    e.timestamp = t;
    return e;
}

// three-block chain with exactly-k signatures, the shared fixture for the
// tamper tests
ledger::LedgerChain reference_chain() {
    ledger::LedgerChain chain;
    chain = ledger::register_signer(chain, make_signer("farm", ledger::Role::producer), 1);
    chain = ledger::register_signer(chain, make_signer("dist", ledger::Role::distributor), 2);
    chain = ledger::register_signer(chain, make_signer("shop", ledger::Role::retailer), 3);

    const std::set<std::string> everyone = {"farm", "dist", "shop"};
    std::int64_t t = 100;
    for (int b = 0; b < 3; ++b) {
        auto tx = ledger::propose_transaction(
            chain, {measurement(t, "stock check"), reorder(t + 1, 6 + b)},
            everyone, 2);
        tx = ledger::add_signature(tx, *chain.find_signer("farm"));
        tx = ledger::add_signature(tx, *chain.find_signer("shop"));
        chain = ledger::seal_block(chain, {tx}, t + 2);
        t += 10;
    }
    return chain;
}

std::string export_to_string(const ledger::LedgerChain& chain) {
    std::ostringstream out;
    ledger::export_chain(chain, out);
    return out.str();
}

ledger::LedgerChain import_from_string(const std::string& text) {
    std::istringstream in(text);
    return ledger::import_chain(in);
}

}  // namespace

TEST_CASE("sha256 matches the published test vector") {
    const ledger::Bytes abc = {'a', 'b', 'c'};
    CHECK(ledger::to_hex(ledger::sha256(abc)) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(ledger::from_hex("00ff10") == ledger::Bytes{0x00, 0xff, 0x10});
    CHECK_THROWS_AS(ledger::from_hex("0g"), std::invalid_argument);
    CHECK_THROWS_AS(ledger::from_hex("abc"), std::invalid_argument);
}

TEST_CASE("signer registration") {
    ledger::LedgerChain chain;
    chain = ledger::register_signer(chain, make_signer("a", ledger::Role::supplier));
    chain = ledger::register_signer(chain, make_signer("b", ledger::Role::producer));
    chain = ledger::register_signer(chain, make_signer("c", ledger::Role::auditor));
    CHECK(chain.registry().size() == 3);
    CHECK(chain.find_signer("b") != nullptr);
    CHECK(chain.find_signer("zz") == nullptr);

    CHECK_THROWS_AS(
        ledger::register_signer(chain, make_signer("a", ledger::Role::retailer)),
        std::invalid_argument);
}

TEST_CASE("chain export/import round-trips byte-identically") {
    const ledger::LedgerChain chain = reference_chain();
    const std::string first = export_to_string(chain);
    const ledger::LedgerChain loaded = import_from_string(first);
    CHECK(export_to_string(loaded) == first);

    CHECK(loaded.registry().size() == chain.registry().size());
    for (std::size_t i = 0; i < chain.registry().size(); ++i) {
        CHECK(loaded.registry()[i].id == chain.registry()[i].id);
        CHECK(loaded.registry()[i].key == chain.registry()[i].key);
    }
    CHECK(ledger::verify_chain(loaded).ok);
}

TEST_CASE("propose_transaction validates its inputs") {
    ledger::LedgerChain chain = reference_chain();
    const std::set<std::string> everyone = {"farm", "dist", "shop"};

    const auto tx = ledger::propose_transaction(chain, {measurement(1, "x")},
                                                everyone, 2);
    CHECK(tx.signatures.empty());
    CHECK(tx.threshold == 2);
    CHECK(tx.required_signers.size() == 3);

    SUBCASE("reorder with zero quantity is malformed") {
        ledger::SupplyChainEvent bad = reorder(1, 1);
        bad.payload["quantity"] = "0";
        CHECK_THROWS_AS(ledger::propose_transaction(chain, {bad}, everyone, 2),
                        std::invalid_argument);
    }
    SUBCASE("unknown signers are rejected") {
        CHECK_THROWS_AS(ledger::propose_transaction(chain, {measurement(1, "x")},
                                                    {"farm", "ghost"}, 1),
                        std::invalid_argument);
    }
    SUBCASE("threshold must be within [1, |signers|]") {
        CHECK_THROWS_AS(
            ledger::propose_transaction(chain, {measurement(1, "x")}, everyone, 0),
            std::invalid_argument);
        CHECK_THROWS_AS(
            ledger::propose_transaction(chain, {measurement(1, "x")}, everyone, 4),
            std::invalid_argument);
    }
    SUBCASE("content addressing is deterministic") {
        const auto again = ledger::propose_transaction(
            chain, {measurement(1, "x")}, everyone, 2);
        CHECK(again.id == tx.id);
        const auto different = ledger::propose_transaction(
            chain, {measurement(1, "y")}, everyone, 2);
        CHECK(different.id != tx.id);
    }
}

TEST_CASE("signing rules") {
    ledger::LedgerChain chain = reference_chain();
    auto tx = ledger::propose_transaction(chain, {measurement(5, "x")},
                                          {"farm", "dist"}, 2);
    tx = ledger::add_signature(tx, *chain.find_signer("farm"));
    CHECK(tx.signatures.size() == 1);
    CHECK(ledger::count_valid_signatures(chain, tx) == 1);

    SUBCASE("outsiders cannot sign") {
        CHECK_THROWS_AS(ledger::add_signature(tx, *chain.find_signer("shop")),
                        std::invalid_argument);
    }
    SUBCASE("double signing is rejected") {
        CHECK_THROWS_AS(ledger::add_signature(tx, *chain.find_signer("farm")),
                        std::invalid_argument);
    }
    SUBCASE("payload tampering invalidates previous signatures") {
        tx = ledger::add_signature(tx, *chain.find_signer("dist"));
        CHECK(ledger::count_valid_signatures(chain, tx) == 2);
        tx.events[0].payload["note"] = "doctored";
        CHECK(ledger::count_valid_signatures(chain, tx) == 0);
    }
}

TEST_CASE("sealing enforces the signature threshold") {
    ledger::LedgerChain chain = reference_chain();
    const std::set<std::string> everyone = {"farm", "dist", "shop"};
    auto tx = ledger::propose_transaction(chain, {measurement(500, "late")},
                                          everyone, 2);
    tx = ledger::add_signature(tx, *chain.find_signer("farm"));
    CHECK_THROWS_AS(ledger::seal_block(chain, {tx}, 501), std::runtime_error);

    tx = ledger::add_signature(tx, *chain.find_signer("dist"));
    const auto sealed = ledger::seal_block(chain, {tx}, 501);
    CHECK(sealed.blocks().size() == chain.blocks().size() + 1);
    CHECK(sealed.blocks().back().height == chain.blocks().size());
    CHECK(ledger::verify_chain(sealed).ok);
}

TEST_CASE("exhaustive k-of-n sealing for n up to 5") {
    for (int n = 1; n <= 5; ++n) {
        ledger::LedgerChain chain;
        std::set<std::string> ids;
        for (int i = 0; i < n; ++i) {
            const std::string id = "signer" + std::to_string(i);
            chain = ledger::register_signer(
                chain, make_signer(id, ledger::Role::auditor));
            ids.insert(id);
        }
        for (int k = 1; k <= n; ++k) {
            for (int sig = 0; sig <= n; ++sig) {
                auto tx = ledger::propose_transaction(
                    chain, {measurement(k * 100 + sig, "probe")}, ids, k);
                for (int s = 0; s < sig; ++s) {
                    tx = ledger::add_signature(
                        tx, *chain.find_signer("signer" + std::to_string(s)));
                }
                if (sig >= k) {
                    const auto sealed = ledger::seal_block(chain, {tx}, 7);
                    CHECK(ledger::verify_chain(sealed).ok);
                } else {
                    CHECK_THROWS_AS(ledger::seal_block(chain, {tx}, 7),
                                    std::runtime_error);
                }
            }
        }
    }
}

TEST_CASE("sealing leaves existing block lines untouched") {
    ledger::LedgerChain chain = reference_chain();
    std::istringstream before(export_to_string(chain));
    std::vector<std::string> before_lines;
    for (std::string line; std::getline(before, line);) {
        before_lines.push_back(line);
    }

    auto tx = ledger::propose_transaction(chain, {measurement(999, "more")},
                                          {"farm", "shop"}, 1);
    tx = ledger::add_signature(tx, *chain.find_signer("farm"));
    chain = ledger::seal_block(chain, {tx}, 1000);

    std::istringstream after(export_to_string(chain));
    std::vector<std::string> after_lines;
    for (std::string line; std::getline(after, line);) {
        after_lines.push_back(line);
    }
    REQUIRE(after_lines.size() == before_lines.size() + 1);
    // line 0 is the header whose head anchor moves; block lines must not
    for (std::size_t i = 1; i < before_lines.size(); ++i) {
        CHECK(after_lines[i] == before_lines[i]);
    }
}

TEST_CASE("verification reports the first tampered height") {
    const ledger::LedgerChain chain = reference_chain();
    const std::string text = export_to_string(chain);
    REQUIRE(ledger::verify_chain(chain).ok);

    SUBCASE("payload byte flip in the block at height 2") {
        // quantity 8 lives only in the third block's reorder event
        std::string tampered = text;
        const auto pos = tampered.find("\"quantity\":\"8\"");
        REQUIRE(pos != std::string::npos);
        tampered.replace(pos, 14, "\"quantity\":\"9\"");
        const auto report = ledger::verify_chain(import_from_string(tampered));
        CHECK(!report.ok);
        CHECK(report.bad_height == 2);
        CHECK(report.reason == "transactions_root mismatch");
    }
    SUBCASE("payload byte flip in the block at height 1") {
        std::string tampered = text;
        const auto pos = tampered.find("\"quantity\":\"7\"");
        REQUIRE(pos != std::string::npos);
        tampered.replace(pos, 14, "\"quantity\":\"7000\"");
        const auto report = ledger::verify_chain(import_from_string(tampered));
        CHECK(!report.ok);
        CHECK(report.bad_height == 1);
        CHECK(report.reason == "transactions_root mismatch");
    }
    SUBCASE("removing a signature record breaks the threshold") {
        std::istringstream in(text);
        std::string line;
        std::vector<std::string> lines;
        while (std::getline(in, line)) lines.push_back(line);
        // strip the farm signature from the height-1 block line
        std::string& target = lines[2];
        const auto sig_pos = target.find("\"signatures\":{\"farm\":\"");
        REQUIRE(sig_pos != std::string::npos);
        const auto value_end = target.find('"', sig_pos + 22);
        REQUIRE(value_end != std::string::npos);
        target.erase(sig_pos + 14, value_end - (sig_pos + 14) + 2);
        std::string tampered;
        for (const std::string& l : lines) tampered += l + "\n";
        const auto report = ledger::verify_chain(import_from_string(tampered));
        CHECK(!report.ok);
        CHECK(report.bad_height == 1);
        CHECK(report.reason == "signature threshold not met");
    }
    SUBCASE("registry tampering is caught by the registry root") {
        std::string tampered = text;
        const std::string needle = "\"role\":\"distributor\"";
        const auto pos = tampered.find(needle);
        REQUIRE(pos != std::string::npos);
        tampered.replace(pos, needle.size(), "\"role\":\"auditor\"");
        const auto report = ledger::verify_chain(import_from_string(tampered));
        CHECK(!report.ok);
        CHECK(report.bad_height == -1);
        CHECK(report.reason == "registry_root mismatch");
    }
}

TEST_CASE("reorder contract") {
    forecast::DemandForecastState state;
    state.alpha = 0.0;
    state.initialized = true;

    SUBCASE("ample inventory proposes nothing") {
        state.size_estimate = 1.0;
        state.interval_estimate = 1.0;
        ledger::ReorderParams params;
        params.safety_stock = 10.0;
        params.horizon_periods = 5;
        CHECK(!ledger::evaluate_reorder_contract(100.0, state, params));
    }
    SUBCASE("deficit is topped up with a ceiling") {
        state.size_estimate = 2.0;
        state.interval_estimate = 1.0;
        ledger::ReorderParams params;
        params.safety_stock = 1.0;
        params.horizon_periods = 5;
        const auto event = ledger::evaluate_reorder_contract(0.0, state, params);
        REQUIRE(event.has_value());
        CHECK(event->kind == ledger::EventKind::Reorder);
        CHECK(event->payload.at("quantity") == "11");
    }
    SUBCASE("raising inventory never raises the proposed quantity") {
        state.size_estimate = 3.0;
        state.interval_estimate = 1.5;
        ledger::ReorderParams params;
        params.safety_stock = 4.0;
        params.horizon_periods = 7;
        long long previous = 1'000'000;
        for (double inventory = 0.0; inventory <= 30.0; inventory += 0.7) {
            const auto event =
                ledger::evaluate_reorder_contract(inventory, state, params);
            const long long quantity =
                event ? std::stoll(event->payload.at("quantity")) : 0;
            CHECK(quantity <= previous);
            if (quantity > 0) previous = quantity;
        }
    }
    SUBCASE("sba domain errors propagate") {
        state.alpha = 0.1;
        state.interval_estimate = 0.05;
        CHECK_THROWS_AS(
            ledger::evaluate_reorder_contract(0.0, state, ledger::ReorderParams{}),
            std::domain_error);
    }
    SUBCASE("negative parameters are rejected") {
        ledger::ReorderParams params;
        params.safety_stock = -1.0;
        CHECK_THROWS_AS(ledger::evaluate_reorder_contract(0.0, state, params),
                        std::invalid_argument);
    }
}

TEST_CASE("monitor log walks registry and blocks in order") {
    const ledger::LedgerChain chain = reference_chain();
    const auto log = chain.monitor_log();
    REQUIRE(log.size() == 3 + 6);  // 3 registrations + 2 events per block
    CHECK(log[0].find("registry FarmRegistration") == 0);
    CHECK(log[3].find("block 0 Measurement") == 0);
    CHECK(log[4].find("block 0 Reorder") == 0);
    CHECK(chain.count_events(ledger::EventKind::Reorder) == 3);
}
