#pragma once

// On-disk simulator state: a directory of small text files (zone files,
// TSV tables, the audit log) so the state is diffable.
//
//   settings.conf          key=value: default_root, dialing_context, access_codes, clock
//   roots.tsv              <root-id>\t<apex>\t<local|host:port>
//   bookmarks.tsv          <digits>\t<root-id>\t<iso-timestamp>
//   trees/<id>/tree.conf   key=value: apex, lifecycle, quarantine_days, enforce_auth
//   trees/<id>/tier0.tsv   <cc>\t<authorized 0|1>\t<tier1-provider|->
//   trees/<id>/tier1.tsv   zone\t<cc>\t<provider>  and  delegation\t<cc>\t<digits>\t<tier2-provider>
//   trees/<id>/providers.tsv  <provider>\t<mode>
//   trees/<id>/registrants.tsv
//   trees/<id>/custody.tsv
//   trees/<id>/zones/<provider>.zone
//   trees/<id>/oracle.tsv, verifiers, authorities, audit.log, disputes.tsv, archive.zone

#include "enumkit/registry.hpp"
#include "enumkit/resolver.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace enumkit {

struct RootState {
    std::string apex;
    std::optional<dns::Endpoint> remote;
    std::shared_ptr<TreeStore> tree; // null for remote roots
};

struct SimState {
    std::map<RootId, RootState> roots;
    RootId default_root = 1;
    std::vector<std::string> access_codes{"911", "411", "711"};
    std::optional<DialingContext> dialing_context;
    Timestamp clock = 0;
    BookmarkStore bookmarks;

    RootConfig root_config() const;
};

/// Relative path -> file contents.
using StateFiles = std::map<std::string, std::string>;

StateFiles render_tree(const TreeState& s);
TreeState parse_tree(const StateFiles& files, const std::string& prefix = "");

StateFiles render_state(const SimState& s);
SimState parse_state(const StateFiles& files);

/// IoError on filesystem failures, ConfigError on malformed files.
void save_state(const SimState& s, const std::filesystem::path& dir);
SimState load_state(const std::filesystem::path& dir);
StateFiles read_state_files(const std::filesystem::path& dir);

/// The sample deployment: root 1 (apex e164.foo) holds Joe's three-record
/// set for 112025551212 plus the ACME/BETA/CHARLIE actors; roots 36 and 46
/// each hold a conflicting record for the same number.
SimState sample_state();

/// Reference timestamp used by sample_state.
inline constexpr Timestamp kSampleEpoch = 1'700'000'000;

} // namespace enumkit
