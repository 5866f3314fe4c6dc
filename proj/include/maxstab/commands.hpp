#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "maxstab/io.hpp"

namespace maxstab {

// Resolved run context: parsed config document, provenance (hash of the raw
// config bytes + resolved seed) and the output directory. Thread count is
// applied by the caller before dispatch.
struct RunContext {
    json config;
    Provenance prov;
    std::filesystem::path out_dir;

    std::uint64_t seed() const { return prov.seed; }

    // The command's config block; throws ConfigError when absent.
    const json& block(const std::string& command) const;
};

int cmd_transform(const RunContext& ctx);
int cmd_fit(const RunContext& ctx);
int cmd_select(const RunContext& ctx);
int cmd_check(const RunContext& ctx);
int cmd_risk(const RunContext& ctx);
int cmd_synth(const RunContext& ctx);

// Dispatch by subcommand name; returns the process exit code.
int run_command(const std::string& command, const RunContext& ctx);

}  // namespace maxstab
