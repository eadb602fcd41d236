// Copyright 2026 The qtem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtem/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "commands.hpp"
#include "qtem/error.hpp"
#include "qtem/physcore.hpp"
#include "qtem/rng.hpp"
#include "qtem/version.hpp"

namespace qtem::cli {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void atomic_write(const std::string &path, std::string_view contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open '" + tmp.string() + "' for writing");
        f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot move output into place at '" + path + "'");
    }
}

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string manifest_text(const std::vector<std::string> &args, const CommandResult &result, std::uint64_t seed) {
    json m;
    m["command"] = result.command;
    m["argv"] = args;
    m["parameters"] = result.parameters;
    m["constants_version"] = std::string(physcore::constants().version);
    m["rng"] = {{"algorithm", physcore::kRngAlgorithm}, {"master_seed", seed}, {"stream_index", 0}};
    m["tool_version"] = kVersion;
    m["timestamp"] = iso_timestamp();
    return m.dump(2) + "\n";
}

/// argv without any --out value, for replay with a different destination.
std::vector<std::string> strip_out(const std::vector<std::string> &args) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out") {
            ++i;
            continue;
        }
        if (args[i].rfind("--out=", 0) == 0) continue;
        kept.push_back(args[i]);
    }
    return kept;
}

std::vector<std::string> replay_args(const std::string &manifest_path, const std::string &out_override) {
    std::ifstream f(manifest_path);
    if (!f) throw ValidationError("cannot read manifest '" + manifest_path + "'");
    json m;
    try {
        m = json::parse(f);
    } catch (const json::exception &e) {
        throw ValidationError("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
    }
    if (!m.contains("argv") || !m["argv"].is_array()) throw ValidationError("manifest has no argv array");
    auto args = m["argv"].get<std::vector<std::string>>();
    if (!args.empty() && args.front() == "replay") throw ValidationError("manifest records a replay");
    if (!out_override.empty()) {
        args = strip_out(args);
        args.push_back("--out");
        args.push_back(out_override);
    }
    return args;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"qtem: circuit quantization, cavity, electron-optics and qubit-assisted TEM toolkit", "qtem"};
    app.fallthrough();
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", std::string(kVersion));

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Master seed for sampled outputs")->capture_default_str();
    app.add_option("--out", g.out, "Write the result here (atomically) plus <out>.manifest.json");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--constants", g.constants, "'print' dumps the constant table")->check(CLI::IsMember({"print"}));

    std::string replay_manifest;
    auto *replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("manifest", replay_manifest, "Manifest JSON")->required();

    Registry registry = register_commands(app);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        std::ostringstream o, x;
        const int code = app.exit(e, o, x);
        out << o.str();
        err << x.str();
        return code == 0 ? kExitOk : kExitUser;
    }

    try {
        physcore::verify_constants();
        if (replay->parsed()) {
            return run_cli(replay_args(replay_manifest, g.out), out, err);
        }
        if (g.constants == "print") {
            const std::string text = physcore::constants_json() + "\n";
            if (g.out.empty()) {
                out << text;
            } else {
                atomic_write(g.out, text);
            }
            return kExitOk;
        }
        const auto subs = app.get_subcommands();
        if (subs.empty()) {
            err << app.help();
            return kExitUser;
        }
        const CommandResult result = registry.at(subs.front()->get_name())(g);
        if (g.out.empty()) {
            out << result.body;
        } else {
            atomic_write(g.out, result.body);
            atomic_write(g.out + ".manifest.json", manifest_text(args, result, g.seed));
        }
        return kExitOk;
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace qtem::cli
