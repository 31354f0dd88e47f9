#pragma once

#include <string>
#include <vector>

namespace clicases {

struct Case {
    std::string subcommand;
    std::vector<std::string> args;  // after the subcommand, without --out/--format
    std::string kind;               // JSON "kind" and schema file stem
    bool svg = false;
};

inline std::string fixture(const std::string& name) { return std::string(SOCKETLAB_FIXTURES) + "/" + name; }

// One invocation per subcommand, on the bundled fixtures.
inline std::vector<Case> all() {
    return {
        {"netparams", {"--in", fixture("dut.s2p")}, "netparams", true},
        {"isolation", {"--in", fixture("xtalk.s4p"), "--f-lo", "4e9", "--f-hi", "8e9"}, "isolation", true},
        {"dips", {"--in", fixture("dip.s2p"), "--f-lo", "1.2e9", "--f-hi", "2.4e9"}, "dips", true},
        {"tdr-extract", {"--in", fixture("tdr.csv")}, "tdr-profile", true},
        {"tdr-synth", {"--segments", "0.3e-9:50,0.2e-9:60,0.5e-9:50"}, "tdr-trace", true},
        {"resfit", {"--in", fixture("sweep.csv")}, "resfit", true},
        {"cavity", {}, "cavity", false},
        {"dc", {}, "dc", false},
        {"thermal", {}, "thermal", false},
        {"magnetics", {}, "magnetics", false},
        {"layout", {"--n", "10"}, "layout", false},
        {"compression", {}, "compression", false},
        {"yield", {"--trials", "20000"}, "yield", false},
        {"pulse", {"--in", fixture("dut.s2p")}, "pulse", true},
    };
}

}  // namespace clicases
