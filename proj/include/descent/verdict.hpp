#pragma once

#include <optional>
#include <string>
#include <vector>

#include "descent/digraph.hpp"

namespace descent {

enum class Status { pass, fail, inconclusive };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        default: return "inconclusive";
    }
}

// Structured counterexample carried by a failing verdict; enough data for a
// caller to re-check the violation directly.
struct Witness {
    std::string what;
    std::vector<VertexId> vertices;
    std::string detail;
};

// A pass is always depth-qualified: it means "not refuted up to
// depth_checked", never more.
struct Verdict {
    Status status = Status::inconclusive;
    int depth_checked = 0;
    std::optional<Witness> witness;
    std::string note;

    static Verdict passed(int depth, std::string note = "") {
        return {Status::pass, depth, std::nullopt, std::move(note)};
    }
    static Verdict failed(int depth, Witness w, std::string note = "") {
        return {Status::fail, depth, std::move(w), std::move(note)};
    }
    static Verdict undecided(int depth, std::string note = "") {
        return {Status::inconclusive, depth, std::nullopt, std::move(note)};
    }
};

// Stabilization report: t_sequence lists, per level 1..D-1, the common size
// of the level-1 ancestor set of that level's vertices.
struct KReport {
    int k = 0;
    std::vector<int> t_sequence;
    int stable_from = 0;
};

struct KResult {
    Verdict verdict;
    std::optional<KReport> report;
    int k() const; // op_error when the computation failed
};

} // namespace descent
