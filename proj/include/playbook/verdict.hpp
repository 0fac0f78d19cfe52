#pragma once

#include <string>
#include <vector>

#include "playbook/common.hpp"
#include "playbook/tools.hpp"

namespace playbook {

enum class ChecklistDimension { truthfulness, deliverable, data_fidelity };
enum class VerifyMethod { trajectory_reference, active_verification };

std::string dimension_name(ChecklistDimension d);
ChecklistDimension dimension_from_string(const std::string& name);
std::string method_name(VerifyMethod m);
VerifyMethod method_from_string(const std::string& name);

struct ChecklistItem {
    ChecklistDimension dimension = ChecklistDimension::truthfulness;
    std::string description;
    VerifyMethod method = VerifyMethod::trajectory_reference;

    Json to_json() const;
    static ChecklistItem from_json(const Json& j);
};

struct Checklist {
    std::vector<ChecklistItem> items;
    bool degraded = false;  // fallback checklist after a schema failure

    Json to_json() const;
    static Checklist from_json(const Json& j);
};

// A verification action the reflector issued itself during evaluation.
struct VerificationCall {
    int checklist_item = 0;  // 1-based
    Action action;
    Observation observation;

    Json to_json() const;
    static VerificationCall from_json(const Json& j);
};

struct VerdictItem {
    int item = 0;  // 1-based index into the checklist
    bool passed = false;
    int evidence_step = 0;   // trajectory step cited (trajectory_reference items)
    int evidence_check = 0;  // verification call cited (active_verification items)
    std::string note;

    Json to_json() const;
    static VerdictItem from_json(const Json& j);
};

enum class VerdictFlag { success, failure };

std::string flag_name(VerdictFlag f);
VerdictFlag flag_from_string(const std::string& name);

struct FailureReport {
    std::vector<std::string> causes;
    std::vector<std::string> suggested_remediations;
    std::vector<int> evidence_steps;

    std::string render() const;
    Json to_json() const;
    static FailureReport from_json(const Json& j);
};

struct Verdict {
    VerdictFlag flag = VerdictFlag::failure;
    std::vector<VerdictItem> items;
    std::vector<VerificationCall> checks;
    bool retry_granted = false;
    bool degraded = false;  // budget overruns or other conservative downgrades

    Json to_json() const;
    static Verdict from_json(const Json& j);
};

}  // namespace playbook
